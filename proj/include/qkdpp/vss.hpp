#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "qkdpp/bitstring.hpp"
#include "qkdpp/types.hpp"

namespace qkdpp {

// Share-allocation settings of the conditional VSS scheme for one lab's CP
// units. sigma[i] lists the parties holding share i; every sigma has size
// `redundancy` and each party manages `shares_per_party` shares per dealer.
struct VssConfig {
    CorruptionModel model = CorruptionModel::AC;
    int t = 0;
    int n = 1;
    int q = 1;
    int redundancy = 1;
    int shares_per_party = 1;
    std::vector<std::vector<int>> sigma;

    bool member(int share, int party) const;
};

// Minimum-resource settings per corruption model. AN and PN require t >= 2
// (non-collaboration is only defined then); AC and PC accept t >= 0, with
// t = 0 the degenerate trusted case.
VssConfig make_vss_config(CorruptionModel model, int t);

// Formula-only resource row (n_c, R, r) for any t >= 0; no model gate, so
// tables can print all four rows side by side.
struct ResourceRow {
    long long n_c = 1;
    long long redundancy = 1;
    long long shares_per_party = 1;
};
ResourceRow resource_row(CorruptionModel model, int t);

long long binomial_coefficient(int n, int k);

// q-out-of-q XOR split: first q-1 shares uniform, last one closes the XOR.
std::vector<BitString> split_shares(const BitString& m, int q, std::mt19937_64& rng);

}  // namespace qkdpp
