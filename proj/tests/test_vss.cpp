#include <doctest.h>

#include <random>
#include <set>

#include "qkdpp/vss.hpp"

using namespace qkdpp;

TEST_CASE("minimum-resource settings per model") {
    SUBCASE("AC t=1") {
        const VssConfig c = make_vss_config(CorruptionModel::AC, 1);
        CHECK(c.n == 4);
        CHECK(c.q == 4);
        CHECK(c.redundancy == 3);
        CHECK(c.shares_per_party == 3);
        // T_i lexicographic: {0},{1},{2},{3}; sigma_i = complement
        CHECK(c.sigma[0] == std::vector<int>{1, 2, 3});
        CHECK(c.sigma[3] == std::vector<int>{0, 1, 2});
        for (const auto& s : c.sigma) CHECK(static_cast<int>(s.size()) == c.redundancy);
    }
    SUBCASE("AC t=2 share structure") {
        const VssConfig c = make_vss_config(CorruptionModel::AC, 2);
        CHECK(c.n == 7);
        CHECK(c.q == 21);
        CHECK(c.redundancy == 5);
        CHECK(c.shares_per_party == 15);
        // every 2-subset misses exactly one share
        for (int a = 0; a < c.n; ++a)
            for (int b = a + 1; b < c.n; ++b) {
                int missed = 0;
                for (int i = 0; i < c.q; ++i)
                    if (!c.member(i, a) && !c.member(i, b)) ++missed;
                CHECK(missed == 1);
            }
    }
    SUBCASE("AN t=2") {
        const VssConfig c = make_vss_config(CorruptionModel::AN, 2);
        CHECK(c.n == 6);
        CHECK(c.q == 6);
        CHECK(c.redundancy == 5);
        CHECK(c.shares_per_party == 5);
    }
    SUBCASE("PN t=2") {
        const VssConfig c = make_vss_config(CorruptionModel::PN, 2);
        CHECK(c.n == 2);
        CHECK(c.q == 2);
        CHECK(c.redundancy == 1);
        CHECK(c.shares_per_party == 1);
    }
    SUBCASE("gates") {
        CHECK_THROWS_AS(make_vss_config(CorruptionModel::AN, 1), std::invalid_argument);
        CHECK_THROWS_AS(make_vss_config(CorruptionModel::PN, 0), std::invalid_argument);
        CHECK_THROWS_AS(make_vss_config(CorruptionModel::AC, -1), std::invalid_argument);
    }
}

TEST_CASE("resource table rows") {
    const ResourceRow ac3 = resource_row(CorruptionModel::AC, 3);
    CHECK(ac3.n_c == 10);
    CHECK(ac3.redundancy == 7);
    CHECK(ac3.shares_per_party == 84);
    const ResourceRow pc4 = resource_row(CorruptionModel::PC, 4);
    CHECK(pc4.n_c == 5);
    CHECK(pc4.redundancy == 1);
    CHECK(pc4.shares_per_party == 1);
    const ResourceRow an2 = resource_row(CorruptionModel::AN, 2);
    CHECK(an2.n_c == 6);
    CHECK(an2.redundancy == 5);
    CHECK(an2.shares_per_party == 5);
}

TEST_CASE("xor split reconstructs and single share is the message") {
    std::mt19937_64 rng(5);
    const BitString m = BitString::random(40, rng);
    CHECK(split_shares(m, 1, rng)[0] == m);
    for (const int q : {2, 3, 7}) {
        const auto shares = split_shares(m, q, rng);
        REQUIRE(static_cast<int>(shares.size()) == q);
        BitString acc(m.size());
        for (const auto& s : shares) acc ^= s;
        CHECK(acc == m);
    }
}

TEST_CASE("any q-1 shares are uniformly distributed") {
    // chi-square over the 16 values of a 4-bit share, q = 3, 1e5 trials
    std::mt19937_64 rng(7);
    const BitString m = BitString::from_bits("1011");
    const int trials = 100000;
    for (const int keep : {0, 1}) {
        std::array<int, 16> counts{};
        std::mt19937_64 local(7 + keep);
        for (int t = 0; t < trials; ++t) {
            const auto shares = split_shares(m, 3, local);
            std::uint32_t v = 0;
            for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(shares[keep].get(i)) << i;
            ++counts[v];
        }
        double chi2 = 0.0;
        const double expect = trials / 16.0;
        for (const int c : counts) chi2 += (c - expect) * (c - expect) / expect;
        CHECK(chi2 < 37.7);  // chi2(15 dof) at p = 0.001
    }
}

TEST_CASE("ac share-count lower bound: q < C(n,t) breaks a property structurally") {
    // Pigeonhole at t=1, n=4, q=3: privacy forces every party to miss a
    // share, so two parties must miss the same one, leaving that share with
    // at most 2 < 2t+1 holders. No allocation satisfies both properties.
    const int n = 4, t = 1;
    int allocations = 0;
    for (int mask0 = 1; mask0 < 16; ++mask0)
        for (int mask1 = 1; mask1 < 16; ++mask1)
            for (int mask2 = 1; mask2 < 16; ++mask2) {
                const int masks[3] = {mask0, mask1, mask2};
                bool privacy = true;  // every 1-subset misses >= 1 share
                for (int p = 0; p < n && privacy; ++p) {
                    bool misses = false;
                    for (const int mk : masks)
                        if (!(mk >> p & 1)) misses = true;
                    privacy = misses;
                }
                bool commitment = true;  // every sigma holds >= 2t+1 members
                for (const int mk : masks)
                    if (__builtin_popcount(static_cast<unsigned>(mk)) < 2 * t + 1) commitment = false;
                const bool both = privacy && commitment;
                CHECK_FALSE(both);
                ++allocations;
            }
    CHECK(allocations == 15 * 15 * 15);
}
