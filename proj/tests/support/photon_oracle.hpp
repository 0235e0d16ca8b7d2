#pragma once

#include <array>
#include <random>
#include <vector>

#include "qkdpp/channel_bb84.hpp"
#include "qkdpp/channel_mdi.hpp"
#include "qkdpp/types.hpp"

// Independent Monte-Carlo photon-statistics oracle: Poisson photon numbers
// routed through the interferometer as Fock states, threshold detectors with
// dark counts. It shares no code with the library's closed-form channel
// model, so agreement between the two cross-validates both; Fock
// conditioning also yields exact per-round single-photon tags for the
// decoy-bound validity checks.

namespace oracle {

// Click-pattern distribution of the four-detector measurement node,
// conditional on Alice sending nA photons and Bob nB. Patterns are bitmasks
// over detectors {0..3}: {0,1} arm 1 (h, v), {2,3} arm 2 (h, v).
class MdiFock {
public:
    MdiFock(const qkdpp::ChannelParams& params, int max_photons = 10);

    // i, j in {1, 2}; x_basis_* selects theta = pi/4.
    const std::array<double, 16>& pattern_dist(int n_a, int n_b, int i, int j, bool x_a,
                                               bool x_b) const;

    static bool is_success(unsigned pattern);
    static bool is_psi_plus(unsigned pattern);  // same-arm orthogonal clicks

    int max_photons() const { return max_photons_; }

    // X-basis single-photon error probability conditional on success,
    // averaged over the polarization settings: the oracle's ground truth for
    // the phase-error rate of (1,1) Z successes.
    double phase_error_given_success() const;
    double success_prob_11(bool x_basis) const;  // averaged over bits

private:
    int max_photons_;
    // [basis pair][i-1][j-1][nA][nB] -> 16 pattern probabilities
    std::vector<std::array<double, 16>> table_;
    std::size_t index(int n_a, int n_b, int i, int j, bool x_a, bool x_b) const;
};

struct MdiOracleTruth {
    // observables handed to the estimator
    qkdpp::MdiObservables obs;
    double rounds = 0.0;
    // exact tagged quantities
    double s11x = 0.0;   // (1,1) successes in the X sets
    double e11x = 0.0;   // errors among them
    double n11z = 0.0;   // (1,1) members of the Z' sample
    double e11z = 0.0;   // virtual phase errors among them
    double n11z_sent = 0.0, n11x_sent = 0.0;  // (1,1) basis coincidences
};

// Simulates one session of N rounds and the M-subset selection.
MdiOracleTruth mdi_oracle_run(const MdiFock& fock, const qkdpp::ChannelParams& params,
                              const qkdpp::ProtocolInputs& inputs, std::size_t rounds,
                              std::size_t block_size, std::mt19937_64& rng);

// BB84 analogue with Bob's two-detector measurement.
class Bb84Fock {
public:
    Bb84Fock(const qkdpp::ChannelParams& params, int max_photons = 10);
    // pattern over Bob's 2 detectors, conditional on n photons prepared with
    // the given bit in basis theta_a and measured in basis theta_b.
    const std::array<double, 4>& pattern_dist(int n, int bit, bool x_a, bool x_b) const;
    double phase_error_given_click() const;  // n = 1, matched X bases

private:
    int max_photons_;
    std::vector<std::array<double, 4>> table_;
};

struct Bb84OracleTruth {
    qkdpp::Bb84Observables obs;
    double rounds = 0.0;
    double n1z = 0.0;  // single-photon members of Z'
    double e1z = 0.0;  // virtual phase errors among them
    double s1x = 0.0;  // single-photon X-basis coincidences (detected)
    double e1x = 0.0;
};

Bb84OracleTruth bb84_oracle_run(const Bb84Fock& fock, const qkdpp::ChannelParams& params,
                                const qkdpp::ProtocolInputs& inputs, std::size_t rounds,
                                std::size_t block_size, std::mt19937_64& rng);

}  // namespace oracle
