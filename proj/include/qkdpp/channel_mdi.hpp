#pragma once

#include <array>
#include <random>

#include "qkdpp/bitstring.hpp"
#include "qkdpp/types.hpp"

namespace qkdpp {

// Phase-averaged two-detector coincidence kernel: (1/2pi) int exp(x cos g) dg.
// Series below |x| = 10, adaptive quadrature beyond; both symmetric in x.
double i0_sym(double x);

// Four-detector click model of the measurement node. Detectors are indexed
// 0..3: {0,1} on arm 1 (h,v), {2,3} on arm 2 (h,v). A success is a click on
// exactly two orthogonal-polarization detectors: same arm -> psi+, cross arm
// -> psi-.
struct MdiOutcomeProbs {
    double same_arm[2] = {0, 0};   // (0,1), (2,3): psi+
    double cross_arm[2] = {0, 0};  // (0,3), (1,2): psi-
    double psi_plus() const { return same_arm[0] + same_arm[1]; }
    double psi_minus() const { return cross_arm[0] + cross_arm[1]; }
    double total() const { return psi_plus() + psi_minus(); }
};

// alpha_amp/beta_amp are field amplitudes (sqrt of intensity); theta in
// {0, pi/4} selects the basis; i, j in {1, 2} are the polarization settings.
MdiOutcomeProbs mdi_success_prob(double alpha_amp, double beta_amp, double theta_a, double theta_b,
                                 int i, int j, const ChannelParams& params);

inline constexpr int kNumDecoys = 3;  // X-basis intensities mu > nu > omega

struct MdiGains {
    double g_zz = 0.0;                                // both lambda, basis Z
    std::array<std::array<double, 3>, 3> g_xx{};      // [a][b], basis X both
    std::array<double, 3> g_zx{};                     // Alice Z, Bob X with b
    std::array<double, 3> g_xz{};                     // Alice X with a, Bob Z
    double e_zz = 0.0;
    std::array<std::array<double, 3>, 3> e_xx{};
};

MdiGains mdi_gain_and_error(const ChannelParams& params, const ProtocolInputs& inputs);

// Observed (or expected) per-pair quantities consumed by parameter
// estimation and the authentication-cost model. Counts are doubles so the
// expected-value mode can carry fractional means.
struct MdiObservables {
    double z_size = 0.0;
    std::array<std::array<double, 3>, 3> x_sizes{};
    std::array<std::array<double, 3>, 3> x_errors{};
    double len_intensity_msg = 0.0;  // |a^j restricted to successes|, in bits
    double len_ra_cx = 0.0;
    double len_ra_cz = 0.0;
};

MdiObservables mdi_expected_observables(const MdiGains& gains, const ProtocolInputs& inputs, double rounds);
MdiObservables mdi_sample_observables(const MdiGains& gains, const ProtocolInputs& inputs, double rounds,
                                      std::mt19937_64& rng);

// Per-round record for protocol simulations: intensity indices 0..3 =
// {lambda, mu, nu, omega}, Charles outcome 0 = fail, 1 = psi+, 2 = psi-.
struct MdiRounds {
    std::vector<std::uint8_t> a_int, b_int, outcome;
    BitString r_a, r_b;
};

MdiRounds mdi_sample_rounds(const ChannelParams& params, const ProtocolInputs& inputs,
                            std::size_t rounds, std::mt19937_64& rng);

}  // namespace qkdpp
