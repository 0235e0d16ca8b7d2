#pragma once

#include <array>
#include <random>

#include "qkdpp/bitstring.hpp"
#include "qkdpp/types.hpp"

namespace qkdpp {

struct Bb84Gains {
    std::array<double, 3> q_alpha{};   // detection probability per intensity
    std::array<double, 3> e_alpha{};   // matched-basis error rate per intensity
    std::array<double, 3> g_zz{};      // q_z^2 p_a Q^a
    std::array<double, 3> g_xx{};      // q_x^2 p_a Q^a
    double e_z = 0.0;                  // gain-weighted a-priori Z error rate
};

Bb84Gains bb84_gain_and_error(const ChannelParams& params, const ProtocolInputs& inputs);

struct Bb84Observables {
    std::array<double, 3> zp_sizes{};  // |Z'^a|, summing to M
    std::array<double, 3> x_sizes{};   // |X^a|
    std::array<double, 3> x_errors{};  // e_a
};

Bb84Observables bb84_expected_observables(const Bb84Gains& gains, const ProtocolInputs& inputs,
                                          double rounds, double block_size);
Bb84Observables bb84_sample_observables(const Bb84Gains& gains, const ProtocolInputs& inputs,
                                        double rounds, double block_size, std::mt19937_64& rng);

// Per-round record for protocol simulations: intensity index 0..2 =
// {mu, nu, omega}; basis 0 = Z, 1 = X; detected flags clicks.
struct Bb84Rounds {
    std::vector<std::uint8_t> a_int, basis_a, basis_b, detected;
    BitString r_a, r_b;
};

Bb84Rounds bb84_sample_rounds(const ChannelParams& params, const ProtocolInputs& inputs,
                              std::size_t rounds, std::mt19937_64& rng);

}  // namespace qkdpp
