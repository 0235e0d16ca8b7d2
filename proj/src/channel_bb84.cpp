#include "qkdpp/channel_bb84.hpp"

#include <cmath>

namespace qkdpp {

Bb84Gains bb84_gain_and_error(const ChannelParams& params, const ProtocolInputs& inputs) {
    Bb84Gains g;
    const double eta = params.eta_total();
    const double pd = params.p_d;
    const double qz = inputs.q_z, qx = inputs.q_x();
    const double ints[3] = {inputs.mu, inputs.nu, inputs.omega};
    const double pdec[3] = {inputs.p_mu, inputs.p_nu, inputs.p_omega};
    const double cd = std::cos(params.delta_mis), sd = std::sin(params.delta_mis);
    double ez_num = 0.0, ez_den = 0.0;
    for (int a = 0; a < 3; ++a) {
        const double mu_eff = eta * ints[a];
        const double q = 1.0 - (1.0 - pd) * (1.0 - pd) * std::exp(-mu_eff);
        const double h = 0.5 * (std::exp(-mu_eff * cd * cd) - std::exp(-mu_eff * sd * sd));
        const double qe = 0.5 * pd * pd + pd * (1.0 - pd) * (1.0 + h) +
                          (1.0 - pd) * (1.0 - pd) * (0.5 + h - 0.5 * std::exp(-mu_eff));
        g.q_alpha[a] = q;
        g.e_alpha[a] = q > 0.0 ? qe / q : 0.0;
        g.g_zz[a] = qz * qz * pdec[a] * q;
        g.g_xx[a] = qx * qx * pdec[a] * q;
        ez_num += g.e_alpha[a] * g.g_zz[a];
        ez_den += g.g_zz[a];
    }
    g.e_z = ez_den > 0.0 ? ez_num / ez_den : 0.0;
    return g;
}

Bb84Observables bb84_expected_observables(const Bb84Gains& g, const ProtocolInputs&, double rounds,
                                          double block_size) {
    Bb84Observables obs;
    const double gz = g.g_zz[0] + g.g_zz[1] + g.g_zz[2];
    for (int a = 0; a < 3; ++a) {
        obs.zp_sizes[a] = gz > 0.0 ? g.g_zz[a] / gz * block_size : 0.0;
        obs.x_sizes[a] = g.g_xx[a] * rounds;
        obs.x_errors[a] = g.e_alpha[a] * g.g_xx[a] * rounds;
    }
    return obs;
}

Bb84Observables bb84_sample_observables(const Bb84Gains& g, const ProtocolInputs&, double rounds,
                                        double block_size, std::mt19937_64& rng) {
    Bb84Observables obs;
    auto binom = [&rng](std::uint64_t trials, double p) {
        if (p <= 0.0 || trials == 0) return 0.0;
        if (p >= 1.0) return static_cast<double>(trials);
        std::binomial_distribution<std::uint64_t> d(trials, p);
        return static_cast<double>(d(rng));
    };
    // Z' decomposition: multinomial over the three intensity classes.
    const double gz = g.g_zz[0] + g.g_zz[1] + g.g_zz[2];
    std::uint64_t left = static_cast<std::uint64_t>(block_size);
    double mass = gz;
    for (int a = 0; a < 3; ++a) {
        const double p = mass > 0.0 ? g.g_zz[a] / mass : 0.0;
        const double draw = (a == 2) ? static_cast<double>(left) : binom(left, p);
        obs.zp_sizes[a] = draw;
        left -= static_cast<std::uint64_t>(draw);
        mass -= g.g_zz[a];
    }
    const auto n = static_cast<std::uint64_t>(rounds);
    for (int a = 0; a < 3; ++a) {
        obs.x_sizes[a] = binom(n, g.g_xx[a]);
        obs.x_errors[a] = binom(static_cast<std::uint64_t>(obs.x_sizes[a]), g.e_alpha[a]);
    }
    return obs;
}

Bb84Rounds bb84_sample_rounds(const ChannelParams& params, const ProtocolInputs& inputs,
                              std::size_t rounds, std::mt19937_64& rng) {
    const Bb84Gains g = bb84_gain_and_error(params, inputs);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    Bb84Rounds out;
    out.a_int.resize(rounds);
    out.basis_a.resize(rounds);
    out.basis_b.resize(rounds);
    out.detected.resize(rounds);
    out.r_a.resize(rounds);
    out.r_b.resize(rounds);
    for (std::size_t r = 0; r < rounds; ++r) {
        const double u = unit(rng);
        const int a = u < inputs.p_mu ? 0 : (u < inputs.p_mu + inputs.p_nu ? 1 : 2);
        const bool ba = unit(rng) >= inputs.q_z;
        const bool bb = unit(rng) >= inputs.q_z;
        const bool bit_a = unit(rng) < 0.5;
        const bool click = unit(rng) < g.q_alpha[a];
        bool bit_b = false;
        if (click) {
            if (ba == bb) bit_b = bit_a ^ (unit(rng) < g.e_alpha[a]);
            else bit_b = unit(rng) < 0.5;  // mismatched bases carry no correlation
        }
        out.a_int[r] = static_cast<std::uint8_t>(a);
        out.basis_a[r] = ba;
        out.basis_b[r] = bb;
        out.detected[r] = click;
        out.r_a.set(r, bit_a);
        out.r_b.set(r, click && bit_b);
    }
    return out;
}

}  // namespace qkdpp
