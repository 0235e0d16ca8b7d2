#include "qkdpp/channel_mdi.hpp"

#include <cmath>

#include "qkdpp/stat_bounds.hpp"

namespace qkdpp {

namespace {

double i0_series(double x) {
    const double q = 0.25 * x * x;
    double term = 1.0, sum = 1.0;
    for (int k = 1; k < 200; ++k) {
        term *= q / (static_cast<double>(k) * k);
        sum += term;
        if (term < 1e-17 * sum) break;
    }
    return sum;
}

double simpson(double x, double a, double b, double fa, double fm, double fb, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = std::exp(x * (std::cos(lm) - 1.0));
    const double frm = std::exp(x * (std::cos(rm) - 1.0));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::abs(left + right - whole) < 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return simpson(x, a, m, fa, flm, fm, tol / 2.0, depth - 1) +
           simpson(x, m, b, fm, frm, fb, tol / 2.0, depth - 1);
}

}  // namespace

double i0_sym(double x) {
    x = std::abs(x);
    if (x < 10.0) return i0_series(x);
    // exp(x) * (1/pi) int_0^pi exp(x (cos g - 1)) dg
    const double fa = 1.0;
    const double fm = std::exp(-x);
    const double fb = std::exp(-2.0 * x);
    const double integral = simpson(x, 0.0, M_PI, fa, fm, fb, 1e-12 * M_PI, 48) / M_PI;
    return std::exp(x) * integral;
}

namespace {

struct Rot {
    double m[2][2];
    explicit Rot(double angle) {
        const double c = std::cos(angle), s = std::sin(angle);
        m[0][0] = c; m[0][1] = s;
        m[1][0] = -s; m[1][1] = c;
    }
};

constexpr int kArm[4] = {1, 1, 2, 2};   // s_w
constexpr int kPol[4] = {0, 1, 0, 1};   // k_w - 1

struct ClickTerms {
    // For a detector subset K (bitmask), the exp/I0 pair of the averaged
    // no-click probability.
    double eta, a2, b2, ab;
    double ta[4], tb[4];  // Theta_{A,i,k_w}, Theta_{B,j,k_w}

    double term(unsigned mask) const {
        double sq = 0.0, cross = 0.0;
        for (int w = 0; w < 4; ++w) {
            if (!(mask & (1u << w))) continue;
            sq += a2 * ta[w] * ta[w] + b2 * tb[w] * tb[w];
            cross += (kArm[w] == 1 ? 1.0 : -1.0) * ta[w] * tb[w];
        }
        return std::exp(-0.5 * eta * sq) * i0_sym(eta * ab * cross);
    }
};

}  // namespace

MdiOutcomeProbs mdi_success_prob(double alpha_amp, double beta_amp, double theta_a, double theta_b,
                                 int i, int j, const ChannelParams& params) {
    const Rot ra(theta_a + params.delta_mis);
    const Rot rb(theta_b + params.delta_mis);
    ClickTerms t{};
    t.eta = params.eta_arm();
    t.a2 = alpha_amp * alpha_amp;
    t.b2 = beta_amp * beta_amp;
    t.ab = alpha_amp * beta_amp;
    for (int w = 0; w < 4; ++w) {
        t.ta[w] = ra.m[i - 1][kPol[w]];
        t.tb[w] = rb.m[j - 1][kPol[w]];
    }
    const double pd = params.p_d;
    const double q = 1.0 - pd;
    const unsigned all = 0xf;
    auto outcome = [&](int u, int v) {
        const unsigned rest = all & ~(1u << u) & ~(1u << v);
        double p = t.term(rest) - q * (t.term(rest | (1u << u)) + t.term(rest | (1u << v))) +
                   q * q * t.term(all);
        return q * q * p;
    };
    MdiOutcomeProbs out;
    out.same_arm[0] = outcome(0, 1);
    out.same_arm[1] = outcome(2, 3);
    out.cross_arm[0] = outcome(0, 3);
    out.cross_arm[1] = outcome(1, 2);
    return out;
}

namespace {

struct BasisStats {
    double q = 0.0;        // success probability, averaged over i, j
    double qe = 0.0;       // success-and-error probability
};

// theta pair fixed; averages the outcome probabilities over the four
// polarization settings with the scheme's error bookkeeping.
BasisStats basis_stats(double aa, double bb, double tha, double thb, const ChannelParams& params) {
    BasisStats st;
    const bool x_basis = tha > 0.0 && thb > 0.0;
    for (int i = 1; i <= 2; ++i) {
        for (int j = 1; j <= 2; ++j) {
            const MdiOutcomeProbs p = mdi_success_prob(aa, bb, tha, thb, i, j, params);
            st.q += 0.25 * p.total();
            if (!x_basis) {
                if (i == j) st.qe += 0.25 * p.total();  // Bob flips every Z bit
            } else {
                // psi- flips Bob's bit: error when i == j; psi+ errs when i != j
                if (i == j) st.qe += 0.25 * p.psi_minus();
                else st.qe += 0.25 * p.psi_plus();
            }
        }
    }
    return st;
}

}  // namespace

MdiGains mdi_gain_and_error(const ChannelParams& params, const ProtocolInputs& inputs) {
    MdiGains g;
    const double qz = inputs.q_z, qx = inputs.q_x();
    const double decoys[3] = {inputs.mu, inputs.nu, inputs.omega};
    const double pdec[3] = {inputs.p_mu, inputs.p_nu, inputs.p_omega};
    const double sl = std::sqrt(inputs.lambda);

    const BasisStats zz = basis_stats(sl, sl, 0.0, 0.0, params);
    g.g_zz = qz * qz * zz.q;
    g.e_zz = zz.q > 0.0 ? zz.qe / zz.q : 0.0;

    for (int a = 0; a < 3; ++a) {
        const double sa = std::sqrt(decoys[a]);
        for (int b = 0; b < 3; ++b) {
            const double sb = std::sqrt(decoys[b]);
            const BasisStats xx = basis_stats(sa, sb, M_PI / 4.0, M_PI / 4.0, params);
            g.g_xx[a][b] = qx * qx * pdec[a] * pdec[b] * xx.q;
            g.e_xx[a][b] = xx.q > 0.0 ? xx.qe / xx.q : 0.0;
        }
        g.g_xz[a] = qz * qx * pdec[a] * basis_stats(sa, sl, M_PI / 4.0, 0.0, params).q;
        g.g_zx[a] = qz * qx * pdec[a] * basis_stats(sl, sa, 0.0, M_PI / 4.0, params).q;
    }
    return g;
}

namespace {

double sum_xx(const MdiGains& g) {
    double s = 0.0;
    for (auto& row : g.g_xx)
        for (double v : row) s += v;
    return s;
}

double sum3(const std::array<double, 3>& v) { return v[0] + v[1] + v[2]; }

}  // namespace

MdiObservables mdi_expected_observables(const MdiGains& g, const ProtocolInputs&, double rounds) {
    MdiObservables obs;
    obs.z_size = g.g_zz * rounds;
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) {
            obs.x_sizes[a][b] = g.g_xx[a][b] * rounds;
            obs.x_errors[a][b] = g.e_xx[a][b] * g.g_xx[a][b] * rounds;
        }
    const double all_success = g.g_zz + sum_xx(g) + sum3(g.g_zx) + sum3(g.g_xz);
    obs.len_intensity_msg = all_success * 2.0 * rounds;
    obs.len_ra_cx = (sum_xx(g) + sum3(g.g_xz)) * rounds;
    obs.len_ra_cz = (g.g_zz + sum3(g.g_zx)) * rounds;
    return obs;
}

MdiObservables mdi_sample_observables(const MdiGains& g, const ProtocolInputs&, double rounds,
                                      std::mt19937_64& rng) {
    // Independent binomials per observable; the shared-round correlations are
    // negligible at the trial scales this mode serves.
    const auto n = static_cast<std::uint64_t>(rounds);
    auto binom = [&rng](std::uint64_t trials, double p) {
        if (p <= 0.0 || trials == 0) return 0.0;
        if (p >= 1.0) return static_cast<double>(trials);
        std::binomial_distribution<std::uint64_t> d(trials, p);
        return static_cast<double>(d(rng));
    };
    MdiObservables obs;
    obs.z_size = binom(n, g.g_zz);
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) {
            obs.x_sizes[a][b] = binom(n, g.g_xx[a][b]);
            obs.x_errors[a][b] = binom(static_cast<std::uint64_t>(obs.x_sizes[a][b]), g.e_xx[a][b]);
        }
    const double all_success = g.g_zz + sum_xx(g) + sum3(g.g_zx) + sum3(g.g_xz);
    obs.len_intensity_msg = binom(n, all_success) * 2.0;
    obs.len_ra_cx = binom(n, sum_xx(g) + sum3(g.g_xz));
    obs.len_ra_cz = binom(n, g.g_zz + sum3(g.g_zx));
    return obs;
}

MdiRounds mdi_sample_rounds(const ChannelParams& params, const ProtocolInputs& inputs,
                            std::size_t rounds, std::mt19937_64& rng) {
    // Outcome table over (a_idx, b_idx, i, j); intensity index 0 is lambda
    // (basis Z), 1..3 are the X-basis decoys.
    const double ints[4] = {inputs.lambda, inputs.mu, inputs.nu, inputs.omega};
    double p_plus[4][4][2][2], p_minus[4][4][2][2];
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
            for (int i = 1; i <= 2; ++i)
                for (int j = 1; j <= 2; ++j) {
                    const double tha = a == 0 ? 0.0 : M_PI / 4.0;
                    const double thb = b == 0 ? 0.0 : M_PI / 4.0;
                    const MdiOutcomeProbs p = mdi_success_prob(std::sqrt(ints[a]), std::sqrt(ints[b]),
                                                               tha, thb, i, j, params);
                    p_plus[a][b][i - 1][j - 1] = p.psi_plus();
                    p_minus[a][b][i - 1][j - 1] = p.psi_minus();
                }

    std::uniform_real_distribution<double> unit(0.0, 1.0);
    auto draw_intensity = [&](void) -> int {
        if (unit(rng) < inputs.q_z) return 0;
        const double u = unit(rng);
        if (u < inputs.p_mu) return 1;
        if (u < inputs.p_mu + inputs.p_nu) return 2;
        return 3;
    };

    MdiRounds out;
    out.a_int.resize(rounds);
    out.b_int.resize(rounds);
    out.outcome.resize(rounds);
    out.r_a.resize(rounds);
    out.r_b.resize(rounds);
    for (std::size_t r = 0; r < rounds; ++r) {
        const int a = draw_intensity();
        const int b = draw_intensity();
        const bool bit_a = unit(rng) < 0.5;
        const bool bit_b = unit(rng) < 0.5;
        const double pp = p_plus[a][b][bit_a][bit_b];
        const double pm = p_minus[a][b][bit_a][bit_b];
        const double u = unit(rng);
        out.a_int[r] = static_cast<std::uint8_t>(a);
        out.b_int[r] = static_cast<std::uint8_t>(b);
        out.outcome[r] = u < pp ? 1 : (u < pp + pm ? 2 : 0);
        out.r_a.set(r, bit_a);
        out.r_b.set(r, bit_b);
    }
    return out;
}

}  // namespace qkdpp
