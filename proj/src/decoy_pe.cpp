#include "qkdpp/decoy_pe.hpp"

#include <cmath>

#include "qkdpp/stat_bounds.hpp"

namespace qkdpp {

namespace {

struct Vec4 {
    double a0, a1, b0, b1;
};

// Per-intensity-pair scaled quantities. Index 0/1/2 = mu/nu/omega.
struct DecoyTable {
    double intensity[3];
    double p_pair[3][3];    // p_{a,b,X}
    double scale[3][3];     // e^{a+b} / p_{a,b,X}
    double x_tilde[3][3];   // scaled set sizes
    double gamma_hat[3][3]; // scaled hat-Delta of set sizes
    double gamma_low[3][3]; // scaled Delta of set sizes
    double e_tilde[3][3];   // scaled error counts
    double gammap_hat[3][3];
    double gammap_low[3][3];
    double tau11 = 0.0;

    int idx(double v) const {
        if (v == intensity[0]) return 0;
        if (v == intensity[1]) return 1;
        return 2;
    }
    double xt(double a, double b) const { return x_tilde[idx(a)][idx(b)]; }
    double gh(double a, double b) const { return gamma_hat[idx(a)][idx(b)]; }
    double gl(double a, double b) const { return gamma_low[idx(a)][idx(b)]; }
    double et(double a, double b) const { return e_tilde[idx(a)][idx(b)]; }
    double gph(double a, double b) const { return gammap_hat[idx(a)][idx(b)]; }
    double gpl(double a, double b) const { return gammap_low[idx(a)][idx(b)]; }
};

DecoyTable build_table(const MdiObservables& obs, const ProtocolInputs& in, double eps_pair,
                       double eps_pair_prime) {
    DecoyTable t;
    t.intensity[0] = in.mu;
    t.intensity[1] = in.nu;
    t.intensity[2] = in.omega;
    const double pdec[3] = {in.p_mu, in.p_nu, in.p_omega};
    const double qx2 = in.q_x() * in.q_x();
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) {
            const double ia = t.intensity[a], ib = t.intensity[b];
            t.p_pair[a][b] = pdec[a] * pdec[b] * qx2;
            t.scale[a][b] = std::exp(ia + ib) / t.p_pair[a][b];
            t.x_tilde[a][b] = t.scale[a][b] * obs.x_sizes[a][b];
            t.gamma_hat[a][b] = t.scale[a][b] * chernoff_hat_delta(obs.x_sizes[a][b], eps_pair);
            t.gamma_low[a][b] = t.scale[a][b] * chernoff_inv_delta(obs.x_sizes[a][b], eps_pair);
            t.e_tilde[a][b] = t.scale[a][b] * obs.x_errors[a][b];
            t.gammap_hat[a][b] = t.scale[a][b] * chernoff_hat_delta(obs.x_errors[a][b], eps_pair_prime);
            t.gammap_low[a][b] = t.scale[a][b] * chernoff_inv_delta(obs.x_errors[a][b], eps_pair_prime);
            t.tau11 += std::exp(-(ia + ib)) * ia * ib * t.p_pair[a][b];
        }
    return t;
}

double g_of(const DecoyTable& t, const Vec4& v) {
    return t.xt(v.a0, v.b0) + t.xt(v.a1, v.b1) - t.xt(v.a0, v.b1) - t.xt(v.a1, v.b0);
}

}  // namespace

double mdi_s11x_lower(const MdiObservables& obs, const ProtocolInputs& in, double eps_pair) {
    in.validate();
    const DecoyTable t = build_table(obs, in, eps_pair, eps_pair);
    const double mu = in.mu, nu = in.nu, om = in.omega;
    const Vec4 pairs[9][2] = {
        {{mu, nu, mu, nu}, {mu, om, mu, om}}, {{mu, nu, mu, nu}, {mu, om, nu, om}},
        {{mu, nu, mu, nu}, {nu, om, mu, om}}, {{mu, nu, mu, nu}, {nu, om, nu, om}},
        {{mu, nu, mu, om}, {mu, om, nu, om}}, {{mu, nu, mu, om}, {nu, om, nu, om}},
        {{mu, om, mu, nu}, {nu, om, mu, om}}, {{mu, om, mu, nu}, {nu, om, nu, om}},
        {{mu, om, mu, om}, {nu, om, nu, om}}};
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& vp : pairs) {
        const Vec4& v = vp[0];
        const Vec4& w = vp[1];
        const bool case1 = (v.a0 + v.a1) / (w.a0 + w.a1) > (v.b0 + v.b1) / (w.b0 + w.b1);
        double c11, j, gamma;
        const double gv = g_of(t, v), gw = g_of(t, w);
        const double hat_w = t.gh(w.a0, w.b0) + t.gh(w.a1, w.b1) + t.gh(w.a0, w.b1) + t.gh(w.a1, w.b0);
        const double low_v = t.gl(v.a0, v.b0) + t.gl(v.a1, v.b1) + t.gl(v.a0, v.b1) + t.gl(v.a1, v.b0);
        if (case1) {
            const double cv = (v.b0 * v.b0 - v.b1 * v.b1) * (v.a0 - v.a1);
            const double cw = (w.b0 * w.b0 - w.b1 * w.b1) * (w.a0 - w.a1);
            c11 = cv * (w.a0 - w.a1) * (w.b0 - w.b1) - cw * (v.a0 - v.a1) * (v.b0 - v.b1);
            j = cv * gw - cw * gv;
            gamma = cv * hat_w + cw * low_v;
        } else {
            c11 = (v.a0 - v.a1) * (v.b0 - v.b1) * (w.a0 - w.a1) * (w.b0 - w.b1) *
                  (v.a0 + v.a1 - w.a0 - w.a1);
            const double cv = (v.a0 * v.a0 - v.a1 * v.a1) * (v.b0 - v.b1);
            const double cw = (w.a0 * w.a0 - w.a1 * w.a1) * (w.b0 - w.b1);
            j = cv * gw - cw * gv;
            gamma = cv * hat_w + cw * low_v;
        }
        if (std::abs(c11) < 1e-15) continue;  // degenerate denominator, skip
        best = std::max(best, t.tau11 / c11 * (j - gamma));
    }
    if (!std::isfinite(best)) return 0.0;
    return std::max(0.0, std::floor(best));
}

double mdi_e11x_upper(const MdiObservables& obs, const ProtocolInputs& in, double eps_pair_prime) {
    in.validate();
    const DecoyTable t = build_table(obs, in, eps_pair_prime, eps_pair_prime);
    const double ints[3] = {in.mu, in.nu, in.omega};
    double best = -std::numeric_limits<double>::infinity();
    for (int a0 = 0; a0 < 3; ++a0)
        for (int a1 = a0 + 1; a1 < 3; ++a1)
            for (int b0 = 0; b0 < 3; ++b0)
                for (int b1 = b0 + 1; b1 < 3; ++b1) {
                    const double A0 = ints[a0], A1 = ints[a1], B0 = ints[b0], B1 = ints[b1];
                    const double f = t.et(A0, B0) + t.et(A1, B1) - t.et(A0, B1) - t.et(A1, B0);
                    const double gamma = -t.gpl(A0, B0) - t.gpl(A1, B1) - t.gph(A0, B1) - t.gph(A1, B0);
                    const double denom = (A0 - A1) * (B0 - B1);
                    if (std::abs(denom) < 1e-15) continue;
                    best = std::max(best, t.tau11 * (f - gamma) / denom);
                }
    if (!std::isfinite(best)) return 0.0;
    return std::max(0.0, std::ceil(best));
}

PeResultMdi mdi_transfer_to_z(double s11x_l, double e11x_u, const MdiObservables& obs,
                              const ProtocolInputs& in, double rounds, const PeBudgets& b) {
    PeResultMdi r;
    r.s11x_l = s11x_l;
    r.e11x_u = e11x_u;

    const auto p1 = [](double a) { return a * std::exp(-a); };  // Poisson P[n=1|a]
    const double p1l = p1(in.lambda);
    const double mean_x1 = in.p_mu * p1(in.mu) + in.p_nu * p1(in.nu) + in.p_omega * p1(in.omega);
    const double mu_z = rounds * in.q_z * in.q_z * p1l * p1l;
    const double mu_x = rounds * in.q_x() * in.q_x() * mean_x1 * mean_x1;

    r.n11z_u_sent = std::min(std::ceil(mu_z + chernoff_delta_upper(mu_z, b.eps_chernoff)), rounds);
    r.n11z_l_sent = std::max(std::floor(mu_z - chernoff_delta_lower(mu_z, b.eps_chernoff)), 0.0);
    r.n11x_u_sent = std::min(std::ceil(mu_x + chernoff_delta_upper(mu_x, b.eps_chernoff)), rounds);
    r.n11x_l_sent = std::max(std::floor(mu_x - chernoff_delta_lower(mu_x, b.eps_chernoff)), 0.0);

    const double M = in.block_size;
    const double z_size = obs.z_size;

    if (r.n11x_u_sent > 0.0) {
        const double ratio = s11x_l / r.n11x_u_sent;
        const double dev = (r.n11z_l_sent + r.n11x_u_sent) *
                           serfling_upsilon(r.n11z_l_sent, r.n11x_u_sent, b.eps_serfling);
        r.s11z_l = std::max(std::floor(r.n11z_l_sent * ratio - dev), 0.0);
    }
    if (z_size >= M && z_size > 0.0 && M > 0.0) {
        const double lam = serfling_lambda(z_size, M, b.eps_serfling);
        r.n11z_l = std::max(std::floor(M * (r.s11z_l / z_size - lam)), 0.0);
    }
    if (r.n11z_l > 0.0) {
        double e_up;
        if (s11x_l > 0.0) {
            e_up = std::ceil(r.n11z_l * (e11x_u / s11x_l) +
                             (s11x_l + r.n11z_l) * serfling_upsilon(r.n11z_l, s11x_l, b.eps_serfling));
        } else {
            e_up = r.n11z_l;
        }
        r.e11z_u = std::min(e_up, r.n11z_l);
        r.phi11z_u = r.e11z_u / r.n11z_l;
    } else {
        r.no_key = true;
    }
    r.eps_smooth = 3.0 * b.eps_serfling + 9.0 * b.eps_pair + 9.0 * b.eps_pair_prime +
                   2.0 * b.eps_chernoff;
    return r;
}

PeResultMdi mdi_pe(const MdiObservables& obs, const ProtocolInputs& in, double rounds,
                   const PeBudgets& b) {
    const double s = mdi_s11x_lower(obs, in, b.eps_pair);
    const double e = mdi_e11x_upper(obs, in, b.eps_pair_prime);
    return mdi_transfer_to_z(s, e, obs, in, rounds, b);
}

PeResultBb84 bb84_pe(const Bb84Observables& obs, const ProtocolInputs& in, const PeBudgets& b) {
    in.validate();
    if (!(in.mu > in.nu + in.omega))
        throw std::invalid_argument("bb84_pe: decoy bounds require mu > nu + omega");
    PeResultBb84 r;
    const double mu = in.mu, nu = in.nu, om = in.omega;
    const double tau1 = mu * std::exp(-mu) * in.p_mu + nu * std::exp(-nu) * in.p_nu +
                        om * std::exp(-om) * in.p_omega;
    const double coef = mu * tau1 / (mu * (nu - om) - (nu * nu - om * om));
    const double M = in.block_size;

    const double dM = hoeffding_delta(M, b.eps_hoeffding);
    r.n1z_l = std::max(0.0, std::floor(coef * (std::exp(nu) / in.p_nu * (obs.zp_sizes[1] - dM) -
                                               std::exp(om) / in.p_omega * (obs.zp_sizes[2] + dM) -
                                               (nu * nu - om * om) / (mu * mu) * std::exp(mu) /
                                                   in.p_mu * (obs.zp_sizes[0] + dM))));

    const double x_total = obs.x_sizes[0] + obs.x_sizes[1] + obs.x_sizes[2];
    const double dX = hoeffding_delta(x_total, b.eps_hoeffding);
    r.s1x_l = std::max(0.0, std::floor(coef * (std::exp(nu) / in.p_nu * (obs.x_sizes[1] - dX) -
                                               std::exp(om) / in.p_omega * (obs.x_sizes[2] + dX) -
                                               (nu * nu - om * om) / (mu * mu) * std::exp(mu) /
                                                   in.p_mu * (obs.x_sizes[0] + dX))));

    const double e_total = obs.x_errors[0] + obs.x_errors[1] + obs.x_errors[2];
    const double dE = hoeffding_delta(e_total, b.eps_hoeffding);
    r.e1x_u = std::max(0.0, std::ceil(tau1 / (nu - om) *
                                      (std::exp(nu) / in.p_nu * (obs.x_errors[1] + dE) -
                                       std::exp(om) / in.p_omega * (obs.x_errors[2] - dE))));

    if (r.n1z_l > 0.0) {
        double e_up;
        if (r.s1x_l > 0.0) {
            e_up = std::ceil(r.n1z_l * (r.e1x_u / r.s1x_l) +
                             (r.s1x_l + r.n1z_l) * serfling_upsilon(r.n1z_l, r.s1x_l, b.eps_serfling));
        } else {
            e_up = r.n1z_l;
        }
        r.e1z_u = std::min(e_up, r.n1z_l);
        r.phi1z_u = r.e1z_u / r.n1z_l;
    } else {
        r.no_key = true;
    }
    r.eps_smooth = 8.0 * b.eps_hoeffding + b.eps_serfling;
    return r;
}

}  // namespace qkdpp
