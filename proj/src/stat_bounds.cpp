#include "qkdpp/stat_bounds.hpp"

#include <cmath>
#include <cstdio>

namespace qkdpp {

namespace {

constexpr double kInvE = 0.36787944117144233;  // 1/e

// Halley iteration on w e^w = x, safeguarded by a sign bracket (a has
// f <= 0, b has f >= 0) so steps near the branch point cannot oscillate.
double halley(double x, double w, double neg_end, double pos_end) {
    auto f = [x](double v) { return v * std::exp(v) - x; };
    for (int i = 0; i < 100; ++i) {
        const double ew = std::exp(w);
        const double fw = w * ew - x;
        const double wp1 = w + 1.0;
        const double denom = ew * wp1 - (w + 2.0) * fw / (2.0 * wp1);
        double next = (wp1 != 0.0 && denom != 0.0 && std::isfinite(denom)) ? w - fw / denom
                                                                           : 0.5 * (neg_end + pos_end);
        const double lo = std::min(neg_end, pos_end), hi = std::max(neg_end, pos_end);
        if (!(next >= lo && next <= hi)) next = 0.5 * (neg_end + pos_end);
        if (f(next) > 0.0) pos_end = next;
        else neg_end = next;
        if (std::abs(next - w) <= 1e-12 * (std::abs(next) + 1e-300)) return next;
        w = next;
        if (std::abs(pos_end - neg_end) <= 1e-15 * (std::abs(neg_end) + 1.0))
            return 0.5 * (neg_end + pos_end);
    }
    {
        char buf[160];
        std::snprintf(buf, sizeof buf, "lambert W: no convergence (x=%.17g, w=%.17g, neg=%.17g, pos=%.17g)",
                      x, w, neg_end, pos_end);
        throw numerical_error(buf);
    }
}

}  // namespace

// Expansion around the branch point -1/e in p = sqrt(2(ex + 1)); W_0 takes
// p > 0 and W_-1 takes p < 0. Accurate to ~1e-12 for |p| < 1e-2.
double branch_series(double p) {
    return -1.0 + p * (1.0 + p * (-1.0 / 3.0 + p * (11.0 / 72.0 + p * (-43.0 / 540.0 + p * (769.0 / 17280.0)))));
}

double lambert_w0(double x) {
    if (std::isnan(x) || x < -kInvE * (1.0 + 4e-16)) throw numerical_error("lambert_w0: argument below -1/e");
    if (x <= -kInvE) return -1.0;
    if (x == 0.0) return 0.0;
    const double p2 = 2.0 * (std::exp(1.0) * x + 1.0);
    double w;
    if (p2 >= 0.0 && p2 < 1e-4) return branch_series(std::sqrt(p2));
    if (x < -0.25) {
        w = branch_series(std::sqrt(p2));
    } else if (x < 10.0) {
        w = x < 0.0 ? x : std::log1p(x);  // crude but inside the basin
    } else {
        const double l1 = std::log(x), l2 = std::log(std::log(x));
        w = l1 - l2 + l2 / l1;
    }
    // f(-1) = -1/e - x <= 0 on this branch; grow the positive end as needed
    double pos = std::max(w, 0.0) + 1.0;
    while (pos * std::exp(pos) < x) pos *= 2.0;
    return halley(x, w, -1.0, pos);
}

double lambert_wm1(double x) {
    if (std::isnan(x) || x < -kInvE * (1.0 + 4e-16) || x >= 0.0)
        throw numerical_error("lambert_wm1: argument outside [-1/e, 0)");
    if (x <= -kInvE) return -1.0;
    const double p2 = 2.0 * (std::exp(1.0) * x + 1.0);
    double w;
    if (p2 >= 0.0 && p2 < 1e-4) return branch_series(-std::sqrt(p2));
    if (x > -1e-110) {
        // deep tail: exp(w) underflows, so iterate on the asymptotic series
        // W = L1 - L2 + L2/L1 + L2(L2-2)/(2 L1^2) + L2(2 L2^2 - 9 L2 + 6)/(6 L1^3)
        const double l1 = std::log(-x), l2 = std::log(-l1);
        return l1 - l2 + l2 / l1 + l2 * (l2 - 2.0) / (2.0 * l1 * l1) +
               l2 * (2.0 * l2 * l2 - 9.0 * l2 + 6.0) / (6.0 * l1 * l1 * l1);
    }
    if (x > -0.25) {
        const double l1 = std::log(-x), l2 = std::log(-std::log(-x));
        w = l1 - l2 + l2 / l1;
    } else {
        w = branch_series(-std::sqrt(p2));
    }
    // f(-1) = -1/e - x <= 0; f -> -x > 0 toward -infinity on this branch
    double pos = std::min(w, -2.0);
    while (pos * std::exp(pos) < x) pos *= 2.0;
    return halley(x, w, -1.0, pos);
}

double chernoff_delta_upper(double x, double y) {
    const double ln = -std::log(y);
    if (ln == 0.0) return 0.0;
    return 0.5 * ln * (1.0 + std::sqrt(1.0 + 8.0 * x / ln));
}

double chernoff_delta_lower(double x, double y) {
    return std::sqrt(2.0 * x * -std::log(y));
}

double chernoff_hat_delta(double x, double y) {
    if (x == 0.0) return 0.0;
    const double c = 1.0 + -std::log(y) / x;
    const double arg = -std::exp(-c);
    if (arg == 0.0) return x;  // W_0(0) = 0
    return x * (lambert_w0(arg) + 1.0);
}

double chernoff_inv_delta(double x, double y) {
    if (x == 0.0) return -std::log(y);
    const double c = 1.0 + -std::log(y) / x;
    const double arg = -std::exp(-c);
    if (arg == 0.0) return x * (c + std::log(c) - 1.0);  // W_-1 asymptote
    return -x * (lambert_wm1(arg) + 1.0);
}

ChernoffInterval inverse_chernoff(double x, double eps_lower, double eps_upper) {
    return ChernoffInterval{x - chernoff_hat_delta(x, eps_upper), x + chernoff_inv_delta(x, eps_lower)};
}

double serfling_upsilon(double x, double y, double z) {
    return std::sqrt((x + 1.0) * -std::log(z) / (2.0 * y * (x + y)));
}

double serfling_lambda(double x, double y, double z) {
    return std::sqrt((x - y + 1.0) * -std::log(z) / (2.0 * x * y));
}

double hoeffding_delta(double x, double y) {
    return std::sqrt(0.5 * x * -std::log(y));
}

double binary_entropy(double p) {
    if (p <= 0.0 || p >= 1.0) return 0.0;
    return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

std::uint64_t rounds_for_blocksize(double M, double y, double z) {
    if (y <= 0.0) throw numerical_error("rounds_for_blocksize: zero success probability");
    const double ln = -std::log(z);
    if (ln == 0.0) return static_cast<std::uint64_t>(std::ceil(M / y));
    const double n = M / y + ln / y * (1.0 + std::sqrt(1.0 + 2.0 * M / ln));
    return static_cast<std::uint64_t>(std::ceil(n));
}

}  // namespace qkdpp
