#pragma once

#include <cstdint>
#include <stdexcept>

namespace qkdpp {

struct numerical_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Principal and lower branches of the Lambert W function (Halley iteration,
// 1e-12 relative tolerance). Throws numerical_error if iteration stalls.
double lambert_w0(double x);
double lambert_wm1(double x);

// Chernoff deviations for a variable with known expectation x and error
// probability y: P(X > x + delta_upper) <= y, P(X < x - delta_lower) <= y.
double chernoff_delta_upper(double x, double y);
double chernoff_delta_lower(double x, double y);

// Inverse Chernoff bound: given an observation x, the expectation lies in
// [x - hat_delta(x, eps_U), x + inv_delta(x, eps_L)] except with probability
// eps_L + eps_U.
double chernoff_hat_delta(double x, double y);  // downward excursion of x above the mean
double chernoff_inv_delta(double x, double y);  // upward excursion of the mean above x

struct ChernoffInterval {
    double lo = 0.0;
    double hi = 0.0;
};
ChernoffInterval inverse_chernoff(double x, double eps_lower, double eps_upper);

// Serfling deviation terms for sampling without replacement.
double serfling_upsilon(double x, double y, double z);
double serfling_lambda(double x, double y, double z);

// Hoeffding deviation sqrt((x/2) ln(1/y)).
double hoeffding_delta(double x, double y);

// Binary entropy in bits, with 0 log 0 = 0.
double binary_entropy(double p);

// Smallest number of rounds so that Binomial(N, y) >= M except with
// probability z, via the Chernoff bound.
std::uint64_t rounds_for_blocksize(double M, double y, double z);

}  // namespace qkdpp
