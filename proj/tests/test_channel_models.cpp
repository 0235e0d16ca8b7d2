#include <doctest.h>

#include <cmath>
#include <random>

#include "qkdpp/channel_bb84.hpp"
#include "qkdpp/channel_mdi.hpp"

using namespace qkdpp;

namespace {

ProtocolInputs paper_inputs() {
    ProtocolInputs in;
    in.lambda = 0.5;
    in.mu = 0.3;
    in.nu = 0.05;
    in.omega = 1e-3;
    in.q_z = 0.7;
    in.p_mu = 0.5;
    in.p_nu = 0.3;
    in.p_omega = 0.2;
    return in;
}

}  // namespace

TEST_CASE("i0_sym basics") {
    CHECK(i0_sym(0.0) == 1.0);
    for (double x : {0.3, 1.7, 4.0, 9.9, 12.0, 25.0}) {
        CHECK(i0_sym(x) == doctest::Approx(std::cyl_bessel_i(0.0, x)).epsilon(1e-10));
        CHECK(i0_sym(-x) == i0_sym(x));
    }
}

TEST_CASE("vacuum pulses: no dark counts means no successes") {
    ChannelParams params;
    params.p_d = 0.0;
    const MdiOutcomeProbs p = mdi_success_prob(0.0, 0.0, 0.0, 0.0, 1, 1, params);
    CHECK(p.total() == doctest::Approx(0.0));
}

TEST_CASE("vacuum pulses with dark counts: each outcome is (1-pd)^2 pd^2") {
    ChannelParams params;
    params.p_d = 0.01;
    const MdiOutcomeProbs p = mdi_success_prob(0.0, 0.0, 0.0, 0.0, 1, 1, params);
    const double expect = std::pow(1.0 - params.p_d, 2) * params.p_d * params.p_d;
    CHECK(p.same_arm[0] == doctest::Approx(expect).epsilon(1e-12));
    CHECK(p.same_arm[1] == doctest::Approx(expect).epsilon(1e-12));
    CHECK(p.cross_arm[0] == doctest::Approx(expect).epsilon(1e-12));
    CHECK(p.cross_arm[1] == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("swap symmetry of the total success probability") {
    ChannelParams params;
    params.loss_db = 10.0;
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> amp(0.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        const double a = amp(rng), b = amp(rng);
        for (const double theta : {0.0, M_PI / 4.0}) {
            for (int i : {1, 2})
                for (int j : {1, 2}) {
                    const double p1 = mdi_success_prob(a, b, theta, theta, i, j, params).total();
                    const double p2 = mdi_success_prob(b, a, theta, theta, j, i, params).total();
                    CHECK(p1 == doctest::Approx(p2).epsilon(1e-10));
                }
        }
    }
}

TEST_CASE("mdi gains: probabilities in range, zero error in aligned Z basis") {
    ChannelParams params;
    params.p_d = 0.0;
    params.delta_mis = 0.0;
    params.loss_db = 6.0;
    const MdiGains g = mdi_gain_and_error(params, paper_inputs());
    CHECK(g.g_zz > 0.0);
    CHECK(g.g_zz < 1.0);
    CHECK(g.e_zz == doctest::Approx(0.0).epsilon(1e-12));
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) {
            CHECK(g.g_xx[a][b] >= 0.0);
            CHECK(g.e_xx[a][b] >= 0.0);
            CHECK(g.e_xx[a][b] <= 1.0);
        }
}

TEST_CASE("mdi gain decreases with loss") {
    ProtocolInputs in = paper_inputs();
    double prev = 1.0;
    for (double loss = 0.0; loss <= 60.0; loss += 5.0) {
        ChannelParams params;
        params.loss_db = loss;
        const MdiGains g = mdi_gain_and_error(params, in);
        CHECK(g.g_zz < prev);
        prev = g.g_zz;
    }
}

TEST_CASE("expected observables scale with N and vanish at N=0") {
    ChannelParams params;
    const ProtocolInputs in = paper_inputs();
    const MdiGains g = mdi_gain_and_error(params, in);
    const MdiObservables zero = mdi_expected_observables(g, in, 0.0);
    CHECK(zero.z_size == 0.0);
    const MdiObservables obs = mdi_expected_observables(g, in, 1e6);
    CHECK(obs.z_size == doctest::Approx(g.g_zz * 1e6));
    CHECK(obs.x_sizes[0][0] == doctest::Approx(g.g_xx[0][0] * 1e6));
    CHECK(obs.x_errors[1][2] == doctest::Approx(g.e_xx[1][2] * g.g_xx[1][2] * 1e6));
}

TEST_CASE("sampled observables agree with expectations within 3 sigma") {
    ChannelParams params;
    const ProtocolInputs in = paper_inputs();
    const MdiGains g = mdi_gain_and_error(params, in);
    const double n = 1e6;
    const MdiObservables expect = mdi_expected_observables(g, in, n);
    std::mt19937_64 rng(11);
    double sum = 0.0;
    const int seeds = 300;
    for (int s = 0; s < seeds; ++s) sum += mdi_sample_observables(g, in, n, rng).z_size;
    const double mean = sum / seeds;
    const double sigma = std::sqrt(n * g.g_zz * (1.0 - g.g_zz) / seeds);
    CHECK(std::abs(mean - expect.z_size) <= 3.0 * sigma);
}

TEST_CASE("bb84 gain and error formulas") {
    ProtocolInputs in = paper_inputs();
    in.scheme = Scheme::BB84;

    ChannelParams params;
    params.p_d = 0.0;
    Bb84Gains g = bb84_gain_and_error(params, in);
    SUBCASE("no dark counts, vacuum -> zero gain") {
        in.omega = 0.0;
        in.nu = 1e-3;  // keep ordering valid
        g = bb84_gain_and_error(params, in);
        CHECK(g.q_alpha[2] == doctest::Approx(0.0));
    }
    SUBCASE("aligned channel -> zero error") {
        params.delta_mis = 0.0;
        g = bb84_gain_and_error(params, in);
        for (int a = 0; a < 3; ++a) CHECK(g.e_alpha[a] == doctest::Approx(0.0).epsilon(1e-12));
    }
    SUBCASE("bright limit: Q -> 1, E -> 0 for aligned channel") {
        params.delta_mis = 0.0;
        in.mu = 500.0;
        g = bb84_gain_and_error(params, in);
        CHECK(g.q_alpha[0] == doctest::Approx(1.0).epsilon(1e-10));
        CHECK(g.e_alpha[0] == doctest::Approx(0.0).epsilon(1e-9));
    }
}

TEST_CASE("bb84 expected observables split Z' by gain share") {
    ProtocolInputs in = paper_inputs();
    in.scheme = Scheme::BB84;
    ChannelParams params;
    const Bb84Gains g = bb84_gain_and_error(params, in);
    const double m = 1e5;
    const Bb84Observables obs = bb84_expected_observables(g, in, 1e6, m);
    CHECK(obs.zp_sizes[0] + obs.zp_sizes[1] + obs.zp_sizes[2] == doctest::Approx(m).epsilon(1e-12));
    // equal gains across intensities -> M/3 each
    ProtocolInputs eq = in;
    eq.p_mu = eq.p_nu = eq.p_omega = 1.0 / 3.0;
    eq.mu = 0.3;
    eq.nu = 0.299999;
    eq.omega = 0.299998;
    const Bb84Gains geq = bb84_gain_and_error(params, eq);
    const Bb84Observables oeq = bb84_expected_observables(geq, eq, 1e6, m);
    for (int a = 0; a < 3; ++a) CHECK(oeq.zp_sizes[a] == doctest::Approx(m / 3.0).epsilon(1e-4));
}

TEST_CASE("bb84 sampled observables match expectations within 3 sigma") {
    ProtocolInputs in = paper_inputs();
    in.scheme = Scheme::BB84;
    ChannelParams params;
    const Bb84Gains g = bb84_gain_and_error(params, in);
    std::mt19937_64 rng(13);
    const double n = 1e6, m = 1e4;
    double sum = 0.0;
    const int seeds = 300;
    for (int s = 0; s < seeds; ++s) sum += bb84_sample_observables(g, in, n, m, rng).x_sizes[0];
    const double mean = sum / seeds;
    const double p = g.g_xx[0];
    const double sigma = std::sqrt(n * p * (1.0 - p) / seeds);
    CHECK(std::abs(mean - g.g_xx[0] * n) <= 3.0 * sigma);
}
