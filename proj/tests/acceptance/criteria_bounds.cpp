#include "acceptance/acceptance.hpp"

#include <algorithm>
#include <random>
#include <vector>

#include "qkdpp/stat_bounds.hpp"

using namespace qkdpp;

namespace {

constexpr int kTrials = 100000;

// Each bound is violated in at most 2x its nominal error probability.
struct Tally {
    long violations = 0;
    double nominal = 0.0;
    const char* name = "";
    bool ok() const { return violations <= 2.0 * nominal * kTrials; }
};

}  // namespace

CriterionResult criterion_9_concentration_coverage() {
    const double eps = 1e-3;
    Tally chernoff_up{0, eps, "chernoff-upper"};
    Tally chernoff_lo{0, eps, "chernoff-lower"};
    Tally inverse{0, 2.0 * eps, "inverse-chernoff"};
    Tally hoeffding{0, eps, "hoeffding"};
    Tally serfling_u{0, eps, "serfling-upsilon"};
    Tally serfling_l{0, eps, "serfling-lambda"};

    // Chernoff on Binomial(1e4, 0.3)
    {
        const std::uint64_t n = 10000;
        const double p = 0.3, mu = n * p;
        const double up = chernoff_delta_upper(mu, eps);
        const double lo = chernoff_delta_lower(mu, eps);
#pragma omp parallel
        {
            long lup = 0, llo = 0;
            std::mt19937_64 rng;
            std::binomial_distribution<std::uint64_t> bin(n, p);
#pragma omp for schedule(static)
            for (int t = 0; t < kTrials; ++t) {
                rng.seed(17ull * t + 1);
                const double x = static_cast<double>(bin(rng));
                if (x > mu + up) ++lup;
                if (x < mu - lo) ++llo;
            }
#pragma omp critical
            {
                chernoff_up.violations += lup;
                chernoff_lo.violations += llo;
            }
        }
    }

    // Inverse Chernoff interval on Poisson(50)
    {
        const double mu = 50.0;
#pragma omp parallel
        {
            long lv = 0;
            std::mt19937_64 rng;
            std::poisson_distribution<int> pois(mu);
#pragma omp for schedule(static)
            for (int t = 0; t < kTrials; ++t) {
                rng.seed(23ull * t + 5);
                const double x = static_cast<double>(pois(rng));
                const ChernoffInterval iv = inverse_chernoff(x, eps, eps);
                if (mu < iv.lo || mu > iv.hi) ++lv;
            }
#pragma omp critical
            inverse.violations += lv;
        }
    }

    // Hoeffding on Binomial(1e4, 0.5)
    {
        const std::uint64_t n = 10000;
        const double mu = n * 0.5;
        const double dev = hoeffding_delta(static_cast<double>(n), eps);
#pragma omp parallel
        {
            long lv = 0;
            std::mt19937_64 rng;
            std::binomial_distribution<std::uint64_t> bin(n, 0.5);
#pragma omp for schedule(static)
            for (int t = 0; t < kTrials; ++t) {
                rng.seed(29ull * t + 7);
                if (static_cast<double>(bin(rng)) > mu + dev) ++lv;
            }
#pragma omp critical
            hoeffding.violations += lv;
        }
    }

    // Serfling: population of n_z + n_x items, k ones; observe the n_x
    // sample, bound the n_z remainder.
    {
        const int n_z = 1200, n_x = 800, ones = 700;
        const double ups = serfling_upsilon(n_z, n_x, eps);
#pragma omp parallel
        {
            long lv = 0;
            std::vector<std::uint8_t> pop(n_z + n_x);
            std::mt19937_64 rng;
#pragma omp for schedule(static)
            for (int t = 0; t < kTrials; ++t) {
                rng.seed(31ull * t + 11);
                std::fill(pop.begin(), pop.end(), 0);
                for (int i = 0; i < ones; ++i) pop[i] = 1;
                std::shuffle(pop.begin(), pop.end(), rng);
                int s_x = 0;
                for (int i = 0; i < n_x; ++i) s_x += pop[i];
                const int s_z = ones - s_x;
                const double bound =
                    n_z * (static_cast<double>(s_x) / n_x) - (n_z + n_x) * ups;
                if (s_z <= bound) ++lv;
            }
#pragma omp critical
            serfling_u.violations += lv;
        }
    }

    // Serfling lambda: sample m of a population of z items with s ones.
    {
        const int z = 2000, m = 600, s = 800;
        const double lam = serfling_lambda(z, m, eps);
#pragma omp parallel
        {
            long lv = 0;
            std::vector<std::uint8_t> pop(z);
            std::mt19937_64 rng;
#pragma omp for schedule(static)
            for (int t = 0; t < kTrials; ++t) {
                rng.seed(37ull * t + 13);
                std::fill(pop.begin(), pop.end(), 0);
                for (int i = 0; i < s; ++i) pop[i] = 1;
                std::shuffle(pop.begin(), pop.end(), rng);
                int in_sample = 0;
                for (int i = 0; i < m; ++i) in_sample += pop[i];
                const double bound = m * (static_cast<double>(s) / z - lam);
                if (in_sample <= bound) ++lv;
            }
#pragma omp critical
            serfling_l.violations += lv;
        }
    }

    std::string detail;
    for (const Tally* t :
         {&chernoff_up, &chernoff_lo, &inverse, &hoeffding, &serfling_u, &serfling_l}) {
        detail += std::string(t->name) + "=" + std::to_string(t->violations) + " ";
        if (!t->ok())
            return {false, std::string(t->name) + " violated " + std::to_string(t->violations) +
                               "/" + std::to_string(kTrials) + " times"};
    }
    return {true, "violations per 1e5 trials: " + detail};
}
