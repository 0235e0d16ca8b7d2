// Compares the serial reference kernels against the OpenMP paths: the
// Toeplitz GF(2) matrix product used by privacy amplification and the
// loss-grid rate sweep.

#include <chrono>
#include <cstdio>
#include <random>

#include "qkdpp/sweep.hpp"
#include "qkdpp/toeplitz.hpp"

using namespace qkdpp;

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void bench_toeplitz() {
    std::mt19937_64 rng(42);
    const std::size_t in = 1u << 20, out = 1u << 14;
    const auto h = ToeplitzHash::from_seed(BitString::random(in + out - 1, rng), in, out);
    const BitString m = BitString::random(in, rng);

    auto t0 = std::chrono::steady_clock::now();
    const BitString serial = toeplitz_apply_serial(h, m);
    const double ts = seconds_since(t0);

    t0 = std::chrono::steady_clock::now();
    const BitString parallel = toeplitz_apply(h, m);
    const double tp = seconds_since(t0);

    std::printf("toeplitz %zux%zu: serial %.3fs, openmp %.3fs, speedup %.2fx, match=%s\n", out, in,
                ts, tp, ts / tp, serial == parallel ? "yes" : "NO");
}

void bench_sweep() {
    SweepConfig cfg;
    cfg.scheme = Scheme::MDI;
    cfg.scenario = Scenario{CorruptionModel::AC, CorruptionModel::AC, 0, 0, 2};
    for (double x = 0; x <= 30; x += 2.5) cfg.loss_grid_db.push_back(x);
    cfg.block_size = 1e6;
    cfg.seed = 7;
    cfg.optimize = true;
    cfg.optimizer_starts = 4;

    auto t0 = std::chrono::steady_clock::now();
    const auto serial = run_sweep_serial(cfg);
    const double ts = seconds_since(t0);

    t0 = std::chrono::steady_clock::now();
    const auto parallel = run_sweep(cfg);
    const double tp = seconds_since(t0);

    bool match = serial.size() == parallel.size();
    for (std::size_t i = 0; match && i < serial.size(); ++i)
        match = serial[i].l == parallel[i].l && serial[i].k_rate == parallel[i].k_rate;
    std::printf("rate sweep %zu points: serial %.3fs, openmp %.3fs, speedup %.2fx, match=%s\n",
                serial.size(), ts, tp, ts / tp, match ? "yes" : "NO");
}

}  // namespace

int main() {
    bench_toeplitz();
    bench_sweep();
    return 0;
}
