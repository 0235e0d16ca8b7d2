#include "qkdpp/sweep.hpp"

#include <cstdio>
#include <stdexcept>

namespace qkdpp {

void SweepConfig::validate() const {
    if (loss_grid_db.empty()) throw std::invalid_argument("sweep: empty loss grid");
    for (std::size_t i = 1; i < loss_grid_db.size(); ++i)
        if (loss_grid_db[i] <= loss_grid_db[i - 1])
            throw std::invalid_argument("sweep: loss grid must be strictly increasing");
    if (scenario.module_model == CorruptionModel::PN && scenario.unit_model != CorruptionModel::PN) {
        // mixed scenarios are allowed, nothing to check beyond the models
    }
}

namespace {

RatePoint evaluate_one(const SweepConfig& cfg, const Preset& preset, double loss_db,
                       std::uint64_t point_seed) {
    ChannelParams params = preset.params;
    params.loss_db = loss_db;
    ProtocolInputs inputs;
    if (cfg.optimize) {
        inputs = optimize_inputs(cfg.scheme, cfg.scenario, params, cfg.block_size, preset.budget,
                                 point_seed, cfg.optimizer_starts);
    } else {
        inputs = cfg.fixed_inputs;
        inputs.scheme = cfg.scheme;
        inputs.block_size = cfg.block_size;
    }
    return evaluate_rate_point(cfg.scenario, params, inputs, preset.budget);
}

}  // namespace

std::vector<RatePoint> run_sweep_serial(const SweepConfig& cfg) {
    cfg.validate();
    const Preset preset = preset_by_name(cfg.preset);
    std::vector<RatePoint> points(cfg.loss_grid_db.size());
    for (std::size_t i = 0; i < points.size(); ++i)
        points[i] = evaluate_one(cfg, preset, cfg.loss_grid_db[i], cfg.seed + i);
    return points;
}

std::vector<RatePoint> run_sweep(const SweepConfig& cfg) {
    cfg.validate();
    const Preset preset = preset_by_name(cfg.preset);
    std::vector<RatePoint> points(cfg.loss_grid_db.size());
    const int n = static_cast<int>(points.size());
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < n; ++i)
        points[i] = evaluate_one(cfg, preset, cfg.loss_grid_db[i], cfg.seed + i);
    return points;
}

std::string sweep_csv(const SweepConfig& cfg, const std::vector<RatePoint>& points) {
    std::string out;
    char buf[512];
    std::snprintf(buf, sizeof buf,
                  "# qkdpp rate sweep v1 scheme=%s module_model=%s unit_model=%s t_q=%d t_c=%d "
                  "M=%.17g preset=%s seed=%llu optimize=%d\n",
                  std::string(to_string(cfg.scheme)).c_str(),
                  std::string(to_string(cfg.scenario.module_model)).c_str(),
                  std::string(to_string(cfg.scenario.unit_model)).c_str(), cfg.scenario.t_q,
                  cfg.scenario.t_c, cfg.block_size, cfg.preset.c_str(),
                  static_cast<unsigned long long>(cfg.seed), cfg.optimize ? 1 : 0);
    out += buf;
    out += "loss_db,N,E_tol,l,l_AU,K,feasible,lambda,mu,nu,omega,q_z,p_mu,p_nu,p_omega\n";
    for (const auto& p : points) {
        std::snprintf(buf, sizeof buf,
                      "%.17g,%llu,%.17g,%lld,%.17g,%.17g,%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,"
                      "%.17g,%.17g\n",
                      p.loss_db, static_cast<unsigned long long>(p.rounds), p.e_tol,
                      static_cast<long long>(p.l), p.l_au, p.k_rate, p.feasible ? 1 : 0,
                      p.inputs.lambda, p.inputs.mu, p.inputs.nu, p.inputs.omega, p.inputs.q_z,
                      p.inputs.p_mu, p.inputs.p_nu, p.inputs.p_omega);
        out += buf;
    }
    return out;
}

}  // namespace qkdpp
