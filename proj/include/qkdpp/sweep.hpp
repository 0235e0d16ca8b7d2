#pragma once

#include <string>
#include <vector>

#include "qkdpp/key_engine.hpp"

namespace qkdpp {

struct SweepConfig {
    Scheme scheme = Scheme::MDI;
    Scenario scenario;
    std::vector<double> loss_grid_db;
    double block_size = 1e6;
    std::string preset = "paper-2020-defaults";
    std::uint64_t seed = 1;
    bool optimize = true;              // false evaluates fixed_inputs verbatim
    ProtocolInputs fixed_inputs;       // used when optimize == false
    int optimizer_starts = 20;

    void validate() const;
};

// One row per loss point, assembled in grid order. The parallel variant
// farms points out to OpenMP threads; per-point seeds derive from (seed,
// index), so both variants produce identical results.
std::vector<RatePoint> run_sweep(const SweepConfig& cfg);
std::vector<RatePoint> run_sweep_serial(const SweepConfig& cfg);

// Stable, versioned CSV: header documents the preset and schema.
std::string sweep_csv(const SweepConfig& cfg, const std::vector<RatePoint>& points);

}  // namespace qkdpp
