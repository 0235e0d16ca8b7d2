#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "qkdpp/decoy_pe.hpp"
#include "qkdpp/types.hpp"

namespace qkdpp {

// Corruption scenario evaluated by the rate engine: one model per device
// kind. n_q follows the minimum-device rule (t_q + 1, or 2 for PN modules).
struct Scenario {
    CorruptionModel module_model = CorruptionModel::AC;
    CorruptionModel unit_model = CorruptionModel::AC;
    int t_q = 0;
    int t_c = 0;
    int pn_pairs = 2;  // n_q used when the modules are PN

    int n_q() const;
    int redundancy() const;  // R: 2 t_c + 1 for active unit models, 1 for passive
};

struct SecurityBudget {
    double eps_cor = 1e-8;
    double eps_sec = 1e-8;
    double eps_au = 5e-9;
    double gamma_sift = 5e-3;
    double gamma_ec = 5e-3;

    double hat_eps_cor() const { return eps_cor - eps_au; }
    double hat_eps_sec() const { return eps_sec - eps_au; }
    // Largest per-message authentication error compatible with eps_au.
    double gamma_au(CorruptionModel unit_model, int t_c, int n_q) const;
};

// Common value assigned to every error term of the secrecy inequality:
// hat_eps_sec / 48 for MDI and / 20 for BB84 under AC-like module models;
// the PN composition generalises both (and coincides at n_q = 2).
double split_secrecy_budget(Scheme scheme, CorruptionModel module_model, int n_q,
                            double hat_eps_sec);

// Smooth min-entropy proxy n [1 - h(phi)]; phase error rates at or above 1/2
// carry no extractable randomness.
double h_eps_proxy(double n_lower, double phi_upper, bool no_key);

struct PairTerms {
    double h_eps = 0.0;
    double lambda = 0.0;  // syndrome length |sy(s_B^j)|
};

std::int64_t key_length_ac(const std::vector<PairTerms>& pairs, double hat_eps_cor,
                           double eps_pa, double delta);
std::int64_t key_length_pn(const std::vector<PairTerms>& pairs, double hat_eps_cor,
                           double eps_pa, double delta, int n_q);

double ec_leakage(double block_size, double f_ec, double e_tol);
double e_tol_calc(double expected_qber, double block_size, double gamma_ec, int n_q);

// Net key-pool size |k| for the scheme's message inventory, and the total
// authentication cost R^2 |k|.
struct AuthMessages {
    std::vector<double> m_a;  // one lab-to-lab message per pair, Alice -> Bob
    double m_b = 0.0;         // single bundled message, Bob -> Alice
};
double key_pool_size(const AuthMessages& msgs, double gamma_au);
double auth_cost(int redundancy, double pool_size);

double key_rate(double l, double l_au, int n_q, double rounds);

struct KeyLengthResult {
    std::int64_t l = 0;
    std::vector<double> per_pair_h;
    std::vector<double> per_pair_lambda;
    double l_au = 0.0;
    double key_rate = 0.0;
};

struct RatePoint {
    double loss_db = 0.0;
    std::uint64_t rounds = 0;  // N
    double e_tol = 0.0;
    std::int64_t l = 0;
    double l_au = 0.0;
    double k_rate = 0.0;
    bool feasible = false;  // K > 0
    ProtocolInputs inputs;
};

// Shared (N, E_tol) overrides let identity checks compare scenarios at fixed
// experimental inputs, as the analytical identities require.
struct RateOverrides {
    std::optional<std::uint64_t> rounds;
    std::optional<double> e_tol;
};

RatePoint evaluate_rate_point(const Scenario& scenario, const ChannelParams& params,
                              const ProtocolInputs& inputs, const SecurityBudget& budget,
                              const RateOverrides& overrides = {});

// Derivative-free local search (Nelder-Mead, 20 multistarts) over intensity
// and probability settings; deterministic in seed.
ProtocolInputs optimize_inputs(Scheme scheme, const Scenario& scenario, const ChannelParams& params,
                               double block_size, const SecurityBudget& budget, std::uint64_t seed,
                               int n_starts = 20);

// Named presets for CLI/config use. Only "paper-2020-defaults" exists.
struct Preset {
    ChannelParams params;
    SecurityBudget budget;
    double omega = 1e-3;
    double f_ec = 1.16;
};
Preset preset_by_name(std::string_view name);

}  // namespace qkdpp
