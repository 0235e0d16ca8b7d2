#pragma once

#include <optional>

#include "qkdpp/decoy_pe.hpp"
#include "qkdpp/key_engine.hpp"
#include "qkdpp/netsim.hpp"

namespace qkdpp {

// Error-correction realization. Transparent mode uses the identity syndrome
// map, so the error pattern is exactly computable and every share-wise stage
// runs end to end; model-only mode skips the error pattern (expected-value
// analysis). Leakage accounting for the key length always uses the
// M f_EC h(E_tol) model either way.
enum class EcMode { Transparent, ModelOnly };

struct ProtocolOptions {
    EcMode ec_mode = EcMode::Transparent;
    // Toy-scale sessions pin the post-PA length instead of deriving it from
    // the finite-key estimate, which is vacuous at M = 16..64.
    std::optional<std::int64_t> fixed_length;
    double hat_eps_cor = 1e-8;  // EV tag sizing: ceil(log2(2 / hat_eps_cor))
    PeBudgets pe_budgets;       // budgets for the in-protocol estimate
    double eps_pa = 1e-10;
    double delta = 1e-10;
    double f_ec = 1.16;
    double e_tol = 0.05;        // leakage model input for the l computation
    bool ev_inject_flip = false;  // flip one corrected-key bit before EV
};

struct ProtocolResult {
    bool aborted = false;
    std::string abort_phase;
    std::int64_t length = 0;          // l used for PA
    std::vector<double> h_eps;        // per-pair entropy proxies from PE
    BitString key_a, key_b;           // finalized keys (empty when aborted)
    bool keys_equal = false;
    std::size_t auth_bits_consumed = 0;
};

// Runs Protocol steps 1-6 over the given session: distribution of data with
// consistency tests, sifting through RBS subset selection, parameter
// estimation, RBS selection of the EV/PA hashes, information reconciliation
// acting on the first share, error verification, and share-wise PA.
ProtocolResult run_protocol(Session& session, const ProtocolInputs& inputs,
                            const ChannelParams& params, const AdversaryScript& script,
                            const ProtocolOptions& options);

ProtocolResult run_protocol(const DeploymentConfig& deploy, const ProtocolInputs& inputs,
                            const ChannelParams& params, const AdversaryScript& script,
                            std::uint64_t seed, const ProtocolOptions& options);

// MV across every unit's copies of each final-key share, then XOR.
BitString finalize_key(Session& s, LabId lab, const std::string& label);

}  // namespace qkdpp
