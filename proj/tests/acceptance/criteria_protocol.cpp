#include "acceptance/acceptance.hpp"

#include <atomic>
#include <random>

#include "qkdpp/auth.hpp"
#include "qkdpp/protocol.hpp"
#include "qkdpp/toeplitz.hpp"

using namespace qkdpp;

namespace {

ProtocolInputs toy_inputs(double block, Scheme scheme = Scheme::MDI) {
    ProtocolInputs in;
    in.scheme = scheme;
    in.lambda = 0.5;
    in.mu = 0.3;
    in.nu = 0.05;
    in.omega = 1e-3;
    in.q_z = 0.7;
    in.p_mu = 0.5;
    in.p_nu = 0.3;
    in.p_omega = 0.2;
    in.block_size = block;
    return in;
}

DeploymentConfig make_deploy(CorruptionModel mm, CorruptionModel um) {
    DeploymentConfig d;
    d.module_model = mm;
    d.unit_model = um;
    d.t_q = mm == CorruptionModel::PN ? 2 : 1;
    d.t_c = um == CorruptionModel::PN ? 2 : 1;
    d.n_q = 2;
    d.n_c = static_cast<int>(resource_row(um, d.t_c).n_c);
    return d;
}

Behavior random_behavior(std::mt19937_64& rng, bool active_allowed, bool dealer_role) {
    Behavior b;
    b.leak = rng() & 1u;
    if (!active_allowed) return b;
    if (dealer_role) {
        switch (rng() % 5) {
            case 0: b.inconsistent_deal = true; break;
            case 1: b.silent_deal = true; break;
            case 2: b.tamper = true; b.tamper_class = "info"; break;
            case 3: b.short_rbs_deal = true; break;  // deals a truncated raw key
            default: break;
        }
        b.echo_in_consistency = rng() & 1u;
        return b;
    }
    switch (rng() % 7) {
        case 0: b.tamper = true; b.tamper_class = "vss-consistency"; break;
        case 1: b.tamper = true; b.tamper_class = "vss-reconstruct"; break;
        case 2: b.tamper = true; b.tamper_class = "lab-info"; break;
        case 3: b.lie_in_reconstruct = true; break;
        case 4: b.false_abort = true; break;
        case 5: b.echo_in_consistency = false; b.tamper = true; b.tamper_class = "unused"; break;
        default: break;
    }
    return b;
}

AdversaryScript random_script(const DeploymentConfig& d, std::mt19937_64& rng) {
    AdversaryScript script;
    script.collaborative = is_collaborative(d.unit_model);
    const bool modules_active = is_active(d.module_model);
    const bool units_active = is_active(d.unit_model);
    // corrupt up to t_q pairs (every pair under PN)
    const int max_pairs = d.module_model == CorruptionModel::PN ? d.n_q : d.t_q;
    const int n_pairs = static_cast<int>(rng() % (max_pairs + 1));
    for (int k = 0; k < n_pairs; ++k) {
        const int j = static_cast<int>(rng() % d.n_q);
        if (rng() & 1u)
            script.corrupted[module_id(LabId::Alice, j)] = random_behavior(rng, modules_active, true);
        if (rng() & 1u)
            script.corrupted[module_id(LabId::Bob, j)] = random_behavior(rng, modules_active, true);
    }
    for (const LabId lab : {LabId::Alice, LabId::Bob}) {
        const int max_units = d.unit_model == CorruptionModel::PN ? d.n_c : d.t_c;
        const int n_units = static_cast<int>(rng() % (max_units + 1));
        std::vector<int> units(d.n_c);
        for (int u = 0; u < d.n_c; ++u) units[u] = u;
        std::shuffle(units.begin(), units.end(), rng);
        for (int k = 0; k < n_units; ++k)
            script.corrupted[unit_id(lab, units[k])] = random_behavior(rng, units_active, false);
    }
    return script;
}

}  // namespace

// Criterion 8: 1e3 fuzzed toy sessions per model combination in {AC, PN}^2:
// every non-abort yields equal finalized keys; EV bit-flip injection aborts
// in all 1e4 trials.
CriterionResult criterion_8_protocol_end_to_end() {
    const ChannelParams params;  // 0 dB, real misalignment
    ProtocolOptions opt;
    opt.fixed_length = 32;
    int completed_total = 0;
    for (const CorruptionModel mm : {CorruptionModel::AC, CorruptionModel::PN}) {
        for (const CorruptionModel um : {CorruptionModel::AC, CorruptionModel::PN}) {
            const DeploymentConfig d = make_deploy(mm, um);
            std::atomic<int> completed{0};
            std::atomic<int> violations{0};
            const int sessions = 1000;
#pragma omp parallel for schedule(dynamic)
            for (int t = 0; t < sessions; ++t) {
                std::mt19937_64 rng(4242ull * t + 17);
                const AdversaryScript script = random_script(d, rng);
                Session session(d, 31337ull * t + 3);
                session.set_transcript_enabled(false);
                const Scheme scheme = t % 4 == 3 ? Scheme::BB84 : Scheme::MDI;
                const ProtocolResult res =
                    run_protocol(session, toy_inputs(64, scheme), params, script, opt);
                if (res.aborted) continue;
                ++completed;
                if (!res.keys_equal) ++violations;
            }
            if (violations != 0)
                return {false, std::string(to_string(mm)) + "/" + std::string(to_string(um)) +
                                   ": " + std::to_string(violations) + " key mismatches"};
            if (completed == 0)
                return {false, std::string(to_string(mm)) + "/" + std::string(to_string(um)) +
                                   ": every session aborted"};
            completed_total += completed;
        }
    }

    // EV injection: a flipped corrected-key bit must abort every time.
    const DeploymentConfig d = make_deploy(CorruptionModel::PN, CorruptionModel::PN);
    ProtocolOptions ev = opt;
    ev.ev_inject_flip = true;
    std::atomic<int> survived{0};
    const int ev_trials = 10000;
#pragma omp parallel for schedule(dynamic)
    for (int t = 0; t < ev_trials; ++t) {
        Session session(d, 777ull * t + 1);
        session.set_transcript_enabled(false);
        const ProtocolResult res =
            run_protocol(session, toy_inputs(64), params, AdversaryScript{}, ev);
        if (!res.aborted) ++survived;
    }
    if (survived != 0) return {false, std::to_string(survived) + " EV injections went unnoticed"};
    return {true, std::to_string(completed_total) + " clean completions, 1e4 EV aborts"};
}

// Criterion 11: reconstruct and each linear stage commute exactly over 100
// random toy sessions: sifting projection, syndrome, EV hash, PA hash.
CriterionResult criterion_11_sharewise_linearity() {
    for (int trial = 0; trial < 100; ++trial) {
        const CorruptionModel um = trial % 2 == 0 ? CorruptionModel::AC : CorruptionModel::PN;
        const DeploymentConfig d = make_deploy(CorruptionModel::AC, um);
        Session s(d, 5000ull + trial);
        s.set_transcript_enabled(false);
        std::mt19937_64 rng(900ull + trial);
        const std::size_t len = 64 + rng() % 64;
        const BitString m = BitString::random(len, rng);
        if (!vss_share(s, module_id(LabId::Bob, 0), LabId::Bob, "m", m))
            return {false, "unexpected share abort"};

        // sifting projection
        BitString mask(len);
        for (std::size_t i = 0; i < len; ++i) mask.set(i, rng() & 1u);
        vss_map_linear(s, LabId::Bob, "m", "sift",
                       [&mask](const BitString& v) { return v.select_mask(mask); });
        if (!(vss_reconstruct(s, LabId::Bob, "sift").begin()->second == m.select_mask(mask)))
            return {false, "sifting projection does not commute"};

        // syndrome (transparent: identity)
        vss_map_linear(s, LabId::Bob, "m", "sy", [](const BitString& v) { return v; });
        if (!(vss_reconstruct(s, LabId::Bob, "sy").begin()->second == m))
            return {false, "syndrome map does not commute"};

        // EV hash (LFSR-Toeplitz)
        const std::size_t ev_k = 16;
        const BitString ev_desc = BitString::random(2 * ev_k, rng);
        vss_map_linear(s, LabId::Bob, "m", "ev",
                       [&](const BitString& v) { return lfsr_toeplitz(ev_desc, ev_k, v); });
        if (!(vss_reconstruct(s, LabId::Bob, "ev").begin()->second == lfsr_toeplitz(ev_desc, ev_k, m)))
            return {false, "EV hash does not commute"};

        // PA hash (Toeplitz)
        const std::size_t out = 24;
        const ToeplitzHash pa =
            ToeplitzHash::from_seed(BitString::random(len + out - 1, rng), len, out);
        vss_map_linear(s, LabId::Bob, "m", "pa",
                       [&pa](const BitString& v) { return toeplitz_apply(pa, v); });
        if (!(vss_reconstruct(s, LabId::Bob, "pa").begin()->second == toeplitz_apply(pa, m)))
            return {false, "PA hash does not commute"};
    }
    return {true, "100 sessions, 4 stages each, exact"};
}
