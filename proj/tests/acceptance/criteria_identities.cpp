#include "acceptance/acceptance.hpp"

#include <cmath>

#include "qkdpp/sweep.hpp"

using namespace qkdpp;

namespace {

std::vector<double> grid_13() {
    std::vector<double> g;
    for (double x = 0.0; x <= 60.0; x += 5.0) g.push_back(x);
    return g;
}

// Fixed per-scheme operating points with extractable key at low loss.
ProtocolInputs fixed_inputs(Scheme scheme, double block) {
    ProtocolInputs in;
    in.scheme = scheme;
    in.block_size = block;
    if (scheme == Scheme::MDI) {
        in.lambda = 0.2;
        in.mu = 0.2;
        in.nu = 0.05;
        in.omega = 1e-3;
        in.q_z = 0.3;
        in.p_mu = 0.25;
        in.p_nu = 0.4;
        in.p_omega = 0.35;
    } else {
        in.mu = 0.6;
        in.nu = 0.1;
        in.omega = 1e-3;
        in.q_z = 0.7;
        in.p_mu = 0.5;
        in.p_nu = 0.3;
        in.p_omega = 0.2;
    }
    return in;
}

}  // namespace

// Criterion 2: l_PN(n_q = 2) equals l_AC,1 as exact integers across the loss
// grid, both schemes, both block sizes. Both scenarios share n_q = 2, so N
// and E_tol coincide without overrides.
CriterionResult criterion_2_pn_ac1_identity() {
    const Preset preset = preset_by_name("paper-2020-defaults");
    int points = 0;
    for (const Scheme scheme : {Scheme::MDI, Scheme::BB84}) {
        for (const double block : {1e5, 1e6}) {
            const ProtocolInputs in = fixed_inputs(scheme, block);
            for (const double loss : grid_13()) {
                ChannelParams params = preset.params;
                params.loss_db = loss;
                const Scenario ac1{CorruptionModel::AC, CorruptionModel::AC, 1, 1};
                const Scenario pn{CorruptionModel::PN, CorruptionModel::PN, 2, 2};
                const RatePoint a = evaluate_rate_point(ac1, params, in, preset.budget);
                const RatePoint p = evaluate_rate_point(pn, params, in, preset.budget);
                if (a.l != p.l)
                    return {false, "l mismatch at " + std::to_string(loss) + " dB: " +
                                       std::to_string(a.l) + " vs " + std::to_string(p.l)};
                if (a.rounds != p.rounds || a.e_tol != p.e_tol)
                    return {false, "shared-input divergence at " + std::to_string(loss) + " dB"};
                // the rates differ only through the authentication cost
                const double gap = (p.k_rate - a.k_rate) * 2.0 * static_cast<double>(a.rounds);
                const double expect = a.l_au - p.l_au;
                if (std::abs(gap - expect) > 1e-9 * std::max(1.0, std::abs(expect)))
                    return {false, "rate gap is not the auth-cost gap at " + std::to_string(loss)};
                ++points;
            }
        }
    }
    return {true, std::to_string(points) + " grid points, exact integer equality"};
}

// Criterion 3: l_AC,t = l_honest for t in {1,3,5} at fixed (N, E_tol).
CriterionResult criterion_3_ac_honest_identity() {
    const Preset preset = preset_by_name("paper-2020-defaults");
    int points = 0;
    for (const Scheme scheme : {Scheme::MDI, Scheme::BB84}) {
        for (const double block : {1e5, 1e6}) {
            const ProtocolInputs in = fixed_inputs(scheme, block);
            for (const double loss : grid_13()) {
                ChannelParams params = preset.params;
                params.loss_db = loss;
                const Scenario honest{CorruptionModel::AC, CorruptionModel::AC, 0, 0};
                const RatePoint base = evaluate_rate_point(honest, params, in, preset.budget);
                const RateOverrides shared{base.rounds, base.e_tol};
                for (const int t : {1, 3, 5}) {
                    const Scenario sc{CorruptionModel::AC, CorruptionModel::AC, t, t};
                    const RatePoint pt = evaluate_rate_point(sc, params, in, preset.budget, shared);
                    if (pt.l != base.l)
                        return {false, "t=" + std::to_string(t) + " at " + std::to_string(loss) +
                                           " dB: l=" + std::to_string(pt.l) + " vs honest " +
                                           std::to_string(base.l)};
                    ++points;
                }
            }
        }
    }
    return {true, std::to_string(points) + " comparisons, exact integer equality"};
}

// Criterion 4: K_honest / (t+1) - K_AC,t = delta l_AU / ((t+1) N) to 1e-12
// relative error at shared (N, E_tol).
CriterionResult criterion_4_rate_gap_identity() {
    const Preset preset = preset_by_name("paper-2020-defaults");
    double worst = 0.0;
    for (const Scheme scheme : {Scheme::MDI, Scheme::BB84}) {
        for (const double block : {1e5, 1e6}) {
            const ProtocolInputs in = fixed_inputs(scheme, block);
            for (const double loss : grid_13()) {
                ChannelParams params = preset.params;
                params.loss_db = loss;
                const Scenario honest{CorruptionModel::AC, CorruptionModel::AC, 0, 0};
                const RatePoint base = evaluate_rate_point(honest, params, in, preset.budget);
                const RateOverrides shared{base.rounds, base.e_tol};
                for (const int t : {1, 3, 5}) {
                    const Scenario sc{CorruptionModel::AC, CorruptionModel::AC, t, t};
                    const RatePoint pt = evaluate_rate_point(sc, params, in, preset.budget, shared);
                    const double lhs = base.k_rate / (t + 1.0) - pt.k_rate;
                    const double rhs =
                        (pt.l_au - base.l_au) / ((t + 1.0) * static_cast<double>(base.rounds));
                    const double scale = std::max({std::abs(lhs), std::abs(rhs), 1e-300});
                    const double rel = std::abs(lhs - rhs) / scale;
                    worst = std::max(worst, rel);
                    if (rel > 1e-12)
                        return {false, "relative error " + std::to_string(rel) + " at t=" +
                                           std::to_string(t) + ", " + std::to_string(loss) + " dB"};
                }
            }
        }
    }
    return {true, "worst relative error " + std::to_string(worst)};
}

// Criterion 5: with M = 1e5 and t = 5 the AC rate is nonpositive on the whole
// grid; with M = 1e6 the honest MDI curve is positive below 20 dB.
CriterionResult criterion_5_vanishing_rate() {
    SweepConfig ac5;
    ac5.scheme = Scheme::MDI;
    ac5.scenario = Scenario{CorruptionModel::AC, CorruptionModel::AC, 5, 5};
    ac5.loss_grid_db = grid_13();
    ac5.block_size = 1e5;
    ac5.seed = 11;
    ac5.optimizer_starts = 20;
    const auto points5 = run_sweep(ac5);
    for (const auto& p : points5)
        if (p.k_rate > 0.0)
            return {false, "K > 0 at " + std::to_string(p.loss_db) + " dB for t=5, M=1e5"};

    SweepConfig honest;
    honest.scheme = Scheme::MDI;
    honest.scenario = Scenario{CorruptionModel::AC, CorruptionModel::AC, 0, 0};
    honest.loss_grid_db = {0.0, 5.0, 10.0, 15.0};
    honest.block_size = 1e6;
    honest.seed = 13;
    honest.optimizer_starts = 20;
    const auto points_h = run_sweep(honest);
    bool positive = false;
    for (const auto& p : points_h)
        if (p.loss_db < 20.0 && p.k_rate > 0.0) positive = true;
    if (!positive) return {false, "honest M=1e6 curve never positive below 20 dB"};
    return {true, "t=5 curve vanishes on all 13 points; honest curve positive"};
}
