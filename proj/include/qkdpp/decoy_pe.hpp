#pragma once

#include "qkdpp/channel_bb84.hpp"
#include "qkdpp/channel_mdi.hpp"
#include "qkdpp/types.hpp"

namespace qkdpp {

// Per-inequality error probabilities. The key engine assigns the common
// gamma_sec to every slot; the bound-validity tests drive them independently.
struct PeBudgets {
    double eps_pair = 1e-10;       // eps_{a,b}, one per decoy pair (MDI lower bound)
    double eps_pair_prime = 1e-10; // eps'_{a,b} (MDI upper bound)
    double eps_serfling = 1e-10;   // eps_S
    double eps_chernoff = 1e-10;   // eps_C
    double eps_hoeffding = 1e-10;  // eps_H (BB84)

    static PeBudgets common(double gamma_sec) {
        return PeBudgets{gamma_sec, gamma_sec, gamma_sec, gamma_sec, gamma_sec};
    }
};

struct PeResultMdi {
    double s11x_l = 0.0;
    double e11x_u = 0.0;
    double n11z_l_sent = 0.0, n11z_u_sent = 0.0;  // bounds on N_{11,Z}
    double n11x_l_sent = 0.0, n11x_u_sent = 0.0;  // bounds on N_{11,X}
    double s11z_l = 0.0;
    double n11z_l = 0.0;   // single-photon successes in the Z' sample
    double e11z_u = 0.0;
    double phi11z_u = 0.0;
    double eps_smooth = 0.0;
    bool no_key = false;   // n11z_l == 0: phi undefined, l := 0 downstream
};

// Decoy lower bound on the single-photon successes in the X sets, maximised
// over the nine printed vector pairs. Fails with probability 9 * eps_pair.
double mdi_s11x_lower(const MdiObservables& obs, const ProtocolInputs& inputs, double eps_pair);

// Decoy upper bound on the single-photon X errors over all a0>a1, b0>b1
// combinations. Fails with probability 9 * eps_pair_prime.
double mdi_e11x_upper(const MdiObservables& obs, const ProtocolInputs& inputs, double eps_pair_prime);

// Chernoff + double Serfling transfer from the X estimates to the key basis.
PeResultMdi mdi_transfer_to_z(double s11x_l, double e11x_u, const MdiObservables& obs,
                              const ProtocolInputs& inputs, double rounds, const PeBudgets& budgets);

PeResultMdi mdi_pe(const MdiObservables& obs, const ProtocolInputs& inputs, double rounds,
                   const PeBudgets& budgets);

struct PeResultBb84 {
    double n1z_l = 0.0;
    double s1x_l = 0.0;
    double e1x_u = 0.0;
    double e1z_u = 0.0;
    double phi1z_u = 0.0;
    double eps_smooth = 0.0;
    bool no_key = false;
};

// Requires mu > nu + omega and nu > omega >= 0.
PeResultBb84 bb84_pe(const Bb84Observables& obs, const ProtocolInputs& inputs,
                     const PeBudgets& budgets);

}  // namespace qkdpp
