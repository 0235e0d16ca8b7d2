#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace qkdpp {

enum class Scheme { MDI, BB84 };

enum class CorruptionModel { AC, AN, PC, PN };

inline bool is_active(CorruptionModel m) { return m == CorruptionModel::AC || m == CorruptionModel::AN; }
inline bool is_collaborative(CorruptionModel m) { return m == CorruptionModel::AC || m == CorruptionModel::PC; }

std::string_view to_string(CorruptionModel m);
CorruptionModel corruption_model_from_string(std::string_view s);
std::string_view to_string(Scheme s);
Scheme scheme_from_string(std::string_view s);

// Optical setup shared by both schemes. loss_db is the total Alice-Bob
// channel loss; the MDI node sits halfway, so each arm carries loss_db / 2.
struct ChannelParams {
    double eta_det = 0.65;
    double p_d = 7.2e-8;
    double delta_mis = 0.08;  // radians
    double alpha_att = 0.2;   // dB/km, only used to convert distances
    double loss_db = 0.0;

    double eta_arm() const;    // one-sided transmittance times eta_det (MDI)
    double eta_total() const;  // end-to-end transmittance times eta_det (BB84)
};

// Protocol inputs: intensities, basis/decoy probabilities and block geometry.
// lambda is the MDI Z-basis signal intensity (unused by BB84, where the three
// decoy intensities serve both bases).
struct ProtocolInputs {
    Scheme scheme = Scheme::MDI;
    double lambda = 0.5;
    double mu = 0.3;
    double nu = 0.05;
    double omega = 1e-3;
    double q_z = 0.7;
    double p_mu = 0.5;
    double p_nu = 0.3;
    double p_omega = 0.2;
    double block_size = 1e6;  // M
    double f_ec = 1.16;

    double q_x() const { return 1.0 - q_z; }
    void validate() const;
};

}  // namespace qkdpp
