#include "qkdpp/types.hpp"

#include <cmath>

namespace qkdpp {

std::string_view to_string(CorruptionModel m) {
    switch (m) {
        case CorruptionModel::AC: return "AC";
        case CorruptionModel::AN: return "AN";
        case CorruptionModel::PC: return "PC";
        case CorruptionModel::PN: return "PN";
    }
    return "?";
}

CorruptionModel corruption_model_from_string(std::string_view s) {
    if (s == "AC" || s == "ac") return CorruptionModel::AC;
    if (s == "AN" || s == "an") return CorruptionModel::AN;
    if (s == "PC" || s == "pc") return CorruptionModel::PC;
    if (s == "PN" || s == "pn") return CorruptionModel::PN;
    throw std::invalid_argument("unknown corruption model: " + std::string(s));
}

std::string_view to_string(Scheme s) {
    return s == Scheme::MDI ? "mdi" : "bb84";
}

Scheme scheme_from_string(std::string_view s) {
    if (s == "mdi" || s == "MDI") return Scheme::MDI;
    if (s == "bb84" || s == "BB84") return Scheme::BB84;
    throw std::invalid_argument("unknown scheme: " + std::string(s));
}

double ChannelParams::eta_arm() const {
    return eta_det * std::pow(10.0, -loss_db / 2.0 / 10.0);
}

double ChannelParams::eta_total() const {
    return eta_det * std::pow(10.0, -loss_db / 10.0);
}

void ProtocolInputs::validate() const {
    if (!(mu > nu && nu > omega && omega >= 0.0))
        throw std::invalid_argument("intensities must satisfy mu > nu > omega >= 0");
    if (!(q_z > 0.0 && q_z < 1.0)) throw std::invalid_argument("q_z must lie in (0,1)");
    const double ps = p_mu + p_nu + p_omega;
    if (std::abs(ps - 1.0) > 1e-9) throw std::invalid_argument("decoy probabilities must sum to 1");
    if (p_mu <= 0.0 || p_nu <= 0.0 || p_omega <= 0.0)
        throw std::invalid_argument("decoy probabilities must be positive");
    if (scheme == Scheme::MDI && lambda <= 0.0) throw std::invalid_argument("lambda must be positive");
    if (block_size < 1.0) throw std::invalid_argument("block size must be at least 1");
}

}  // namespace qkdpp
