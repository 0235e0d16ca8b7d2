#pragma once

#include <string>

#include "qkdpp/protocol.hpp"

namespace qkdpp {

// Protocol-simulation scenario parsed from a flat key-value file. See
// docs/formats.md for the schema.
struct ScenarioFile {
    ProtocolInputs inputs;
    ChannelParams params;
    CorruptionModel module_model = CorruptionModel::AC;
    CorruptionModel unit_model = CorruptionModel::AC;
    int t_q = 0;
    int t_c = 0;
    std::uint64_t seed = 1;
    ProtocolOptions options;
    AdversaryScript script;
};

struct scenario_parse_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

ScenarioFile parse_scenario(const std::string& text);
ScenarioFile load_scenario(const std::string& path);
DeploymentConfig deployment_for(const ScenarioFile& sc);

PartyId parse_party(const std::string& name);  // e.g. "Aq0", "Bc2"

}  // namespace qkdpp
