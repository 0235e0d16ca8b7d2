#include "qkdpp/scenario.hpp"

#include <fstream>
#include <sstream>

namespace qkdpp {

PartyId parse_party(const std::string& name) {
    if (name.size() < 3) throw scenario_parse_error("bad party name: " + name);
    const LabId lab = name[0] == 'A' ? LabId::Alice
                      : name[0] == 'B' ? LabId::Bob
                                       : throw scenario_parse_error("bad lab in: " + name);
    const Role role = name[1] == 'q' ? Role::QkdModule
                      : name[1] == 'c' ? Role::CpUnit
                                       : throw scenario_parse_error("bad role in: " + name);
    return PartyId{lab, role, std::stoi(name.substr(2))};
}

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

Behavior parse_behavior(const std::string& spec) {
    Behavior b;
    std::istringstream is(spec);
    std::string item;
    while (std::getline(is, item, ',')) {
        item = trim(item);
        if (item == "leak") b.leak = true;
        else if (item == "false-abort") b.false_abort = true;
        else if (item == "lie-reconstruct") b.lie_in_reconstruct = true;
        else if (item == "inconsistent-deal") b.inconsistent_deal = true;
        else if (item == "silent-deal") b.silent_deal = true;
        else if (item == "short-rbs") b.short_rbs_deal = true;
        else if (item == "no-echo") b.echo_in_consistency = false;
        else if (item.rfind("tamper", 0) == 0) {
            b.tamper = true;
            const auto colon = item.find(':');
            if (colon != std::string::npos) b.tamper_class = item.substr(colon + 1);
        } else {
            throw scenario_parse_error("unknown behavior: " + item);
        }
    }
    return b;
}

}  // namespace

ScenarioFile parse_scenario(const std::string& text) {
    ScenarioFile sc;
    sc.inputs.block_size = 64;
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw scenario_parse_error("line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        try {
            if (key == "scheme") sc.inputs.scheme = scheme_from_string(value);
            else if (key == "module_model") sc.module_model = corruption_model_from_string(value);
            else if (key == "unit_model") sc.unit_model = corruption_model_from_string(value);
            else if (key == "t_q") sc.t_q = std::stoi(value);
            else if (key == "t_c") sc.t_c = std::stoi(value);
            else if (key == "block_size") sc.inputs.block_size = std::stod(value);
            else if (key == "loss_db") sc.params.loss_db = std::stod(value);
            else if (key == "seed") sc.seed = std::stoull(value);
            else if (key == "lambda") sc.inputs.lambda = std::stod(value);
            else if (key == "mu") sc.inputs.mu = std::stod(value);
            else if (key == "nu") sc.inputs.nu = std::stod(value);
            else if (key == "omega") sc.inputs.omega = std::stod(value);
            else if (key == "q_z") sc.inputs.q_z = std::stod(value);
            else if (key == "p_mu") sc.inputs.p_mu = std::stod(value);
            else if (key == "p_nu") sc.inputs.p_nu = std::stod(value);
            else if (key == "p_omega") sc.inputs.p_omega = std::stod(value);
            else if (key == "ec_mode")
                sc.options.ec_mode = value == "model-only" ? EcMode::ModelOnly : EcMode::Transparent;
            else if (key == "fixed_length") sc.options.fixed_length = std::stoll(value);
            else if (key == "e_tol") sc.options.e_tol = std::stod(value);
            else if (key == "ev_inject_flip") sc.options.ev_inject_flip = value == "true";
            else if (key == "collaborative") sc.script.collaborative = value == "true";
            else if (key == "wire_tamper") sc.script.wire_tamper_classes.insert(value);
            else if (key == "corrupt") {
                const auto space = value.find(' ');
                const std::string who = value.substr(0, space);
                const std::string how = space == std::string::npos ? "leak" : trim(value.substr(space + 1));
                sc.script.corrupted[parse_party(who)] = parse_behavior(how);
            } else {
                throw scenario_parse_error("unknown key: " + key);
            }
        } catch (const scenario_parse_error&) {
            throw;
        } catch (const std::exception& e) {
            throw scenario_parse_error("line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return sc;
}

ScenarioFile load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw scenario_parse_error("cannot open scenario file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str());
}

DeploymentConfig deployment_for(const ScenarioFile& sc) {
    DeploymentConfig d;
    d.module_model = sc.module_model;
    d.unit_model = sc.unit_model;
    d.t_q = sc.t_q;
    d.t_c = sc.t_c;
    d.n_q = sc.module_model == CorruptionModel::PN ? 2 : sc.t_q + 1;
    d.n_c = static_cast<int>(resource_row(sc.unit_model, sc.t_c).n_c);
    return d;
}

}  // namespace qkdpp
