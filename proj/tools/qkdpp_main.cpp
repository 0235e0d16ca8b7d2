#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "qkdpp/scenario.hpp"
#include "qkdpp/stat_bounds.hpp"
#include "qkdpp/sweep.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitAbort = 3;
constexpr int kExitNumerical = 4;

std::vector<double> parse_grid(const std::string& spec) {
    // "a:b:step" or comma-separated values
    std::vector<double> grid;
    const auto c1 = spec.find(':');
    if (c1 != std::string::npos) {
        const auto c2 = spec.find(':', c1 + 1);
        if (c2 == std::string::npos) throw CLI::ValidationError("--loss", "expected a:b:step");
        const double a = std::stod(spec.substr(0, c1));
        const double b = std::stod(spec.substr(c1 + 1, c2 - c1 - 1));
        const double step = std::stod(spec.substr(c2 + 1));
        for (double x = a; x <= b + 1e-9; x += step) grid.push_back(x);
        return grid;
    }
    std::istringstream is(spec);
    std::string item;
    while (std::getline(is, item, ',')) grid.push_back(std::stod(item));
    return grid;
}

int cmd_rate_sweep(const qkdpp::SweepConfig& cfg, const std::string& output,
                   const std::string& gnuplot_out) {
    const auto points = qkdpp::run_sweep(cfg);
    const std::string csv = qkdpp::sweep_csv(cfg, points);
    if (output.empty() || output == "-") {
        std::cout << csv;
    } else {
        std::ofstream out(output, std::ios::binary);
        if (!out) {
            std::cerr << "cannot open output file: " << output << "\n";
            return kExitUsage;
        }
        out << csv;
    }
    if (!gnuplot_out.empty()) {
        std::ofstream out(gnuplot_out, std::ios::binary);
        out << "# loss_db K\n";
        char buf[80];
        for (const auto& p : points) {
            std::snprintf(buf, sizeof buf, "%.17g %.17g\n", p.loss_db, p.k_rate);
            out << buf;
        }
    }
    return kExitOk;
}

int cmd_simulate(const std::string& path, const std::string& transcript_path, bool quiet) {
    qkdpp::ScenarioFile sc;
    try {
        sc = qkdpp::load_scenario(path);
    } catch (const qkdpp::scenario_parse_error& e) {
        std::cerr << "scenario error: " << e.what() << "\n";
        return kExitUsage;
    }
    qkdpp::Session session(qkdpp::deployment_for(sc), sc.seed);
    const qkdpp::ProtocolResult res =
        qkdpp::run_protocol(session, sc.inputs, sc.params, sc.script, sc.options);
    if (!transcript_path.empty()) {
        std::ofstream out(transcript_path, std::ios::binary);
        out << session.transcript_text();
    }
    if (!quiet) {
        if (res.aborted) {
            std::cout << "verdict: aborted phase=" << res.abort_phase << "\n";
        } else {
            std::cout << "verdict: completed l=" << res.length
                      << " keys_equal=" << (res.keys_equal ? "yes" : "no")
                      << " key_a=" << res.key_a.to_hex() << " key_b=" << res.key_b.to_hex()
                      << " auth_bits=" << res.auth_bits_consumed << "\n";
        }
    }
    return res.aborted ? kExitAbort : kExitOk;
}

int cmd_resources(const std::string& model_name, int t_lo, int t_hi) {
    std::cout << "model t n_c R r note\n";
    const auto models = model_name == "all"
                            ? std::vector<std::string>{"AC", "AN", "PC", "PN"}
                            : std::vector<std::string>{model_name};
    for (const auto& name : models) {
        const qkdpp::CorruptionModel model = qkdpp::corruption_model_from_string(name);
        for (int t = t_lo; t <= t_hi; ++t) {
            const qkdpp::ResourceRow row = qkdpp::resource_row(model, t);
            std::cout << name << " " << t << " " << row.n_c << " " << row.redundancy << " "
                      << row.shares_per_party;
            if (model == qkdpp::CorruptionModel::AC)
                std::cout << "  # shares per unit grow combinatorially: C(n_c-1,t)";
            else if (model == qkdpp::CorruptionModel::AN)
                std::cout << "  # n_c=2t+2 beats the 3t+1 a broadcast-based scheme needs";
            std::cout << "\n";
        }
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"distributed QKD post-processing: key-rate sweeps, protocol simulation, resource tables"};
    app.require_subcommand(1);

    // rate-sweep
    auto* sweep = app.add_subcommand("rate-sweep", "finite-size key rates over a channel-loss grid");
    std::string scheme = "mdi", module_model = "AC", unit_model = "AC";
    int t = -1, t_q = 0, t_c = 0;
    std::string loss = "0:60:5";
    double block_size = 1e6;
    std::string preset = "paper-2020-defaults", output, gnuplot_out;
    std::uint64_t seed = 1;
    bool no_optimize = false;
    double f_lambda = 0.45, f_mu = 0.25, f_nu = 0.05, f_qz = 0.7, f_pmu = 0.5, f_pnu = 0.3;
    std::string config_path;
    sweep->add_option("--config", config_path, "flat key-value config file; flags override");
    // Config keys share the flag names (without dashes); values loaded here
    // act as defaults that explicit flags then override.
    const std::map<std::string, std::function<void(const std::string&)>> config_keys = {
        {"scheme", [&](const std::string& v) { scheme = v; }},
        {"module-model", [&](const std::string& v) { module_model = v; }},
        {"unit-model", [&](const std::string& v) { unit_model = v; }},
        {"t", [&](const std::string& v) { t = std::stoi(v); }},
        {"t-q", [&](const std::string& v) { t_q = std::stoi(v); }},
        {"t-c", [&](const std::string& v) { t_c = std::stoi(v); }},
        {"loss", [&](const std::string& v) { loss = v; }},
        {"block-size", [&](const std::string& v) { block_size = std::stod(v); }},
        {"preset", [&](const std::string& v) { preset = v; }},
        {"seed", [&](const std::string& v) { seed = std::stoull(v); }},
        {"output", [&](const std::string& v) { output = v; }},
        {"gnuplot", [&](const std::string& v) { gnuplot_out = v; }},
        {"no-optimize", [&](const std::string& v) { no_optimize = v == "true" || v == "1"; }},
        {"lambda", [&](const std::string& v) { f_lambda = std::stod(v); }},
        {"mu", [&](const std::string& v) { f_mu = std::stod(v); }},
        {"nu", [&](const std::string& v) { f_nu = std::stod(v); }},
        {"q-z", [&](const std::string& v) { f_qz = std::stod(v); }},
        {"p-mu", [&](const std::string& v) { f_pmu = std::stod(v); }},
        {"p-nu", [&](const std::string& v) { f_pnu = std::stod(v); }},
    };
    for (int i = 1; i + 1 < argc; ++i) {
        if (std::string(argv[i]) != "--config") continue;
        std::ifstream in(argv[i + 1]);
        if (!in) {
            std::cerr << "cannot open config file: " << argv[i + 1] << "\n";
            return kExitUsage;
        }
        std::string line;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            const auto hash = line.find('#');
            if (hash != std::string::npos) line = line.substr(0, hash);
            const auto eq = line.find('=');
            if (eq == std::string::npos) {
                if (line.find_first_not_of(" \t\r") != std::string::npos) {
                    std::cerr << "config line " << lineno << ": expected key = value\n";
                    return kExitUsage;
                }
                continue;
            }
            auto trim = [](std::string s) {
                const auto b = s.find_first_not_of(" \t\r");
                const auto e = s.find_last_not_of(" \t\r");
                return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
            };
            const std::string key = trim(line.substr(0, eq));
            const std::string value = trim(line.substr(eq + 1));
            const auto it = config_keys.find(key);
            if (it == config_keys.end()) {
                std::cerr << "config line " << lineno << ": unknown key " << key << "\n";
                return kExitUsage;
            }
            try {
                it->second(value);
            } catch (const std::exception&) {
                std::cerr << "config line " << lineno << ": bad value for " << key << "\n";
                return kExitUsage;
            }
        }
    }
    sweep->add_option("--scheme", scheme, "mdi or bb84");
    sweep->add_option("--module-model", module_model, "AC, AN, PC or PN");
    sweep->add_option("--unit-model", unit_model, "AC, AN, PC or PN");
    sweep->add_option("--t", t, "corrupted devices of each kind (sets t_q = t_c)");
    sweep->add_option("--t-q", t_q, "corrupted QKD pairs");
    sweep->add_option("--t-c", t_c, "corrupted CP units per lab");
    sweep->add_option("--loss", loss, "grid in dB: a:b:step or comma list");
    sweep->add_option("--block-size", block_size, "sifted block size M");
    sweep->add_option("--preset", preset, "parameter preset name");
    sweep->add_option("--seed", seed, "optimizer seed");
    sweep->add_option("--output", output, "CSV path (default stdout)");
    sweep->add_option("--gnuplot", gnuplot_out, "also write a gnuplot data file");
    sweep->add_flag("--no-optimize", no_optimize, "evaluate the fixed inputs below instead");
    sweep->add_option("--lambda", f_lambda, "fixed Z intensity (MDI)");
    sweep->add_option("--mu", f_mu, "fixed signal decoy");
    sweep->add_option("--nu", f_nu, "fixed middle decoy");
    sweep->add_option("--q-z", f_qz, "fixed Z-basis probability");
    sweep->add_option("--p-mu", f_pmu, "fixed mu probability");
    sweep->add_option("--p-nu", f_pnu, "fixed nu probability");

    // simulate
    auto* simulate = app.add_subcommand("simulate", "run one protocol session from a scenario file");
    std::string scenario_path, transcript_path;
    bool quiet = false;
    simulate->add_option("scenario", scenario_path, "scenario file")->required();
    simulate->add_option("--transcript", transcript_path, "write the session transcript here");
    simulate->add_flag("--quiet", quiet, "suppress the verdict line");

    // resources
    auto* resources = app.add_subcommand("resources", "minimum device counts per corruption model");
    std::string res_model = "all";
    int res_t = -1, res_t_lo = 1, res_t_hi = 6;
    resources->add_option("--model", res_model, "AC, AN, PC, PN or all");
    resources->add_option("--t", res_t, "single t value (default: table for 1..6)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (sweep->parsed()) {
            qkdpp::SweepConfig cfg;
            cfg.scheme = qkdpp::scheme_from_string(scheme);
            cfg.scenario.module_model = qkdpp::corruption_model_from_string(module_model);
            cfg.scenario.unit_model = qkdpp::corruption_model_from_string(unit_model);
            cfg.scenario.t_q = t >= 0 ? t : t_q;
            cfg.scenario.t_c = t >= 0 ? t : t_c;
            cfg.loss_grid_db = parse_grid(loss);
            cfg.block_size = block_size;
            cfg.preset = preset;
            cfg.seed = seed;
            cfg.optimize = !no_optimize;
            cfg.fixed_inputs.lambda = f_lambda;
            cfg.fixed_inputs.mu = f_mu;
            cfg.fixed_inputs.nu = f_nu;
            cfg.fixed_inputs.q_z = f_qz;
            cfg.fixed_inputs.p_mu = f_pmu;
            cfg.fixed_inputs.p_nu = f_pnu;
            cfg.fixed_inputs.p_omega = 1.0 - f_pmu - f_pnu;
            return cmd_rate_sweep(cfg, output, gnuplot_out);
        }
        if (simulate->parsed()) return cmd_simulate(scenario_path, transcript_path, quiet);
        if (resources->parsed()) {
            if (res_t >= 0) res_t_lo = res_t_hi = res_t;
            return cmd_resources(res_model, res_t_lo, res_t_hi);
        }
    } catch (const qkdpp::numerical_error& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
