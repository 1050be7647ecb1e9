#include "qcav/cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <string>
#include <vector>

namespace {

// shared flag state filled by CLI11, folded into RunConfig afterwards so the
// precedence is: defaults < config file < named flags < --set overrides
struct FlagState {
    std::string config_path;
    std::string system;
    std::string out;
    int threads = 0;
    std::vector<std::string> sets;
};

void add_common_flags(CLI::App* cmd, FlagState& fs) {
    cmd->add_option("--config", fs.config_path, "key = value config file");
    cmd->add_option("--system", fs.system,
                    "single | bimodal | effective | molecule");
    cmd->add_option("--out", fs.out, "output path");
    cmd->add_option("--threads", fs.threads, "worker threads for sweeps");
    cmd->add_option("--set", fs.sets, "override, e.g. --set g_a=12.5")
        ->take_all();
}

qcav::RunConfig resolve_config(const FlagState& fs) {
    qcav::RunConfig cfg;
    if (!fs.config_path.empty()) cfg = qcav::parse_config_file(fs.config_path);
    if (!fs.system.empty()) qcav::apply_override(cfg, "system", fs.system);
    if (!fs.out.empty()) cfg.out_path = fs.out;
    if (fs.threads > 0) cfg.threads = fs.threads;
    for (const auto& kv : fs.sets) {
        const size_t eq = kv.find('=');
        if (eq == std::string::npos)
            throw qcav::ConfigError("--set expects key=value, got '" + kv + "'");
        std::string key = kv.substr(0, eq);
        std::string value = kv.substr(eq + 1);
        auto strip = [](std::string& s) {
            while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.erase(s.begin());
            while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.pop_back();
        };
        strip(key);
        strip(value);
        qcav::apply_override(cfg, key, value);
    }
    return cfg;
}

}  // namespace

namespace qcav {

int cli_main(int argc, char** argv) {
    CLI::App app{"steady-state photon statistics of a driven quantum-dot cavity"};
    app.require_subcommand(1);

    FlagState solve_fs, sweep_fs, manifold_fs;
    std::string preset;
    int n_quanta = 1;

    CLI::App* solve = app.add_subcommand("solve", "single steady-state point");
    add_common_flags(solve, solve_fs);

    CLI::App* sweep = app.add_subcommand("sweep", "parameter sweep to CSV");
    add_common_flags(sweep, sweep_fs);
    sweep->add_option("--preset", preset, "figure preset name");

    CLI::App* manifold =
        app.add_subcommand("manifold", "n-quanta eigenvalue listing");
    add_common_flags(manifold, manifold_fs);
    manifold->add_option("n", n_quanta, "manifold quantum number")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;  // usage errors map to 2, --help to 0
    }

    try {
        if (solve->parsed()) {
            const RunConfig cfg = resolve_config(solve_fs);
            if (!cfg.out_path.empty()) {
                std::ofstream out(cfg.out_path, std::ios::binary);
                if (!out) {
                    std::cerr << "solve: cannot write '" << cfg.out_path << "'\n";
                    return 2;
                }
                return cmd_solve(cfg, out, std::cerr);
            }
            return cmd_solve(cfg, std::cout, std::cerr);
        }
        if (sweep->parsed()) {
            const RunConfig cfg = resolve_config(sweep_fs);
            return cmd_sweep(cfg, preset, std::cerr);
        }
        const RunConfig cfg = resolve_config(manifold_fs);
        return cmd_manifold(cfg, n_quanta, std::cout, std::cerr);
    } catch (const ConfigError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}

}  // namespace qcav
