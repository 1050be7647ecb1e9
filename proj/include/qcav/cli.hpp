#ifndef QCAV_CLI_HPP
#define QCAV_CLI_HPP

// Command-line front end: flat key=value config ingestion, solve / sweep /
// manifold subcommands, CSV emission (17 significant digits, empty field =
// undefined) plus a reproducibility .meta sidecar.

#include "qcav/sweep.hpp"

#include <iosfwd>
#include <map>
#include <string>

namespace qcav {

enum class OutputFormat { csv, csv_gnuplot };

struct RunConfig {
    RateParams params;                    // defaults: the headline parameter set
    SystemKind system = SystemKind::bimodal;
    NumericSettings numerics;
    std::string out_path;                 // empty: stdout (solve) / sweep.csv
    OutputFormat format = OutputFormat::csv;
    int threads = 1;

    // optional custom sweep description (ignored when --preset is given)
    std::optional<SweepAxis> sweep_axis;
    std::optional<SweepAxis> sweep_axis2;
    std::vector<std::string> observe;
};

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Flat `key = value` lines, '#' comments, unknown keys rejected.
RunConfig parse_config_file(const std::string& path);
void apply_override(RunConfig& cfg, const std::string& key, const std::string& value);

std::string format_csv_number(double v);  // 17 significant digits
std::string csv_field(const std::optional<double>& v);

// exit codes: 0 ok, 2 usage/config error, 3 numerical failure
int cmd_solve(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_sweep(RunConfig cfg, const std::string& preset_or_empty,
              std::ostream& err);
int cmd_manifold(const RunConfig& cfg, int n_quanta, std::ostream& out,
                 std::ostream& err);

int cli_main(int argc, char** argv);

}  // namespace qcav

#endif
