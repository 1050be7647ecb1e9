#include "qcav/cli.hpp"

#include "qcav/spectra.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

namespace qcav {

namespace {

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& value) {
    try {
        size_t pos = 0;
        double v = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument("trailing chars");
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config: bad numeric value for '" + key + "': " + value);
    }
}

int parse_int(const std::string& key, const std::string& value) {
    try {
        size_t pos = 0;
        int v = std::stoi(value, &pos);
        if (pos != value.size()) throw std::invalid_argument("trailing chars");
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config: bad integer value for '" + key + "': " + value);
    }
}

AxisSpacing parse_spacing(const std::string& v) {
    if (v == "linear") return AxisSpacing::linear;
    if (v == "log") return AxisSpacing::log;
    throw ConfigError("config: spacing must be linear|log, got '" + v + "'");
}

bool is_rate_key(const std::string& key) {
    const auto& names = RateParams::field_names();
    return std::find(names.begin(), names.end(), key) != names.end();
}

SweepAxis& ensure_axis(std::optional<SweepAxis>& ax) {
    if (!ax) ax = SweepAxis{"delta", -30.0, 30.0, 241, AxisSpacing::linear};
    return *ax;
}

}  // namespace

void apply_override(RunConfig& cfg, const std::string& key, const std::string& value) {
    if (is_rate_key(key)) {
        if (key == "fock_trunc")
            cfg.params.fock_trunc = parse_int(key, value);
        else
            cfg.params.set_field(key, parse_double(key, value));
        return;
    }
    if (key == "system") {
        try {
            cfg.system = system_kind_from_string(value);
        } catch (const std::exception& e) {
            throw ConfigError(std::string("config: ") + e.what());
        }
        return;
    }
    if (key == "out") { cfg.out_path = value; return; }
    if (key == "threads") { cfg.threads = parse_int(key, value); return; }
    if (key == "format") {
        if (value == "csv") cfg.format = OutputFormat::csv;
        else if (value == "csv+gnuplot") cfg.format = OutputFormat::csv_gnuplot;
        else throw ConfigError("config: format must be csv|csv+gnuplot");
        return;
    }
    if (key == "observe") {
        cfg.observe.clear();
        std::stringstream ss(value);
        std::string item;
        while (std::getline(ss, item, ',')) {
            item = trim(item);
            if (!item.empty()) cfg.observe.push_back(item);
        }
        return;
    }
    if (key == "sweep_field") { ensure_axis(cfg.sweep_axis).field = value; return; }
    if (key == "sweep_start") { ensure_axis(cfg.sweep_axis).start = parse_double(key, value); return; }
    if (key == "sweep_stop") { ensure_axis(cfg.sweep_axis).stop = parse_double(key, value); return; }
    if (key == "sweep_points") { ensure_axis(cfg.sweep_axis).points = parse_int(key, value); return; }
    if (key == "sweep_spacing") { ensure_axis(cfg.sweep_axis).spacing = parse_spacing(value); return; }
    if (key == "sweep2_field") { ensure_axis(cfg.sweep_axis2).field = value; return; }
    if (key == "sweep2_start") { ensure_axis(cfg.sweep_axis2).start = parse_double(key, value); return; }
    if (key == "sweep2_stop") { ensure_axis(cfg.sweep_axis2).stop = parse_double(key, value); return; }
    if (key == "sweep2_points") { ensure_axis(cfg.sweep_axis2).points = parse_int(key, value); return; }
    if (key == "sweep2_spacing") { ensure_axis(cfg.sweep_axis2).spacing = parse_spacing(value); return; }

    // numeric settings
    if (key == "hermiticity_tol") { cfg.numerics.hermiticity_tol = parse_double(key, value); return; }
    if (key == "solve_residual_factor") { cfg.numerics.solve_residual_factor = parse_double(key, value); return; }
    if (key == "steady_residual_factor") { cfg.numerics.steady_residual_factor = parse_double(key, value); return; }
    if (key == "g2_undefined_threshold") { cfg.numerics.g2_undefined_threshold = parse_double(key, value); return; }
    if (key == "convergence_rel") { cfg.numerics.convergence_rel = parse_double(key, value); return; }
    if (key == "gmres_restart") { cfg.numerics.gmres_restart = parse_int(key, value); return; }
    if (key == "gmres_max_iter") { cfg.numerics.gmres_max_iter = parse_int(key, value); return; }
    if (key == "ilut_fill") { cfg.numerics.ilut_fill = parse_double(key, value); return; }
    if (key == "ilut_drop") { cfg.numerics.ilut_drop = parse_double(key, value); return; }

    throw ConfigError("config: unknown key '" + key + "'");
}

RunConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open '" + path + "'");
    RunConfig cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const size_t eq = line.find('=');
        if (eq == std::string::npos) {
            std::ostringstream os;
            os << "config: line " << lineno << " is not 'key = value': " << line;
            throw ConfigError(os.str());
        }
        apply_override(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return cfg;
}

std::string format_csv_number(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string csv_field(const std::optional<double>& v) {
    return v ? format_csv_number(*v) : std::string{};
}

namespace {

void write_observable_fields(std::ostream& out, const ObservableSet& obs,
                             bool blank) {
    if (blank) {
        out << ",,,";  // occupation, transmission, g2 all undefined
        return;
    }
    out << ',' << format_csv_number(obs.occupation) << ','
        << format_csv_number(obs.transmission) << ',' << csv_field(obs.g2);
}

std::string axis_column_name(const std::string& field) {
    if (field == "fock_trunc") return field;
    return field + "_ghz";
}

std::string iso_timestamp() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[64];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

void write_meta(const std::string& csv_path, const RunConfig& cfg,
                const SweepSpec& spec, const SweepResult& result,
                double seconds) {
    std::ofstream meta(csv_path + ".meta");
    if (!meta) return;
    meta << "# reproducibility sidecar; regenerate with the echoed settings\n";
    meta << "generated_at = " << iso_timestamp() << "\n";
    meta << "runtime_seconds = " << format_csv_number(seconds) << "\n";
    meta << "sweep_name = " << spec.name << "\n";
    meta << "system = " << to_string(spec.system) << "\n";
    meta << "threads = " << cfg.threads << "\n";
    const RateParams& p = spec.base;
    meta << "g_a = " << format_csv_number(p.g_a) << "\n";
    meta << "g_b = " << format_csv_number(p.g_b) << "\n";
    meta << "kappa_a = " << format_csv_number(p.kappa_a) << "\n";
    meta << "kappa_b = " << format_csv_number(p.kappa_b) << "\n";
    meta << "gamma = " << format_csv_number(p.gamma) << "\n";
    meta << "drive_E = " << format_csv_number(p.drive_E) << "\n";
    meta << "delta = " << format_csv_number(p.delta) << "\n";
    meta << "delta_ab = " << format_csv_number(p.delta_ab) << "\n";
    meta << "J = " << format_csv_number(p.J) << "\n";
    meta << "fock_trunc = " << p.fock_trunc << "\n";
    meta << "drive_tuning = "
         << (spec.tuning == DriveTuning::delta_eq_g ? "delta_eq_g" : "fixed")
         << "\n";
    for (size_t i = 0; i < spec.axes.size(); ++i) {
        const auto& ax = spec.axes[i];
        meta << "axis" << (i + 1) << " = " << ax.field << ":"
             << format_csv_number(ax.start) << ":" << format_csv_number(ax.stop)
             << ":" << ax.points << ":"
             << (ax.spacing == AxisSpacing::log ? "log" : "linear") << "\n";
    }
    {
        std::string obs_list;
        for (const auto& label : spec.observe) {
            if (!obs_list.empty()) obs_list += ",";
            obs_list += label;
        }
        meta << "observe = " << obs_list << "\n";
    }
    int failures = 0, unconverged = 0;
    for (const auto& row : result.rows) {
        if (!row.solver_ok) ++failures;
        else if (!row.convergence_ok) ++unconverged;
    }
    meta << "rows = " << result.rows.size() << "\n";
    meta << "failed_rows = " << failures << "\n";
    meta << "unconverged_rows = " << unconverged << "\n";
}

void write_gnuplot_script(const std::string& csv_path, const SweepSpec& spec) {
    const std::string script_path = csv_path + ".gnuplot";
    std::ofstream gp(script_path);
    if (!gp) return;
    const std::string axis = axis_column_name(spec.axes[0].field);
    gp << "# plot script for " << csv_path << "\n";
    gp << "set datafile separator ','\n";
    gp << "set key autotitle columnhead\n";
    gp << "set xlabel '" << axis << "'\n";
    if (spec.axes.size() == 1) {
        gp << "set logscale y\n";
        gp << "plot";
        for (size_t i = 0; i < spec.observe.size(); ++i) {
            const int g2_col = static_cast<int>(2 + 3 * i + 2 + spec.axes.size() - 1);
            gp << (i ? "," : "") << " '" << csv_path << "' using 1:" << g2_col
               << " with lines";
        }
        gp << "\n";
    } else {
        gp << "set view map\n";
        gp << "splot '" << csv_path << "' using 1:2:"
           << (3 + spec.axes.size() - 2 + 2) << " with pm3d\n";
    }
}

}  // namespace

int cmd_solve(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    try {
        const SystemModel m = build_system(cfg.system, cfg.params);
        const DensityMatrix rho = steady_state(m, cfg.numerics);
        const ObservableSet obs_a = observables(m, rho, "a", cfg.numerics);
        const bool has_b = m.labels.count("b") > 0;
        ObservableSet obs_b;
        if (has_b) obs_b = observables(m, rho, "b", cfg.numerics);

        out << "delta_ghz,occupation_a,transmission_a,g2_a,"
               "occupation_b,transmission_b,g2_b\n";
        out << format_csv_number(cfg.params.delta);
        write_observable_fields(out, obs_a, false);
        write_observable_fields(out, obs_b, !has_b);
        out << '\n';
        return 0;
    } catch (const std::exception& e) {
        err << "solve failed: " << e.what() << "\n";
        return 3;
    }
}

int cmd_sweep(RunConfig cfg, const std::string& preset_or_empty, std::ostream& err) {
    SweepSpec spec;
    try {
        if (!preset_or_empty.empty()) {
            spec = figure_preset(preset_or_empty);
            // figure presets fix physics and grids; command-line/config
            // overrides still apply to truncation and threads
            if (cfg.params.fock_trunc != RateParams{}.fock_trunc)
                spec.base.fock_trunc = cfg.params.fock_trunc;
        } else {
            if (!cfg.sweep_axis)
                throw ConfigError("sweep: need --preset or sweep_field/... config keys");
            spec.base = cfg.params;
            spec.system = cfg.system;
            spec.axes = {*cfg.sweep_axis};
            if (cfg.sweep_axis2) spec.axes.push_back(*cfg.sweep_axis2);
            spec.observe = cfg.observe.empty() ? std::vector<std::string>{"a"}
                                               : cfg.observe;
            spec.name = "custom";
        }
        spec.validate();
    } catch (const std::exception& e) {
        err << "sweep setup failed: " << e.what() << "\n";
        return 2;
    }

    try {
        const auto t0 = std::chrono::steady_clock::now();
        const SweepResult result = run_sweep(spec, cfg.threads, cfg.numerics);
        const double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                .count();

        const std::string path =
            cfg.out_path.empty() ? (spec.name + ".csv") : cfg.out_path;
        std::ofstream out(path, std::ios::binary);
        if (!out) {
            err << "sweep: cannot write '" << path << "'\n";
            return 2;
        }
        for (const auto& ax : spec.axes) {
            if (&ax != &spec.axes[0]) out << ',';
            out << axis_column_name(ax.field);
        }
        for (const auto& label : spec.observe)
            out << ",occupation_" << label << ",transmission_" << label << ",g2_"
                << label;
        out << ",convergence_ok,note\n";
        for (const auto& row : result.rows) {
            for (size_t i = 0; i < row.axis_values.size(); ++i) {
                if (i) out << ',';
                out << format_csv_number(row.axis_values[i]);
            }
            for (const auto& obs : row.observables)
                write_observable_fields(out, obs, !row.solver_ok);
            out << ',' << (row.convergence_ok ? '1' : '0');
            out << ',' << (row.solver_ok ? "" : row.error) << '\n';
        }
        out.close();

        write_meta(path, cfg, spec, result, seconds);
        if (cfg.format == OutputFormat::csv_gnuplot) write_gnuplot_script(path, spec);
        return 0;
    } catch (const std::exception& e) {
        err << "sweep failed: " << e.what() << "\n";
        return 3;
    }
}

int cmd_manifold(const RunConfig& cfg, int n_quanta, std::ostream& out,
                 std::ostream& err) {
    if (n_quanta < 1) {
        err << "manifold: n must be >= 1\n";
        return 2;
    }
    try {
        const double wa = RateParams::angular(cfg.params.g_a);
        const double wb = RateParams::angular(cfg.params.g_b);
        const ManifoldSpectrum ms = bimodal_manifold(n_quanta, wa, wb, cfg.numerics);
        out << "n_quanta," << ms.n_quanta << "\n";
        out << "dimension," << ms.dimension << "\n";
        out << "eigenvalues_ghz";
        for (int i = 0; i < ms.eigenvalues.size(); ++i)
            out << ',' << format_csv_number(ms.eigenvalues[i] / two_pi);
        out << "\n";
        return 0;
    } catch (const std::exception& e) {
        err << "manifold failed: " << e.what() << "\n";
        return 3;
    }
}

}  // namespace qcav
