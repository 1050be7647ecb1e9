#ifndef QCAV_SWEEP_HPP
#define QCAV_SWEEP_HPP

// Parameter-sweep engine: 1-D/2-D grids over any RateParams field, plus
// named presets that regenerate each simulated figure as tabular data.

#include "qcav/dynamics.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace qcav {

enum class AxisSpacing { linear, log };
enum class DriveTuning { fixed_delta, delta_eq_g };  // delta_eq_g: polariton tracking

struct SweepAxis {
    std::string field;  // RateParams field name ("g" / "kappa" set pairs)
    double start = 0.0;
    double stop = 0.0;
    int points = 2;
    AxisSpacing spacing = AxisSpacing::linear;

    std::vector<double> values() const;
};

struct SweepSpec {
    RateParams base;
    SystemKind system = SystemKind::bimodal;
    std::vector<SweepAxis> axes;        // 1 or 2
    std::vector<std::string> observe;   // labels
    DriveTuning tuning = DriveTuning::fixed_delta;
    std::string name = "custom";

    void validate() const;  // >=2 points/axis, log needs positive ends, <=1e6 total
};

struct SweepRow {
    std::vector<double> axis_values;
    std::vector<ObservableSet> observables;  // one per observe entry
    bool convergence_ok = false;             // N vs N+2 relative move < tol
    bool solver_ok = true;                   // false: per-point failure, fields undefined
    std::string error;                       // diagnostic when solver_ok is false
};

struct SweepResult {
    SweepSpec spec;
    std::vector<SweepRow> rows;  // row-major over axes
};

struct SweepError : std::runtime_error {
    explicit SweepError(const std::string& what) : std::runtime_error(what) {}
};

// Evaluates every grid point: build model, steady state, observables,
// truncation re-check at N+2. Deterministic results for any thread count
// (static chunking; each chunk starts its own solver cache). Per-point
// failures are recorded in the row; only an all-failed sweep throws.
SweepResult run_sweep(const SweepSpec& spec, int threads = 1,
                      const NumericSettings& ns = default_settings(),
                      const std::function<void(int done, int total)>& progress = {});

struct UnknownFigure : std::runtime_error {
    explicit UnknownFigure(const std::string& what) : std::runtime_error(what) {}
};

// fig1c fig1d fig2a fig2b fig3a fig3b fig4a fig4b fig5 fig6
SweepSpec figure_preset(const std::string& name);
const std::vector<std::string>& figure_preset_names();

}  // namespace qcav

#endif
