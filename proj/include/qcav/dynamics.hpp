#ifndef QCAV_DYNAMICS_HPP
#define QCAV_DYNAMICS_HPP

// Liouvillian assembly (column-stacking vectorization), steady-state
// solution by trace-row replacement, fixed-step RK4 time evolution and
// observable extraction (occupation, transmission, g2(0)).

#include "qcav/model.hpp"

#include <memory>
#include <optional>

namespace qcav {

struct DensityMatrix {
    HilbertSpace space;
    CMat matrix;

    void check_invariants(const NumericSettings& ns = default_settings()) const;
};

struct ObservableSet {
    std::string mode_label;
    double occupation = 0.0;    // <D^dag D>
    double transmission = 0.0;  // decay_ghz * occupation, reported in GHz
    std::optional<double> g2;   // empty = undefined (occupation below floor)
};

struct NotConverged : std::runtime_error {
    explicit NotConverged(const std::string& what) : std::runtime_error(what) {}
};
struct StabilityGuard : std::runtime_error {
    explicit StabilityGuard(const std::string& what) : std::runtime_error(what) {}
};
struct InvariantViolation : std::runtime_error {
    explicit InvariantViolation(const std::string& what) : std::runtime_error(what) {}
};
struct UnknownLabel : std::runtime_error {
    explicit UnknownLabel(const std::string& what) : std::runtime_error(what) {}
};

// vec(d rho/dt) = L vec(rho) with column stacking, vec(A X B) = (B^T (x) A) vec(X):
//   L = -i(I(x)H - H^T(x)I) + sum_k r_k (conj(D)(x)D - 1/2 I(x)D^dag D - 1/2 (D^dag D)^T(x)I)
SpMat liouvillian(const SystemModel& m);

// Opaque cross-solve cache: a sweep hands the same context to consecutive
// points so the incomplete-LU preconditioner is reused while the matrix
// drifts slowly along the grid. Always safe to drop; results are identical
// within solver tolerance either way.
struct SteadyCache;
std::shared_ptr<SteadyCache> make_steady_cache();

DensityMatrix steady_state(const SystemModel& m,
                           const NumericSettings& ns = default_settings(),
                           const std::shared_ptr<SteadyCache>& cache = nullptr);

// RK4 with fixed dt; guard dt <= 0.1/max-rate where max-rate is the
// angular scale max(2 kappa, 2 gamma, g, E, |Delta|, |Delta_ab|, J).
DensityMatrix evolve(const SystemModel& m, const DensityMatrix& rho0,
                     double t_final_ns, double dt_ns,
                     const NumericSettings& ns = default_settings());

cxd expect(const CMat& op, const DensityMatrix& rho);
cxd expect(const SpMat& op, const DensityMatrix& rho);

// tr(D^dag D^dag D D rho)/tr(D^dag D rho)^2; nullopt when the occupation
// is below the undefined threshold (vacuum output, not an error).
std::optional<double> g2_zero(const SpMat& mode_op, const DensityMatrix& rho,
                              const NumericSettings& ns = default_settings());

ObservableSet observables(const SystemModel& m, const DensityMatrix& rho,
                          const std::string& label,
                          const NumericSettings& ns = default_settings());

}  // namespace qcav

#endif
