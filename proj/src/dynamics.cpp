#include "qcav/dynamics.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseLU>
#include <unsupported/Eigen/IterativeSolvers>

#include <cmath>
#include <sstream>

namespace qcav {

void DensityMatrix::check_invariants(const NumericSettings& ns) const {
    const int d = space.total_dim();
    if (matrix.rows() != d || matrix.cols() != d)
        throw DimensionMismatch("DensityMatrix: dim mismatch");
    const double herm_dev = max_abs(CMat(matrix - matrix.adjoint()));
    if (herm_dev > ns.density_hermiticity_tol) {
        std::ostringstream os;
        os << "DensityMatrix: Hermiticity deviation " << herm_dev;
        throw InvariantViolation(os.str());
    }
    const double trace_dev = std::abs(matrix.trace() - cxd(1.0, 0.0));
    if (trace_dev > ns.density_trace_tol) {
        std::ostringstream os;
        os << "DensityMatrix: trace deviates from 1 by " << trace_dev;
        throw InvariantViolation(os.str());
    }
    // positivity: a Cholesky of rho + (floor/2) I succeeding proves the
    // spectrum sits above the floor; only on breakdown is the full
    // eigendecomposition consulted for the verdict
    const CMat herm = 0.5 * (matrix + matrix.adjoint());
    const double shift = -0.5 * ns.density_positivity_floor;
    Eigen::LLT<CMat> llt(herm + shift * CMat::Identity(d, d));
    if (llt.info() != Eigen::Success) {
        Eigen::SelfAdjointEigenSolver<CMat> es(herm, Eigen::EigenvaluesOnly);
        const double min_eig = es.eigenvalues().minCoeff();
        if (min_eig < ns.density_positivity_floor) {
            std::ostringstream os;
            os << "DensityMatrix: minimum eigenvalue " << min_eig
               << " below floor (truncation too small?)";
            throw InvariantViolation(os.str());
        }
    }
}

SpMat liouvillian(const SystemModel& m) {
    const int d = m.space.total_dim();
    if (static_cast<long long>(d) * d > 1'000'000)
        throw std::length_error("liouvillian: superoperator dimension guard (1e6)");
    const SpMat id = identity_sp(d);
    const SpMat& H = m.hamiltonian;
    const cxd mi(0.0, -1.0);
    SpMat L = SpMat(mi * (kron(id, H) - kron(SpMat(H.transpose()), id)));
    for (const auto& [rate, D] : m.collapses) {
        const SpMat Dc = D.conjugate();
        const SpMat DdD = SpMat(dagger(D) * D);
        L += SpMat(rate * (kron(Dc, D) - 0.5 * kron(id, DdD) -
                           0.5 * kron(SpMat(DdD.transpose()), id)));
    }
    L.makeCompressed();
    return L;
}

namespace {

// Trace-row replacement: row 0 of L becomes the trace functional
// (ones at the vectorized diagonal positions i*(d+1)), rhs = e_0.
SpMat trace_row_system(const SpMat& L, int d) {
    std::vector<Eigen::Triplet<cxd>> trip;
    trip.reserve(L.nonZeros() + d);
    for (int k = 0; k < L.outerSize(); ++k)
        for (SpMat::InnerIterator it(L, k); it; ++it)
            if (it.row() != 0) trip.emplace_back(it.row(), it.col(), it.value());
    for (int i = 0; i < d; ++i)
        trip.emplace_back(0, i * (d + 1), cxd(1.0, 0.0));
    SpMat A(L.rows(), L.cols());
    A.setFromTriplets(trip.begin(), trip.end());
    A.makeCompressed();
    return A;
}

CMat unvec(const CVec& x, int d) {
    return Eigen::Map<const CMat>(x.data(), d, d);
}

}  // namespace

// Shared across the points of a sweep chunk: the incomplete-LU factors and
// the previous solution (warm start). The matrix drifts slowly along a
// grid, so a slightly stale preconditioner still converges in a handful of
// iterations; it is rebuilt whenever convergence degrades.
struct SteadyCache {
    std::shared_ptr<Eigen::IncompleteLUT<cxd>> ilut;
    Eigen::Index dim = -1;
    CVec last_solution;
    bool has_solution = false;
    // independent caches for the tensor factors of a factorized model
    std::vector<std::shared_ptr<SteadyCache>> factor_caches;
};

std::shared_ptr<SteadyCache> make_steady_cache() {
    return std::make_shared<SteadyCache>();
}

namespace {

// Preconditioner adaptor handing Eigen's GMRES a cached IncompleteLUT that
// is NOT refactored on every compute() call.
class CachedIlutPreconditioner {
  public:
    using Scalar = cxd;
    using StorageIndex = int;
    enum { ColsAtCompileTime = Eigen::Dynamic, MaxColsAtCompileTime = Eigen::Dynamic };

    CachedIlutPreconditioner() = default;

    void attach(std::shared_ptr<Eigen::IncompleteLUT<cxd>> ilut) {
        ilut_ = std::move(ilut);
    }

    Eigen::Index rows() const { return ilut_ ? ilut_->rows() : 0; }
    Eigen::Index cols() const { return ilut_ ? ilut_->cols() : 0; }

    template <typename MatType>
    CachedIlutPreconditioner& analyzePattern(const MatType&) { return *this; }
    template <typename MatType>
    CachedIlutPreconditioner& factorize(const MatType&) { return *this; }
    template <typename MatType>
    CachedIlutPreconditioner& compute(const MatType&) { return *this; }

    template <typename Rhs>
    CVec solve(const Rhs& b) const {
        return ilut_->solve(b);
    }

    Eigen::ComputationInfo info() const { return Eigen::Success; }

  private:
    std::shared_ptr<Eigen::IncompleteLUT<cxd>> ilut_;
};

CVec solve_sparse_steady(const SpMat& A, const CVec& rhs,
                         const NumericSettings& ns, SteadyCache* cache) {
    SteadyCache local;
    SteadyCache* c = cache ? cache : &local;
    if (c->dim != A.rows()) {
        c->ilut.reset();
        c->has_solution = false;
        c->dim = A.rows();
    }

    auto fresh_ilut = [&]() {
        auto ilut = std::make_shared<Eigen::IncompleteLUT<cxd>>();
        ilut->setFillfactor(static_cast<int>(ns.ilut_fill));
        ilut->setDroptol(ns.ilut_drop);
        ilut->compute(A);
        if (ilut->info() != Eigen::Success)
            throw Singular("steady_state: incomplete-LU factorization failed");
        return ilut;
    };

    // GMRES's internal test sees the left-preconditioned residual, which can
    // understate the true one by ~100x, so each attempt is judged on
    // ||Ax - rhs|| directly. Warm-started attempts on a stale factorization
    // get a short iteration budget: if they don't converge fast, rebuilding
    // the factors is cheaper than grinding.
    auto attempt = [&](double tol, int max_iter, const CVec* guess) {
        Eigen::GMRES<SpMat, CachedIlutPreconditioner> gmres;
        gmres.preconditioner().attach(c->ilut);
        gmres.setTolerance(tol);
        gmres.set_restart(ns.gmres_restart);
        gmres.setMaxIterations(max_iter);
        gmres.compute(A);
        return guess ? gmres.solveWithGuess(rhs, *guess).eval()
                     : gmres.solve(rhs).eval();
    };
    auto accept = [&](const CVec& x, double gate) {
        if ((A * x - rhs).norm() > gate) return false;
        c->last_solution = x;
        c->has_solution = true;
        return true;
    };

    const double gate = 1e-10;  // absolute; ||rhs|| = 1, ||x||_2 <= 1
    if (c->ilut && c->has_solution) {
        const CVec x = attempt(1e-13, 80, &c->last_solution);
        if (accept(x, gate)) return c->last_solution;
    }
    c->ilut = fresh_ilut();
    const CVec* guess = c->has_solution ? &c->last_solution : nullptr;
    CVec x = attempt(1e-13, ns.gmres_max_iter, guess);
    if (accept(x, gate)) return c->last_solution;
    // stretched last iterative try before the expensive exact factorization
    x = attempt(1e-13, 4 * ns.gmres_max_iter, &x);
    if (accept(x, 3e-9)) return c->last_solution;

    // Robust fallback: full sparse LU.
    Eigen::SparseLU<SpMat, Eigen::COLAMDOrdering<int>> lu;
    lu.analyzePattern(A);
    lu.factorize(A);
    if (lu.info() != Eigen::Success)
        throw Singular("steady_state: sparse LU factorization failed "
                       "(degenerate steady-state manifold?)");
    x = lu.solve(rhs);
    c->last_solution = x;
    c->has_solution = true;
    return x;
}

DensityMatrix steady_state_product(const SystemModel& m,
                                   const NumericSettings& ns,
                                   SteadyCache* cache) {
    // H and collapses split over disjoint tensor factors, so the joint
    // steady state is the tensor product of the factor steady states:
    // L(rho1 x rho2) = (L1 rho1) x rho2 + rho1 x (L2 rho2), and each factor
    // solve drives its own term to zero (residuals add, Frobenius-bounded).
    if (cache) cache->factor_caches.resize(m.factors.size());
    CMat rho = CMat::Ones(1, 1);
    for (size_t i = 0; i < m.factors.size(); ++i) {
        std::shared_ptr<SteadyCache> sub;
        if (cache) {
            if (!cache->factor_caches[i])
                cache->factor_caches[i] = make_steady_cache();
            sub = cache->factor_caches[i];
        }
        DensityMatrix part = steady_state(m.factors[i], ns, sub);
        rho = kron(rho, part.matrix).eval();
    }
    DensityMatrix out{m.space, std::move(rho)};
    out.check_invariants(ns);
    return out;
}

}  // namespace

DensityMatrix steady_state(const SystemModel& m, const NumericSettings& ns,
                           const std::shared_ptr<SteadyCache>& cache) {
    bool has_positive_rate = false;
    for (const auto& [rate, D] : m.collapses)
        if (rate > 0.0) has_positive_rate = true;
    if (!has_positive_rate)
        throw std::invalid_argument(
            "steady_state: no positive collapse rate; steady state not unique");

    if (!m.factors.empty()) return steady_state_product(m, ns, cache.get());

    const int d = m.space.total_dim();
    const SpMat L = liouvillian(m);
    const SpMat A = trace_row_system(L, d);
    CVec rhs = CVec::Zero(d * d);
    rhs[0] = cxd(1.0, 0.0);

    CVec x;
    if (d <= 16) {
        x = solve_linear(CMat(A), rhs, ns);
    } else {
        x = solve_sparse_steady(A, rhs, ns, cache.get());
    }

    CMat rho = unvec(x, d);
    rho = 0.5 * (rho + rho.adjoint()).eval();

    const double residual = (L * Eigen::Map<const CVec>(rho.data(), d * d)).norm();
    const double bound = ns.steady_residual_factor * inf_norm(L);
    if (residual > bound) {
        std::ostringstream os;
        os << "steady_state: residual " << residual << " exceeds bound " << bound;
        throw NotConverged(os.str());
    }

    DensityMatrix out{m.space, std::move(rho)};
    out.check_invariants(ns);
    return out;
}

namespace {

double angular_rate_scale(const RateParams& p) {
    const double s =
        std::max({2.0 * p.kappa_a, 2.0 * p.kappa_b, 2.0 * p.gamma, p.g_a, p.g_b,
                  p.drive_E, std::abs(p.delta), std::abs(p.delta_ab), p.J});
    return RateParams::angular(s);
}

}  // namespace

DensityMatrix evolve(const SystemModel& m, const DensityMatrix& rho0,
                     double t_final_ns, double dt_ns, const NumericSettings& ns) {
    if (!(dt_ns > 0.0)) throw StabilityGuard("evolve: dt must be > 0");
    if (!(m.space == rho0.space))
        throw DimensionMismatch("evolve: state space mismatch");
    const double scale = angular_rate_scale(m.params);
    if (scale > 0.0 && dt_ns > 0.1 / scale) {
        std::ostringstream os;
        os << "evolve: dt " << dt_ns << " exceeds stability guard "
           << 0.1 / scale << " (0.1 / max angular rate)";
        throw StabilityGuard(os.str());
    }

    const int d = m.space.total_dim();
    const SpMat L = liouvillian(m);
    CVec x = Eigen::Map<const CVec>(rho0.matrix.data(), d * d);

    auto rk4_step = [&](const CVec& y, double h) {
        CVec k1 = L * y;
        CVec k2 = L * CVec(y + 0.5 * h * k1);
        CVec k3 = L * CVec(y + 0.5 * h * k2);
        CVec k4 = L * CVec(y + h * k3);
        return CVec(y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
    };

    double t = 0.0;
    while (t < t_final_ns - 1e-15) {
        const double h = std::min(dt_ns, t_final_ns - t);
        x = rk4_step(x, h);
        t += h;
    }

    CMat rho = unvec(x, d);
    const double herm_drift = max_abs(CMat(rho - rho.adjoint()));
    const double trace_drift = std::abs(rho.trace() - cxd(1.0, 0.0));
    if (herm_drift > 1e-6 || trace_drift > 1e-6) {
        std::ostringstream os;
        os << "evolve: drift exceeded (hermiticity " << herm_drift << ", trace "
           << trace_drift << ")";
        throw InvariantViolation(os.str());
    }
    rho = 0.5 * (rho + rho.adjoint()).eval();

    DensityMatrix out{m.space, std::move(rho)};
    out.check_invariants(ns);
    return out;
}

cxd expect(const CMat& op, const DensityMatrix& rho) {
    if (op.rows() != rho.matrix.rows() || op.cols() != rho.matrix.cols())
        throw DimensionMismatch("expect: dim mismatch");
    return (op * rho.matrix).trace();
}

cxd expect(const SpMat& op, const DensityMatrix& rho) {
    if (op.rows() != rho.matrix.rows() || op.cols() != rho.matrix.cols())
        throw DimensionMismatch("expect: dim mismatch");
    cxd acc(0.0, 0.0);
    for (int k = 0; k < op.outerSize(); ++k)
        for (SpMat::InnerIterator it(op, k); it; ++it)
            acc += it.value() * rho.matrix(it.col(), it.row());
    return acc;
}

std::optional<double> g2_zero(const SpMat& mode_op, const DensityMatrix& rho,
                              const NumericSettings& ns) {
    const SpMat n_op = SpMat(dagger(mode_op) * mode_op);
    const double occ = expect(n_op, rho).real();
    if (occ < ns.g2_undefined_threshold) return std::nullopt;
    const SpMat d2 = SpMat(mode_op * mode_op);
    const double num = expect(SpMat(dagger(d2) * d2), rho).real();
    return num / (occ * occ);
}

ObservableSet observables(const SystemModel& m, const DensityMatrix& rho,
                          const std::string& label, const NumericSettings& ns) {
    auto it = m.labels.find(label);
    if (it == m.labels.end())
        throw UnknownLabel("observables: unknown label '" + label + "'");
    const LabeledOperator& lab = it->second;
    ObservableSet out;
    out.mode_label = label;
    out.occupation = expect(SpMat(dagger(lab.op) * lab.op), rho).real();
    if (out.occupation < -1e-10) {
        std::ostringstream os;
        os << "observables: negative occupation " << out.occupation;
        throw InvariantViolation(os.str());
    }
    out.transmission = lab.decay_ghz * out.occupation;
    out.g2 = g2_zero(lab.op, rho, ns);
    return out;
}

}  // namespace qcav
