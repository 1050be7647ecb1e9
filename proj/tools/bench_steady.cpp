// Timing probe for the steady-state pipeline: superoperator assembly and
// preconditioned-GMRES behavior (fill/drop/restart tuning, warm starts).
#include "qcav/dynamics.hpp"
#include "qcav/model.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <unsupported/Eigen/IterativeSolvers>

#include <chrono>
#include <cstdio>

using namespace qcav;

namespace {

double secs_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
        .count();
}

SpMat trace_row(const SpMat& L, int d) {
    std::vector<Eigen::Triplet<cxd>> trip;
    trip.reserve(L.nonZeros() + d);
    for (int k = 0; k < L.outerSize(); ++k)
        for (SpMat::InnerIterator it(L, k); it; ++it)
            if (it.row() != 0) trip.emplace_back(it.row(), it.col(), it.value());
    for (int i = 0; i < d; ++i) trip.emplace_back(0, i * (d + 1), cxd(1.0, 0.0));
    SpMat A(L.rows(), L.cols());
    A.setFromTriplets(trip.begin(), trip.end());
    A.makeCompressed();
    return A;
}

struct IlutRef {
    using Scalar = cxd;
    using StorageIndex = int;
    enum { ColsAtCompileTime = Eigen::Dynamic, MaxColsAtCompileTime = Eigen::Dynamic };
    Eigen::IncompleteLUT<cxd>* p = nullptr;
    IlutRef() = default;
    Eigen::Index rows() const { return p ? p->rows() : 0; }
    Eigen::Index cols() const { return p ? p->cols() : 0; }
    template <typename M> IlutRef& analyzePattern(const M&) { return *this; }
    template <typename M> IlutRef& factorize(const M&) { return *this; }
    template <typename M> IlutRef& compute(const M&) { return *this; }
    template <typename Rhs> CVec solve(const Rhs& b) const { return p->solve(b); }
    Eigen::ComputationInfo info() const { return Eigen::Success; }
};

void run_case(int fock, int fill, double drop, int restart, int maxit,
              double tol) {
    RateParams p;
    p.fock_trunc = fock;
    p.delta = -30.0;
    const SystemModel m = build_bimodal(p);
    const int d = m.space.total_dim();
    const SpMat L = liouvillian(m);
    const SpMat A = trace_row(L, d);
    CVec rhs = CVec::Zero(d * d);
    rhs[0] = cxd(1.0, 0.0);

    auto t0 = std::chrono::steady_clock::now();
    Eigen::IncompleteLUT<cxd> ilut;
    ilut.setFillfactor(fill);
    ilut.setDroptol(drop);
    ilut.compute(A);
    const double t_ilut = secs_since(t0);

    Eigen::GMRES<SpMat, IlutRef> gmres;
    gmres.preconditioner().p = &ilut;
    gmres.setTolerance(tol);
    gmres.set_restart(restart);
    gmres.setMaxIterations(maxit);
    gmres.compute(A);

    t0 = std::chrono::steady_clock::now();
    const CVec x = gmres.solve(rhs);
    const double t_solve = secs_since(t0);
    const double res = (A * x - rhs).norm();

    // warm-started re-solve at a shifted parameter with the stale factors
    RateParams p2 = p;
    p2.delta = -29.75;
    const SpMat A2 = trace_row(liouvillian(build_bimodal(p2)), d);
    Eigen::GMRES<SpMat, IlutRef> g2;
    g2.preconditioner().p = &ilut;
    g2.setTolerance(tol);
    g2.set_restart(restart);
    g2.setMaxIterations(maxit);
    g2.compute(A2);
    t0 = std::chrono::steady_clock::now();
    const CVec x2 = g2.solveWithGuess(rhs, x);
    const double t_warm = secs_since(t0);
    const double res2 = (A2 * x2 - rhs).norm();

    std::printf(
        "N=%2d fill=%2d drop=%7.1e restart=%3d ilut=%6.2fs solve=%6.2fs "
        "it=%3ld res=%8.2e | warm=%5.2fs it=%3ld res=%8.2e\n",
        fock, fill, drop, restart, t_ilut, t_solve,
        static_cast<long>(gmres.iterations()), res, t_warm,
        static_cast<long>(g2.iterations()), res2);
}

void scan(int fock, int points) {
    const NumericSettings ns = default_settings();
    auto cache = make_steady_cache();
    double t_solve = 0;
    for (int i = 0; i < points; ++i) {
        RateParams p;
        p.fock_trunc = fock;
        p.delta = -30.0 + 60.0 * i / (points - 1);
        const SystemModel m = build_bimodal(p);
        auto t0 = std::chrono::steady_clock::now();
        const DensityMatrix rho = steady_state(m, ns, cache);
        const double dt = secs_since(t0);
        t_solve += dt;
        const auto obs = observables(m, rho, "a", ns);
        std::printf("N=%2d delta=%7.2f solve=%6.3fs n_a=%.12e g2=%.12f\n", fock,
                    p.delta, dt, obs.occupation, obs.g2 ? *obs.g2 : -1.0);
    }
    std::printf("N=%2d total solve=%.3fs over %d pts\n\n", fock, t_solve, points);
}

}  // namespace


// separate timing of the assembly stages and the positivity check
namespace {
void stage_times(int fock) {
    RateParams p;
    p.fock_trunc = fock;
    const SystemModel m = build_bimodal(p);
    const int d = m.space.total_dim();
    auto t0 = std::chrono::steady_clock::now();
    const SpMat L = liouvillian(m);
    const double t_liou = secs_since(t0);
    t0 = std::chrono::steady_clock::now();
    const SpMat A = trace_row(L, d);
    const double t_trace = secs_since(t0);
    t0 = std::chrono::steady_clock::now();
    const double nrm = inf_norm(L);
    const double t_norm = secs_since(t0);
    CMat rho = CMat::Identity(d, d) / double(d);
    t0 = std::chrono::steady_clock::now();
    Eigen::SelfAdjointEigenSolver<CMat> es(rho, Eigen::EigenvaluesOnly);
    const double t_eig = secs_since(t0);
    std::printf(
        "N=%2d d=%4d nnz(L)=%ld liou=%.3fs tracerow=%.3fs infnorm=%.3fs(%.1f) "
        "posdef_eig=%.3fs\n",
        fock, d, static_cast<long>(L.nonZeros()), t_liou, t_trace, t_norm, nrm,
        t_eig);
}
}  // namespace


int main() {
    stage_times(8);
    stage_times(10);
    if (true) return 0;
    std::printf("--- fresh-factorization cases ---\n");
    run_case(8, 10, 1e-6, 40, 400, 1e-13);
    run_case(10, 10, 1e-6, 40, 400, 1e-13);
    std::printf("--- scan through the steady_state API ---\n");
    scan(8, 8);
    scan(10, 8);
    return 0;
}
