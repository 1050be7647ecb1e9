#include "qcav/numcore.hpp"

#include <unsupported/Eigen/KroneckerProduct>

#include <cmath>
#include <sstream>

namespace qcav {

const NumericSettings& default_settings() {
    static const NumericSettings ns{};
    return ns;
}

namespace {

void guard_kron_size(Eigen::Index ra, Eigen::Index rb) {
    if (ra * rb > 1'000'000) {
        std::ostringstream os;
        os << "kron result would have " << ra * rb << " rows (guard: 1e6)";
        throw std::length_error(os.str());
    }
}

}  // namespace

CMat kron(const CMat& A, const CMat& B) {
    guard_kron_size(A.rows(), B.rows());
    return Eigen::kroneckerProduct(A, B).eval();
}

SpMat kron(const SpMat& A, const SpMat& B) {
    guard_kron_size(A.rows(), B.rows());
    SpMat out = Eigen::kroneckerProduct(A, B);
    out.makeCompressed();
    return out;
}

CMat dagger(const CMat& A) { return A.adjoint(); }

SpMat dagger(const SpMat& A) {
    SpMat out = A.adjoint();
    out.makeCompressed();
    return out;
}

double max_abs(const CMat& A) {
    return A.size() == 0 ? 0.0 : A.cwiseAbs().maxCoeff();
}

double max_abs(const SpMat& A) {
    double m = 0.0;
    for (int k = 0; k < A.outerSize(); ++k)
        for (SpMat::InnerIterator it(A, k); it; ++it)
            m = std::max(m, std::abs(it.value()));
    return m;
}

double inf_norm(const SpMat& A) {
    std::vector<double> row_sums(A.rows(), 0.0);
    for (int k = 0; k < A.outerSize(); ++k)
        for (SpMat::InnerIterator it(A, k); it; ++it)
            row_sums[it.row()] += std::abs(it.value());
    double m = 0.0;
    for (double s : row_sums) m = std::max(m, s);
    return m;
}

EigResult eig_hermitian(const CMat& A, const NumericSettings& ns) {
    if (A.rows() != A.cols())
        throw NotHermitian("eig_hermitian: matrix is not square");
    const double dev = max_abs(CMat(A - A.adjoint()));
    if (dev > ns.hermiticity_tol) {
        std::ostringstream os;
        os << "eig_hermitian: ||A - A^dag||_max = " << dev << " exceeds gate "
           << ns.hermiticity_tol;
        throw NotHermitian(os.str());
    }
    Eigen::SelfAdjointEigenSolver<CMat> solver(0.5 * (A + A.adjoint()));
    if (solver.info() != Eigen::Success)
        throw NoConvergence("eig_hermitian: iterative kernel failed");
    return EigResult{solver.eigenvalues(), solver.eigenvectors()};
}

CVec solve_linear(const CMat& A, const CVec& rhs, const NumericSettings& ns) {
    if (A.rows() != A.cols())
        throw DimensionMismatch("solve_linear: matrix is not square");
    if (rhs.size() != A.rows())
        throw DimensionMismatch("solve_linear: rhs length mismatch");
    Eigen::FullPivLU<CMat> lu(A);
    const double max_pivot = lu.maxPivot();
    if (max_pivot <= 0.0 || lu.rank() < A.rows()) {
        // rank() already applies a relative pivot threshold
        throw Singular("solve_linear: rank-deficient matrix");
    }
    // smallest |pivot| relative to the largest
    const auto& lu_mat = lu.matrixLU();
    double min_pivot = max_pivot;
    for (Eigen::Index i = 0; i < lu_mat.rows(); ++i)
        min_pivot = std::min(min_pivot, std::abs(lu_mat(i, i)));
    if (min_pivot < ns.singular_pivot_rel * max_pivot) {
        std::ostringstream os;
        os << "solve_linear: pivot ratio " << min_pivot / max_pivot
           << " below floor " << ns.singular_pivot_rel;
        throw Singular(os.str());
    }
    CVec x = lu.solve(rhs);
    const double res = (A * x - rhs).norm();
    const double bound =
        ns.solve_residual_factor * (A.norm() * x.norm() + rhs.norm());
    if (res > bound) {
        std::ostringstream os;
        os << "solve_linear: residual " << res << " exceeds bound " << bound;
        throw NoConvergence(os.str());
    }
    return x;
}

}  // namespace qcav
