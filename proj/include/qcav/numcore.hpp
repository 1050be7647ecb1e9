#ifndef QCAV_NUMCORE_HPP
#define QCAV_NUMCORE_HPP

// Complex linear algebra primitives used by every other layer.
// Dense semantics define correctness; sparse storage exists so that
// superoperators (dim up to ~40k) stay assemblable and solvable.

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace qcav {

using cxd = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using RVec = Eigen::VectorXd;
using SpMat = Eigen::SparseMatrix<cxd>;

struct NumericSettings {
    double hermiticity_tol = 1e-10;   // gate for eig_hermitian input
    double eig_residual_tol = 1e-9;   // A v = lambda v check scale
    double solve_residual_factor = 1e-8;   // ||Ax-b|| <= f*(||A||*||x||+||b||)
    double singular_pivot_rel = 1e-14;     // relative pivot floor
    double steady_residual_factor = 1e-8;  // ||L rho|| <= f*||L||
    double g2_undefined_threshold = 1e-12; // occupation floor for g2
    double convergence_rel = 1e-6;         // N vs N+2 relative move
    double density_hermiticity_tol = 1e-9;
    double density_trace_tol = 1e-9;
    double density_positivity_floor = -1e-8;
    int gmres_restart = 40;
    int gmres_max_iter = 400;
    double ilut_fill = 10.0;
    double ilut_drop = 1e-6;
};

const NumericSettings& default_settings();

struct NotHermitian : std::runtime_error {
    explicit NotHermitian(const std::string& what) : std::runtime_error(what) {}
};
struct Singular : std::runtime_error {
    explicit Singular(const std::string& what) : std::runtime_error(what) {}
};
struct NoConvergence : std::runtime_error {
    explicit NoConvergence(const std::string& what) : std::runtime_error(what) {}
};
struct DimensionMismatch : std::runtime_error {
    explicit DimensionMismatch(const std::string& what) : std::runtime_error(what) {}
};

// Kronecker product, block (i,j) of the result = A(i,j)*B.
// Result dimension guard: > 1e6 rows rejected.
CMat kron(const CMat& A, const CMat& B);
SpMat kron(const SpMat& A, const SpMat& B);

CMat dagger(const CMat& A);
SpMat dagger(const SpMat& A);

struct EigResult {
    RVec eigenvalues;   // ascending
    CMat eigenvectors;  // columns, orthonormal
};

// Hermitian eigendecomposition; throws NotHermitian if ||A - A^dag||_max
// exceeds the gate.
EigResult eig_hermitian(const CMat& A,
                        const NumericSettings& ns = default_settings());

// Dense LU with full pivoting; throws Singular when the pivot ratio
// collapses, NoConvergence when the residual bound fails.
CVec solve_linear(const CMat& A, const CVec& rhs,
                  const NumericSettings& ns = default_settings());

double max_abs(const CMat& A);
double max_abs(const SpMat& A);
double inf_norm(const SpMat& A);  // max absolute row sum

}  // namespace qcav

#endif
