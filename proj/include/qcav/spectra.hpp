#ifndef QCAV_SPECTRA_HPP
#define QCAV_SPECTRA_HPP

// Energy-ladder analysis: Jaynes-Cummings two-level manifolds and the
// (2n+1)-dimensional n-quanta blocks of the two-mode system, including
// the always-present zero eigenvalue at the bare cavity resonance.

#include "qcav/numcore.hpp"

namespace qcav {

struct ManifoldSpectrum {
    int n_quanta = 0;
    RVec eigenvalues;   // ascending, rad/ns
    int dimension = 0;  // 2 for JC (n>=1), 2n+1 for the two-mode block
    CMat eigenvectors;  // columns, basis documented per builder
};

struct AssertionFailure : std::runtime_error {
    explicit AssertionFailure(const std::string& what) : std::runtime_error(what) {}
};

// n-quanta JC doublet: eigenvalues exactly {-g sqrt(n), +g sqrt(n)},
// eigenvectors (1, -1)/sqrt(2) and (1, 1)/sqrt(2) in the
// {|g,n>, |e,n-1>} basis.
ManifoldSpectrum jc_manifold(int n, double g_angular);

// (2n+1)x(2n+1) Hermitian block on the basis
//   {|g, n_a, n-n_a> : n_a = 0..n} then {|e, n_a, n-1-n_a> : n_a = 0..n-1}
// (lexicographic in (QD excitation, n_a)). Asserts trace ~ 0 and that 0 is
// an eigenvalue (a theorem for this block structure).
ManifoldSpectrum bimodal_manifold(int n, double ga_angular, double gb_angular,
                                  const NumericSettings& ns = default_settings());

}  // namespace qcav

#endif
