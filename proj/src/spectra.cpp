#include "qcav/spectra.hpp"

#include <cmath>
#include <sstream>

namespace qcav {

ManifoldSpectrum jc_manifold(int n, double g_angular) {
    if (n < 1) throw std::invalid_argument("jc_manifold: n must be >= 1");
    if (g_angular < 0.0) throw std::invalid_argument("jc_manifold: g must be >= 0");
    ManifoldSpectrum out;
    out.n_quanta = n;
    out.dimension = 2;
    const double e = g_angular * std::sqrt(double(n));
    out.eigenvalues = RVec(2);
    out.eigenvalues << -e, e;
    // columns in the {|g,n>, |e,n-1>} basis: minus then plus state
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    out.eigenvectors = CMat(2, 2);
    out.eigenvectors << cxd(inv_sqrt2, 0), cxd(inv_sqrt2, 0),
                        cxd(-inv_sqrt2, 0), cxd(inv_sqrt2, 0);
    return out;
}

ManifoldSpectrum bimodal_manifold(int n, double ga_angular, double gb_angular,
                                  const NumericSettings& ns) {
    if (n < 1) throw std::invalid_argument("bimodal_manifold: n must be >= 1");
    const int dim = 2 * n + 1;
    // basis: |g, n_a, n - n_a> for n_a = 0..n, then |e, n_a, n-1-n_a> for
    // n_a = 0..n-1 (lexicographic in (QD excitation, n_a))
    CMat H = CMat::Zero(dim, dim);
    auto g_index = [&](int na) { return na; };
    auto e_index = [&](int na) { return (n + 1) + na; };
    for (int na = 0; na < n; ++na) {
        // a^dag sigma: |e, n_a, n_b> -> |g, n_a + 1, n_b>, amplitude sqrt(n_a + 1)
        const double amp_a = ga_angular * std::sqrt(double(na + 1));
        H(g_index(na + 1), e_index(na)) += amp_a;
        H(e_index(na), g_index(na + 1)) += amp_a;
        // b^dag sigma: |e, n_a, n_b> -> |g, n_a, n_b + 1>, amplitude sqrt(n_b + 1)
        const int nb = n - 1 - na;
        const double amp_b = gb_angular * std::sqrt(double(nb + 1));
        H(g_index(na), e_index(na)) += amp_b;
        H(e_index(na), g_index(na)) += amp_b;
    }

    const double trace = H.trace().real();
    EigResult eig = eig_hermitian(H, ns);
    const double max_eig = eig.eigenvalues.cwiseAbs().maxCoeff();
    const double zero_tol = ns.eig_residual_tol * std::max(max_eig, 1.0);
    if (std::abs(trace) > zero_tol) {
        std::ostringstream os;
        os << "bimodal_manifold: trace " << trace << " not ~ 0";
        throw AssertionFailure(os.str());
    }
    bool has_zero = false;
    for (int i = 0; i < eig.eigenvalues.size(); ++i)
        if (std::abs(eig.eigenvalues[i]) <= zero_tol) has_zero = true;
    if (!has_zero)
        throw AssertionFailure(
            "bimodal_manifold: no zero eigenvalue found (construction bug: the "
            "block must always carry a state at the bare cavity resonance)");

    ManifoldSpectrum out;
    out.n_quanta = n;
    out.dimension = dim;
    out.eigenvalues = eig.eigenvalues;
    out.eigenvectors = eig.eigenvectors;
    return out;
}

}  // namespace qcav
