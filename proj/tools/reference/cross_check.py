"""Independent steady-state cross-check for the driven dot-cavity models.

Pure NumPy/SciPy re-implementation of the same master-equation physics as the
C++ engine: build the Hamiltonian and collapse operators, vectorize the
Liouvillian with column stacking, replace one row by the trace constraint,
solve the sparse linear system directly, and read photon statistics off the
steady-state density matrix.  It shares no code with the engine, so agreement
between the two is a real consistency check rather than a tautology.

Running this file recomputes the reference values that are pinned inside the
C++ unit tests and reports the deviation for each.
"""
import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

TWO_PI = 2.0 * np.pi


def ann(N):
    return sp.diags(np.sqrt(np.arange(1, N)), 1, format='csr', dtype=complex)


def sigma_low():
    m = sp.lil_matrix((2, 2), dtype=complex)
    m[0, 1] = 1.0   # |g><e|, basis order [g,e]
    return m.tocsr()


def embed(op, dims, slot):
    mats = [sp.identity(d, format='csr', dtype=complex) for d in dims]
    mats[slot] = op.tocsr()
    out = mats[0]
    for m in mats[1:]:
        out = sp.kron(out, m, format='csr')
    return out


def liouvillian(H, collapses):
    d = H.shape[0]
    I = sp.identity(d, format='csr', dtype=complex)
    L = -1j * (sp.kron(I, H) - sp.kron(H.T, I))
    for rate, D in collapses:
        Dd = D.conj().T.tocsr()
        DdD = (Dd @ D).tocsr()
        L = L + rate * (sp.kron(D.conj(), D) - 0.5 * sp.kron(I, DdD) - 0.5 * sp.kron(DdD.T, I))
    return L.tocsc()


def steady_state(H, collapses):
    d = H.shape[0]
    L = liouvillian(H, collapses).tolil()
    # trace row replaces row 0; column stacking vec(X)[i + j*d] = X[i,j]
    tr_row = np.zeros(d * d, dtype=complex)
    tr_row[np.arange(d) * (d + 1)] = 1.0
    L[0, :] = tr_row
    rhs = np.zeros(d * d, dtype=complex)
    rhs[0] = 1.0
    x = spla.spsolve(L.tocsc(), rhs)
    rho = x.reshape((d, d), order='F')  # column stacking
    rho = 0.5 * (rho + rho.conj().T)
    return rho


def expect(op, rho):
    return np.trace(op @ rho)


def g2_and_n(a_op, rho):
    a = a_op.toarray() if sp.issparse(a_op) else a_op
    n = np.real(np.trace(a.conj().T @ a @ rho))
    if n < 1e-12:
        return None, n
    aa = a @ a
    num = np.real(np.trace(aa.conj().T @ aa @ rho))
    return num / n**2, n


class P:
    """Rates in GHz (value/2pi); converted to angular rad/ns when building."""

    def __init__(self, **kw):
        self.g_a = 10.0; self.g_b = 10.0; self.kappa_a = 20.0; self.kappa_b = 20.0
        self.gamma = 1.0; self.E = 1.0; self.delta = 0.0; self.delta_ab = 0.0
        self.J = 0.0; self.N = 8
        for k, v in kw.items():
            setattr(self, k, v)


def build_single(p):
    dims = [2, p.N]
    s = embed(sigma_low(), dims, 0); a = embed(ann(p.N), dims, 1)
    w = lambda x: TWO_PI * x
    H = (w(p.delta) * (a.conj().T@a + s.conj().T@s)
         + w(p.g_a) * (a.conj().T@s + a@s.conj().T)
         + w(p.E) * (a + a.conj().T))
    col = [(2 * w(p.kappa_a), a), (2 * w(p.gamma), s)]
    return H.tocsr(), col, {'a': a, 'sigma': s}


def build_bimodal(p):
    dims = [2, p.N, p.N]
    s = embed(sigma_low(), dims, 0); a = embed(ann(p.N), dims, 1); b = embed(ann(p.N), dims, 2)
    w = lambda x: TWO_PI * x
    H = (w(p.delta) * (a.conj().T@a + s.conj().T@s + b.conj().T@b)
         + w(p.delta_ab) * (b.conj().T@b)
         + w(p.g_a) * (a.conj().T@s + a@s.conj().T)
         + w(p.g_b) * (b.conj().T@s + b@s.conj().T)
         + w(p.E) * (a + a.conj().T))
    col = [(2 * w(p.kappa_a), a), (2 * w(p.kappa_b), b), (2 * w(p.gamma), s)]
    return H.tocsr(), col, {'a': a, 'b': b, 'sigma': s}


def build_molecule(p):
    dims = [2, p.N, p.N]
    s = embed(sigma_low(), dims, 0); a = embed(ann(p.N), dims, 1); b = embed(ann(p.N), dims, 2)
    w = lambda x: TWO_PI * x
    H = (w(p.delta) * (a.conj().T@a + s.conj().T@s + b.conj().T@b)
         + w(p.g_b) * (b.conj().T@s + b@s.conj().T)
         + w(p.J) * (a.conj().T@b + a@b.conj().T)
         + w(p.E) * (a + a.conj().T))
    col = [(2 * w(p.kappa_a), a), (2 * w(p.kappa_b), b), (2 * w(p.gamma), s)]
    return H.tocsr(), col, {'a': a, 'b': b, 'sigma': s}


def solve_obs(build, p, label='a'):
    H, col, lab = build(p)
    rho = steady_state(H, col)
    g2, n = g2_and_n(lab[label], rho)
    return g2, n


# Values pinned in the C++ unit tests (tests/test_dynamics.cpp, tests/test_cli.cpp).
PINNED = [
    ("two-mode resonant, mode a: <n>",   lambda: solve_obs(build_bimodal, P(N=8), 'a')[1], 7.486835529478e-04),
    ("two-mode resonant, mode a: g2(0)", lambda: solve_obs(build_bimodal, P(N=8), 'a')[0], 0.329281689558),
    ("two-mode resonant, mode b: <n>",   lambda: solve_obs(build_bimodal, P(N=8), 'b')[1], 5.150615498276e-04),
    ("two-mode resonant, mode b: g2(0)", lambda: solve_obs(build_bimodal, P(N=8), 'b')[0], 0.126215793754),
    ("one-mode at delta = g: g2(0)",     lambda: solve_obs(build_single, P(N=8, delta=10.0), 'a')[0], 1.200953),
    ("coupled-cavity J = 40: g2(0)",     lambda: solve_obs(build_molecule, P(N=8, J=40.0), 'a')[0], 0.310623),
]

if __name__ == '__main__':
    worst = 0.0
    for name, fn, want in PINNED:
        got = fn()
        rel = abs(got - want) / abs(want)
        worst = max(worst, rel)
        print(f"{name:38s} {got:.12e}  pinned {want:.12e}  rel {rel:.2e}")
    ok = worst < 1e-6
    print(f"worst relative deviation {worst:.2e} -> {'OK' if ok else 'MISMATCH'}")
    raise SystemExit(0 if ok else 1)
