#include "qcav/model.hpp"

#include <cmath>
#include <sstream>

namespace qcav {

void RateParams::validate() const {
    auto nonneg = [](double v, const char* name) {
        if (v < 0.0 || !std::isfinite(v)) {
            std::ostringstream os;
            os << "RateParams: " << name << " must be >= 0 and finite, got " << v;
            throw std::invalid_argument(os.str());
        }
    };
    nonneg(g_a, "g_a");
    nonneg(g_b, "g_b");
    nonneg(kappa_a, "kappa_a");
    nonneg(kappa_b, "kappa_b");
    nonneg(gamma, "gamma");
    nonneg(drive_E, "drive_E");
    nonneg(J, "J");
    if (!std::isfinite(delta) || !std::isfinite(delta_ab))
        throw std::invalid_argument("RateParams: detunings must be finite");
    if (fock_trunc < 2)
        throw std::invalid_argument("RateParams: fock_trunc must be >= 2");
}

void RateParams::set_field(const std::string& name, double value) {
    if (name == "g_a") g_a = value;
    else if (name == "g_b") g_b = value;
    else if (name == "g") { g_a = value; g_b = value; }
    else if (name == "kappa_a") kappa_a = value;
    else if (name == "kappa_b") kappa_b = value;
    else if (name == "kappa") { kappa_a = value; kappa_b = value; }
    else if (name == "gamma") gamma = value;
    else if (name == "drive_E") drive_E = value;
    else if (name == "delta") delta = value;
    else if (name == "delta_ab") delta_ab = value;
    else if (name == "J") J = value;
    else if (name == "fock_trunc") fock_trunc = static_cast<int>(value);
    else throw std::invalid_argument("RateParams: unknown field '" + name + "'");
}

double RateParams::get_field(const std::string& name) const {
    if (name == "g_a") return g_a;
    if (name == "g_b") return g_b;
    if (name == "g") return g_a;
    if (name == "kappa_a") return kappa_a;
    if (name == "kappa") return kappa_a;
    if (name == "kappa_b") return kappa_b;
    if (name == "gamma") return gamma;
    if (name == "drive_E") return drive_E;
    if (name == "delta") return delta;
    if (name == "delta_ab") return delta_ab;
    if (name == "J") return J;
    if (name == "fock_trunc") return fock_trunc;
    throw std::invalid_argument("RateParams: unknown field '" + name + "'");
}

const std::vector<std::string>& RateParams::field_names() {
    static const std::vector<std::string> names = {
        "g_a", "g_b", "g", "kappa_a", "kappa_b", "kappa", "gamma",
        "drive_E", "delta", "delta_ab", "J", "fock_trunc"};
    return names;
}

SpMat annihilation(int N) {
    if (N < 2) throw std::invalid_argument("annihilation: N must be >= 2");
    SpMat a(N, N);
    a.reserve(Eigen::VectorXi::Constant(N, 1));
    for (int n = 1; n < N; ++n) a.insert(n - 1, n) = std::sqrt(double(n));
    a.makeCompressed();
    return a;
}

SpMat lowering_qd() {
    SpMat s(2, 2);
    s.insert(0, 1) = 1.0;
    s.makeCompressed();
    return s;
}

SpMat identity_sp(int N) {
    SpMat id(N, N);
    id.setIdentity();
    return id;
}

SpMat embed(const SpMat& op, const HilbertSpace& space, int slot) {
    if (slot < 0 || slot >= static_cast<int>(space.dims.size()))
        throw DimensionMismatch("embed: slot out of range");
    if (op.rows() != space.dims[slot] || op.cols() != space.dims[slot]) {
        std::ostringstream os;
        os << "embed: operator dim " << op.rows() << " does not match slot dim "
           << space.dims[slot];
        throw DimensionMismatch(os.str());
    }
    SpMat out = (slot == 0) ? op : identity_sp(space.dims[0]);
    for (int k = 1; k < static_cast<int>(space.dims.size()); ++k)
        out = kron(out, (k == slot) ? op : identity_sp(space.dims[k]));
    return out;
}

void SystemModel::check_invariants() const {
    const int d = space.total_dim();
    if (hamiltonian.rows() != d || hamiltonian.cols() != d)
        throw DimensionMismatch("SystemModel: Hamiltonian dim mismatch");
    const double dev = max_abs(SpMat(hamiltonian - SpMat(hamiltonian.adjoint())));
    if (dev > 1e-10)
        throw NotHermitian("SystemModel: Hamiltonian not Hermitian");
    for (const auto& [rate, D] : collapses) {
        if (rate < 0.0) throw std::invalid_argument("SystemModel: negative rate");
        if (D.rows() != d || D.cols() != d)
            throw DimensionMismatch("SystemModel: collapse dim mismatch");
    }
    for (const auto& [name, lab] : labels)
        if (lab.op.rows() != d || lab.op.cols() != d)
            throw DimensionMismatch("SystemModel: label '" + name + "' dim mismatch");
}

namespace {

SpMat num_op(const SpMat& d_op) { return SpMat(dagger(d_op) * d_op); }

SpMat coupling(const SpMat& mode, const SpMat& sig) {
    // mode^dag sigma + mode sigma^dag
    return SpMat(dagger(mode) * sig + mode * dagger(sig));
}

SpMat drive_term(const SpMat& mode) { return SpMat(mode + dagger(mode)); }

}  // namespace

SystemModel build_single_mode(const RateParams& p) {
    p.validate();
    const double w = two_pi;
    SystemModel m;
    m.params = p;
    m.space = HilbertSpace{{2, p.fock_trunc}};
    const SpMat sig = embed(lowering_qd(), m.space, 0);
    const SpMat a = embed(annihilation(p.fock_trunc), m.space, 1);
    m.hamiltonian = SpMat(w * p.delta * SpMat(num_op(a) + num_op(sig)) +
                          w * p.g_a * coupling(a, sig) +
                          w * p.drive_E * drive_term(a));
    m.collapses = {{2.0 * w * p.kappa_a, a}, {2.0 * w * p.gamma, sig}};
    m.labels["a"] = {a, p.kappa_a};
    m.labels["sigma"] = {sig, p.gamma};
    m.check_invariants();
    return m;
}

SystemModel build_bimodal(const RateParams& p) {
    p.validate();
    const double w = two_pi;
    SystemModel m;
    m.params = p;
    m.space = HilbertSpace{{2, p.fock_trunc, p.fock_trunc}};
    const SpMat sig = embed(lowering_qd(), m.space, 0);
    const SpMat a = embed(annihilation(p.fock_trunc), m.space, 1);
    const SpMat b = embed(annihilation(p.fock_trunc), m.space, 2);
    m.hamiltonian =
        SpMat(w * p.delta * SpMat(num_op(a) + num_op(sig) + num_op(b)) +
              w * p.delta_ab * num_op(b) + w * p.g_a * coupling(a, sig) +
              w * p.g_b * coupling(b, sig) + w * p.drive_E * drive_term(a));
    m.collapses = {{2.0 * w * p.kappa_a, a},
                   {2.0 * w * p.kappa_b, b},
                   {2.0 * w * p.gamma, sig}};
    m.labels["a"] = {a, p.kappa_a};
    m.labels["b"] = {b, p.kappa_b};
    m.labels["sigma"] = {sig, p.gamma};
    m.check_invariants();
    return m;
}

SystemModel build_effective(const RateParams& p) {
    p.validate();
    if (p.g_a <= 0.0)
        throw std::invalid_argument("build_effective: g_a must be > 0 (finite ratio)");
    if (p.kappa_a != p.kappa_b) {
        std::ostringstream os;
        os << "build_effective: kappa_a (" << p.kappa_a << ") != kappa_b ("
           << p.kappa_b << "); the loss term is basis-invariant only for equal kappas";
        throw UnequalKappas(os.str());
    }
    const double w = two_pi;
    const double r = p.g_b / p.g_a;
    const double G = std::sqrt(p.g_a * p.g_a + p.g_b * p.g_b);  // coupling on alpha
    const double ea = p.drive_E / std::sqrt(1.0 + r * r);
    const double eb = p.drive_E * r / std::sqrt(1.0 + r * r);
    const double kappa = p.kappa_a;
    const int N = p.fock_trunc;

    SystemModel m;
    m.params = p;
    m.space = HilbertSpace{{2, N, N}};  // [QD, alpha, beta]
    const SpMat sig = embed(lowering_qd(), m.space, 0);
    const SpMat al = embed(annihilation(N), m.space, 1);
    const SpMat be = embed(annihilation(N), m.space, 2);
    const SpMat h1 = SpMat(w * p.delta * SpMat(num_op(al) + num_op(sig)) +
                           w * G * coupling(al, sig) + w * ea * drive_term(al));
    const SpMat h2 = SpMat(w * p.delta * num_op(be) + w * eb * drive_term(be));
    m.hamiltonian = SpMat(h1 + h2);
    m.collapses = {{2.0 * w * kappa, al}, {2.0 * w * kappa, be}, {2.0 * w * p.gamma, sig}};

    const SpMat a_rec = SpMat((p.g_a / G) * al + (p.g_b / G) * be);
    const SpMat b_rec = SpMat((p.g_b / G) * al - (p.g_a / G) * be);
    m.labels["alpha"] = {al, kappa};
    m.labels["beta"] = {be, kappa};
    m.labels["sigma"] = {sig, p.gamma};
    m.labels["a"] = {a_rec, kappa};
    m.labels["b"] = {b_rec, kappa};

    // The two tensor factors evolve independently: steady state is the
    // product of the factor steady states. Record the factor models so the
    // solver can exploit it; observables are still taken on the full space.
    {
        SystemModel f1;
        f1.params = p;
        f1.space = HilbertSpace{{2, N}};
        const SpMat s1 = embed(lowering_qd(), f1.space, 0);
        const SpMat a1 = embed(annihilation(N), f1.space, 1);
        f1.hamiltonian = SpMat(w * p.delta * SpMat(num_op(a1) + num_op(s1)) +
                               w * G * coupling(a1, s1) + w * ea * drive_term(a1));
        f1.collapses = {{2.0 * w * kappa, a1}, {2.0 * w * p.gamma, s1}};
        f1.labels["alpha"] = {a1, kappa};
        f1.labels["sigma"] = {s1, p.gamma};
        f1.check_invariants();

        SystemModel f2;
        f2.params = p;
        f2.space = HilbertSpace{{N}};
        const SpMat b2 = annihilation(N);
        f2.hamiltonian = SpMat(w * p.delta * num_op(b2) + w * eb * drive_term(b2));
        f2.collapses = {{2.0 * w * kappa, b2}};
        f2.labels["beta"] = {b2, kappa};
        f2.check_invariants();

        m.factors.push_back(std::move(f1));
        m.factors.push_back(std::move(f2));
    }
    m.check_invariants();
    return m;
}

SystemModel build_photonic_molecule(const RateParams& p) {
    p.validate();
    const double w = two_pi;
    SystemModel m;
    m.params = p;
    m.space = HilbertSpace{{2, p.fock_trunc, p.fock_trunc}};
    const SpMat sig = embed(lowering_qd(), m.space, 0);
    const SpMat a = embed(annihilation(p.fock_trunc), m.space, 1);
    const SpMat b = embed(annihilation(p.fock_trunc), m.space, 2);
    const SpMat hop = SpMat(dagger(a) * b + a * dagger(b));
    m.hamiltonian =
        SpMat(w * p.delta * SpMat(num_op(a) + num_op(sig) + num_op(b)) +
              w * p.g_b * coupling(b, sig) + w * p.J * hop +
              w * p.drive_E * drive_term(a));
    m.collapses = {{2.0 * w * p.kappa_a, a},
                   {2.0 * w * p.kappa_b, b},
                   {2.0 * w * p.gamma, sig}};
    m.labels["a"] = {a, p.kappa_a};
    m.labels["b"] = {b, p.kappa_b};
    m.labels["sigma"] = {sig, p.gamma};
    m.check_invariants();
    return m;
}

SystemKind system_kind_from_string(const std::string& s) {
    if (s == "single") return SystemKind::single;
    if (s == "bimodal") return SystemKind::bimodal;
    if (s == "effective") return SystemKind::effective;
    if (s == "molecule") return SystemKind::molecule;
    throw std::invalid_argument("unknown system '" + s +
                                "' (expected single|bimodal|effective|molecule)");
}

std::string to_string(SystemKind k) {
    switch (k) {
        case SystemKind::single: return "single";
        case SystemKind::bimodal: return "bimodal";
        case SystemKind::effective: return "effective";
        case SystemKind::molecule: return "molecule";
    }
    return "?";
}

SystemModel build_system(SystemKind k, const RateParams& p) {
    switch (k) {
        case SystemKind::single: return build_single_mode(p);
        case SystemKind::bimodal: return build_bimodal(p);
        case SystemKind::effective: return build_effective(p);
        case SystemKind::molecule: return build_photonic_molecule(p);
    }
    throw std::logic_error("build_system: bad kind");
}

}  // namespace qcav
