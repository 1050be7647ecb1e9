#ifndef QCAV_MODEL_HPP
#define QCAV_MODEL_HPP

// Composite Hilbert spaces, canonical operators and the four system
// builders (single-mode, bimodal, effective two-channel, photonic
// molecule). All rates enter as value/2pi in GHz and are converted to
// angular units (rad/ns) exactly once, here.

#include "qcav/numcore.hpp"

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace qcav {

inline constexpr double two_pi = 6.283185307179586476925286766559;

struct HilbertSpace {
    std::vector<int> dims;  // ordered; embedding order is part of equality

    int total_dim() const {
        int d = 1;
        for (int n : dims) d *= n;
        return d;
    }
    bool operator==(const HilbertSpace& o) const { return dims == o.dims; }
};

// All frequencies/rates stored as value/2pi in GHz; angular() gives rad/ns.
struct RateParams {
    double g_a = 10.0;
    double g_b = 10.0;
    double kappa_a = 20.0;
    double kappa_b = 20.0;
    double gamma = 1.0;
    double drive_E = 1.0;
    double delta = 0.0;
    double delta_ab = 0.0;
    double J = 0.0;
    int fock_trunc = 8;

    static double angular(double value_ghz) { return two_pi * value_ghz; }
    void validate() const;  // rates >= 0 (delta, delta_ab any sign), N >= 2

    // Field access by name; "g" and "kappa" set both members of the pair.
    void set_field(const std::string& name, double value);
    double get_field(const std::string& name) const;
    static const std::vector<std::string>& field_names();
};

struct LabeledOperator {
    SpMat op;
    double decay_ghz = 0.0;  // the kappa used for transmission = kappa<D^dag D>
};

struct SystemModel {
    HilbertSpace space;
    SpMat hamiltonian;                               // rad/ns
    std::vector<std::pair<double, SpMat>> collapses; // (prefactor rad/ns, D)
    std::map<std::string, LabeledOperator> labels;
    RateParams params;  // echo of the inputs, used for guards and metadata

    // Present when the Liouvillian splits over disjoint tensor factors
    // (effective model): steady state is the product of factor states.
    std::vector<SystemModel> factors;

    void check_invariants() const;  // Hermitian H, consistent dims
};

SpMat annihilation(int N);   // sqrt(n) at (n-1, n)
SpMat lowering_qd();         // |g><e|, basis order [g, e]
SpMat identity_sp(int N);

// Lift op acting on space.dims[slot] into the full tensor product.
SpMat embed(const SpMat& op, const HilbertSpace& space, int slot);

struct UnequalKappas : std::runtime_error {
    explicit UnequalKappas(const std::string& what) : std::runtime_error(what) {}
};

SystemModel build_single_mode(const RateParams& p);
SystemModel build_bimodal(const RateParams& p);
SystemModel build_effective(const RateParams& p);
SystemModel build_photonic_molecule(const RateParams& p);

enum class SystemKind { single, bimodal, effective, molecule };
SystemKind system_kind_from_string(const std::string& s);
std::string to_string(SystemKind k);
SystemModel build_system(SystemKind k, const RateParams& p);

}  // namespace qcav

#endif
