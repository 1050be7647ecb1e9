#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "qcav/model.hpp"

#include <cmath>

using namespace qcav;

namespace {

// commutator norm ||[A, B]||_max for sparse operators
double comm_norm(const SpMat& a, const SpMat& b) {
    return max_abs(SpMat(SpMat(a * b) - SpMat(b * a)));
}

SpMat total_excitation(const SystemModel& m) {
    SpMat n(m.space.total_dim(), m.space.total_dim());
    n.setZero();
    for (const auto& lbl : {"a", "b", "alpha", "beta"}) {
        auto it = m.labels.find(lbl);
        if (it != m.labels.end())
            n += SpMat(dagger(it->second.op) * it->second.op);
    }
    const SpMat s = m.labels.at("sigma").op;
    n += SpMat(dagger(s) * s);
    return n;
}

}  // namespace

TEST_CASE("annihilation has sqrt(n) on the superdiagonal") {
    const SpMat a = annihilation(4);
    const CMat d = CMat(a);
    REQUIRE(d.rows() == 4);
    CHECK(d(0, 1) == cxd(1.0, 0.0));
    CHECK(std::abs(d(1, 2) - cxd(std::sqrt(2.0), 0.0)) < 1e-15);
    CHECK(std::abs(d(2, 3) - cxd(std::sqrt(3.0), 0.0)) < 1e-15);
    CHECK(d(1, 0) == cxd(0.0, 0.0));
    // number operator diagonal 0..N-1
    const CMat n = CMat(SpMat(dagger(a) * a));
    for (int k = 0; k < 4; ++k)
        CHECK(std::abs(n(k, k) - cxd(k, 0.0)) < 1e-14);
}

TEST_CASE("qd lowering operator maps excited to ground") {
    const CMat s = CMat(lowering_qd());
    REQUIRE(s.rows() == 2);
    CHECK(s(0, 1) == cxd(1.0, 0.0));
    CHECK(s(0, 0) == cxd(0.0, 0.0));
    CHECK(s(1, 0) == cxd(0.0, 0.0));
    CHECK(s(1, 1) == cxd(0.0, 0.0));
}

TEST_CASE("embed lifts operators with identity on the other slots") {
    HilbertSpace space{{2, 3, 3}};
    const SpMat a = annihilation(3);
    const SpMat lifted = embed(a, space, 1);
    REQUIRE(lifted.rows() == 18);
    // explicit kron: id2 x a x id3
    const SpMat expected =
        kron(kron(identity_sp(2), a), identity_sp(3));
    CHECK(max_abs(SpMat(lifted - expected)) < 1e-15);

    // mode-b slot
    const SpMat lifted_b = embed(a, space, 2);
    const SpMat expected_b = kron(identity_sp(6), a);
    CHECK(max_abs(SpMat(lifted_b - expected_b)) < 1e-15);
}

TEST_CASE("embedded operators on different slots commute") {
    HilbertSpace space{{2, 4, 4}};
    const SpMat a = embed(annihilation(4), space, 1);
    const SpMat b = embed(annihilation(4), space, 2);
    const SpMat s = embed(lowering_qd(), space, 0);
    CHECK(comm_norm(a, b) < 1e-14);
    CHECK(comm_norm(a, SpMat(dagger(b))) < 1e-14);
    CHECK(comm_norm(a, s) < 1e-14);
}

TEST_CASE("rate params validate and synthesize paired fields") {
    RateParams p;
    p.validate();  // defaults are valid

    p.set_field("g", 12.5);
    CHECK(p.g_a == 12.5);
    CHECK(p.g_b == 12.5);
    p.set_field("kappa", 7.0);
    CHECK(p.kappa_a == 7.0);
    CHECK(p.kappa_b == 7.0);
    p.set_field("g_b", 3.0);
    CHECK(p.g_a == 12.5);
    CHECK(p.get_field("g_b") == 3.0);
    p.set_field("delta", -4.0);
    CHECK(p.get_field("delta") == -4.0);

    CHECK_THROWS(p.set_field("nonsense", 1.0));

    RateParams bad;
    bad.kappa_a = -1.0;
    CHECK_THROWS(bad.validate());
    RateParams bad2;
    bad2.fock_trunc = 1;
    CHECK_THROWS(bad2.validate());
}

TEST_CASE("angular conversion is exactly 2 pi times the stored value") {
    CHECK(RateParams::angular(1.0) == doctest::Approx(two_pi).epsilon(1e-16));
    CHECK(RateParams::angular(10.0) == doctest::Approx(10.0 * two_pi).epsilon(1e-16));
}

TEST_CASE("single-mode builder: dimensions, labels, collapse rates") {
    RateParams p;
    p.fock_trunc = 6;
    const SystemModel m = build_single_mode(p);
    CHECK(m.space.dims == std::vector<int>{2, 6});
    m.check_invariants();

    REQUIRE(m.labels.count("a") == 1);
    REQUIRE(m.labels.count("sigma") == 1);
    CHECK(m.labels.count("b") == 0);
    CHECK(m.labels.at("a").decay_ghz == p.kappa_a);

    // collapse prefactors are 2*kappa and 2*gamma in angular units
    REQUIRE(m.collapses.size() == 2);
    CHECK(m.collapses[0].first ==
          doctest::Approx(2.0 * two_pi * p.kappa_a).epsilon(1e-15));
    CHECK(m.collapses[1].first ==
          doctest::Approx(2.0 * two_pi * p.gamma).epsilon(1e-15));
}

TEST_CASE("single-mode Hamiltonian reduces to known matrix at N=2") {
    // basis |qd, n>: {g0, g1, e0, e1}; delta = 0 so only coupling + drive
    RateParams p;
    p.fock_trunc = 2;
    p.g_a = 10.0;
    p.drive_E = 1.0;
    p.delta = 0.0;
    const SystemModel m = build_single_mode(p);
    const CMat h = CMat(m.hamiltonian) / two_pi;  // back to GHz units
    // coupling g (a sigma^dag + a^dag sigma): <e0|H|g1> = g
    // basis index: qd slot first => g0=0, g1=1, e0=2, e1=3
    CHECK(std::abs(h(2, 1) - cxd(10.0, 0.0)) < 1e-12);
    CHECK(std::abs(h(1, 2) - cxd(10.0, 0.0)) < 1e-12);
    // drive E (a + a^dag): <g1|H|g0> = E
    CHECK(std::abs(h(1, 0) - cxd(1.0, 0.0)) < 1e-12);
    // no direct qd drive
    CHECK(std::abs(h(2, 0)) < 1e-12);
}

TEST_CASE("detuning enters through number operators") {
    RateParams p;
    p.fock_trunc = 3;
    p.delta = 5.0;
    p.drive_E = 0.0;
    const SystemModel m = build_single_mode(p);
    const CMat h = CMat(m.hamiltonian) / two_pi;
    // diagonal of |g,n>: delta * n ; |e,n>: delta * (n+1)
    CHECK(std::abs(h(1, 1) - cxd(5.0, 0.0)) < 1e-12);   // g1
    CHECK(std::abs(h(2, 2) - cxd(10.0, 0.0)) < 1e-12);  // g2
    CHECK(std::abs(h(3, 3) - cxd(5.0, 0.0)) < 1e-12);   // e0
}

TEST_CASE("bimodal builder: dimensions, labels, mode-b detuning") {
    RateParams p;
    p.fock_trunc = 4;
    p.delta_ab = 3.0;
    const SystemModel m = build_bimodal(p);
    CHECK(m.space.dims == std::vector<int>{2, 4, 4});
    m.check_invariants();
    REQUIRE(m.labels.count("a") == 1);
    REQUIRE(m.labels.count("b") == 1);
    REQUIRE(m.labels.count("sigma") == 1);
    REQUIRE(m.collapses.size() == 3);

    // mode-b detuning delta + delta_ab shows up on b-number diagonal:
    // state |g, 0, 1> index = 0*16 + 0*4 + 1 = 1
    const CMat h = CMat(m.hamiltonian) / two_pi;
    CHECK(std::abs(h(1, 1) - cxd(p.delta + p.delta_ab, 0.0)) < 1e-12);
}

TEST_CASE("number conservation without drive for bimodal and molecule") {
    RateParams p;
    p.fock_trunc = 4;
    p.drive_E = 0.0;
    p.delta = 2.0;
    p.delta_ab = 1.0;
    const SystemModel bm = build_bimodal(p);
    CHECK(max_abs(SpMat(SpMat(bm.hamiltonian * total_excitation(bm)) -
                        SpMat(total_excitation(bm) * bm.hamiltonian))) < 1e-10);

    RateParams pm = p;
    pm.J = 40.0;
    const SystemModel mol = build_photonic_molecule(pm);
    CHECK(max_abs(SpMat(SpMat(mol.hamiltonian * total_excitation(mol)) -
                        SpMat(total_excitation(mol) * mol.hamiltonian))) < 1e-10);
}

TEST_CASE("effective builder splits drive by the coupling ratio") {
    RateParams p;
    p.fock_trunc = 5;
    p.g_a = 10.0;
    p.g_b = 8.0;
    const SystemModel m = build_effective(p);
    m.check_invariants();
    CHECK(m.space.dims == std::vector<int>{2, 5, 5});
    REQUIRE(m.labels.count("alpha") == 1);
    REQUIRE(m.labels.count("beta") == 1);
    REQUIRE(m.labels.count("a") == 1);
    REQUIRE(m.labels.count("b") == 1);

    // reconstruction: a = (g_a alpha + g_b beta)/G, b = (g_b alpha - g_a beta)/G
    const double G = std::hypot(p.g_a, p.g_b);
    const SpMat ra = SpMat((p.g_a / G) * m.labels.at("alpha").op +
                           (p.g_b / G) * m.labels.at("beta").op);
    CHECK(max_abs(SpMat(ra - m.labels.at("a").op)) < 1e-14);
    const SpMat rb = SpMat((p.g_b / G) * m.labels.at("alpha").op -
                           (p.g_a / G) * m.labels.at("beta").op);
    CHECK(max_abs(SpMat(rb - m.labels.at("b").op)) < 1e-14);

    // the coupled channel carries coupling G: <e0,0|H|g1,0>
    const CMat h = CMat(m.hamiltonian) / two_pi;
    const int g10 = 0 * 25 + 1 * 5 + 0;
    const int e00 = 1 * 25 + 0 * 5 + 0;
    CHECK(std::abs(h(e00, g10) - cxd(G, 0.0)) < 1e-12);

    // drive split: E_alpha = E g_a / G on alpha, E_beta = E g_b / G on beta
    const int g01 = 1;  // |g, 0, 1>
    CHECK(std::abs(h(g10, 0) - cxd(p.drive_E * p.g_a / G, 0.0)) < 1e-12);
    CHECK(std::abs(h(g01, 0) - cxd(p.drive_E * p.g_b / G, 0.0)) < 1e-12);

    // factorized representation present: [2,N] x [N]
    REQUIRE(m.factors.size() == 2);
    CHECK(m.factors[0].space.dims == std::vector<int>{2, 5});
    CHECK(m.factors[1].space.dims == std::vector<int>{5});
}

TEST_CASE("effective builder requires equal decay rates") {
    RateParams p;
    p.kappa_a = 20.0;
    p.kappa_b = 21.0;
    CHECK_THROWS_AS(build_effective(p), UnequalKappas);
}

TEST_CASE("photonic molecule couples modes by tunneling, dot on mode b") {
    RateParams p;
    p.fock_trunc = 3;
    p.J = 40.0;
    p.drive_E = 0.0;
    const SystemModel m = build_photonic_molecule(p);
    m.check_invariants();
    const CMat h = CMat(m.hamiltonian) / two_pi;
    // <g,0,1|H|g,1,0> = J (hopping)
    const int g10 = 3, g01 = 1;
    CHECK(std::abs(h(g01, g10) - cxd(40.0, 0.0)) < 1e-12);
    // dot couples to b: <e,0,0|H|g,0,1> = g_b
    const int e00 = 9;
    CHECK(std::abs(h(e00, g01) - cxd(p.g_b, 0.0)) < 1e-12);
    // and not to a
    CHECK(std::abs(h(e00, g10)) < 1e-14);
}

TEST_CASE("system kind round-trips through strings") {
    for (auto k : {SystemKind::single, SystemKind::bimodal, SystemKind::effective,
                   SystemKind::molecule})
        CHECK(system_kind_from_string(to_string(k)) == k);
    CHECK_THROWS(system_kind_from_string("frobnicate"));
}

TEST_CASE("builders reject invalid parameters") {
    RateParams p;
    p.gamma = -0.5;
    CHECK_THROWS(build_single_mode(p));
    RateParams q;
    q.fock_trunc = 0;
    CHECK_THROWS(build_bimodal(q));
}
