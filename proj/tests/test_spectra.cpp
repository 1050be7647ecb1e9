#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "qcav/model.hpp"
#include "qcav/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <random>

using namespace qcav;

TEST_CASE("jc manifold eigenvalues are +/- g sqrt(n)") {
    const double g = 10.0;
    for (int n = 1; n <= 5; ++n) {
        const ManifoldSpectrum ms = jc_manifold(n, g);
        CHECK(ms.dimension == 2);
        REQUIRE(ms.eigenvalues.size() == 2);
        CHECK(ms.eigenvalues[0] ==
              doctest::Approx(-g * std::sqrt(double(n))).epsilon(1e-14));
        CHECK(ms.eigenvalues[1] ==
              doctest::Approx(g * std::sqrt(double(n))).epsilon(1e-14));
    }
}

TEST_CASE("jc manifold matches the explicit 2x2 block") {
    const double g = 7.3;
    const int n = 3;
    const ManifoldSpectrum ms = jc_manifold(n, g);
    CMat block(2, 2);
    const double amp = g * std::sqrt(double(n));
    block << cxd(0, 0), cxd(amp, 0), cxd(amp, 0), cxd(0, 0);
    const EigResult ref = eig_hermitian(block, default_settings());
    for (int i = 0; i < 2; ++i)
        CHECK(ms.eigenvalues[i] == doctest::Approx(ref.eigenvalues[i]).epsilon(1e-14));
    // eigenvectors are the symmetric/antisymmetric combinations
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    CHECK(std::abs(ms.eigenvectors(0, 0) - cxd(inv_sqrt2, 0)) < 1e-14);
    CHECK(std::abs(ms.eigenvectors(1, 0) - cxd(-inv_sqrt2, 0)) < 1e-14);
    CHECK(std::abs(ms.eigenvectors(0, 1) - cxd(inv_sqrt2, 0)) < 1e-14);
    CHECK(std::abs(ms.eigenvectors(1, 1) - cxd(inv_sqrt2, 0)) < 1e-14);
}

TEST_CASE("two-mode one-quantum block splits by the combined coupling") {
    const double w = RateParams::angular(10.0);
    const ManifoldSpectrum ms = bimodal_manifold(1, w, w);
    CHECK(ms.dimension == 3);
    REQUIRE(ms.eigenvalues.size() == 3);
    const double split = std::sqrt(2.0) * w;
    CHECK(ms.eigenvalues[0] == doctest::Approx(-split).epsilon(1e-12));
    CHECK(std::abs(ms.eigenvalues[1]) < 1e-9);
    CHECK(ms.eigenvalues[2] == doctest::Approx(split).epsilon(1e-12));
}

TEST_CASE("two-mode block dimension is 2n+1") {
    const double w = RateParams::angular(10.0);
    for (int n = 1; n <= 6; ++n) {
        const ManifoldSpectrum ms = bimodal_manifold(n, w, 0.7 * w);
        CHECK(ms.dimension == 2 * n + 1);
        CHECK(ms.eigenvalues.size() == 2 * n + 1);
    }
}

TEST_CASE("decoupled second mode embeds the single-mode ladder") {
    const double g = RateParams::angular(10.0);
    const int n = 4;
    const ManifoldSpectrum ms = bimodal_manifold(n, g, 0.0);
    // must contain +/- g sqrt(k) for k <= n, plus zeros from the idle mode
    for (int k = 1; k <= n; ++k) {
        const double target = g * std::sqrt(double(k));
        bool found_plus = false, found_minus = false;
        for (int i = 0; i < ms.eigenvalues.size(); ++i) {
            if (std::abs(ms.eigenvalues[i] - target) < 1e-9) found_plus = true;
            if (std::abs(ms.eigenvalues[i] + target) < 1e-9) found_minus = true;
        }
        CHECK(found_plus);
        CHECK(found_minus);
    }
}

TEST_CASE("spectrum is symmetric about zero and contains zero") {
    std::mt19937 rng(2024);
    std::uniform_real_distribution<double> u(0.5, 30.0);
    for (int trial = 0; trial < 100; ++trial) {
        const double ga = RateParams::angular(u(rng));
        const double gb = RateParams::angular(u(rng));
        const int n = 1 + trial % 6;
        const ManifoldSpectrum ms = bimodal_manifold(n, ga, gb);

        // pair up to sign within 1e-9 (relative to the spectral scale)
        const double scale = std::max(1.0, std::abs(ms.eigenvalues[ms.eigenvalues.size() - 1]));
        std::vector<double> vals(ms.eigenvalues.data(),
                                 ms.eigenvalues.data() + ms.eigenvalues.size());
        std::sort(vals.begin(), vals.end());
        for (size_t i = 0; i < vals.size(); ++i) {
            const double mirror = -vals[vals.size() - 1 - i];
            CHECK(std::abs(vals[i] - mirror) < 1e-9 * scale);
        }
        // zero eigenvalue present
        double closest = 1e300;
        for (double v : vals) closest = std::min(closest, std::abs(v));
        CHECK(closest < 1e-9 * scale);
    }
}

TEST_CASE("manifold builders reject invalid quantum numbers") {
    CHECK_THROWS(jc_manifold(0, 1.0));
    CHECK_THROWS(bimodal_manifold(0, 1.0, 1.0));
    CHECK_THROWS(bimodal_manifold(-2, 1.0, 1.0));
}
