#include <doctest.h>

#include "dtn/errors.hpp"
#include "dtn/forward_solvers.hpp"
#include "dtn/sequences.hpp"
#include "oracles.hpp"

using namespace dtn;

namespace {

/// |σ_{2j} − σ_{2j−1}| and |σ_{2j} − model| samples over j ∈ [first, last].
struct TailSamples {
    std::vector<double> j, split, remainder;
};

TailSamples disk_tail(double lambda, int first, int last, double s1, double s2) {
    const auto S = disk_constant_spectrum(lambda, last + 1);
    TailSamples out;
    for (int j = first; j <= last; ++j) {
        const double lo = S[2 * j - 1].value, hi = S[2 * j].value;
        out.j.push_back(j);
        out.split.push_back(std::abs(hi - lo));
        out.remainder.push_back(std::abs(hi - (j + s1 / j + s2 / (double(j) * j))));
    }
    return out;
}

} // namespace

TEST_CASE("disk: λ=0 gives the harmonic polynomial spectrum") {
    const auto S = disk_constant_spectrum(0.0, 3);
    const std::vector<double> expected{0, 1, 1, 2, 2, 3, 3};
    REQUIRE(S.size() == expected.size());
    for (std::size_t i = 0; i < expected.size(); ++i) CHECK(S[i].value == expected[i]);
    CHECK(S[1].mode == 1);
    CHECK(S[2].mode == 1);
}

TEST_CASE("disk: Bessel ratios against the power series") {
    for (double lambda : {-9.0, -1.0, 0.5, 2.0, 4.0, 20.0}) {
        for (int n : {0, 1, 2, 7, 20}) {
            INFO("λ " << lambda << " n " << n);
            const double expected = oracle::disk_eigenvalue(n, lambda);
            CHECK(std::abs(disk_mode_eigenvalue(n, lambda) - expected) < 1e-12 * (1 + std::abs(expected)));
        }
    }
    const long double i0 = oracle::bessel_i(0, 1), i1 = oracle::bessel_i(1, 1);
    CHECK(std::abs(disk_mode_eigenvalue(0, -1.0) - static_cast<double>(i1 / i0)) < 1e-15);
}

TEST_CASE("disk: λ=1, n=50 follows the ratio expansion") {
    CHECK(std::abs(disk_mode_eigenvalue(50, 1.0) - (50 - 1.0 / (2 * 51))) < 1e-4);
}

TEST_CASE("disk: pencil guard") {
    const double z = oracle::first_j0_zero();
    CHECK_FALSE(dirichlet_pencil_guard(z * z, DiskGeometry{}, 10));
    CHECK(dirichlet_pencil_guard(-1.0, DiskGeometry{}, 10));
    CHECK(dirichlet_pencil_guard(2.0, DiskGeometry{}, 10));
    const auto check = check_pencil(z * z, DiskGeometry{}, 10);
    REQUIRE(check.offending_mode.has_value());
    CHECK(*check.offending_mode == 0);
    try {
        disk_constant_spectrum(z * z, 10);
        FAIL("expected PencilError");
    } catch (const PencilError& e) {
        CHECK(e.mode() == 0);
    }
}

TEST_CASE("annulus: pencil guard at λ=0") {
    CHECK(dirichlet_pencil_guard(0.0, AnnulusGeometry{0.5}, 20));
}

TEST_CASE("annulus: λ=0 pairs against a determinant scan") {
    for (double R : {0.5, 0.7071067811865476}) {
        for (int n : {0, 1, 2, 5}) {
            const auto roots = oracle::annulus_harmonic_pair(n, R);
            REQUIRE(roots.size() == 2);
            const auto [lo, hi] = annulus_mode_eigenvalues(n, 0.0, R);
            INFO("R " << R << " n " << n);
            CHECK(std::abs(lo - roots[0]) < 1e-9 * (1 + roots[0]));
            CHECK(std::abs(hi - roots[1]) < 1e-9 * (1 + roots[1]));
        }
    }
}

TEST_CASE("annulus: spectrum is real and sorted") {
    for (double lambda : {-3.0, 1.0, 5.0}) {
        const auto S = annulus_constant_spectrum(lambda, 0.6, 40);
        CHECK(S.size() == 2 + 4 * 40);
        for (std::size_t i = 0; i < S.size(); ++i) {
            CHECK(std::isfinite(S[i].value));
            if (i > 0) CHECK(S[i].value >= S[i - 1].value);
        }
    }
}

TEST_CASE("annulus: tail families follow the two model sequences") {
    const double R = 1 / std::sqrt(2.0), lambda = 1;
    const auto S = lowest_eigenvalues(lambda, AnnulusGeometry{R}, 600);
    // Outer circle: α = 1, s = (−λ/2, λ/2); inner circle: α = 1/R, s = (−λR/2, −λR/2).
    auto nearest = [](double v, double alpha, double s1, double s2) {
        const double j = std::max(1.0, std::round(v / alpha));
        return std::abs(v - (j * alpha + s1 / j + s2 / (j * j)));
    };
    int mismatched = 0, checked = 0;
    for (std::size_t i = 0; i < S.size(); ++i) {
        if (S[i].mode <= 50) continue;
        ++checked;
        const double v = S[i].value;
        const double outer = nearest(v, 1.0, -lambda / 2, lambda / 2);
        const double inner = nearest(v, 1 / R, -lambda * R / 2, -lambda * R / 2);
        const int family = outer < inner ? 0 : 1;
        if (family != S[i].component || std::min(outer, inner) > 1e-3) ++mismatched;
    }
    CHECK(checked > 300);
    CHECK(mismatched == 0);
}

TEST_CASE("lowest_eigenvalues is a prefix of the full spectrum") {
    const auto full = annulus_constant_spectrum(1.0, 0.5, 200);
    const auto low = lowest_eigenvalues(1.0, AnnulusGeometry{0.5}, 150);
    REQUIRE(low.size() == 150);
    for (std::size_t i = 0; i < low.size(); ++i) CHECK(low[i].value == full[i].value);
}

TEST_CASE("radial: τ≡1 matches the Bessel spectrum") {
    for (double lambda : {-2.0, 1.0, 3.0}) {
        for (int n = 0; n <= 60; n += 6) {
            INFO("λ " << lambda << " n " << n);
            CHECK(std::abs(radial_mode_eigenvalue(n, lambda, {1.0}) - disk_mode_eigenvalue(n, lambda)) < 1e-10);
        }
    }
}

TEST_CASE("radial: λ=0 gives σ_n = n for any profile") {
    for (int n : {0, 1, 4, 30}) CHECK(std::abs(radial_mode_eigenvalue(n, 0.0, {1.0, 0.3, -2.0}) - n) < 1e-10);
}

TEST_CASE("radial: τ = 1 + r²/2 tail fit matches the boundary integrals") {
    // s_1 = −(λ/4π)∫τ = −3/4 and s_2 = (λ/8π)∫(τ_r + 2τ) = 1 by quadrature.
    const double lambda = 1;
    const double s1 = -lambda / (4 * std::numbers::pi) * oracle::periodic_integral([](double) { return 1.5; });
    const double s2 = lambda / (8 * std::numbers::pi) * oracle::periodic_integral([](double) { return 1.0 + 3.0; });
    std::vector<double> j, v;
    for (int n = 40; n <= 200; ++n) {
        j.push_back(n);
        v.push_back(radial_mode_eigenvalue(n, lambda, {1.0, 0.0, 0.5}));
    }
    const auto [f1, f2] = oracle::two_term_fit(j, v);
    CHECK(std::abs(f1 - s1) < 1e-3);
    CHECK(std::abs(f2 - s2) < 1e-2);
}

TEST_CASE("disk: remainder after two terms decays like j^{-3}") {
    const auto t = disk_tail(1.0, 20, 200, -0.5, 0.5);
    const auto fit = decay_order(t.j, t.remainder);
    REQUIRE(fit.slope.has_value());
    CHECK(*fit.slope <= -2.7);
}

TEST_CASE("disk: eigenvalues double asymptotically") {
    const auto t = disk_tail(2.0, 20, 200, -1, 1);
    const auto fit = decay_order(t.j, t.split);
    if (fit.slope) CHECK(*fit.slope <= -4);
}

TEST_CASE("mode eigenvalues increase with the mode beyond a threshold") {
    for (double lambda : {-4.0, 2.0, 10.0}) {
        double previous = disk_mode_eigenvalue(4, lambda);
        for (int n = 5; n <= 120; ++n) {
            const double v = disk_mode_eigenvalue(n, lambda);
            CHECK(v > previous);
            previous = v;
        }
        double outer = annulus_mode_eigenvalues(4, lambda, 0.5).second;
        for (int n = 5; n <= 60; ++n) {
            const double v = annulus_mode_eigenvalues(n, lambda, 0.5).second;
            CHECK(v > outer);
            outer = v;
        }
    }
}

TEST_CASE("threaded and sequential solves agree bit for bit") {
    SolverOptions one, four;
    one.threads = 1;
    four.threads = 4;
    const auto a = disk_radial_spectrum(1.5, {1.0, 0.2}, 80, one);
    const auto b = disk_radial_spectrum(1.5, {1.0, 0.2}, 80, four);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].value == b[i].value);
        CHECK(a[i].mode == b[i].mode);
    }
}

TEST_CASE("invalid geometry") {
    CHECK_THROWS_AS(annulus_constant_spectrum(1.0, 1.5, 10), InvalidArgument);
    CHECK_THROWS_AS(disk_constant_spectrum(1.0, -1), InvalidArgument);
}
