#include <doctest.h>

#include <random>

#include "dtn/diagonalization.hpp"
#include "oracles.hpp"
#include "random_data.hpp"

using namespace dtn;
using namespace dtn::testing;

namespace {

constexpr double kPi = std::numbers::pi;

PF cosine() { return PF::from_modes({{1, 0.5}, {-1, 0.5}}); }

double max_abs_on_grid(const std::function<cplx(double)>& f, int points = 48) {
    double m = 0;
    for (int i = 0; i < points; ++i) m = std::max(m, std::abs(f(2 * kPi * i / points)));
    return m;
}

} // namespace

TEST_CASE("conjugated_symbol: leading term is |ξ|/L") {
    std::mt19937_64 rng(21);
    const RandomData d = draw_data(rng, 5);
    const PF rho = d.rho_function();
    const double L = mean(rho);
    const SymbolExpansion r = boundary_symbol(factor_symbol({1.3, d.tau_jet(5)}, -2), rho);
    const SymbolExpansion at = conjugated_symbol(r, rho, -2);
    CHECK(max_abs_on_grid([&](double x) { return at.at(1)(x, 0, 1.0) - 1 / L; }) < 1e-12);
    CHECK(max_abs_on_grid([&](double x) { return at.at(1)(x, 0, -2.0) - 2 / L; }) < 1e-12);
}

TEST_CASE("conjugated_symbol: ρ≡τ≡1") {
    const double lambda = 1.7;
    const SymbolExpansion r =
        boundary_symbol(factor_symbol({lambda, JetFunction::exact(PF::constant(1.0))}, -2), PF::constant(1.0));
    const SymbolExpansion at = conjugated_symbol(r, PF::constant(1.0), -2);
    for (double xi : {1.0, -1.0, 2.0}) {
        CHECK(std::abs(at.at(-1)(0.3, 0, xi) + lambda / (2 * std::abs(xi))) < 1e-14);
        CHECK(std::abs(at.at(-2)(0.3, 0, xi) - lambda / (4 * xi * xi) * 2) < 1e-14);
    }
}

TEST_CASE("conjugated_symbol: degree −2 against its closed form") {
    const double lambda = 1.4;
    const PF rho = PF::constant(1.0) + 0.3 * cosine();
    // τ = 1 + 0.2 sin x (1 − t)
    const PF s = PF::from_modes({{1, cplx(0, -0.1)}, {-1, cplx(0, 0.1)}});
    const JetFunction tau({PF::constant(1.0) + s, s * -1.0}, JetFunction::kExact);
    const SymbolExpansion r = boundary_symbol(factor_symbol({lambda, tau}, -2), rho);
    const SymbolExpansion at = conjugated_symbol(r, rho, -2);
    const double L = 1;
    for (int sign : {+1, -1}) {
        auto expected = [&](double x) {
            const double rx = 1 + 0.3 * std::cos(x), drx = -0.3 * std::sin(x);
            const double t0 = 1 + 0.2 * std::sin(x), tr = 0.2 * std::sin(x), tx = 0.2 * std::cos(x);
            const cplx i(0, 1);
            return lambda * L * L / (4 * std::pow(rx, 3)) * (tr - i * double(sign) * tx + 2 * t0) +
                   i * lambda * L * L * t0 * double(sign) * drx / (2 * std::pow(rx, 4));
        };
        CHECK(max_abs_on_grid([&](double x) { return at.at(-2)(x, 0, double(sign)) - expected(x); }, 64) < 1e-10);
    }
}

TEST_CASE("ArclengthInverse inverts the normalized arclength") {
    const PF rho = PF::constant(1.0) + 0.3 * cosine();
    const ArclengthInverse inv(rho);
    CHECK(inv.length_scale() == doctest::Approx(1.0));
    for (double x : {0.0, 0.5, 2.0, 4.5, 6.2}) {
        const double s = inv(x);
        // (1/L)∫₀^s ρ = s + 0.3 sin s
        CHECK(std::abs(s + 0.3 * std::sin(s) - x) < 1e-12);
    }
}

TEST_CASE("diag_step: fixed point on a diagonal symbol") {
    const SymbolExpansion p = diagonalize({1.0, JetFunction::exact(PF::constant(1.0))}, 1).front();
    const SymbolExpansion q = diag_step(p, 1);
    for (int m = 1; m >= p.depth(); --m) {
        CHECK(distance(q.at(m).plus, p.at(m).plus) < 1e-15);
        CHECK(distance(q.at(m).minus, p.at(m).minus) < 1e-15);
    }
}

TEST_CASE("diag_step averages degree −N and keeps higher degrees") {
    SymbolExpansion p(1, -3);
    p.set(HomogeneousComponent::even(1, JetFunction::exact(PF::constant(1.0))));
    const PF c = PF::constant(0.4) + 0.3 * cosine();
    p.set(HomogeneousComponent::even(-1, JetFunction::exact(c)));
    p.set(HomogeneousComponent::even(-2, JetFunction::exact(cosine())));
    const SymbolExpansion q = diag_step(p, 1);
    CHECK(distance(q.at(1).plus, p.at(1).plus) == 0.0);
    for (double x : {0.0, 1.0, 3.0}) {
        CHECK(std::abs(q.at(-1)(x, 0, 1.0) - 0.4) < 1e-15);
        CHECK(std::abs(q.at(-1)(x, 0, -1.0) - 0.4) < 1e-15);
    }
    CHECK_THROWS_AS(diag_step(p, 2), InvalidArgument);
    try {
        diag_step(p, 2);
    } catch (const InvalidArgument& e) {
        CHECK(std::string(e.what()).find("degree -1") != std::string::npos);
    }
}

TEST_CASE("diag_step: a second application leaves averaged degrees bit-identical") {
    std::mt19937_64 rng(22);
    const RandomData d = draw_data(rng, 7);
    const auto steps = diagonalize({0.8, d.tau_jet(7), d.rho_function()}, 3);
    const SymbolExpansion again = diag_step(steps[2], 3);
    for (int m = 1; m >= -2; --m) {
        const auto& a = steps[2].at(m);
        const auto& b = again.at(m);
        for (int sign : {+1, -1}) {
            const PF fa = a.branch(sign).trace(), fb = b.branch(sign).trace();
            CHECK(fa.order() == fb.order());
            for (int n = -fa.order(); n <= fa.order(); ++n) CHECK(fa.coeff(n) == fb.coeff(n));
        }
    }
}

TEST_CASE("asymptotic_coefficients: unit disk") {
    for (double lambda : {-1.5, 1.0, 2.0}) {
        const auto c = asymptotic_coefficients({lambda, JetFunction::exact(PF::constant(1.0))}, 2);
        CHECK(c.L == doctest::Approx(1.0));
        CHECK(std::abs(c.s[0] + lambda / 2) < 1e-13);
        CHECK(std::abs(c.s[1] - lambda / 2) < 1e-13);
    }
    SteklovProblem defaults;
    defaults.lambda = 2;
    const auto d = asymptotic_coefficients(defaults, 2);
    CHECK(std::abs(d.s[0] + 1) < 1e-13);
    CHECK(std::abs(d.s[1] - 1) < 1e-13);
}

TEST_CASE("asymptotic_coefficients: λ=0 gives zero coefficients") {
    std::mt19937_64 rng(23);
    const RandomData d = draw_data(rng, 7);
    const auto c = asymptotic_coefficients({0.0, d.tau_jet(7), d.rho_function()}, 4);
    for (double s : c.s) CHECK(std::abs(s) < 1e-14);
}

TEST_CASE("generic pipeline reproduces the two-term closed forms") {
    std::mt19937_64 rng(24);
    std::uniform_real_distribution<double> u(-3, 3);
    for (int trial = 0; trial < 20; ++trial) {
        const RandomData d = draw_data(rng, 5);
        const double lambda = u(rng);
        const auto c = asymptotic_coefficients({lambda, d.tau_jet(5), d.rho_function()}, 2);
        const auto [s1, s2] = closed_form(d, lambda);
        INFO("trial " << trial);
        CHECK(std::abs(c.s[0] - s1) <= 1e-9 * std::abs(s1));
        CHECK(std::abs(c.s[1] - s2) <= 1e-9 * std::abs(s2));
        CHECK(c.L == doctest::Approx(oracle::periodic_integral([&](double x) { return d.rho(x); }) / (2 * kPi)));
    }
}

TEST_CASE("shortcut: half the steps suffice for s_n") {
    std::mt19937_64 rng(25);
    for (int trial = 0; trial < 3; ++trial) {
        const RandomData d = draw_data(rng, 7);
        const auto steps = diagonalize({1.2 - trial, d.tau_jet(7), d.rho_function()}, 4);
        for (int n = 1; n <= 4; ++n) {
            const int early = (n + 1) / 2;
            for (int sign : {+1, -1}) {
                const cplx full = complex_mean(steps[n - 1].at(-n).branch(sign).trace());
                const cplx quick = complex_mean(steps[early - 1].at(-n).branch(sign).trace());
                INFO("n " << n);
                CHECK(std::abs(full - quick) < 1e-10);
            }
        }
    }
}

TEST_CASE("hermiticity through the diagonalization") {
    std::mt19937_64 rng(26);
    const RandomData d = draw_data(rng, 7);
    const SteklovProblem problem{-0.7, d.tau_jet(7), d.rho_function()};
    const auto steps = diagonalize(problem, 4);
    for (const auto& p : steps) CHECK(is_hermitian(p, 1e-10));
    const auto c = asymptotic_coefficients(problem, 4);
    CHECK(c.max_imaginary < 1e-10);
    for (std::size_t n = 1; n < c.branch_values.size(); ++n) {
        CHECK(std::abs(c.branch_values[n].first - std::conj(c.branch_values[n].second)) < 1e-10);
    }
}

TEST_CASE("s_n is a polynomial in λ of degree at most n without constant term") {
    std::mt19937_64 rng(27);
    const RandomData d = draw_data(rng, 7);
    const std::vector<double> grid{0, 1, -1, 2, -2, 3};
    std::vector<std::vector<double>> s(4);
    for (double lambda : grid) {
        const auto c = asymptotic_coefficients({lambda, d.tau_jet(7), d.rho_function()}, 4);
        for (int n = 0; n < 4; ++n) s[n].push_back(c.s[n]);
    }
    for (int n = 1; n <= 4; ++n) {
        const std::vector<double> x(grid.begin(), grid.begin() + n + 2);
        const std::vector<double> y(s[n - 1].begin(), s[n - 1].begin() + n + 2);
        const auto coeffs = oracle::polyfit(x, y, n);
        double misfit = 0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            double p = 0;
            for (int k = n; k >= 0; --k) p = p * x[i] + coeffs[k];
            misfit = std::max(misfit, std::abs(p - y[i]));
        }
        INFO("n " << n);
        CHECK(misfit < 1e-9);
        CHECK(std::abs(coeffs[0]) < 1e-10);
    }
}

TEST_CASE("predict_eigenvalues") {
    DiagonalCoefficients c;
    c.L = 1;
    c.s = {0.0, 0.0};
    const auto seq = predict_eigenvalues(c, 2);
    const std::vector<double> expected{0, 1, 1, 2, 2};
    REQUIRE(seq.size() == expected.size());
    for (std::size_t i = 0; i < expected.size(); ++i) CHECK(seq[i].value == expected[i]);

    c.s = {-0.5, 0.5};
    const auto model = predict_eigenvalues(c, 40);
    CHECK(model[19].value == doctest::Approx(10 - 0.05 + 0.5 / 100).epsilon(1e-15));
    CHECK(model[20].value == model[19].value);
    for (std::size_t i = 1; i < model.size(); ++i) CHECK(model[i].value >= model[i - 1].value);
}
