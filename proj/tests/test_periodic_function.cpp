#include <doctest.h>

#include <random>

#include "dtn/periodic_function.hpp"
#include "oracles.hpp"

using namespace dtn;
using PFd = PeriodicFunction<double>;
using C = std::complex<double>;

namespace {

PFd cosine(int n = 1) { return PFd::from_modes({{n, 0.5}, {-n, 0.5}}); }
PFd sine(int n = 1) { return PFd::from_modes({{n, C(0, -0.5)}, {-n, C(0, 0.5)}}); }

PFd random_trig(std::mt19937_64& rng, int order) {
    std::normal_distribution<double> g;
    PFd f(order, kDefaultFourierOrder);
    for (int n = 0; n <= order; ++n) {
        const C c(g(rng), n == 0 ? 0.0 : g(rng));
        f.set_coeff(n, c);
        f.set_coeff(-n, std::conj(c));
    }
    return f;
}

double coefficient_distance(const PFd& f, const PFd& g) {
    double d = 0;
    const int order = std::max(f.order(), g.order());
    for (int n = -order; n <= order; ++n) d = std::max(d, std::abs(f.coeff(n) - g.coeff(n)));
    return d;
}

} // namespace

TEST_CASE("multiply: cos·cos is 1/2 + cos 2x/2") {
    const PFd p = cosine() * cosine();
    CHECK(std::abs(p.coeff(0) - 0.5) < 1e-15);
    CHECK(std::abs(p.coeff(2) - 0.25) < 1e-15);
    CHECK(std::abs(p.coeff(-2) - 0.25) < 1e-15);
    CHECK(std::abs(p.coeff(1)) == 0.0);
}

TEST_CASE("multiply: 1·f is f") {
    std::mt19937_64 rng(1);
    const PFd f = random_trig(rng, 7);
    CHECK(coefficient_distance(PFd::constant(1.0) * f, f) == 0.0);
}

TEST_CASE("multiply matches pointwise products on a 64-point grid") {
    const PFd f = PFd::constant(1.0) + 0.3 * cosine();
    const PFd g = sine(2);
    const PFd product = f * g;
    std::vector<C> samples(64);
    for (int i = 0; i < 64; ++i) {
        const double x = 2 * std::numbers::pi * i / 64;
        samples[i] = (1 + 0.3 * std::cos(x)) * std::sin(2 * x);
    }
    for (int n = -3; n <= 3; ++n) {
        C c(0);
        for (int i = 0; i < 64; ++i) c += samples[i] * std::polar(1.0, -2 * std::numbers::pi * n * i / 64);
        CHECK(std::abs(product.coeff(n) - c / 64.0) < 1e-12);
    }
}

TEST_CASE("multiply drops modes past the cap and records their mass") {
    const PFd f = PFd::from_modes({{3, 1.0}}, 4);
    const PFd g = PFd::from_modes({{2, 1.0}}, 4);
    const PFd p = f * g;
    CHECK(p.order() == 4);
    CHECK(p.is_zero());
    CHECK(p.dropped() == doctest::Approx(1.0));
}

TEST_CASE("differentiate: cos → −sin, constants → 0") {
    CHECK(coefficient_distance(differentiate(cosine()), -sine()) < 1e-15);
    CHECK(differentiate(PFd::constant(3.0)).is_zero());
}

TEST_CASE("differentiate matches central differences") {
    std::mt19937_64 rng(2);
    const PFd f = random_trig(rng, 3);
    const PFd df = differentiate(f);
    for (double x : {0.0, 0.4, 1.7, 3.1, 5.9}) {
        const C fd = oracle::central_difference([&](double y) { return f(y); }, x);
        CHECK(std::abs(df(x) - fd) < 1e-8);
    }
}

TEST_CASE("mean") {
    CHECK(mean(PFd::constant(1.0) + 0.3 * cosine()) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(std::abs(mean(sine(7))) < 1e-15);
    const PFd rho = PFd::project([](double x) { return std::exp(0.1 * std::cos(x)); }, 32, 256);
    const double quad = oracle::periodic_integral([](double x) { return std::exp(0.1 * std::cos(x)); }) /
                        (2 * std::numbers::pi);
    CHECK(std::abs(mean(rho) - quad) < 1e-12);
}

TEST_CASE("mean rejects an imaginary average") {
    CHECK_THROWS_AS(mean(PFd::constant(C(1, 0.1))), NumericalError);
}

TEST_CASE("antiderivative") {
    const auto one = antiderivative(PFd::constant(1.0));
    CHECK(one.slope == C(1));
    CHECK(one.periodic.is_zero());
    const auto c = antiderivative(cosine());
    CHECK(std::abs(c.slope) == 0.0);
    CHECK(coefficient_distance(c.periodic, sine()) < 1e-15);
}

TEST_CASE("antiderivative of a zero-mean integrand is periodic") {
    std::mt19937_64 rng(3);
    PFd f = random_trig(rng, 9);
    f.set_coeff(0, 0.0);
    const auto F = antiderivative(f);
    CHECK(std::abs(F(0.0)) < 1e-12);
    CHECK(std::abs(F(2 * std::numbers::pi) - F(0.0)) < 1e-12);
}

TEST_CASE("properties over random trigonometric polynomials") {
    std::mt19937_64 rng(4);
    for (int trial = 0; trial < 50; ++trial) {
        const PFd f = random_trig(rng, 1 + trial % 8);
        const PFd g = random_trig(rng, 1 + trial % 5);
        const PFd h = random_trig(rng, 3);
        const double a = 0.7, b = -1.3;
        CHECK(coefficient_distance(f * g, g * f) < 1e-12);
        CHECK(coefficient_distance(f * (a * g + b * h), a * (f * g) + b * (f * h)) < 1e-12);
        CHECK(coefficient_distance(antiderivative(f).derivative(), f) <= 4 * std::numeric_limits<double>::epsilon() * f.max_abs_coeff());
        CHECK(complex_mean(differentiate(f)) == C(0));
        const double x = 0.37 * trial;
        CHECK(std::abs(f(x) * g(x) - (f * g)(x)) < 1e-11);
    }
}

TEST_CASE("real functions keep conjugate symmetry") {
    std::mt19937_64 rng(5);
    const PFd f = random_trig(rng, 6);
    CHECK(f.is_real());
    CHECK((f * f).is_real(1e-14));
    CHECK(differentiate(f).is_real(1e-14));
    const PFd g = PFd::from_modes({{1, C(1, 2)}, {-1, C(3, 0)}});
    CHECK_FALSE(g.is_real());
    CHECK(g.symmetrized().is_real());
}

TEST_CASE("reciprocal") {
    const PFd rho = PFd::constant(1.0) + 0.3 * cosine();
    const PFd inv = reciprocal(rho);
    for (double x : {0.0, 1.0, 2.5, 4.0}) CHECK(std::abs(inv(x) - 1 / (1 + 0.3 * std::cos(x))) < 1e-12);
    CHECK_THROWS_AS(reciprocal(cosine()), InvalidArgument);
}

TEST_CASE("evaluation is the finite Fourier sum") {
    const PFd f = PFd::from_modes({{-2, C(0.1, 0.2)}, {0, 1.0}, {3, C(-0.5, 0.3)}});
    for (double x : {0.0, 0.9, 2.2}) {
        const C direct = C(0.1, 0.2) * std::polar(1.0, -2 * x) + 1.0 + C(-0.5, 0.3) * std::polar(1.0, 3 * x);
        CHECK(std::abs(f(x) - direct) < 1e-15);
    }
}

TEST_CASE("invalid construction") {
    CHECK_THROWS_AS(PFd(5, 3), InvalidArgument);
    CHECK_THROWS_AS(PFd::from_modes({{10, 1.0}}, 4), InvalidArgument);
}
