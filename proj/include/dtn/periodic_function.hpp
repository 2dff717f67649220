#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "dtn/errors.hpp"

namespace dtn {

inline constexpr int kDefaultFourierOrder = 64;

/// Truncated Fourier series of a smooth 2π-periodic function,
/// f(x) = Σ_{|n| ≤ order} c_n e^{inx}.
///
/// The order grows under multiplication up to `cap`; coefficients that would
/// exceed the cap are dropped and their l2 mass is accumulated in `dropped()`.
template <typename Real = double>
class PeriodicFunction {
public:
    using Scalar = Real;
    using Complex = std::complex<Real>;
    using Coefficients = Eigen::Matrix<Complex, Eigen::Dynamic, 1>;

    PeriodicFunction() : PeriodicFunction(0, kDefaultFourierOrder) {}

    /// Zero function with the given order and cap.
    PeriodicFunction(int order, int cap) : order_(order), cap_(cap) {
        if (order < 0 || cap < 0 || order > cap) {
            throw InvalidArgument("PeriodicFunction: need 0 <= order <= cap");
        }
        coeffs_ = Coefficients::Zero(2 * order + 1);
    }

    static PeriodicFunction constant(Complex c, int cap = kDefaultFourierOrder) {
        PeriodicFunction f(0, cap);
        f.coeffs_(0) = c;
        return f;
    }

    /// Builds from explicit (n, c_n) pairs; repeated n accumulate.
    static PeriodicFunction from_modes(const std::vector<std::pair<int, Complex>>& modes,
                                       int cap = kDefaultFourierOrder) {
        int order = 0;
        for (const auto& [n, c] : modes) order = std::max(order, std::abs(n));
        if (order > cap) throw InvalidArgument("PeriodicFunction: mode exceeds cap");
        PeriodicFunction f(order, cap);
        for (const auto& [n, c] : modes) f.coeffs_(n + order) += c;
        return f;
    }

    /// Fourier projection of a sampled function onto |n| ≤ order using an
    /// equispaced grid of `grid` points (trapezoid rule).
    template <typename F>
    static PeriodicFunction project(F&& f, int order, int grid, int cap = kDefaultFourierOrder) {
        if (grid <= 2 * order) throw InvalidArgument("PeriodicFunction::project: grid too coarse");
        std::vector<Complex> samples(grid);
        const Real h = 2 * std::numbers::pi_v<Real> / grid;
        for (int i = 0; i < grid; ++i) samples[i] = Complex(f(h * i));
        return from_samples(samples, order, cap);
    }

    /// Discrete Fourier coefficients of equispaced samples on [0, 2π).
    static PeriodicFunction from_samples(const std::vector<Complex>& samples, int order,
                                         int cap = kDefaultFourierOrder) {
        const int grid = static_cast<int>(samples.size());
        if (grid <= 2 * order) throw InvalidArgument("PeriodicFunction: grid too coarse");
        PeriodicFunction out(order, std::max(order, cap));
        const Real h = 2 * std::numbers::pi_v<Real> / grid;
        std::vector<Complex> twiddle(grid);
        for (int i = 0; i < grid; ++i) twiddle[i] = std::polar(Real(1), -h * i);
        for (int n = -order; n <= order; ++n) {
            Complex acc(0);
            const int step = ((n % grid) + grid) % grid;
            int idx = 0;
            for (int i = 0; i < grid; ++i) {
                acc += samples[i] * twiddle[idx];
                idx += step;
                if (idx >= grid) idx -= grid;
            }
            out.coeffs_(n + order) = acc / Real(grid);
        }
        return out;
    }

    int order() const { return order_; }
    int cap() const { return cap_; }
    Real dropped() const { return dropped_; }
    const Coefficients& coefficients() const { return coeffs_; }

    Complex coeff(int n) const {
        return std::abs(n) > order_ ? Complex(0) : coeffs_(n + order_);
    }

    void set_coeff(int n, Complex c) {
        if (std::abs(n) > cap_) throw InvalidArgument("PeriodicFunction: mode exceeds cap");
        if (std::abs(n) > order_) resize(std::abs(n));
        coeffs_(n + order_) = c;
    }

    /// Exact evaluation of the finite Fourier sum.
    Complex operator()(Real x) const {
        const Complex z = std::polar(Real(1), x);
        Complex pos(0);
        for (int n = order_; n >= 0; --n) pos = pos * z + coeffs_(n + order_);
        Complex neg(0);
        const Complex zc = std::conj(z);
        for (int n = order_; n >= 1; --n) neg = (neg + coeffs_(order_ - n)) * zc;
        return pos + neg;
    }

    bool is_zero() const { return (coeffs_.array() == Complex(0)).all(); }

    Real max_abs_coeff() const { return coeffs_.size() ? coeffs_.cwiseAbs().maxCoeff() : Real(0); }

    /// True if c_{-n} = conj(c_n) within tol.
    bool is_real(Real tol = 0) const {
        for (int n = 0; n <= order_; ++n) {
            if (std::abs(coeff(-n) - std::conj(coeff(n))) > tol) return false;
        }
        return true;
    }

    /// Enforces conjugate symmetry by averaging c_n with conj(c_{-n}).
    PeriodicFunction symmetrized() const {
        PeriodicFunction out = *this;
        for (int n = 0; n <= order_; ++n) {
            const Complex c = (coeff(n) + std::conj(coeff(-n))) / Real(2);
            out.coeffs_(n + order_) = c;
            out.coeffs_(order_ - n) = std::conj(c);
        }
        return out;
    }

    PeriodicFunction conj() const {
        PeriodicFunction out(order_, cap_);
        for (int n = -order_; n <= order_; ++n) out.coeffs_(n + order_) = std::conj(coeff(-n));
        out.dropped_ = dropped_;
        return out;
    }

    /// Drops trailing modes whose magnitude is at most tol.
    PeriodicFunction trimmed(Real tol = 0) const {
        int n = order_;
        while (n > 0 && std::abs(coeff(n)) <= tol && std::abs(coeff(-n)) <= tol) --n;
        if (n == order_) return *this;
        PeriodicFunction out(n, cap_);
        out.coeffs_ = coeffs_.segment(order_ - n, 2 * n + 1);
        out.dropped_ = dropped_;
        return out;
    }

    PeriodicFunction& operator+=(const PeriodicFunction& g) {
        cap_ = std::min(cap_, g.cap_);
        const int order = std::max(order_, g.order_);
        if (order > cap_) throw InvalidArgument("PeriodicFunction: sum exceeds cap");
        if (order > order_) resize(order);
        coeffs_.segment(order_ - g.order_, 2 * g.order_ + 1) += g.coeffs_;
        dropped_ += g.dropped_;
        return *this;
    }

    PeriodicFunction& operator-=(const PeriodicFunction& g) { return *this += -g; }

    PeriodicFunction& operator*=(Complex s) {
        coeffs_ *= s;
        dropped_ *= std::abs(s);
        return *this;
    }

    PeriodicFunction& operator*=(Real s) { return *this *= Complex(s); }

    friend PeriodicFunction operator+(PeriodicFunction f, const PeriodicFunction& g) { return f += g; }
    friend PeriodicFunction operator-(PeriodicFunction f, const PeriodicFunction& g) { return f -= g; }
    friend PeriodicFunction operator-(PeriodicFunction f) { return f *= Real(-1); }
    friend PeriodicFunction operator*(Complex s, PeriodicFunction f) { return f *= s; }
    friend PeriodicFunction operator*(PeriodicFunction f, Complex s) { return f *= s; }
    friend PeriodicFunction operator*(Real s, PeriodicFunction f) { return f *= s; }
    friend PeriodicFunction operator*(PeriodicFunction f, Real s) { return f *= s; }

    friend PeriodicFunction operator*(const PeriodicFunction& f, const PeriodicFunction& g) {
        return multiply(f, g);
    }

    /// Exact convolution; the result order is the sum of the input orders,
    /// capped at the smaller cap. Modes beyond the cap are dropped.
    friend PeriodicFunction multiply(const PeriodicFunction& f, const PeriodicFunction& g) {
        const int cap = std::min(f.cap_, g.cap_);
        const int full = f.order_ + g.order_;
        const int order = std::min(full, cap);
        PeriodicFunction out(order, cap);
        Real dropped_sq = 0;
        if (!f.is_zero() && !g.is_zero()) {
            std::vector<Complex> acc(2 * full + 1, Complex(0));
            for (int a = 0; a < f.coeffs_.size(); ++a) {
                const Complex fa = f.coeffs_(a);
                if (fa == Complex(0)) continue;
                for (int b = 0; b < g.coeffs_.size(); ++b) acc[a + b] += fa * g.coeffs_(b);
            }
            for (int n = -full; n <= full; ++n) {
                if (std::abs(n) <= order) {
                    out.coeffs_(n + order) = acc[n + full];
                } else {
                    dropped_sq += std::norm(acc[n + full]);
                }
            }
        }
        out.dropped_ = std::sqrt(dropped_sq) + f.dropped_ * g.max_abs_coeff() +
                       g.dropped_ * f.max_abs_coeff();
        return out;
    }

private:
    void resize(int order) {
        Coefficients grown = Coefficients::Zero(2 * order + 1);
        grown.segment(order - order_, 2 * order_ + 1) = coeffs_;
        coeffs_ = std::move(grown);
        order_ = order;
    }

    Coefficients coeffs_;
    int order_;
    int cap_;
    Real dropped_ = 0;
};

template <typename Real>
PeriodicFunction<Real> differentiate(const PeriodicFunction<Real>& f) {
    using Complex = typename PeriodicFunction<Real>::Complex;
    PeriodicFunction<Real> out(f.order(), f.cap());
    for (int n = -f.order(); n <= f.order(); ++n) {
        if (n != 0) out.set_coeff(n, Complex(0, Real(n)) * f.coeff(n));
    }
    return out;
}

template <typename Real>
PeriodicFunction<Real> differentiate(const PeriodicFunction<Real>& f, int times) {
    PeriodicFunction<Real> out = f;
    for (int k = 0; k < times; ++k) out = differentiate(out);
    return out;
}

/// Average over a period, c_0.
template <typename Real>
std::complex<Real> complex_mean(const PeriodicFunction<Real>& f) {
    return f.coeff(0);
}

/// Real average over a period. Throws if the mean has an imaginary part
/// larger than tol.
template <typename Real>
Real mean(const PeriodicFunction<Real>& f, Real tol = Real(1e-12)) {
    const auto c = f.coeff(0);
    if (std::abs(c.imag()) > tol * std::max(Real(1), std::abs(c.real()))) {
        throw NumericalError("mean: imaginary part " + std::to_string(double(c.imag())) +
                             " on a real-valued function");
    }
    return c.real();
}

/// F(x) = slope·x + periodic(x) with F(0) = 0 and F' = f.
template <typename Real>
struct Antiderivative {
    std::complex<Real> slope;
    PeriodicFunction<Real> periodic;

    std::complex<Real> operator()(Real x) const { return slope * x + periodic(x); }

    /// The derivative of F, recovering f.
    PeriodicFunction<Real> derivative() const {
        auto f = differentiate(periodic);
        f.set_coeff(0, slope);
        return f;
    }
};

template <typename Real>
Antiderivative<Real> antiderivative(const PeriodicFunction<Real>& f) {
    using Complex = typename PeriodicFunction<Real>::Complex;
    PeriodicFunction<Real> p(f.order(), f.cap());
    Complex offset(0);
    for (int n = -f.order(); n <= f.order(); ++n) {
        if (n == 0) continue;
        const Complex c = f.coeff(n) / Complex(0, Real(n));
        p.set_coeff(n, c);
        offset += c;
    }
    p.set_coeff(0, -offset);
    return {f.coeff(0), std::move(p)};
}

/// Values on an equispaced grid of `grid` points over [0, 2π).
template <typename Real>
std::vector<std::complex<Real>> sample(const PeriodicFunction<Real>& f, int grid) {
    std::vector<std::complex<Real>> out(grid);
    const Real h = 2 * std::numbers::pi_v<Real> / grid;
    for (int i = 0; i < grid; ++i) out[i] = f(h * i);
    return out;
}

/// Minimum and maximum of the real part on a dense grid.
template <typename Real>
std::pair<Real, Real> real_range(const PeriodicFunction<Real>& f, int grid) {
    Real lo = std::numeric_limits<Real>::infinity();
    Real hi = -lo;
    for (const auto& v : sample(f, grid)) {
        lo = std::min(lo, v.real());
        hi = std::max(hi, v.real());
    }
    return {lo, hi};
}

/// 1/f for a real positive f by Newton iteration y ← y(2 − f·y) on truncated
/// series, verified by re-multiplication.
template <typename Real>
PeriodicFunction<Real> reciprocal(const PeriodicFunction<Real>& f, Real tol = Real(1e-13),
                                  int max_iterations = 200) {
    const int grid = 8 * std::max(f.cap(), 8);
    const auto [lo, hi] = real_range(f, grid);
    if (!(lo > 0)) throw InvalidArgument("reciprocal: function is not strictly positive");
    using PF = PeriodicFunction<Real>;
    const PF one = PF::constant(Real(1), f.cap());
    PF y = PF::constant(Real(2) / (lo + hi), f.cap());
    Real previous = std::numeric_limits<Real>::infinity();
    for (int it = 0; it < max_iterations; ++it) {
        PF residual = one - f * y;
        const Real r = residual.max_abs_coeff();
        if (r <= tol) break;
        if (r >= previous) break;
        previous = r;
        y = y + y * residual;
    }
    const Real check = (one - f * y).max_abs_coeff();
    if (check > Real(1e3) * tol) {
        throw NumericalError("reciprocal: truncated inverse residual " + std::to_string(double(check)) +
                             "; raise the Fourier cap");
    }
    return y;
}

/// f^k for k ≥ 0 by repeated multiplication.
template <typename Real>
PeriodicFunction<Real> power(const PeriodicFunction<Real>& f, int k) {
    if (k < 0) throw InvalidArgument("power: negative exponent");
    auto out = PeriodicFunction<Real>::constant(Real(1), f.cap());
    for (int i = 0; i < k; ++i) out = out * f;
    return out;
}

extern template class PeriodicFunction<double>;

} // namespace dtn
