#include "dtn/diagonalization.hpp"

#include <cmath>
#include <map>
#include <numbers>
#include <string>

#include "dtn/sequences.hpp"

namespace dtn {

namespace {

double factorial(int n) {
    double f = 1;
    for (int k = 2; k <= n; ++k) f *= k;
    return f;
}

/// d(d−1)…(d−p+1).
double falling_factorial(int d, int p) {
    double f = 1;
    for (int i = 0; i < p; ++i) f *= d - i;
    return f;
}

cplx minus_i_power(int k) {
    static const cplx cycle[4] = {cplx(1, 0), cplx(0, -1), cplx(-1, 0), cplx(0, 1)};
    return cycle[k % 4];
}

/// Calls visit(multiplicities) for every partition of n, where
/// multiplicities[i] counts parts equal to i (index 0 unused).
template <typename Visit>
void for_each_partition(int n, Visit&& visit) {
    std::vector<int> mult(n + 1, 0);
    auto recurse = [&](auto&& self, int remaining, int largest) -> void {
        if (remaining == 0) {
            visit(mult);
            return;
        }
        for (int part = std::min(remaining, largest); part >= 1; --part) {
            ++mult[part];
            self(self, remaining - part, part);
            --mult[part];
        }
    };
    recurse(recurse, n, n);
}

/// Partial Bell polynomials B_{α,k}(h_1, h_2, …) for 1 ≤ k ≤ α ≤ max_alpha,
/// built from integer partitions of α with k parts.
std::map<std::pair<int, int>, PF> bell_polynomials(const std::vector<PF>& h, int max_alpha, int cap) {
    std::map<std::pair<int, int>, PF> bell;
    for (int alpha = 1; alpha <= max_alpha; ++alpha) {
        for_each_partition(alpha, [&](const std::vector<int>& mult) {
            int parts = 0;
            double denominator = 1;
            PF monomial = PF::constant(1.0, cap);
            for (int i = 1; i <= alpha; ++i) {
                if (mult[i] == 0) continue;
                parts += mult[i];
                denominator *= factorial(mult[i]) * std::pow(factorial(i), mult[i]);
                for (int r = 0; r < mult[i]; ++r) monomial = monomial * h[i];
            }
            const auto key = std::make_pair(alpha, parts);
            const PF term = monomial * (factorial(alpha) / denominator);
            auto it = bell.find(key);
            if (it == bell.end()) {
                bell.emplace(key, term);
            } else {
                it->second += term;
            }
        });
    }
    return bell;
}

bool x_independent(const JetFunction& f, double tol) {
    const PF trace = f.trace();
    for (int n = 1; n <= trace.order(); ++n) {
        if (std::abs(trace.coeff(n)) > tol || std::abs(trace.coeff(-n)) > tol) return false;
    }
    return true;
}

JetFunction constant_jet(cplx c, int cap) { return JetFunction::exact(PF::constant(c, cap)); }

} // namespace

SymbolExpansion conjugated_symbol(const SymbolExpansion& r, const PF& rho, int depth,
                                  const DiagonalizationOptions& options) {
    if (depth < options.min_depth) {
        throw InvalidArgument("conjugated_symbol: depth " + std::to_string(depth) +
                              " below the supported composition order " + std::to_string(options.min_depth));
    }
    if (r.depth() > depth) throw InvalidArgument("conjugated_symbol: boundary symbol not deep enough");
    const int cap = options.fourier_order;
    const PF rho_r = rho.symmetrized();
    const double L = mean(rho_r);
    const int max_alpha = 1 - depth;

    std::vector<PF> h(max_alpha + 1);
    PF derivative = rho_r;
    for (int beta = 1; beta <= max_alpha; ++beta) {
        derivative = differentiate(derivative);
        h[beta] = derivative * (1.0 / ((beta + 1) * L));
    }
    const auto bell = bell_polynomials(h, max_alpha, cap);

    const PF scaled = rho_r * (1.0 / L);
    const PF inverse_scaled = reciprocal(scaled);
    std::map<int, PF> powers;
    auto scaled_power = [&](int e) -> const PF& {
        auto it = powers.find(e);
        if (it != powers.end()) return it->second;
        PF value = e >= 0 ? power(scaled, e) : power(inverse_scaled, -e);
        return powers.emplace(e, std::move(value)).first->second;
    };

    SymbolExpansion out(1, depth);
    for (int m = 1; m >= depth; --m) {
        HomogeneousComponent component = HomogeneousComponent::zero(m);
        for (int sign : {+1, -1}) {
            PF acc(0, cap);
            for (int alpha = 0; alpha <= 1 - m; ++alpha) {
                const int d = m + alpha;
                const HomogeneousComponent source = r.at(d);
                if (source.is_zero()) continue;
                const PF c = source.branch(sign).trace();
                const cplx prefactor = minus_i_power(alpha) / factorial(alpha);
                for (int k = (alpha == 0 ? 0 : 1); k <= alpha; ++k) {
                    const int p = k + alpha;
                    const double ff = falling_factorial(d, p);
                    if (ff == 0) continue;
                    const double sign_factor = (alpha % 2 == 0 || sign > 0) ? 1.0 : -1.0;
                    PF term = c * scaled_power(d - p);
                    if (alpha > 0) term = term * bell.at({alpha, k});
                    acc += term * (prefactor * ff * sign_factor);
                }
            }
            component.branch(sign) = JetFunction::exact(acc);
        }
        out.set(std::move(component));
    }
    return out;
}

ArclengthInverse::ArclengthInverse(const PF& rho, double tolerance)
    : rho_(rho.symmetrized()), L_(mean(rho_)), tolerance_(tolerance) {
    if (!(real_range(rho_, 8 * std::max(rho_.order(), 8)).first > 0)) {
        throw InvalidArgument("ArclengthInverse: density must be positive");
    }
    periodic_ = antiderivative(rho_).periodic * (1.0 / L_);
}

double ArclengthInverse::operator()(double x) const {
    double bound = 0;
    for (int n = -periodic_.order(); n <= periodic_.order(); ++n) bound += std::abs(periodic_.coeff(n));
    double lo = x - bound - 1e-12;
    double hi = x + bound + 1e-12;
    auto g = [&](double s) { return s + periodic_(s).real() - x; };
    double s = x;
    for (int it = 0; it < 200; ++it) {
        const double value = g(s);
        if (std::abs(value) <= tolerance_) return s;
        if (value > 0) {
            hi = s;
        } else {
            lo = s;
        }
        double next = s - value * L_ / rho_(s).real();
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (std::abs(next - s) <= tolerance_ * 1e-3) return next;
        s = next;
    }
    throw NumericalError("ArclengthInverse: no convergence at x = " + std::to_string(x));
}

SymbolExpansion fio_conjugate(const SymbolExpansion& r, const PF& rho, int depth,
                              const DiagonalizationOptions& options) {
    const SymbolExpansion conjugated = conjugated_symbol(r, rho, depth, options);
    const ArclengthInverse inverse(rho, options.inversion_tolerance);
    const int order = options.fourier_order;
    const int grid = options.oversampling * order;
    std::vector<double> nodes(grid);
    for (int i = 0; i < grid; ++i) nodes[i] = inverse(2 * std::numbers::pi * i / grid);

    SymbolExpansion out(1, depth);
    for (const auto& [m, component] : conjugated.components()) {
        HomogeneousComponent composed = HomogeneousComponent::zero(m);
        for (int sign : {+1, -1}) {
            const PF f = component.branch(sign).trace();
            if (f.is_zero()) {
                composed.branch(sign) = JetFunction::exact(PF(0, order));
                continue;
            }
            std::vector<cplx> samples(grid);
            for (int i = 0; i < grid; ++i) samples[i] = f(nodes[i]);
            composed.branch(sign) = JetFunction::exact(PF::from_samples(samples, order, order));
        }
        out.set(std::move(composed));
    }
    return out;
}

SymbolExpansion diag_step(const SymbolExpansion& p, int N, double tolerance) {
    if (N < 1) throw InvalidArgument("diag_step: N must be >= 1");
    if (p.depth() > -N) throw InvalidArgument("diag_step: symbol not deep enough for N = " + std::to_string(N));
    for (int m = 1 - N; m <= p.top_degree(); ++m) {
        const HomogeneousComponent c = p.at(m);
        if (!x_independent(c.plus, tolerance) || !x_independent(c.minus, tolerance)) {
            throw InvalidArgument("diag_step: component of degree " + std::to_string(m) +
                                  " is not diagonal (x-dependent)");
        }
    }
    const double L = 1.0 / complex_mean(p.at(1).plus.trace()).real();

    const HomogeneousComponent current = p.at(-N);
    HomogeneousComponent averaged = HomogeneousComponent::zero(-N);
    HomogeneousComponent corrector = HomogeneousComponent::zero(-N);
    for (int sign : {+1, -1}) {
        const PF f = current.branch(sign).trace();
        const cplx average = complex_mean(f);
        averaged.branch(sign) = constant_jet(average, f.cap());
        PF fluctuation = f;
        fluctuation.set_coeff(0, 0.0);
        const PF integral = antiderivative(fluctuation).periodic;
        corrector.branch(sign) = JetFunction::exact(integral * cplx(0, -L * sign));
    }

    SymbolExpansion next(p.top_degree(), p.depth());
    for (const auto& [m, c] : p.components()) {
        if (m > -N) next.set(c);
    }
    next.set(averaged);
    for (int m = -N - 1; m >= p.depth(); --m) {
        HomogeneousComponent value = p.at(m);
        for (int alpha = 0; alpha <= 1 - m - N; ++alpha) {
            const int source = m + alpha + N;
            const double weight = 1.0 / factorial(alpha);
            const HomogeneousComponent old_source = p.at(source);
            const HomogeneousComponent new_source = next.at(source);
            if (!old_source.is_zero()) {
                const HomogeneousComponent lhs = d_x(corrector, alpha) * D_xi(old_source, alpha);
                value += cplx(weight) * lhs;
            }
            if (!new_source.is_zero()) {
                const HomogeneousComponent rhs = d_x(new_source, alpha) * D_xi(corrector, alpha);
                value += cplx(-weight) * rhs;
            }
        }
        next.set(std::move(value));
    }
    return next;
}

std::vector<SymbolExpansion> diagonalize(const SteklovProblem& problem, int count,
                                         const DiagonalizationOptions& options) {
    if (count < 1) throw InvalidArgument("diagonalize: count must be >= 1");
    if (!std::isfinite(problem.lambda)) throw InvalidArgument("diagonalize: λ must be a finite real number");
    const int depth = std::min(-count, -1);
    const SymbolExpansion a = factor_symbol({problem.lambda, problem.tau}, depth);
    const SymbolExpansion r = boundary_symbol(a, problem.rho);
    std::vector<SymbolExpansion> steps;
    steps.push_back(fio_conjugate(r, problem.rho, depth, options));
    for (int N = 1; N < count; ++N) steps.push_back(diag_step(steps.back(), N, options.diagonal_tolerance));
    return steps;
}

DiagonalCoefficients asymptotic_coefficients(const SteklovProblem& problem, int N,
                                             const DiagonalizationOptions& options) {
    if (N < 1) throw InvalidArgument("asymptotic_coefficients: N must be >= 1");
    const std::vector<SymbolExpansion> steps = diagonalize(problem, N, options);
    DiagonalCoefficients out;
    out.lambda = problem.lambda;
    out.L = mean(problem.rho.symmetrized());
    for (int n = 0; n <= N; ++n) {
        const HomogeneousComponent c = steps[std::max(n, 1) - 1].at(n == 0 ? 1 : -n);
        const cplx plus = complex_mean(c.plus.trace());
        const cplx minus = complex_mean(c.minus.trace());
        out.branch_values.emplace_back(plus, minus);
        if (n == 0) continue;
        out.max_imaginary = std::max({out.max_imaginary, std::abs(plus.imag()), std::abs(minus.imag())});
        out.s.push_back(plus.real());
    }
    if (out.max_imaginary > options.diagonal_tolerance) {
        throw NumericalError("asymptotic_coefficients: coefficient with imaginary part " +
                             std::to_string(out.max_imaginary));
    }
    return out;
}

SpectrumSequence predict_eigenvalues(const DiagonalCoefficients& c, int j_max) {
    return build_model_sequence({1.0 / c.L, c.s, 1}, static_cast<int>(c.s.size()), j_max);
}

} // namespace dtn
