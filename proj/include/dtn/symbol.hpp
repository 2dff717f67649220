#pragma once

#include <complex>
#include <functional>
#include <limits>
#include <map>
#include <vector>

#include "dtn/periodic_function.hpp"

namespace dtn {

using PF = PeriodicFunction<double>;
using cplx = std::complex<double>;

/// Taylor jet Σ_k c_k(x) t^k in the normal coordinate t, known up to `order`.
/// Terms beyond the stored ones but within `order` are exactly zero.
class JetFunction {
public:
    /// Marks a jet whose every t-derivative is known (an exact polynomial).
    static constexpr int kExact = std::numeric_limits<int>::max() / 4;

    JetFunction() = default;
    JetFunction(std::vector<PF> terms, int order);

    /// Exactly zero jet.
    static JetFunction zero() { return JetFunction({}, kExact); }
    /// t-independent jet, known to all orders.
    static JetFunction exact(PF trace) { return JetFunction({std::move(trace)}, kExact); }
    /// Jet whose trace is known but whose t-dependence is known only to `order`.
    static JetFunction from_trace(PF trace, int order) { return JetFunction({std::move(trace)}, order); }
    /// x-independent polynomial Σ c_k t^k, exact.
    static JetFunction polynomial(const std::vector<cplx>& coeffs, int cap = kDefaultFourierOrder);

    int order() const { return order_; }
    bool is_exact() const { return order_ >= kExact; }
    int stored_terms() const { return static_cast<int>(terms_.size()); }
    bool is_zero() const;
    int cap() const;

    /// Coefficient of t^k; zero beyond the stored terms.
    PF operator[](int k) const;
    PF trace() const { return (*this)[0]; }

    cplx operator()(double x, double t) const;

    JetFunction conj() const;
    JetFunction dx() const;
    /// ∂_t; throws JetOrderError on a jet of order 0.
    JetFunction dt() const;

    JetFunction& operator+=(const JetFunction& g);
    JetFunction& operator*=(cplx s);

    friend JetFunction operator+(JetFunction f, const JetFunction& g) { return f += g; }
    friend JetFunction operator-(JetFunction f, const JetFunction& g) { return f += g * cplx(-1); }
    friend JetFunction operator*(JetFunction f, cplx s) { return f *= s; }
    friend JetFunction operator*(cplx s, JetFunction f) { return f *= s; }
    /// Truncated Cauchy product; the order is the smaller of the two.
    friend JetFunction operator*(const JetFunction& f, const JetFunction& g);

    /// Largest coefficient deviation between jets, over terms both know.
    friend double distance(const JetFunction& f, const JetFunction& g);

private:
    std::vector<PF> terms_;
    int order_ = kExact;
};

/// Positively homogeneous symbol component of degree m, stored by its
/// values at ξ = +1 (plus) and ξ = −1 (minus):
/// value = plus·ξ^m for ξ > 0 and minus·|ξ|^m for ξ < 0.
struct HomogeneousComponent {
    int degree = 0;
    JetFunction plus;
    JetFunction minus;

    static HomogeneousComponent zero(int degree) {
        return {degree, JetFunction::zero(), JetFunction::zero()};
    }
    static HomogeneousComponent even(int degree, const JetFunction& c) { return {degree, c, c}; }

    bool is_zero() const { return plus.is_zero() && minus.is_zero(); }
    const JetFunction& branch(int sign) const { return sign > 0 ? plus : minus; }
    JetFunction& branch(int sign) { return sign > 0 ? plus : minus; }

    /// Value at (x, t, ξ), ξ ≠ 0.
    cplx operator()(double x, double t, double xi) const;

    HomogeneousComponent& operator+=(const HomogeneousComponent& other);
    HomogeneousComponent& operator*=(cplx s);
};

HomogeneousComponent operator+(HomogeneousComponent a, const HomogeneousComponent& b);
HomogeneousComponent operator-(HomogeneousComponent a, const HomogeneousComponent& b);
HomogeneousComponent operator*(cplx s, HomogeneousComponent a);
/// Pointwise product; degrees add.
HomogeneousComponent operator*(const HomogeneousComponent& a, const HomogeneousComponent& b);
/// Multiplies both branches by an even, degree-zero jet.
HomogeneousComponent operator*(const HomogeneousComponent& a, const JetFunction& f);

/// ∂_ξ: degree m → m−1, plus branch ×m, minus branch ×(−m).
HomogeneousComponent d_xi(const HomogeneousComponent& a, int times = 1);
/// D_ξ = −i∂_ξ.
HomogeneousComponent D_xi(const HomogeneousComponent& a, int times = 1);
/// ∂_x applied to both branches.
HomogeneousComponent d_x(const HomogeneousComponent& a, int times = 1);
/// D_x = −i∂_x.
HomogeneousComponent D_x(const HomogeneousComponent& a, int times = 1);
/// ∂_t applied to both branches.
HomogeneousComponent d_t(const HomogeneousComponent& a);
/// Restriction to t = 0 (exact jets).
HomogeneousComponent at_boundary(const HomogeneousComponent& a);

/// Finite sum of homogeneous components at distinct degrees, from
/// `top_degree` down to `depth`. Missing degrees are zero.
class SymbolExpansion {
public:
    SymbolExpansion() = default;
    SymbolExpansion(int top_degree, int depth);

    int top_degree() const { return top_; }
    int depth() const { return depth_; }

    /// Component at `degree`, zero if not set. Throws outside [depth, top].
    HomogeneousComponent at(int degree) const;
    void set(HomogeneousComponent c);
    bool has(int degree) const { return components_.count(degree) > 0; }

    cplx operator()(double x, double t, double xi) const;

    using Map = std::map<int, HomogeneousComponent, std::greater<>>;
    const Map& components() const { return components_; }

private:
    void check_range(int degree) const;

    Map components_;
    int top_ = 1;
    int depth_ = 1;
};

/// Interior potential problem: (Δ + λτ)u = 0, with τ a jet in the normal
/// coordinate.
struct PotentialProblem {
    double lambda = 0;
    JetFunction tau;
};

/// Symbol a(x,t,ξ) of the first-order factor of the interior operator in
/// boundary normal coordinates, down to `depth`. Seeds a_1 = −|ξ|/(1−t),
/// a_0 = 0, a_{−1} = λ(1−t)τ/(2|ξ|); lower degrees follow by recursion.
/// Requires a τ jet of order at least 2 − depth.
SymbolExpansion factor_symbol(const PotentialProblem& problem, int depth);

/// Boundary symbol r = −a(x,0,ξ)/ρ.
SymbolExpansion boundary_symbol(const SymbolExpansion& a, const PF& rho);

/// Composition symbol Σ_K (1/K!)(∂_ξ^K a)(D_x^K b), truncated at `depth`.
SymbolExpansion symbol_product(const SymbolExpansion& a, const SymbolExpansion& b, int depth);

/// minus = conj(plus) for every component, within tol coefficientwise.
bool is_hermitian(const SymbolExpansion& a, double tol);

/// Jet of τ(r) = Σ c_k r^k in t = 1 − r, known to all orders.
JetFunction radial_profile_jet(const std::vector<double>& coeffs, int cap = kDefaultFourierOrder);

} // namespace dtn
