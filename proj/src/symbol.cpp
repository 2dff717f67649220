#include "dtn/symbol.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace dtn {

namespace {

double factorial(int n) {
    double f = 1;
    for (int k = 2; k <= n; ++k) f *= k;
    return f;
}

cplx minus_i_power(int k) {
    static const cplx cycle[4] = {cplx(1, 0), cplx(0, -1), cplx(-1, 0), cplx(0, 1)};
    return cycle[k % 4];
}

} // namespace

// JetFunction

JetFunction::JetFunction(std::vector<PF> terms, int order) : terms_(std::move(terms)), order_(order) {
    if (order < 0) throw InvalidArgument("JetFunction: negative order");
    if (!is_exact() && static_cast<int>(terms_.size()) > order + 1) terms_.resize(order + 1);
}

JetFunction JetFunction::polynomial(const std::vector<cplx>& coeffs, int cap) {
    std::vector<PF> terms;
    terms.reserve(coeffs.size());
    for (const cplx c : coeffs) terms.push_back(PF::constant(c, cap));
    return JetFunction(std::move(terms), kExact);
}

bool JetFunction::is_zero() const {
    return std::all_of(terms_.begin(), terms_.end(), [](const PF& f) { return f.is_zero(); });
}

int JetFunction::cap() const {
    int cap = kDefaultFourierOrder;
    bool first = true;
    for (const auto& f : terms_) {
        cap = first ? f.cap() : std::min(cap, f.cap());
        first = false;
    }
    return cap;
}

PF JetFunction::operator[](int k) const {
    if (k < 0 || k > order_) {
        throw JetOrderError("JetFunction: t^" + std::to_string(k) + " beyond jet order " +
                            std::to_string(order_));
    }
    if (k < stored_terms()) return terms_[k];
    return PF(0, cap());
}

cplx JetFunction::operator()(double x, double t) const {
    cplx acc(0);
    for (int k = stored_terms() - 1; k >= 0; --k) acc = acc * t + terms_[k](x);
    return acc;
}

JetFunction JetFunction::conj() const {
    std::vector<PF> terms;
    terms.reserve(terms_.size());
    for (const auto& f : terms_) terms.push_back(f.conj());
    return JetFunction(std::move(terms), order_);
}

JetFunction JetFunction::dx() const {
    std::vector<PF> terms;
    terms.reserve(terms_.size());
    for (const auto& f : terms_) terms.push_back(differentiate(f));
    return JetFunction(std::move(terms), order_);
}

JetFunction JetFunction::dt() const {
    if (order_ == 0) throw JetOrderError("JetFunction: ∂_t requested on a jet of order 0");
    std::vector<PF> terms;
    for (int k = 1; k < stored_terms(); ++k) terms.push_back(double(k) * terms_[k]);
    return JetFunction(std::move(terms), is_exact() ? kExact : order_ - 1);
}

JetFunction& JetFunction::operator+=(const JetFunction& g) {
    order_ = std::min(order_, g.order_);
    const int n = std::min<int>(std::max(terms_.size(), g.terms_.size()),
                                is_exact() ? kExact : order_ + 1);
    if (static_cast<int>(terms_.size()) < n) terms_.resize(n, PF(0, std::min(cap(), g.cap())));
    terms_.resize(n);
    for (int k = 0; k < std::min<int>(n, g.stored_terms()); ++k) terms_[k] += g.terms_[k];
    return *this;
}

JetFunction& JetFunction::operator*=(cplx s) {
    for (auto& f : terms_) f *= s;
    return *this;
}

JetFunction operator*(const JetFunction& f, const JetFunction& g) {
    const int order = std::min(f.order_, g.order_);
    if ((f.terms_.empty() && f.is_exact()) || (g.terms_.empty() && g.is_exact())) {
        return JetFunction::zero();
    }
    if (f.terms_.empty() || g.terms_.empty()) return JetFunction({}, order);
    int n = f.stored_terms() + g.stored_terms() - 1;
    if (order < JetFunction::kExact) n = std::min(n, order + 1);
    std::vector<PF> terms(n, PF(0, std::min(f.cap(), g.cap())));
    for (int a = 0; a < f.stored_terms(); ++a) {
        if (f.terms_[a].is_zero()) continue;
        for (int b = 0; b < g.stored_terms() && a + b < n; ++b) {
            if (g.terms_[b].is_zero()) continue;
            terms[a + b] += f.terms_[a] * g.terms_[b];
        }
    }
    return JetFunction(std::move(terms), order);
}

double distance(const JetFunction& f, const JetFunction& g) {
    const int order = std::min(f.order_, g.order_);
    const int n = std::min(std::max(f.stored_terms(), g.stored_terms()),
                           order >= JetFunction::kExact ? JetFunction::kExact : order + 1);
    double d = 0;
    for (int k = 0; k < n; ++k) d = std::max(d, (f[k] - g[k]).max_abs_coeff());
    return d;
}

// HomogeneousComponent

cplx HomogeneousComponent::operator()(double x, double t, double xi) const {
    if (xi == 0) throw InvalidArgument("HomogeneousComponent: evaluation at ξ = 0");
    const double scale = std::pow(std::abs(xi), degree);
    return (xi > 0 ? plus(x, t) : minus(x, t)) * scale;
}

HomogeneousComponent& HomogeneousComponent::operator+=(const HomogeneousComponent& other) {
    if (other.is_zero() && other.plus.is_exact() && other.minus.is_exact()) return *this;
    if (is_zero() && plus.is_exact() && minus.is_exact()) {
        *this = other;
        return *this;
    }
    if (degree != other.degree) throw InvalidArgument("HomogeneousComponent: degree mismatch in sum");
    plus += other.plus;
    minus += other.minus;
    return *this;
}

HomogeneousComponent& HomogeneousComponent::operator*=(cplx s) {
    plus *= s;
    minus *= s;
    return *this;
}

HomogeneousComponent operator+(HomogeneousComponent a, const HomogeneousComponent& b) { return a += b; }

HomogeneousComponent operator-(HomogeneousComponent a, const HomogeneousComponent& b) {
    return a += cplx(-1) * b;
}

HomogeneousComponent operator*(cplx s, HomogeneousComponent a) { return a *= s; }

HomogeneousComponent operator*(const HomogeneousComponent& a, const HomogeneousComponent& b) {
    return {a.degree + b.degree, a.plus * b.plus, a.minus * b.minus};
}

HomogeneousComponent operator*(const HomogeneousComponent& a, const JetFunction& f) {
    return {a.degree, a.plus * f, a.minus * f};
}

HomogeneousComponent d_xi(const HomogeneousComponent& a, int times) {
    HomogeneousComponent out = a;
    for (int k = 0; k < times; ++k) {
        const double m = out.degree;
        out = {out.degree - 1, out.plus * cplx(m), out.minus * cplx(-m)};
        if (m == 0) {
            out.plus = JetFunction::zero();
            out.minus = JetFunction::zero();
        }
    }
    return out;
}

HomogeneousComponent D_xi(const HomogeneousComponent& a, int times) {
    return minus_i_power(times) * d_xi(a, times);
}

HomogeneousComponent d_x(const HomogeneousComponent& a, int times) {
    HomogeneousComponent out = a;
    for (int k = 0; k < times; ++k) out = {out.degree, out.plus.dx(), out.minus.dx()};
    return out;
}

HomogeneousComponent D_x(const HomogeneousComponent& a, int times) {
    return minus_i_power(times) * d_x(a, times);
}

HomogeneousComponent d_t(const HomogeneousComponent& a) { return {a.degree, a.plus.dt(), a.minus.dt()}; }

HomogeneousComponent at_boundary(const HomogeneousComponent& a) {
    return {a.degree, JetFunction::exact(a.plus.trace()), JetFunction::exact(a.minus.trace())};
}

// SymbolExpansion

SymbolExpansion::SymbolExpansion(int top_degree, int depth) : top_(top_degree), depth_(depth) {
    if (depth > top_degree) throw InvalidArgument("SymbolExpansion: depth above top degree");
}

void SymbolExpansion::check_range(int degree) const {
    if (degree > top_ || degree < depth_) {
        throw InvalidArgument("SymbolExpansion: degree " + std::to_string(degree) + " outside [" +
                              std::to_string(depth_) + ", " + std::to_string(top_) + "]");
    }
}

HomogeneousComponent SymbolExpansion::at(int degree) const {
    check_range(degree);
    const auto it = components_.find(degree);
    return it == components_.end() ? HomogeneousComponent::zero(degree) : it->second;
}

void SymbolExpansion::set(HomogeneousComponent c) {
    check_range(c.degree);
    components_.insert_or_assign(c.degree, std::move(c));
}

cplx SymbolExpansion::operator()(double x, double t, double xi) const {
    cplx acc(0);
    for (const auto& [m, c] : components_) acc += c(x, t, xi);
    return acc;
}

// Operations

SymbolExpansion factor_symbol(const PotentialProblem& problem, int depth) {
    if (depth > -1) throw InvalidArgument("factor_symbol: depth must be <= -1");
    const int required = 2 - depth;
    if (problem.tau.order() < required) {
        throw JetOrderError("factor_symbol: depth " + std::to_string(depth) + " needs a τ jet of order K_t >= " +
                            std::to_string(required) + ", got " + std::to_string(problem.tau.order()));
    }
    const int cap = problem.tau.cap();
    const int work = problem.tau.is_exact() ? required + 1 : problem.tau.order();

    // 1/(1−t) truncated to the working order.
    std::vector<PF> ones(work + 1, PF::constant(1.0, cap));
    const JetFunction inverse_one_minus_t(std::move(ones), work);
    const JetFunction one_minus_t = JetFunction::polynomial({1.0, -1.0}, cap);
    const JetFunction half_one_minus_t = JetFunction::polynomial({0.5, -0.5}, cap);

    SymbolExpansion a(1, depth);
    a.set(HomogeneousComponent::even(1, inverse_one_minus_t * cplx(-1)));
    a.set(HomogeneousComponent::zero(0));
    a.set(HomogeneousComponent::even(-1, one_minus_t * problem.tau * cplx(problem.lambda / 2)));

    for (int m = -1; m - 1 >= depth; --m) {
        HomogeneousComponent acc = HomogeneousComponent::zero(m);
        for (int j = m; j <= 1; ++j) {
            const HomogeneousComponent aj = a.at(j);
            if (aj.is_zero()) continue;
            for (int k = m; k <= 1; ++k) {
                const int gamma = j + k - m;
                if (gamma < 0) continue;
                const HomogeneousComponent ak = a.at(k);
                if (ak.is_zero()) continue;
                const HomogeneousComponent left = D_xi(aj, gamma);
                if (left.is_zero()) continue;
                acc += cplx(1.0 / factorial(gamma)) * (left * d_x(ak, gamma));
            }
        }
        const HomogeneousComponent am = a.at(m);
        acc += d_t(am) - am * inverse_one_minus_t;
        // −1/(2a_1) = (1−t)/(2|ξ|)
        HomogeneousComponent next = acc * half_one_minus_t;
        next.degree = m - 1;
        a.set(std::move(next));
    }
    return a;
}

SymbolExpansion boundary_symbol(const SymbolExpansion& a, const PF& rho) {
    const PF inverse_rho = reciprocal(rho.symmetrized());
    SymbolExpansion r(a.top_degree(), a.depth());
    for (const auto& [m, c] : a.components()) {
        if (c.is_zero()) {
            r.set(HomogeneousComponent::zero(m));
            continue;
        }
        r.set({m, JetFunction::exact(c.plus.trace() * inverse_rho * -1.0),
               JetFunction::exact(c.minus.trace() * inverse_rho * -1.0)});
    }
    return r;
}

SymbolExpansion symbol_product(const SymbolExpansion& a, const SymbolExpansion& b, int depth) {
    const int top = a.top_degree() + b.top_degree();
    SymbolExpansion out(top, std::min(depth, top));
    for (const auto& [ma, ca] : a.components()) {
        if (ca.is_zero()) continue;
        for (const auto& [mb, cb] : b.components()) {
            if (cb.is_zero()) continue;
            for (int K = 0; ma + mb - K >= depth; ++K) {
                const HomogeneousComponent left = d_xi(ca, K);
                if (left.is_zero()) break;
                const HomogeneousComponent term = cplx(1.0 / factorial(K)) * (left * D_x(cb, K));
                const int degree = ma + mb - K;
                out.set(out.at(degree) + term);
            }
        }
    }
    return out;
}

bool is_hermitian(const SymbolExpansion& a, double tol) {
    for (const auto& [m, c] : a.components()) {
        if (distance(c.minus, c.plus.conj()) > tol) return false;
    }
    return true;
}

JetFunction radial_profile_jet(const std::vector<double>& coeffs, int cap) {
    std::vector<cplx> jet(coeffs.size(), 0.0);
    for (std::size_t k = 0; k < coeffs.size(); ++k) {
        double binom = 1;
        for (std::size_t i = 0; i <= k; ++i) {
            jet[i] += coeffs[k] * binom * ((i % 2) ? -1.0 : 1.0);
            binom = binom * double(k - i) / double(i + 1);
        }
    }
    return JetFunction::polynomial(jet, cap);
}

} // namespace dtn
