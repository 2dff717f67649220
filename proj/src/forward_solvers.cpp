#include "dtn/forward_solvers.hpp"

#include <boost/numeric/odeint.hpp>

#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "dtn/errors.hpp"
#include "parallel.hpp"

namespace dtn {

namespace {

/// Modified Lentz evaluation of z/(2(n+1) + s z²/(2(n+2) + s z²/(…))).
double bessel_ratio(int n, double z, double s) {
    if (n < 0) throw InvalidArgument("bessel ratio: negative order");
    if (z == 0) return 0;
    constexpr double tiny = 1e-300;
    constexpr double eps = 1e-16;
    double f = tiny;
    double C = f;
    double D = 0;
    for (int k = 1; k < 100000; ++k) {
        const double a = (k == 1) ? z : s * z * z;
        const double b = 2.0 * (n + k);
        D = b + a * D;
        if (D == 0) D = tiny;
        C = b + a / C;
        if (C == 0) C = tiny;
        D = 1 / D;
        const double delta = C * D;
        f *= delta;
        if (std::abs(delta - 1) < eps) return f;
    }
    throw NumericalError("bessel ratio: continued fraction did not converge");
}

using Real = long double;

/// Radial basis f_1, f_2 and their r-derivatives at r = 1 and r = R.
struct BasisValues {
    Real value[2][2];  // [function][0: r = 1, 1: r = R]
    Real deriv[2][2];
};

BasisValues annulus_basis(int n, double lambda, double R) {
    BasisValues b{};
    const Real radii[2] = {1.0L, static_cast<Real>(R)};
    const unsigned un = static_cast<unsigned>(n);
    if (lambda == 0) {
        for (int i = 0; i < 2; ++i) {
            const Real r = radii[i];
            if (n == 0) {
                b.value[0][i] = 1;
                b.deriv[0][i] = 0;
                b.value[1][i] = std::log(r);
                b.deriv[1][i] = 1 / r;
            } else {
                b.value[0][i] = std::pow(r, Real(n));
                b.deriv[0][i] = n * std::pow(r, Real(n - 1));
                b.value[1][i] = std::pow(r, Real(-n));
                b.deriv[1][i] = -n * std::pow(r, Real(-n - 1));
            }
        }
        return b;
    }
    const Real k = std::sqrt(static_cast<Real>(std::abs(lambda)));
    for (int i = 0; i < 2; ++i) {
        const Real x = k * radii[i];
        if (lambda > 0) {
            const Real J = std::cyl_bessel_jl(Real(un), x);
            const Real Y = std::cyl_neumannl(Real(un), x);
            const Real Jp = n == 0 ? -std::cyl_bessel_jl(1.0L, x) : std::cyl_bessel_jl(Real(un - 1), x) - n / x * J;
            const Real Yp = n == 0 ? -std::cyl_neumannl(1.0L, x) : std::cyl_neumannl(Real(un - 1), x) - n / x * Y;
            b.value[0][i] = J;
            b.deriv[0][i] = k * Jp;
            b.value[1][i] = Y;
            b.deriv[1][i] = k * Yp;
        } else {
            const Real I = std::cyl_bessel_il(Real(un), x);
            const Real K = std::cyl_bessel_kl(Real(un), x);
            const Real Ip = n == 0 ? std::cyl_bessel_il(1.0L, x) : std::cyl_bessel_il(Real(un - 1), x) - n / x * I;
            const Real Kp = n == 0 ? -std::cyl_bessel_kl(1.0L, x) : -std::cyl_bessel_kl(Real(un - 1), x) - n / x * K;
            b.value[0][i] = I;
            b.deriv[0][i] = k * Ip;
            b.value[1][i] = K;
            b.deriv[1][i] = k * Kp;
        }
    }
    return b;
}

struct AnnulusMode {
    Real V[2][2];  // boundary values, columns scaled
    Real D[2][2];  // outward normal derivatives, same scaling
};

AnnulusMode annulus_matrices(int n, double lambda, double R) {
    const BasisValues b = annulus_basis(n, lambda, R);
    AnnulusMode m{};
    for (int c = 0; c < 2; ++c) {
        const Real scale = std::max(std::abs(b.value[c][0]), std::abs(b.value[c][1]));
        if (!(scale > 0) || !std::isfinite(scale)) throw NumericalError("annulus: degenerate radial basis");
        m.V[0][c] = b.value[c][0] / scale;
        m.V[1][c] = b.value[c][1] / scale;
        m.D[0][c] = b.deriv[c][0] / scale;
        m.D[1][c] = -b.deriv[c][1] / scale;
    }
    return m;
}

Real det2(const Real M[2][2]) { return M[0][0] * M[1][1] - M[0][1] * M[1][0]; }

/// Dirichlet determinant of mode n with scaled columns; changes sign across
/// Dirichlet eigenvalues.
Real annulus_dirichlet_det(int n, double lambda, double R) {
    const BasisValues b = annulus_basis(n, lambda, R);
    Real cols[2][2];
    for (int c = 0; c < 2; ++c) {
        const Real scale = std::max(std::abs(b.value[c][0]), std::abs(b.value[c][1]));
        cols[0][c] = b.value[c][0] / scale;
        cols[1][c] = b.value[c][1] / scale;
    }
    return det2(cols);
}

using State = std::array<double, 2>;

struct ShootingResult {
    double value;
    double derivative;
};

/// Integrates v″ + (2n+1)/r·v′ + λτ(r)v = 0, v = u/r^n, from the Frobenius
/// start at r₀ to r = 1.
ShootingResult shoot(int n, double lambda, const std::vector<double>& profile, const SolverOptions& options) {
    namespace odeint = boost::numeric::odeint;
    auto tau = [&](double r) {
        double acc = 0;
        for (auto it = profile.rbegin(); it != profile.rend(); ++it) acc = acc * r + *it;
        return acc;
    };
    const double r0 = options.start_radius;
    const double tau0 = profile.empty() ? 0.0 : profile[0];
    State v{1.0 - lambda * tau0 * r0 * r0 / (4.0 * (n + 1)), -lambda * tau0 * r0 / (2.0 * (n + 1))};
    auto system = [&](const State& y, State& dy, double r) {
        dy[0] = y[1];
        dy[1] = -(2.0 * n + 1.0) / r * y[1] - lambda * tau(r) * y[0];
    };
    auto stepper = odeint::make_controlled<odeint::runge_kutta_fehlberg78<State>>(options.absolute_tolerance,
                                                                                 options.relative_tolerance);
    odeint::integrate_adaptive(stepper, system, v, r0, 1.0, 1e-4);
    return {v[0], v[1]};
}

double profile_extreme(const std::vector<double>& profile, double lambda) {
    double extreme = 0;
    for (int i = 0; i <= 1000; ++i) {
        const double r = i / 1000.0;
        double acc = 0;
        for (auto it = profile.rbegin(); it != profile.rend(); ++it) acc = acc * r + *it;
        extreme = std::max(extreme, lambda > 0 ? acc : -acc);
    }
    return extreme;
}

} // namespace

double bessel_j_ratio(int n, double z) { return bessel_ratio(n, z, -1.0); }

double bessel_i_ratio(int n, double z) { return bessel_ratio(n, z, +1.0); }

double disk_mode_eigenvalue(int n, double lambda) {
    if (lambda == 0) return n;
    const double z = std::sqrt(std::abs(lambda));
    return lambda > 0 ? n - z * bessel_j_ratio(n, z) : n + z * bessel_i_ratio(n, z);
}

PencilCheck check_pencil(double lambda, const Geometry& geometry, int n_max, double margin) {
    PencilCheck out;
    if (!std::isfinite(lambda)) {
        out.ok = false;
        out.detail = "λ is not finite";
        return out;
    }
    auto fail = [&](int n, std::string detail) {
        out.ok = false;
        out.offending_mode = n;
        out.detail = std::move(detail);
        return out;
    };
    if (std::holds_alternative<DiskGeometry>(geometry)) {
        if (lambda <= 0 && lambda + margin <= 0) return out;
        const double z_lo = std::sqrt(std::max(lambda - margin, 0.0));
        const double z_hi = std::sqrt(lambda + margin);
        for (int n = 0; n <= n_max && n < z_hi + 1; ++n) {
            const double lo = std::cyl_bessel_j(static_cast<double>(n), z_lo);
            const double hi = std::cyl_bessel_j(static_cast<double>(n), z_hi);
            if ((lo <= 0 && hi >= 0) || (lo >= 0 && hi <= 0)) {
                if (!(n > 0 && z_lo == 0)) return fail(n, "J_n(√μ) vanishes for μ within the margin of λ");
            }
            if (lambda > 0) {
                const double sigma = disk_mode_eigenvalue(n, lambda);
                if (2 * lambda / std::abs(sigma) < margin) {
                    return fail(n, "Dirichlet eigenvalue estimated within the margin of λ");
                }
            }
        }
        return out;
    }
    if (const auto* annulus = std::get_if<AnnulusGeometry>(&geometry)) {
        if (lambda + margin <= 0) return out;
        const double R = annulus->inner_radius;
        const double top = lambda + margin;
        for (int n = 0; n <= n_max && n * n <= top; ++n) {
            const Real lo = annulus_dirichlet_det(n, std::max(lambda - margin, 1e-300), R);
            const Real mid = annulus_dirichlet_det(n, std::max(lambda, 1e-300), R);
            const Real hi = annulus_dirichlet_det(n, top, R);
            if ((lo <= 0 && hi >= 0) || (lo >= 0 && hi <= 0) || mid == 0) {
                return fail(n, "annulus Dirichlet determinant vanishes within the margin of λ");
            }
        }
        return out;
    }
    const auto& radial = std::get<RadialDiskGeometry>(geometry);
    const double extreme = profile_extreme(radial.profile, lambda);
    if (lambda == 0 || extreme <= 0) return out;
    SolverOptions options;
    for (int n = 0; n <= n_max && n * n <= (std::abs(lambda) + margin) * extreme; ++n) {
        const double lo = shoot(n, lambda - margin, radial.profile, options).value;
        const double hi = shoot(n, lambda + margin, radial.profile, options).value;
        if ((lo <= 0 && hi >= 0) || (lo >= 0 && hi <= 0)) {
            return fail(n, "shooting solution changes sign at r = 1 within the margin of λ");
        }
    }
    return out;
}

bool dirichlet_pencil_guard(double lambda, const Geometry& geometry, int n_max, double margin) {
    return check_pencil(lambda, geometry, n_max, margin).ok;
}

namespace {

void require_pencil(double lambda, const Geometry& geometry, int n_max, double margin) {
    const PencilCheck check = check_pencil(lambda, geometry, n_max, margin);
    if (!check.ok) {
        const int mode = check.offending_mode.value_or(-1);
        throw PencilError("λ = " + std::to_string(lambda) + " is too close to the Dirichlet pencil (mode " +
                              std::to_string(mode) + "): " + check.detail,
                          mode);
    }
}

} // namespace

SpectrumSequence disk_constant_spectrum(double lambda, int n_max, const SolverOptions& options) {
    if (n_max < 0) throw InvalidArgument("disk_constant_spectrum: n_max must be >= 0");
    require_pencil(lambda, DiskGeometry{}, n_max, options.pencil_margin);
    std::vector<double> sigma(n_max + 1);
    detail::parallel_for(n_max + 1, detail::resolve_threads(options.threads),
                         [&](int n) { sigma[n] = disk_mode_eigenvalue(n, lambda); });
    std::vector<SpectralValue> entries;
    for (int n = 0; n <= n_max; ++n) {
        for (int copy = 0; copy < (n == 0 ? 1 : 2); ++copy) entries.push_back({sigma[n], n, 0});
    }
    return SpectrumSequence(std::move(entries));
}

std::pair<double, double> annulus_mode_eigenvalues(int n, double lambda, double R) {
    const AnnulusMode m = annulus_matrices(n, lambda, R);
    const Real dv = det2(m.V);
    if (std::abs(dv) < 1e-14L) {
        throw PencilError("annulus: singular Dirichlet matrix in mode " + std::to_string(n), n);
    }
    const Real inv[2][2] = {{m.V[1][1] / dv, -m.V[0][1] / dv}, {-m.V[1][0] / dv, m.V[0][0] / dv}};
    Real M[2][2];
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) M[i][j] = inv[i][0] * m.D[0][j] + inv[i][1] * m.D[1][j];
    }
    const Real half_trace = (M[0][0] + M[1][1]) / 2;
    const Real disc = half_trace * half_trace - det2(M);
    const Real scale = std::max<Real>(1, std::abs(half_trace));
    if (disc < -1e-12L * scale * scale) throw NumericalError("annulus: complex eigenvalues in mode " + std::to_string(n));
    const Real root = std::sqrt(std::max<Real>(disc, 0));
    return {static_cast<double>(half_trace - root), static_cast<double>(half_trace + root)};
}

SpectrumSequence annulus_constant_spectrum(double lambda, double R, int n_max, const SolverOptions& options) {
    if (!(R > 0 && R < 1)) throw InvalidArgument("annulus_constant_spectrum: R must lie in (0, 1)");
    if (n_max < 0) throw InvalidArgument("annulus_constant_spectrum: n_max must be >= 0");
    require_pencil(lambda, AnnulusGeometry{R}, n_max, options.pencil_margin);
    std::vector<std::array<SpectralValue, 2>> modes(n_max + 1);
    detail::parallel_for(n_max + 1, detail::resolve_threads(options.threads), [&](int n) {
        const auto [lo, hi] = annulus_mode_eigenvalues(n, lambda, R);
        const AnnulusMode m = annulus_matrices(n, lambda, R);
        for (int i = 0; i < 2; ++i) {
            const double sigma = i == 0 ? lo : hi;
            // Eigenvector of D c = σ V c, then boundary weights u = V c.
            const Real a00 = m.D[0][0] - sigma * m.V[0][0], a01 = m.D[0][1] - sigma * m.V[0][1];
            const Real a10 = m.D[1][0] - sigma * m.V[1][0], a11 = m.D[1][1] - sigma * m.V[1][1];
            Real c0 = -a01, c1 = a00;
            if (std::abs(a00) + std::abs(a01) < std::abs(a10) + std::abs(a11)) {
                c0 = -a11;
                c1 = a10;
            }
            const Real outer = std::abs(m.V[0][0] * c0 + m.V[0][1] * c1);
            const Real inner = std::abs(m.V[1][0] * c0 + m.V[1][1] * c1);
            modes[n][i] = {sigma, n, outer >= inner ? 0 : 1};
        }
    });
    std::vector<SpectralValue> entries;
    for (int n = 0; n <= n_max; ++n) {
        for (int copy = 0; copy < (n == 0 ? 1 : 2); ++copy) {
            entries.push_back(modes[n][0]);
            entries.push_back(modes[n][1]);
        }
    }
    return SpectrumSequence(std::move(entries));
}

double radial_mode_eigenvalue(int n, double lambda, const std::vector<double>& profile, const SolverOptions& options) {
    if (n < 0) throw InvalidArgument("radial_mode_eigenvalue: negative mode");
    if (lambda == 0) return n;
    const ShootingResult r = shoot(n, lambda, profile, options);
    if (std::abs(r.value) < 1e-10) {
        throw PencilError("radial shooting: u(1) vanishes in mode " + std::to_string(n), n);
    }
    return n + r.derivative / r.value;
}

SpectrumSequence disk_radial_spectrum(double lambda, const std::vector<double>& profile, int n_max,
                                      const SolverOptions& options) {
    if (n_max < 0) throw InvalidArgument("disk_radial_spectrum: n_max must be >= 0");
    require_pencil(lambda, RadialDiskGeometry{profile}, n_max, options.pencil_margin);
    std::vector<double> sigma(n_max + 1);
    detail::parallel_for(n_max + 1, detail::resolve_threads(options.threads),
                         [&](int n) { sigma[n] = radial_mode_eigenvalue(n, lambda, profile, options); });
    std::vector<SpectralValue> entries;
    for (int n = 0; n <= n_max; ++n) {
        for (int copy = 0; copy < (n == 0 ? 1 : 2); ++copy) entries.push_back({sigma[n], n, 0});
    }
    return SpectrumSequence(std::move(entries));
}

} // namespace dtn

namespace dtn {

SpectrumSequence mode_spectrum(double lambda, const Geometry& geometry, int n_max, const SolverOptions& options) {
    if (const auto* a = std::get_if<AnnulusGeometry>(&geometry)) {
        return annulus_constant_spectrum(lambda, a->inner_radius, n_max, options);
    }
    if (const auto* r = std::get_if<RadialDiskGeometry>(&geometry)) {
        return disk_radial_spectrum(lambda, r->profile, n_max, options);
    }
    return disk_constant_spectrum(lambda, n_max, options);
}

SpectrumSequence lowest_eigenvalues(double lambda, const Geometry& geometry, std::size_t count,
                                    const SolverOptions& options) {
    if (count == 0) return {};
    int n_max = static_cast<int>(count / 2) + 2;
    for (int attempt = 0; attempt < 40; ++attempt) {
        const SpectrumSequence s = mode_spectrum(lambda, geometry, n_max, options);
        double bound = std::numeric_limits<double>::infinity();
        for (const auto& e : s.entries()) {
            if (e.mode == n_max) bound = std::min(bound, e.value);
        }
        if (s.size() > count && s[count - 1].value < bound) return s.prefix(count);
        n_max += n_max / 2 + 1;
    }
    throw NumericalError("lowest_eigenvalues: mode count did not converge");
}

} // namespace dtn
