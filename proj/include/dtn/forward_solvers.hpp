#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "dtn/spectrum.hpp"

namespace dtn {

inline constexpr double kDefaultPencilMargin = 1e-6;

/// J_{n+1}(z)/J_n(z) by its continued fraction.
double bessel_j_ratio(int n, double z);
/// I_{n+1}(z)/I_n(z) by its continued fraction.
double bessel_i_ratio(int n, double z);

/// σ_n for the unit disk with constant potential: z J_n′(z)/J_n(z) with
/// z = √λ (I_n for λ < 0, n for λ = 0).
double disk_mode_eigenvalue(int n, double lambda);

struct DiskGeometry {};
struct AnnulusGeometry {
    double inner_radius = 0.5;
};
struct RadialDiskGeometry {
    /// τ(r) = Σ c_k r^k.
    std::vector<double> profile;
};
using Geometry = std::variant<DiskGeometry, AnnulusGeometry, RadialDiskGeometry>;

struct PencilCheck {
    bool ok = true;
    /// First mode whose Dirichlet problem has an eigenvalue near λ.
    std::optional<int> offending_mode;
    std::string detail;
};

/// Looks for Dirichlet eigenvalues of the interior problem within `margin`
/// of λ, for modes 0..n_max.
PencilCheck check_pencil(double lambda, const Geometry& geometry, int n_max,
                         double margin = kDefaultPencilMargin);

/// True iff no Dirichlet eigenvalue lies within `margin` of λ for modes up
/// to n_max.
bool dirichlet_pencil_guard(double lambda, const Geometry& geometry, int n_max,
                            double margin = kDefaultPencilMargin);

struct SolverOptions {
    double pencil_margin = kDefaultPencilMargin;
    /// Worker threads for per-mode work; 0 reads DTN_THREADS, default 1.
    int threads = 0;
    /// Radial shooting: starting radius and tolerances.
    double start_radius = 1e-6;
    double relative_tolerance = 1e-12;
    double absolute_tolerance = 1e-16;
};

/// Modes 0..n_max; mode 0 once, others twice.
SpectrumSequence disk_constant_spectrum(double lambda, int n_max, const SolverOptions& options = {});

/// The two eigenvalues of mode n on the annulus R < r < 1, ascending.
std::pair<double, double> annulus_mode_eigenvalues(int n, double lambda, double R);

/// Modes 0..n_max, two eigenvalues per mode; n ≥ 1 appear twice.
/// Component 0 is the outer circle, 1 the inner, by eigenvector weight.
SpectrumSequence annulus_constant_spectrum(double lambda, double R, int n_max, const SolverOptions& options = {});

/// σ_n for the unit disk with radial potential by shooting.
double radial_mode_eigenvalue(int n, double lambda, const std::vector<double>& profile,
                              const SolverOptions& options = {});

SpectrumSequence disk_radial_spectrum(double lambda, const std::vector<double>& profile, int n_max,
                                      const SolverOptions& options = {});

/// Modes 0..n_max of any supported geometry.
SpectrumSequence mode_spectrum(double lambda, const Geometry& geometry, int n_max, const SolverOptions& options = {});

/// The lowest `count` eigenvalues. Modes are added until the smallest
/// eigenvalue of the highest computed mode exceeds the last one kept.
SpectrumSequence lowest_eigenvalues(double lambda, const Geometry& geometry, std::size_t count,
                                    const SolverOptions& options = {});

} // namespace dtn
