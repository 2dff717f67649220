#pragma once

#include <utility>
#include <vector>

#include "dtn/spectrum.hpp"
#include "dtn/symbol.hpp"

namespace dtn {

/// Boundary data of a parametric Steklov problem on the disk in boundary
/// normal coordinates: potential λτ and boundary density ρ.
struct SteklovProblem {
    double lambda = 0;
    JetFunction tau = JetFunction::exact(PF::constant(1.0));
    PF rho = PF::constant(1.0);
};

struct DiagonalizationOptions {
    /// Fourier order of the re-projected symbols b_m.
    int fourier_order = kDefaultFourierOrder;
    /// Grid points per Fourier mode used to re-project after composition.
    int oversampling = 8;
    /// Lowest degree the composition expansion is allowed to reach.
    int min_depth = -6;
    /// Tolerance for the inversion of x = (1/L)∫₀^s ρ.
    double inversion_tolerance = 1e-13;
    /// Tolerance for x-independence checks and realness of coefficients.
    double diagonal_tolerance = 1e-9;
};

/// Asymptotic coefficients σ_{2j−1}, σ_{2j} ~ j/L + Σ_n s_n j^{−n}.
struct DiagonalCoefficients {
    double L = 1;
    double lambda = 0;
    std::vector<double> s;
    /// Largest imaginary part discarded from any s_n.
    double max_imaginary = 0;
    /// Values of p_{−n} at ξ = +1 and ξ = −1, n = 0..N (index 0 is degree 1).
    std::vector<std::pair<cplx, cplx>> branch_values;
};

/// ã = e^{−iS} r e^{iS} expanded at ξ-homogeneity down to `depth`, before the
/// change of variable x ↦ s(x).
SymbolExpansion conjugated_symbol(const SymbolExpansion& r, const PF& rho, int depth,
                                  const DiagonalizationOptions& options = {});

/// Arclength reparametrization s(x) inverting x = (1/L)∫₀^s ρ.
class ArclengthInverse {
public:
    explicit ArclengthInverse(const PF& rho, double tolerance = 1e-13);
    double operator()(double x) const;
    double length_scale() const { return L_; }

private:
    PF periodic_;
    PF rho_;
    double L_;
    double tolerance_;
};

/// b_m(x, ξ) = ã_m(s(x), ξ), re-projected on Fourier modes.
SymbolExpansion fio_conjugate(const SymbolExpansion& r, const PF& rho, int depth,
                              const DiagonalizationOptions& options = {});

/// One diagonalization step: averages degree −N and updates lower degrees
/// with the corrector built from the zero-mean antiderivative.
SymbolExpansion diag_step(const SymbolExpansion& p, int N, double tolerance = 1e-9);

/// p^(1) = b, p^(2), …, p^(count) for the given problem.
std::vector<SymbolExpansion> diagonalize(const SteklovProblem& problem, int count,
                                         const DiagonalizationOptions& options = {});

DiagonalCoefficients asymptotic_coefficients(const SteklovProblem& problem, int N,
                                             const DiagonalizationOptions& options = {});

/// Model spectrum 0, then pairs j/L + Σ s_n j^{−n}, j = 1..j_max.
SpectrumSequence predict_eigenvalues(const DiagonalCoefficients& c, int j_max);

} // namespace dtn
