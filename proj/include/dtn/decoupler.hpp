#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dtn/spectrum.hpp"

namespace dtn {

/// A recovered length class: α = 1/L with its multiplicity.
struct LengthClass {
    double alpha = 0;
    int multiplicity = 1;
};

struct LengthRecoveryOptions {
    /// Minimum number of input eigenvalues.
    std::size_t min_entries = 400;
    /// Tail windows [f·v_max, v_max] used for the gap estimate.
    std::vector<double> window_fractions{0.5, 0.625, 0.75};
    /// Half-width of a pair around kα, relative to α.
    double pair_tolerance = 0.05;
    /// Fraction of multiples kα in each window that must carry a pair.
    double comb_fraction = 0.95;
    /// The scan for α runs up to (1 + scan_range) times the tail gap bound.
    double scan_range = 0.5;
    /// Relative tolerance for grouping α values into one class.
    double grouping_tolerance = 1e-5;
    /// Stop once the tail holds at most this fraction of its initial size.
    double exhausted_fraction = 0.05;
    int max_classes = 16;
};

struct LengthRecovery {
    std::vector<LengthClass> classes;
    /// Per extracted α: the three window gaps and the comb estimate.
    std::vector<std::string> trail;
    /// Tail entries left after all removals.
    int leftover = 0;
};

/// Length classes α from a comb scan with iterative pair removal.
LengthRecovery recover_lengths(const SpectrumSequence& S, const LengthRecoveryOptions& options = {});

/// Divisibility relation between two classes at a data horizon.
enum class Relation { Equal, Predecessor, Successor, Incomparable };
Relation relate(double alpha_k, double alpha_m, int j_max);

struct ResonantIndexSet {
    std::vector<int> indices;
    double delta = 0;
    /// Ratios α_k/α_m within horizon resolution of p/q with 2 ≤ q ≤ Q_max.
    std::vector<std::string> near_resonances;
};

/// Indices j ≤ j_max whose window [jα_m ± δ] holds no multiple of
/// any α_k that does not divide α_m.
ResonantIndexSet select_resonant_indices(const std::vector<LengthClass>& M, std::size_t m, int Q_max, int j_max);

/// Coefficients of one recovered boundary component.
struct RecoveredComponent {
    double alpha = 0;
    std::vector<double> s;
    std::vector<double> uncertainty;
    int multiplicity = 1;
    /// True when this entry merges components that agree to the resolved
    /// order.
    bool merged = false;
};

struct ExtractionOptions {
    int N = 2;
    int Q_max = 50;
    /// Candidate fit windows j ≥ f·j_max, sorted ascending.
    std::vector<double> fit_start_fractions{0.125, 0.25, 1.0 / 3};
    /// Candidate numbers of nuisance terms beyond s_N.
    std::vector<int> extra_terms{1, 2, 3};
    /// Minimum usable indices per class.
    int min_indices = 30;
    /// Absolute floor on the cluster-boundary threshold.
    double gap_floor = 1e-5;
};

struct ExtractionDiagnostics {
    std::vector<int> e_sizes;
    std::vector<double> deltas;
    std::vector<int> used_indices;
    std::vector<std::vector<double>> cluster_gaps;
    std::vector<std::string> near_resonances;
    std::vector<std::string> notes;
};

/// Per-class clustering and coefficient fits, processed in
/// increasing α so that divisors are known before their multiples.
std::vector<RecoveredComponent> extract_coefficients(const SpectrumSequence& S, const std::vector<LengthClass>& M,
                                                     const ExtractionOptions& options,
                                                     ExtractionDiagnostics* diagnostics = nullptr);

struct GeometricAssumptions {
    /// τ ≡ 1 on the surface.
    bool constant_potential = true;
    /// Surface of constant curvature 1 with genus 0.
    bool spherical = false;
    /// Flat surface.
    bool flat = false;
};

struct DecoupleReport {
    std::vector<LengthClass> M;
    std::vector<RecoveredComponent> components;
    std::vector<double> perimeters;
    std::optional<double> lambda;
    double lambda_residual = 0;
    bool lambda_consistent = false;
    std::vector<double> component_lambdas;
    std::vector<double> geodesic_totals;
    std::optional<double> euler_invariant;
    /// Σ geodesic totals + euler_invariant − 2π(2 − ℓ).
    double gauss_bonnet_residual = 0;
    bool nothing_beyond_perimeters = false;
    std::optional<double> sphere_area;
    std::optional<double> flat_genus;
    /// Largest deviation of the recovered model from the data, by index.
    std::optional<double> model_mismatch;
    LengthRecovery lengths;
    ExtractionDiagnostics diagnostics;
};

struct DecoupleOptions {
    LengthRecoveryOptions lengths;
    ExtractionOptions extraction;
    GeometricAssumptions assumptions;
    /// Relative tolerance for the cross-component λ consistency flag.
    double lambda_tolerance = 1e-2;
};

/// Invariants from recovered coefficients (constant potential).
DecoupleReport recover_invariants(const std::vector<LengthClass>& M, const std::vector<RecoveredComponent>& components,
                                  const GeometricAssumptions& assumptions, double lambda_tolerance = 1e-2);

/// Full pipeline: lengths, index selection, extraction, invariants.
DecoupleReport decouple(const SpectrumSequence& S, const DecoupleOptions& options = {});

std::string summary_text(const DecoupleReport& report);

} // namespace dtn
