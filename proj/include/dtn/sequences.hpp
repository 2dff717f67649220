#pragma once

#include <optional>
#include <span>
#include <vector>

#include "dtn/spectrum.hpp"

namespace dtn {

/// One boundary component's model: pairs jα + Σ s_n j^{−n}, repeated
/// `multiplicity` times.
struct ComponentModel {
    double alpha = 1;
    std::vector<double> s;
    int multiplicity = 1;
};

/// 0 once, then the pair jα + Σ_{n ≤ N} s_n j^{−n} for j = 1..j_max (each
/// repeated by the multiplicity). Entries carry mode j and `component_id`.
SpectrumSequence build_model_sequence(const ComponentModel& c, int N, int j_max, int component_id = 0);

/// Sorted multiset union; ties keep the order of the input list.
SpectrumSequence merge(const std::vector<SpectrumSequence>& sequences);

struct DecayFit {
    /// Least-squares slope of log|a_j − b_j| against log j; empty when every
    /// difference is below the floor.
    std::optional<double> slope;
    int used = 0;
    int excluded = 0;
    bool floor_dominated() const { return !slope.has_value(); }
};

inline constexpr double kDecayFloor = 1e-13;

/// Decay order of |a_j − b_j| for j in [first, last], with the index j
/// taken as the position in the sequences (j ≥ 1).
DecayFit decay_order(const SpectrumSequence& a, const SpectrumSequence& b, int first, int last,
                     double floor = kDecayFloor);

/// Same fit on explicit samples (j, |difference|).
DecayFit decay_order(std::span<const double> j, std::span<const double> difference, double floor = kDecayFloor);

/// Least-squares fit of v_j − α j ≈ Σ_{n=1}^{terms} c_n j^{−n}; returns c.
/// Columns are scaled for conditioning.
std::vector<double> fit_expansion(std::span<const double> j, std::span<const double> values, double alpha,
                                  int terms);

} // namespace dtn
