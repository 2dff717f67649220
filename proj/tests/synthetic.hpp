#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "dtn/sequences.hpp"

namespace dtn::testing {

/// A random merged spectrum with known components.
struct SyntheticCase {
    std::vector<ComponentModel> components;
    SpectrumSequence spectrum;
};

/// True when |r − p/q| < tol for some q ≤ q_max.
inline bool near_rational(double r, int q_max, double tol) {
    for (int q = 1; q <= q_max; ++q) {
        if (std::abs(r - std::round(r * q) / q) < tol) return true;
    }
    return false;
}

/// Up to three components mixing generic, repeated and divisible lengths.
/// Each value carries noise bounded by noise·j^{-4}; the spectrum is cut at
/// `horizon` times the smallest α so that it is a complete prefix.
inline SyntheticCase random_case(std::uint64_t seed, double horizon = 600, double noise = 0.5) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0, 1);
    std::uniform_int_distribution<int> count_dist(1, 3);
    const int count = count_dist(rng);
    SyntheticCase out;
    for (int c = 0; c < count; ++c) {
        ComponentModel m;
        const double kind = unit(rng);
        if (c > 0 && kind < 0.25) {
            m.alpha = out.components[rng() % c].alpha;  // repeated length
        } else if (c > 0 && kind < 0.5) {
            const auto& base = out.components[rng() % c];
            m.alpha = base.alpha * (2 + rng() % 2);  // divisible length
        } else {
            for (;;) {
                m.alpha = 0.7 + 1.3 * unit(rng);
                bool ok = true;
                for (const auto& other : out.components) {
                    if (near_rational(m.alpha / other.alpha, 8, 0.02)) ok = false;
                }
                if (ok) break;
            }
        }
        // Components sharing α must be separable at first order.
        for (;;) {
            m.s = {-1 + 2 * unit(rng), -1 + 2 * unit(rng)};
            bool ok = true;
            for (const auto& other : out.components) {
                if (std::abs(other.alpha - m.alpha) < 1e-12 && std::abs(other.s[0] - m.s[0]) < 0.2) ok = false;
            }
            if (ok) break;
        }
        out.components.push_back(m);
    }
    double alpha_min = out.components.front().alpha;
    for (const auto& m : out.components) alpha_min = std::min(alpha_min, m.alpha);
    const double cut = horizon * alpha_min;

    std::vector<SpectralValue> values;
    std::uniform_real_distribution<double> jitter(-1, 1);
    for (std::size_t c = 0; c < out.components.size(); ++c) {
        const auto& m = out.components[c];
        values.push_back({0.0, 0, static_cast<int>(c)});
        for (int j = 1; j * m.alpha <= cut + 2; ++j) {
            const double base = j * m.alpha + m.s[0] / j + m.s[1] / (double(j) * j);
            for (int copy = 0; copy < 2; ++copy) {
                values.push_back({base + noise * jitter(rng) / std::pow(double(j), 4), j, static_cast<int>(c)});
            }
        }
    }
    std::vector<SpectralValue> kept;
    for (const auto& v : values) {
        if (v.value <= cut) kept.push_back(v);
    }
    out.spectrum = SpectrumSequence(std::move(kept));
    return out;
}

} // namespace dtn::testing
