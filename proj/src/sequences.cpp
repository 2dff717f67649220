#include "dtn/sequences.hpp"

#include <Eigen/QR>

#include <cmath>
#include <string>

#include "dtn/errors.hpp"

namespace dtn {

SpectrumSequence build_model_sequence(const ComponentModel& c, int N, int j_max, int component_id) {
    if (j_max < 1) throw InvalidArgument("build_model_sequence: j_max must be >= 1");
    if (!(c.alpha > 0)) throw InvalidArgument("build_model_sequence: α must be positive");
    if (c.multiplicity < 1) throw InvalidArgument("build_model_sequence: multiplicity must be >= 1");
    const int terms = std::min<int>(N, static_cast<int>(c.s.size()));
    std::vector<SpectralValue> entries;
    entries.reserve(static_cast<std::size_t>(c.multiplicity) * (2 * j_max + 1));
    for (int copy = 0; copy < c.multiplicity; ++copy) entries.push_back({0.0, 0, component_id});
    for (int j = 1; j <= j_max; ++j) {
        double value = j * c.alpha;
        double inverse_power = 1;
        for (int n = 0; n < terms; ++n) {
            inverse_power /= j;
            value += c.s[n] * inverse_power;
        }
        for (int copy = 0; copy < 2 * c.multiplicity; ++copy) entries.push_back({value, j, component_id});
    }
    return SpectrumSequence(std::move(entries));
}

SpectrumSequence merge(const std::vector<SpectrumSequence>& sequences) {
    std::vector<SpectralValue> entries;
    for (const auto& s : sequences) entries.insert(entries.end(), s.entries().begin(), s.entries().end());
    return SpectrumSequence(std::move(entries));
}

DecayFit decay_order(std::span<const double> j, std::span<const double> difference, double floor) {
    if (j.size() != difference.size()) throw InvalidArgument("decay_order: length mismatch");
    std::vector<double> x;
    std::vector<double> y;
    DecayFit fit;
    for (std::size_t i = 0; i < j.size(); ++i) {
        const double d = std::abs(difference[i]);
        if (d < floor) {
            ++fit.excluded;
            continue;
        }
        x.push_back(std::log(j[i]));
        y.push_back(std::log(d));
    }
    fit.used = static_cast<int>(x.size());
    if (x.empty()) return fit;
    if (x.size() < 10) {
        throw InsufficientData("decay_order: only " + std::to_string(x.size()) +
                               " differences above the floor; need at least 10");
    }
    const double n = static_cast<double>(x.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    fit.slope = sxy / sxx;
    return fit;
}

DecayFit decay_order(const SpectrumSequence& a, const SpectrumSequence& b, int first, int last, double floor) {
    if (first < 1 || last < first) throw InvalidArgument("decay_order: invalid window");
    if (static_cast<std::size_t>(last) >= a.size() || static_cast<std::size_t>(last) >= b.size()) {
        throw InvalidArgument("decay_order: window exceeds sequence length");
    }
    std::vector<double> j;
    std::vector<double> d;
    for (int i = first; i <= last; ++i) {
        j.push_back(i);
        d.push_back(a[i].value - b[i].value);
    }
    return decay_order(j, d, floor);
}

std::vector<double> fit_expansion(std::span<const double> j, std::span<const double> values, double alpha,
                                  int terms) {
    if (j.size() != values.size()) throw InvalidArgument("fit_expansion: length mismatch");
    if (terms < 1 || j.size() < static_cast<std::size_t>(terms) + 1) {
        throw InsufficientData("fit_expansion: not enough samples");
    }
    const Eigen::Index rows = static_cast<Eigen::Index>(j.size());
    double j_min = j[0];
    for (const double v : j) j_min = std::min(j_min, v);
    Eigen::MatrixXd A(rows, terms);
    Eigen::VectorXd rhs(rows);
    for (Eigen::Index i = 0; i < rows; ++i) {
        const double u = j_min / j[i];
        double p = 1;
        for (int n = 0; n < terms; ++n) {
            p *= u;
            A(i, n) = p;
        }
        rhs(i) = values[i] - alpha * j[i];
    }
    const Eigen::VectorXd scaled = A.colPivHouseholderQr().solve(rhs);
    std::vector<double> c(terms);
    double scale = 1;
    for (int n = 0; n < terms; ++n) {
        scale *= j_min;
        c[n] = scaled(n) * scale;
    }
    return c;
}

} // namespace dtn
