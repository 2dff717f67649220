#pragma once

#include <Eigen/Core>

#include <iosfwd>
#include <string>
#include <vector>

namespace dtn {

/// One eigenvalue with its provenance; -1 marks an unknown tag.
struct SpectralValue {
    double value = 0;
    int mode = -1;
    int component = -1;
};

/// Nondecreasing multiset of eigenvalues.
class SpectrumSequence {
public:
    SpectrumSequence() = default;
    /// Stable sort by value; ties keep their input order.
    explicit SpectrumSequence(std::vector<SpectralValue> entries);
    static SpectrumSequence from_values(const std::vector<double>& values);

    std::size_t size() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }
    const SpectralValue& operator[](std::size_t i) const { return entries_[i]; }
    const std::vector<SpectralValue>& entries() const { return entries_; }
    Eigen::VectorXd values() const;

    /// Drops everything past the first `count` entries.
    SpectrumSequence prefix(std::size_t count) const;

private:
    std::vector<SpectralValue> entries_;
};

inline constexpr int kSchemaVersion = 1;

void write_csv(std::ostream& out, const SpectrumSequence& s);
/// Accepts `index,value[,mode,component]` rows, a single value column, and
/// `#` comment lines; a header row is skipped.
SpectrumSequence read_csv(std::istream& in);

} // namespace dtn
