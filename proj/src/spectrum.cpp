#include "dtn/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

#include "dtn/errors.hpp"

namespace dtn {

SpectrumSequence::SpectrumSequence(std::vector<SpectralValue> entries) : entries_(std::move(entries)) {
    for (const auto& e : entries_) {
        if (!std::isfinite(e.value)) throw InvalidArgument("SpectrumSequence: non-finite eigenvalue");
    }
    std::stable_sort(entries_.begin(), entries_.end(),
                     [](const SpectralValue& a, const SpectralValue& b) { return a.value < b.value; });
}

SpectrumSequence SpectrumSequence::from_values(const std::vector<double>& values) {
    std::vector<SpectralValue> entries;
    entries.reserve(values.size());
    for (const double v : values) entries.push_back({v, -1, -1});
    return SpectrumSequence(std::move(entries));
}

Eigen::VectorXd SpectrumSequence::values() const {
    Eigen::VectorXd v(entries_.size());
    for (std::size_t i = 0; i < entries_.size(); ++i) v(i) = entries_[i].value;
    return v;
}

SpectrumSequence SpectrumSequence::prefix(std::size_t count) const {
    SpectrumSequence out;
    out.entries_.assign(entries_.begin(), entries_.begin() + std::min(count, entries_.size()));
    return out;
}

void write_csv(std::ostream& out, const SpectrumSequence& s) {
    out << "# schema_version=" << kSchemaVersion << "\n";
    out << "index,value,mode,component\n";
    out << std::setprecision(17);
    for (std::size_t i = 0; i < s.size(); ++i) {
        out << i << ',' << s[i].value << ',' << s[i].mode << ',' << s[i].component << '\n';
    }
}

SpectrumSequence read_csv(std::istream& in) {
    std::vector<SpectralValue> entries;
    std::string line;
    int line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ',')) fields.push_back(field);
        try {
            if (fields.size() == 1) {
                entries.push_back({std::stod(fields[0]), -1, -1});
            } else if (fields.size() >= 2) {
                SpectralValue v{std::stod(fields[1]), -1, -1};
                if (fields.size() >= 3) v.mode = std::stoi(fields[2]);
                if (fields.size() >= 4) v.component = std::stoi(fields[3]);
                entries.push_back(v);
            }
        } catch (const std::logic_error&) {
            if (entries.empty()) continue;  // header row
            throw InvalidArgument("read_csv: malformed row " + std::to_string(line_number));
        }
    }
    return SpectrumSequence(std::move(entries));
}

} // namespace dtn
