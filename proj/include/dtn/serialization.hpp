#pragma once

#include <filesystem>

#include <json.hpp>

#include "dtn/decoupler.hpp"
#include "dtn/diagonalization.hpp"
#include "dtn/spectrum.hpp"
#include "dtn/symbol.hpp"

namespace dtn {

using Json = nlohmann::ordered_json;

/// {"coeffs": [[n, re, im], ...]}
Json to_json(const PF& f);
PF periodic_function_from_json(const Json& j);

/// {"order": k or "exact", "terms": [PeriodicFunction, ...]}
Json to_json(const JetFunction& f);
JetFunction jet_from_json(const Json& j);

/// {"components": [{"degree": m, "plus": jet, "minus": jet}, ...]}
Json to_json(const SymbolExpansion& a);

/// {"schema_version", "L", "s", "lambda", "max_imaginary"}
Json to_json(const DiagonalCoefficients& c);

/// {"schema_version", "entries": [{"index", "value", "mode", "component"}]}
Json to_json(const SpectrumSequence& s);
SpectrumSequence spectrum_from_json(const Json& j);

Json to_json(const DecoupleReport& report);

/// Reads a spectrum from `.json` or CSV (any other extension).
SpectrumSequence read_spectrum_file(const std::filesystem::path& path);

} // namespace dtn
