#include "dtn/serialization.hpp"

#include <fstream>

#include "dtn/errors.hpp"

namespace dtn {

namespace {

template <typename T>
Json optional_json(const std::optional<T>& v) {
    return v ? Json(*v) : Json(nullptr);
}

} // namespace

Json to_json(const PF& f) {
    Json coeffs = Json::array();
    for (int n = -f.order(); n <= f.order(); ++n) {
        const cplx c = f.coeff(n);
        if (c != cplx(0)) coeffs.push_back({n, c.real(), c.imag()});
    }
    return {{"coeffs", coeffs}};
}

PF periodic_function_from_json(const Json& j) {
    std::vector<std::pair<int, cplx>> modes;
    for (const auto& entry : j.at("coeffs")) {
        if (!entry.is_array() || entry.size() < 2 || entry.size() > 3) {
            throw InvalidArgument("periodic function JSON: expected [n, re, im] entries");
        }
        const double im = entry.size() == 3 ? entry[2].get<double>() : 0.0;
        modes.emplace_back(entry[0].get<int>(), cplx(entry[1].get<double>(), im));
    }
    return PF::from_modes(modes);
}

Json to_json(const JetFunction& f) {
    Json terms = Json::array();
    for (int k = 0; k < f.stored_terms(); ++k) terms.push_back(to_json(f[k]));
    return {{"order", f.is_exact() ? Json("exact") : Json(f.order())}, {"terms", terms}};
}

JetFunction jet_from_json(const Json& j) {
    std::vector<PF> terms;
    for (const auto& t : j.at("terms")) terms.push_back(periodic_function_from_json(t));
    const Json& order = j.at("order");
    return JetFunction(std::move(terms), order.is_string() ? JetFunction::kExact : order.get<int>());
}

Json to_json(const SymbolExpansion& a) {
    Json components = Json::array();
    for (const auto& [degree, c] : a.components()) {
        components.push_back({{"degree", degree}, {"plus", to_json(c.plus)}, {"minus", to_json(c.minus)}});
    }
    return {{"schema_version", kSchemaVersion},
            {"top_degree", a.top_degree()},
            {"depth", a.depth()},
            {"components", components}};
}

Json to_json(const DiagonalCoefficients& c) {
    return {{"schema_version", kSchemaVersion},
            {"L", c.L},
            {"s", c.s},
            {"lambda", c.lambda},
            {"max_imaginary", c.max_imaginary}};
}

Json to_json(const SpectrumSequence& s) {
    Json entries = Json::array();
    for (std::size_t i = 0; i < s.size(); ++i) {
        entries.push_back({{"index", i}, {"value", s[i].value}, {"mode", s[i].mode}, {"component", s[i].component}});
    }
    return {{"schema_version", kSchemaVersion}, {"entries", entries}};
}

SpectrumSequence spectrum_from_json(const Json& j) {
    std::vector<SpectralValue> values;
    const Json& entries = j.is_array() ? j : j.at("entries");
    for (const auto& e : entries) {
        if (e.is_number()) {
            values.push_back({e.get<double>()});
        } else {
            values.push_back({e.at("value").get<double>(), e.value("mode", -1), e.value("component", -1)});
        }
    }
    return SpectrumSequence(std::move(values));
}

Json to_json(const DecoupleReport& r) {
    Json classes = Json::array();
    for (const auto& c : r.M) classes.push_back({{"alpha", c.alpha}, {"multiplicity", c.multiplicity}});
    Json components = Json::array();
    for (std::size_t i = 0; i < r.components.size(); ++i) {
        const auto& c = r.components[i];
        components.push_back({{"alpha", c.alpha},
                              {"perimeter", r.perimeters[i]},
                              {"multiplicity", c.multiplicity},
                              {"merged", c.merged},
                              {"s", c.s},
                              {"uncertainty", c.uncertainty},
                              {"lambda", i < r.component_lambdas.size() ? Json(r.component_lambdas[i]) : Json()},
                              {"geodesic_total",
                               i < r.geodesic_totals.size() ? Json(r.geodesic_totals[i]) : Json()}});
    }
    const auto& d = r.diagnostics;
    return {{"schema_version", kSchemaVersion},
            {"classes", classes},
            {"components", components},
            {"lambda", optional_json(r.lambda)},
            {"lambda_residual", r.lambda_residual},
            {"lambda_consistent", r.lambda_consistent},
            {"euler_invariant", optional_json(r.euler_invariant)},
            {"gauss_bonnet_residual", r.gauss_bonnet_residual},
            {"nothing_beyond_perimeters", r.nothing_beyond_perimeters},
            {"sphere_area", optional_json(r.sphere_area)},
            {"flat_genus", optional_json(r.flat_genus)},
            {"model_mismatch", optional_json(r.model_mismatch)},
            {"diagnostics",
             {{"length_trail", r.lengths.trail},
              {"leftover", r.lengths.leftover},
              {"resonant_set_sizes", d.e_sizes},
              {"deltas", d.deltas},
              {"used_indices", d.used_indices},
              {"cluster_gaps", d.cluster_gaps},
              {"near_resonances", d.near_resonances},
              {"notes", d.notes}}}};
}

SpectrumSequence read_spectrum_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot open " + path.string());
    if (path.extension() == ".json") {
        try {
            return spectrum_from_json(Json::parse(in));
        } catch (const nlohmann::json::exception& e) {
            throw InvalidArgument(path.string() + ": " + e.what());
        }
    }
    return read_csv(in);
}

} // namespace dtn
