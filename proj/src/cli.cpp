#include "dtn/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "dtn/decoupler.hpp"
#include "dtn/diagonalization.hpp"
#include "dtn/errors.hpp"
#include "dtn/forward_solvers.hpp"
#include "dtn/sequences.hpp"
#include "parallel.hpp"

namespace dtn::cli {

namespace {

std::string resolved_format(const RunConfig& c) {
    if (!c.format.empty()) return c.format;
    return c.subcommand == "solve" || c.subcommand == "predict" ? "csv" : "json";
}

SolverOptions solver_options(const RunConfig& c) {
    SolverOptions o;
    o.pencil_margin = c.pencil_margin;
    o.threads = c.threads;
    return o;
}

Geometry make_geometry(const RunConfig& c) {
    if (c.geometry == "annulus") return AnnulusGeometry{c.inner_radius};
    if (c.geometry == "radial") return RadialDiskGeometry{c.tau_profile};
    return DiskGeometry{};
}

SpectrumSequence forward_spectrum(const RunConfig& c, int n_max) {
    return mode_spectrum(c.lambda, make_geometry(c), n_max, solver_options(c));
}

SteklovProblem make_problem(const RunConfig& c, double lambda) {
    SteklovProblem p;
    p.lambda = lambda;
    const bool radial = c.tau == "radial" || (c.subcommand == "verify" && c.geometry == "radial");
    p.tau = radial ? radial_profile_jet(c.tau_profile, c.fourier_order)
                   : JetFunction::exact(PF::constant(c.tau_profile.front(), c.fourier_order));
    if (!c.rho_modes.empty()) {
        std::vector<std::pair<int, cplx>> modes;
        for (const auto& [n, re, im] : c.rho_modes) modes.emplace_back(n, cplx(re, im));
        p.rho = PF::from_modes(modes, c.fourier_order);
    }
    return p;
}

DiagonalizationOptions diag_options(const RunConfig& c) {
    DiagonalizationOptions o;
    o.fourier_order = c.fourier_order;
    return o;
}

class Sink {
public:
    Sink(const RunConfig& c, std::ostream& fallback) {
        if (!c.output.empty()) {
            file_.open(c.output);
            if (!file_) throw InvalidArgument("cannot write " + c.output);
        }
        out_ = c.output.empty() ? &fallback : &file_;
    }
    std::ostream& stream() { return *out_; }

private:
    std::ofstream file_;
    std::ostream* out_;
};

void emit_spectrum(const RunConfig& c, const SpectrumSequence& s, std::ostream& out) {
    Sink sink(c, out);
    if (resolved_format(c) == "json") {
        sink.stream() << to_json(s).dump(2) << "\n";
    } else {
        write_csv(sink.stream(), s);
    }
}

void emit_json(const RunConfig& c, const Json& j, std::ostream& out) {
    Sink sink(c, out);
    sink.stream() << std::setprecision(17) << j.dump(2) << "\n";
}

int run_coeffs(const RunConfig& c, std::ostream& out) {
    if (c.lambda_grid.empty()) {
        emit_json(c, to_json(asymptotic_coefficients(make_problem(c, c.lambda), c.order, diag_options(c))), out);
        return 0;
    }
    std::vector<DiagonalCoefficients> rows(c.lambda_grid.size());
    detail::parallel_for(static_cast<int>(rows.size()), detail::resolve_threads(c.threads), [&](int i) {
        rows[i] = asymptotic_coefficients(make_problem(c, c.lambda_grid[i]), c.order, diag_options(c));
    });
    if (resolved_format(c) == "csv") {
        Sink sink(c, out);
        sink.stream() << "# schema_version=" << kSchemaVersion << "\nlambda,L";
        for (int n = 1; n <= c.order; ++n) sink.stream() << ",s_" << n;
        sink.stream() << "\n" << std::setprecision(17);
        for (const auto& r : rows) {
            sink.stream() << r.lambda << "," << r.L;
            for (const double s : r.s) sink.stream() << "," << s;
            sink.stream() << "\n";
        }
        return 0;
    }
    Json table = Json::array();
    for (const auto& r : rows) table.push_back(to_json(r));
    emit_json(c, {{"schema_version", kSchemaVersion}, {"order", c.order}, {"rows", table}}, out);
    return 0;
}

int run_verify(const RunConfig& c, std::ostream& out) {
    const SpectrumSequence oracle = forward_spectrum(c, c.window_last + 2);
    const DiagonalCoefficients coeffs = asymptotic_coefficients(make_problem(c, c.lambda), c.order, diag_options(c));
    std::vector<double> js, remainder, splitting;
    for (int j = c.window_first; j <= c.window_last; ++j) {
        double model = j / coeffs.L;
        for (std::size_t n = 0; n < coeffs.s.size(); ++n) model += coeffs.s[n] * std::pow(double(j), -double(n + 1));
        js.push_back(j);
        remainder.push_back(oracle[2 * j].value - model);
        splitting.push_back(oracle[2 * j].value - oracle[2 * j - 1].value);
    }
    auto fit_json = [](const DecayFit& f) {
        return Json{{"slope", f.slope ? Json(*f.slope) : Json(nullptr)},
                    {"used", f.used},
                    {"excluded", f.excluded},
                    {"floor_dominated", f.floor_dominated()}};
    };
    emit_json(c,
              {{"schema_version", kSchemaVersion},
               {"geometry", c.geometry},
               {"lambda", c.lambda},
               {"window", {c.window_first, c.window_last}},
               {"coefficients", to_json(coeffs)},
               {"remainder", fit_json(decay_order(js, remainder))},
               {"pair_splitting", fit_json(decay_order(js, splitting))}},
              out);
    return 0;
}

int run_decouple(const RunConfig& c, std::ostream& out) {
    DecoupleOptions o;
    o.extraction.N = c.order;
    o.assumptions.spherical = c.spherical;
    o.assumptions.flat = c.flat;
    o.lambda_tolerance = c.lambda_tolerance;
    const DecoupleReport report = decouple(read_spectrum_file(c.input), o);
    if (resolved_format(c) == "text") {
        Sink sink(c, out);
        sink.stream() << summary_text(report);
        return 0;
    }
    emit_json(c, to_json(report), out);
    if (!c.output.empty()) out << summary_text(report);
    return 0;
}

void write_resolved_config(const RunConfig& c) {
    if (c.output.empty()) return;
    std::ofstream f(c.output + ".config.json");
    if (!f) throw InvalidArgument("cannot write " + c.output + ".config.json");
    f << to_json(c).dump(2) << "\n";
}

std::tuple<int, double, double> parse_mode(const std::string& text) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    for (std::string item; std::getline(ss, item, ':');) parts.push_back(item);
    if (parts.size() < 2 || parts.size() > 3) {
        throw InvalidArgument("rho mode '" + text + "': expected n:re[:im]");
    }
    try {
        return {std::stoi(parts[0]), std::stod(parts[1]), parts.size() == 3 ? std::stod(parts[2]) : 0.0};
    } catch (const std::exception&) {
        throw InvalidArgument("rho mode '" + text + "': not numeric");
    }
}

} // namespace

void validate(const RunConfig& c) {
    static const std::vector<std::string> subcommands{"solve", "coeffs", "predict", "verify", "decouple"};
    if (std::find(subcommands.begin(), subcommands.end(), c.subcommand) == subcommands.end()) {
        throw InvalidArgument("unknown subcommand '" + c.subcommand + "'");
    }
    if (c.geometry != "disk" && c.geometry != "annulus" && c.geometry != "radial") {
        throw InvalidArgument("geometry must be disk, annulus or radial");
    }
    if (c.tau != "const" && c.tau != "radial") throw InvalidArgument("tau must be const or radial");
    if (c.tau_profile.empty()) throw InvalidArgument("tau profile must have at least one coefficient");
    if (!(c.inner_radius > 0 && c.inner_radius < 1)) throw InvalidArgument("inner radius must lie in (0, 1)");
    if (!std::isfinite(c.lambda)) throw InvalidArgument("lambda must be finite");
    if (c.n_max < 0 || c.j_max < 1) throw InvalidArgument("n-max must be >= 0 and j-max >= 1");
    if (c.order < 1 || c.order > 4) throw InvalidArgument("order must lie in [1, 4]");
    if (c.window_first < 1 || c.window_last < c.window_first + 9) {
        throw InvalidArgument("verify window must hold at least 10 indices");
    }
    if (c.subcommand == "verify" && c.geometry == "annulus") {
        throw InvalidArgument("verify supports single-boundary geometries (disk, radial)");
    }
    if (c.fourier_order < 4) throw InvalidArgument("fourier order must be >= 4");
    if (c.subcommand == "decouple" && c.input.empty()) throw InvalidArgument("decouple needs --input");
    const std::string f = resolved_format(c);
    if (f != "csv" && f != "json" && f != "text") throw InvalidArgument("format must be csv, json or text");
    if (f == "text" && c.subcommand != "decouple") throw InvalidArgument("text format is only for decouple");
    if (f == "csv" && (c.subcommand == "verify" || c.subcommand == "decouple")) {
        throw InvalidArgument(c.subcommand + " emits JSON");
    }
}

Json to_json(const RunConfig& c) {
    Json rho = Json::array();
    for (const auto& [n, re, im] : c.rho_modes) rho.push_back({n, re, im});
    return {{"schema_version", kSchemaVersion},
            {"subcommand", c.subcommand},
            {"geometry", c.geometry},
            {"lambda", c.lambda},
            {"lambda_grid", c.lambda_grid},
            {"inner_radius", c.inner_radius},
            {"tau", c.tau},
            {"tau_profile", c.tau_profile},
            {"rho_modes", rho},
            {"n_max", c.n_max},
            {"count", c.count},
            {"j_max", c.j_max},
            {"order", c.order},
            {"window", {c.window_first, c.window_last}},
            {"fourier_order", c.fourier_order},
            {"pencil_margin", c.pencil_margin},
            {"threads", detail::resolve_threads(c.threads)},
            {"input", c.input},
            {"output", c.output},
            {"format", resolved_format(c)},
            {"spherical", c.spherical},
            {"flat", c.flat},
            {"lambda_tolerance", c.lambda_tolerance}};
}

int run(const RunConfig& c, std::ostream& out, std::ostream& err) {
    try {
        validate(c);
        write_resolved_config(c);
        if (c.subcommand == "solve") {
            emit_spectrum(c,
                          c.count > 0 ? lowest_eigenvalues(c.lambda, make_geometry(c), c.count, solver_options(c))
                                      : forward_spectrum(c, c.n_max),
                          out);
        } else if (c.subcommand == "coeffs") {
            run_coeffs(c, out);
        } else if (c.subcommand == "predict") {
            const auto coeffs = asymptotic_coefficients(make_problem(c, c.lambda), c.order, diag_options(c));
            emit_spectrum(c, predict_eigenvalues(coeffs, c.j_max), out);
        } else if (c.subcommand == "verify") {
            run_verify(c, out);
        } else {
            run_decouple(c, out);
        }
        return 0;
    } catch (const InvalidArgument& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const AmbiguityError& e) {
        err << "error: " << e.what() << "\n" << e.diagnostics() << "\n";
        return 4;
    } catch (const InsufficientData& e) {
        err << "error: " << e.what() << "\n";
        return 4;
    } catch (const PencilError& e) {
        err << "error: " << e.what() << " (mode " << e.mode() << ")\n";
        return 3;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return 3;
    }
}

int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Dirichlet-to-Neumann spectra, asymptotic coefficients and spectral decoupling"};
    app.require_subcommand(1);
    RunConfig c;
    std::vector<std::string> rho_modes;

    auto add_problem = [&](CLI::App* sub) {
        sub->add_option("--lambda", c.lambda, "Potential parameter");
        sub->add_option("--tau", c.tau, "Potential profile: const or radial")->check(CLI::IsMember({"const", "radial"}));
        sub->add_option("--tau-profile", c.tau_profile, "tau(r) = sum c_k r^k, or the constant value")
            ->delimiter(',');
        sub->add_option("--rho", rho_modes, "Boundary density: const, or Fourier modes n:re[:im]")->delimiter(',');
        sub->add_option("--order", c.order, "Number of asymptotic coefficients");
        sub->add_option("--fourier-order", c.fourier_order, "Fourier truncation of symbol coefficients");
    };
    auto add_geometry = [&](CLI::App* sub) {
        sub->add_option("--geometry", c.geometry, "disk, annulus or radial")
            ->check(CLI::IsMember({"disk", "annulus", "radial"}));
        sub->add_option("--lambda", c.lambda, "Potential parameter");
        sub->add_option("--inner-radius", c.inner_radius, "Annulus inner radius R");
        sub->add_option("--tau-profile", c.tau_profile, "Radial profile tau(r) = sum c_k r^k")->delimiter(',');
        sub->add_option("--pencil-margin", c.pencil_margin, "Reject lambda this close to a Dirichlet eigenvalue");
    };
    auto add_output = [&](CLI::App* sub) {
        sub->add_option("-o,--output", c.output, "Output file (default stdout)");
        sub->add_option("--format", c.format, "csv, json or text")->check(CLI::IsMember({"csv", "json", "text"}));
        sub->add_option("--threads", c.threads, "Worker threads (default DTN_THREADS or 1)");
    };

    auto* solve = app.add_subcommand("solve", "Forward spectrum of a model geometry");
    add_geometry(solve);
    solve->add_option("--n-max", c.n_max, "Highest Fourier mode");
    solve->add_option("--count", c.count, "Emit exactly the lowest COUNT eigenvalues instead");
    add_output(solve);

    auto* coeffs = app.add_subcommand("coeffs", "Asymptotic coefficients s_n");
    add_problem(coeffs);
    coeffs->add_option("--lambda-grid", c.lambda_grid, "Tabulate over these lambda values")->delimiter(',');
    add_output(coeffs);

    auto* predict = app.add_subcommand("predict", "Model sequence from the asymptotic coefficients");
    add_problem(predict);
    predict->add_option("--j-max", c.j_max, "Largest index j");
    add_output(predict);

    auto* verify = app.add_subcommand("verify", "Decay of the oracle-minus-model remainder");
    add_geometry(verify);
    verify->add_option("--order", c.order, "Number of asymptotic coefficients");
    verify->add_option("--window-first", c.window_first, "First j of the fit window");
    verify->add_option("--window-last", c.window_last, "Last j of the fit window");
    add_output(verify);

    auto* dec = app.add_subcommand("decouple", "Recover invariants from a merged spectrum");
    dec->add_option("-i,--input", c.input, "Spectrum CSV or JSON")->required();
    dec->add_option("--order", c.order, "Number of coefficients per component");
    dec->add_flag("--spherical", c.spherical, "Surface has curvature 1 and genus 0");
    dec->add_flag("--flat", c.flat, "Surface is flat");
    dec->add_option("--lambda-tolerance", c.lambda_tolerance, "Relative tolerance of the lambda consistency flag");
    add_output(dec);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }
    c.subcommand = app.get_subcommands().front()->get_name();
    try {
        if (!(rho_modes.size() == 1 && rho_modes.front() == "const")) {
            for (const auto& m : rho_modes) c.rho_modes.push_back(parse_mode(m));
        }
    } catch (const InvalidArgument& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
    return run(c, out, err);
}

} // namespace dtn::cli
