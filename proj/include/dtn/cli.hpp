#pragma once

#include <iosfwd>
#include <string>
#include <tuple>
#include <vector>

#include "dtn/serialization.hpp"

namespace dtn::cli {

/// Fully resolved options of one invocation.
struct RunConfig {
    std::string subcommand;

    std::string geometry = "disk";
    double lambda = 0;
    /// When non-empty, `coeffs` tabulates over these λ values instead.
    std::vector<double> lambda_grid;
    double inner_radius = 0.5;
    /// "const" or "radial".
    std::string tau = "const";
    /// τ(r) = Σ c_k r^k for radial potentials.
    std::vector<double> tau_profile{1.0};
    /// Fourier modes (n, re, im) of ρ; empty means ρ ≡ 1.
    std::vector<std::tuple<int, double, double>> rho_modes;

    int n_max = 200;
    /// When positive, `solve` returns exactly the lowest `count` eigenvalues.
    std::size_t count = 0;
    int j_max = 200;
    int order = 2;
    int window_first = 20;
    int window_last = 200;
    int fourier_order = 64;
    double pencil_margin = 1e-6;
    int threads = 0;

    std::string input;
    std::string output;
    std::string format;

    bool spherical = false;
    bool flat = false;
    double lambda_tolerance = 1e-2;
};

/// Throws InvalidArgument on an inconsistent configuration.
void validate(const RunConfig& config);

Json to_json(const RunConfig& config);

/// Executes a validated configuration, writing artifacts to `out` when no
/// output path is set. Returns the process exit status.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Parses arguments and runs. Exit codes: 0 success, 2 usage error,
/// 3 numerical failure, 4 insufficient or ambiguous data.
int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace dtn::cli
