#pragma once

#include <filesystem>

#include "whitlyap/expansivity.hpp"

namespace whitlyap {

/// Exit-code contract of the batch runner: 0 clean, 1 error, 2 audit
/// violations, 3 counterexample verdict.
enum ExitCode : int {
    ExitClean = 0,
    ExitError = 1,
    ExitAuditViolation = 2,
    ExitCounterexample = 3,
};

/// Parsed run configuration. Optional blocks keep their defaults when the
/// JSON omits them; unknown keys anywhere are rejected.
struct RunConfig {
    std::string mode;
    std::string system_id;
    std::vector<double> system_params;

    int mu_depth = 64;
    std::optional<NeighborhoodSpec> neighborhood;
    IntegrateOpts integrate;
    double integrator_h = 0.01;

    double audit_tol = 0.0;  // 0 = use the construction's own strictness tolerance
    long audit_horizon = 64;

    double delta = 0.2;       // expansivity threshold (expansive / cw-expansive)
    double eps_chain = 0.0;   // 0 = delta / 10
    int samples = 10;         // generated starts when no input file is given
    long seed = 1;

    std::vector<std::string> inputs;
    std::vector<std::string> outputs;
};

RunConfig parse_run_config(const std::filesystem::path& path);
RunConfig parse_run_config_json(const std::string& text, const std::string& origin = "config");

/// One point per row, comma-separated coordinates, no header.
FinitePointSet load_point_csv(const std::filesystem::path& path);
void write_point_csv(const std::filesystem::path& path, const FinitePointSet& pts);

/// Pair samples: 2*dim columns per row (x then y).
std::vector<PairState> load_pairs_csv(const std::filesystem::path& path, std::size_t dim);

/// Chain seeds: id column followed by dim coordinate columns; the two rows of
/// each id are the endpoints of a segment (or arc on 1-d spaces).
std::vector<Chain> load_chains_csv(const std::filesystem::path& path, const AmbientSpace& space,
                                   double eps_chain);

/// Every index i with V[i+1] >= V[i] - tol; empty means certified strict
/// decrease at resolution tol. Params must be strictly increasing.
std::vector<std::size_t> monotonicity_audit(const std::vector<std::pair<double, double>>& series,
                                            double tol);

/// Series CSV with columns t,V,mu_plus,mu_minus (mu columns empty when the
/// construction has no split) — byte-stable for identical inputs.
void export_series_csv(const std::filesystem::path& path, const LyapunovReport& rep);

/// JSON summary {violations, max_violation, tol, mesh, depth}.
void export_summary_json(const std::filesystem::path& path, const LyapunovReport& rep);

void export_expansivity_json(const std::filesystem::path& path, const ExpansivityReport& rep);
void export_separation_csv(const std::filesystem::path& path, const ExpansivityReport& rep);

LyapunovReport load_summary_json(const std::filesystem::path& path);
ExpansivityReport load_expansivity_json(const std::filesystem::path& path);

/// Dispatch a parsed config: run the named mode, write its artifacts under
/// out_dir (which prefixes relative output paths) and return the exit code.
/// Errors escape as exceptions; the CLI maps them to exit 1.
int run_config(const RunConfig& cfg, const std::filesystem::path& out_dir = ".",
               bool quiet = false);

}  // namespace whitlyap
