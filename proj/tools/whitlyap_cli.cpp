// Command-line front end: thin argument plumbing around run_config().
#include <CLI11.hpp>
#include <fmt/format.h>

#include "whitlyap/harness.hpp"

using namespace whitlyap;

int main(int argc, char** argv) {
    CLI::App app{"Lyapunov functions from size functions on hyperspaces"};
    app.require_subcommand(0, 1);
    app.fallthrough();  // global flags remain valid after a subcommand

    std::string config_path, out_dir = ".";
    long seed = 0;
    bool quiet = false, seed_set = false;
    app.add_option("--config", config_path, "RunConfig JSON file");
    app.add_option("--out-dir", out_dir, "Directory for output artifacts");
    app.add_option("--seed", seed, "Random seed for generated samples")
        ->each([&](const std::string&) { seed_set = true; });
    app.add_flag("--quiet", quiet, "Suppress informational output");

    // Direct flags shared by the subcommands; a --config value provides the
    // base and these override it.
    std::string system_id, params_csv, construction = "asymptotic";
    double delta = 0.0;
    long horizon = 0;
    int samples = 0;
    std::vector<std::string> files;

    auto add_common = [&](CLI::App* sub, bool with_system) {
        sub->add_option("files", files, "Input CSV files");
        if (with_system) {
            sub->add_option("--system", system_id, "Catalog system id");
            sub->add_option("--params", params_csv, "Comma-separated system parameters");
        }
    };
    CLI::App* sc_size = app.add_subcommand("size", "Truncated size function of a point set");
    add_common(sc_size, true);
    CLI::App* sc_hd = app.add_subcommand("hausdorff", "Hausdorff distance of two point sets");
    add_common(sc_hd, true);
    CLI::App* sc_lyap = app.add_subcommand("lyap", "Lyapunov series along sampled orbits");
    add_common(sc_lyap, true);
    sc_lyap->add_option("--construction", construction,
                        "asymptotic | singularity | isolated | discrete");
    sc_lyap->add_option("--samples", samples, "Number of generated start points");
    CLI::App* sc_exp = app.add_subcommand("expansive", "Pairwise expansivity check");
    add_common(sc_exp, true);
    sc_exp->add_option("--delta", delta, "Separation threshold");
    sc_exp->add_option("--horizon", horizon, "Iterate horizon");
    sc_exp->add_option("--samples", samples, "Number of generated pairs");
    CLI::App* sc_cw = app.add_subcommand("cw-expansive", "Continuum-wise expansivity check");
    add_common(sc_cw, true);
    sc_cw->add_option("--delta", delta, "Separation threshold");
    sc_cw->add_option("--horizon", horizon, "Iterate horizon");
    sc_cw->add_option("--samples", samples, "Number of generated chains");
    CLI::App* sc_audit = app.add_subcommand("audit", "Monotonicity audit of a param,V series");
    add_common(sc_audit, false);
    double audit_tol = 0.0;
    sc_audit->add_option("--tol", audit_tol, "Strictness tolerance");

    CLI11_PARSE(app, argc, argv);

    try {
        RunConfig cfg;
        if (!config_path.empty()) cfg = parse_run_config(config_path);
        if (sc_size->parsed()) cfg.mode = "size";
        if (sc_hd->parsed()) cfg.mode = "hausdorff";
        if (sc_lyap->parsed()) cfg.mode = "lyap-" + construction;
        if (sc_exp->parsed()) cfg.mode = "expansive";
        if (sc_cw->parsed()) cfg.mode = "cw-expansive";
        if (sc_audit->parsed()) {
            cfg.mode = "audit";
            if (audit_tol > 0) cfg.audit_tol = audit_tol;
        }
        if (cfg.mode.empty())
            throw std::invalid_argument("no mode: give a subcommand or a --config with \"mode\"");
        if (!system_id.empty()) {
            cfg.system_id = system_id;
            cfg.system_params.clear();
        }
        if (!params_csv.empty()) {
            cfg.system_params.clear();
            std::stringstream ss(params_csv);
            std::string cell;
            while (std::getline(ss, cell, ',')) cfg.system_params.push_back(std::stod(cell));
        }
        if (delta > 0) cfg.delta = delta;
        if (horizon > 0) cfg.audit_horizon = horizon;
        if (samples > 0) cfg.samples = samples;
        if (seed_set) cfg.seed = seed;
        if (!files.empty()) cfg.inputs = files;
        return run_config(cfg, out_dir, quiet);
    } catch (const std::exception& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return ExitError;
    }
}
