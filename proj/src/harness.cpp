#include "whitlyap/harness.hpp"

#include <fmt/format.h>

#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <random>
#include <sstream>

#include <json.hpp>

namespace whitlyap {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void reject_unknown(const json& obj, std::initializer_list<const char*> allowed,
                    const std::string& where) {
    for (const auto& item : obj.items()) {
        bool ok = false;
        for (const char* k : allowed)
            if (item.key() == k) ok = true;
        if (!ok)
            throw std::invalid_argument(
                fmt::format("config: unknown key \"{}\" in {}", item.key(), where));
    }
}

double positive(const json& v, const char* name) {
    double x = v.get<double>();
    if (!(x > 0)) throw std::invalid_argument(fmt::format("config: {} must be positive", name));
    return x;
}

std::vector<std::vector<double>> read_csv_rows(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open input file: " + path.string());
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            try {
                row.push_back(std::stod(cell));
            } catch (const std::exception&) {
                throw std::runtime_error(
                    fmt::format("{}: bad number \"{}\" on row {}", path.string(), cell,
                                rows.size() + 1));
            }
        }
        if (!rows.empty() && row.size() != rows.front().size())
            throw std::runtime_error(path.string() + ": inconsistent column count");
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw std::runtime_error(path.string() + ": no data rows");
    return rows;
}

std::string num(double v) { return fmt::format("{}", v); }

}  // namespace

RunConfig parse_run_config_json(const std::string& text, const std::string& origin) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(origin + ": invalid JSON: " + e.what());
    }
    reject_unknown(j, {"system", "mode", "mu", "neighborhood", "integrate", "audit", "delta",
                       "eps_chain", "samples", "seed", "io"},
                   "top level");
    RunConfig cfg;
    if (!j.contains("mode")) throw std::invalid_argument("config: missing required key \"mode\"");
    cfg.mode = j.at("mode").get<std::string>();
    static const char* kModes[] = {"size",          "hausdorff",     "lyap-asymptotic",
                                   "lyap-singularity", "lyap-isolated", "lyap-discrete",
                                   "expansive",     "cw-expansive",  "audit"};
    bool known = false;
    for (const char* m : kModes) known = known || cfg.mode == m;
    if (!known) throw std::invalid_argument("config: unknown mode \"" + cfg.mode + "\"");

    if (j.contains("system")) {
        const json& s = j.at("system");
        reject_unknown(s, {"id", "params"}, "system");
        cfg.system_id = s.at("id").get<std::string>();
        if (s.contains("params")) cfg.system_params = s.at("params").get<std::vector<double>>();
    }
    if (j.contains("mu")) {
        reject_unknown(j.at("mu"), {"depth"}, "mu");
        if (j.at("mu").contains("depth")) {
            cfg.mu_depth = j.at("mu").at("depth").get<int>();
            if (cfg.mu_depth < 1) throw std::invalid_argument("config: mu.depth must be >= 1");
        }
    }
    if (j.contains("neighborhood")) {
        const json& n = j.at("neighborhood");
        reject_unknown(n, {"p", "r", "rho"}, "neighborhood");
        NeighborhoodSpec nb;
        nb.p = n.at("p").get<std::vector<double>>();
        nb.r = positive(n.at("r"), "neighborhood.r");
        if (n.contains("rho")) nb.rho = n.at("rho").get<double>();
        if (nb.rho < 0) throw std::invalid_argument("config: neighborhood.rho must be >= 0");
        cfg.neighborhood = std::move(nb);
    }
    if (j.contains("integrate")) {
        const json& it = j.at("integrate");
        reject_unknown(it, {"h", "T_max", "eps_stop"}, "integrate");
        if (it.contains("h")) cfg.integrator_h = positive(it.at("h"), "integrate.h");
        if (it.contains("T_max")) cfg.integrate.T_max = positive(it.at("T_max"), "integrate.T_max");
        if (it.contains("eps_stop"))
            cfg.integrate.eps_stop = positive(it.at("eps_stop"), "integrate.eps_stop");
    }
    if (j.contains("audit")) {
        const json& a = j.at("audit");
        reject_unknown(a, {"tol", "horizon"}, "audit");
        if (a.contains("tol")) {
            cfg.audit_tol = a.at("tol").get<double>();
            if (cfg.audit_tol < 0) throw std::invalid_argument("config: audit.tol must be >= 0");
        }
        if (a.contains("horizon")) {
            cfg.audit_horizon = a.at("horizon").get<long>();
            if (cfg.audit_horizon < 1)
                throw std::invalid_argument("config: audit.horizon must be >= 1");
        }
    }
    if (j.contains("delta")) cfg.delta = positive(j.at("delta"), "delta");
    if (j.contains("eps_chain")) cfg.eps_chain = positive(j.at("eps_chain"), "eps_chain");
    if (j.contains("samples")) {
        cfg.samples = j.at("samples").get<int>();
        if (cfg.samples < 1) throw std::invalid_argument("config: samples must be >= 1");
    }
    if (j.contains("seed")) cfg.seed = j.at("seed").get<long>();
    if (j.contains("io")) {
        const json& io = j.at("io");
        reject_unknown(io, {"inputs", "outputs"}, "io");
        if (io.contains("inputs")) cfg.inputs = io.at("inputs").get<std::vector<std::string>>();
        if (io.contains("outputs")) cfg.outputs = io.at("outputs").get<std::vector<std::string>>();
    }
    return cfg;
}

RunConfig parse_run_config(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_run_config_json(buf.str(), path.string());
}

FinitePointSet load_point_csv(const fs::path& path) {
    FinitePointSet out;
    out.points = read_csv_rows(path);
    return out;
}

void write_point_csv(const fs::path& path, const FinitePointSet& pts) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write file: " + path.string());
    for (const Point& p : pts.points) {
        for (std::size_t a = 0; a < p.size(); ++a) out << (a ? "," : "") << num(p[a]);
        out << "\n";
    }
}

std::vector<PairState> load_pairs_csv(const fs::path& path, std::size_t dim) {
    auto rows = read_csv_rows(path);
    if (rows.front().size() != 2 * dim)
        throw std::runtime_error(
            fmt::format("{}: expected {} columns (two {}-d points per row)", path.string(),
                        2 * dim, dim));
    std::vector<PairState> out;
    out.reserve(rows.size());
    for (const auto& r : rows)
        out.push_back({Point(r.begin(), r.begin() + dim), Point(r.begin() + dim, r.end())});
    return out;
}

std::vector<Chain> load_chains_csv(const fs::path& path, const AmbientSpace& space,
                                   double eps_chain) {
    auto rows = read_csv_rows(path);
    std::size_t dim = space.dim();
    if (rows.front().size() != dim + 1)
        throw std::runtime_error(fmt::format("{}: expected id column plus {} coordinate columns",
                                             path.string(), dim));
    std::map<long, std::vector<Point>> groups;  // ordered by id
    std::vector<long> order;
    for (const auto& r : rows) {
        long id = std::lround(r[0]);
        if (!groups.count(id)) order.push_back(id);
        groups[id].push_back(Point(r.begin() + 1, r.end()));
    }
    std::vector<Chain> out;
    for (long id : order) {
        const auto& pts = groups[id];
        if (pts.size() != 2)
            throw std::runtime_error(
                fmt::format("{}: chain id {} needs exactly 2 endpoint rows", path.string(), id));
        if (dim == 1)
            out.push_back(make_arc_chain(space, pts[0][0], pts[1][0], eps_chain));
        else
            out.push_back(make_segment_chain(space, pts[0], pts[1], eps_chain));
    }
    return out;
}

std::vector<std::size_t> monotonicity_audit(const std::vector<std::pair<double, double>>& series,
                                            double tol) {
    if (series.size() < 2)
        throw std::invalid_argument("monotonicity_audit: need at least 2 samples");
    for (std::size_t i = 0; i + 1 < series.size(); ++i)
        if (!(series[i].first < series[i + 1].first))
            throw std::invalid_argument("monotonicity_audit: params must be strictly increasing");
    std::vector<std::size_t> viol;
    for (std::size_t i = 0; i + 1 < series.size(); ++i)
        if (series[i + 1].second >= series[i].second - tol) viol.push_back(i);
    return viol;
}

void export_series_csv(const fs::path& path, const LyapunovReport& rep) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write file: " + path.string());
    out << "t,V,mu_plus,mu_minus\n";
    const bool split = !rep.mu_plus.empty();
    for (std::size_t i = 0; i < rep.V.size(); ++i) {
        out << num(rep.params[i]) << "," << num(rep.V[i]) << ",";
        if (split) out << num(rep.mu_plus[i]) << "," << num(rep.mu_minus[i]);
        else out << ",";
        out << "\n";
    }
}

void export_summary_json(const fs::path& path, const LyapunovReport& rep) {
    json j{{"violations", rep.violations.size()},
           {"max_violation", rep.max_step_delta},
           {"tol", rep.tol},
           {"mesh", rep.mesh},
           {"depth", rep.depth}};
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write file: " + path.string());
    out << j.dump(2) << "\n";
}

LyapunovReport load_summary_json(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open file: " + path.string());
    json j = json::parse(in);
    LyapunovReport rep;
    rep.violations.resize(j.at("violations").get<std::size_t>());
    rep.max_step_delta = j.at("max_violation").get<double>();
    rep.tol = j.at("tol").get<double>();
    rep.mesh = j.at("mesh").get<double>();
    rep.depth = j.at("depth").get<int>();
    return rep;
}

void export_expansivity_json(const fs::path& path, const ExpansivityReport& rep) {
    json sep = json::array();
    for (const auto& s : rep.first_separation)
        sep.push_back(s ? json(*s) : json(nullptr));
    json j{{"verdict", rep.verdict},
           {"delta", rep.delta},
           {"horizon", rep.horizon},
           {"first_separation", sep},
           {"errors", rep.errors},
           {"witness", rep.witness ? json(*rep.witness) : json(nullptr)},
           {"witness_diameters", rep.witness_diameters}};
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write file: " + path.string());
    out << j.dump(2) << "\n";
}

ExpansivityReport load_expansivity_json(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open file: " + path.string());
    json j = json::parse(in);
    ExpansivityReport rep;
    rep.verdict = j.at("verdict").get<std::string>();
    rep.delta = j.at("delta").get<double>();
    rep.horizon = j.at("horizon").get<long>();
    for (const json& s : j.at("first_separation"))
        rep.first_separation.push_back(s.is_null() ? std::nullopt
                                                   : std::optional<long>(s.get<long>()));
    rep.errors = j.at("errors").get<std::vector<std::string>>();
    if (!j.at("witness").is_null()) rep.witness = j.at("witness").get<std::size_t>();
    rep.witness_diameters = j.at("witness_diameters").get<std::vector<double>>();
    return rep;
}

// --- mode dispatch --------------------------------------------------------

namespace {

fs::path out_path(const RunConfig& cfg, const fs::path& out_dir, std::size_t slot,
                  const char* fallback) {
    fs::path p = slot < cfg.outputs.size() ? fs::path(cfg.outputs[slot]) : fs::path(fallback);
    if (p.is_relative()) p = out_dir / p;
    return p;
}

SpacePtr bounding_space(const std::vector<const FinitePointSet*>& sets) {
    std::size_t dim = sets.front()->points.front().size();
    std::vector<double> lo(dim, std::numeric_limits<double>::infinity()), hi(dim, -lo[0]);
    for (const auto* s : sets)
        for (const Point& p : s->points)
            for (std::size_t a = 0; a < dim; ++a) {
                lo[a] = std::min(lo[a], p[a]);
                hi[a] = std::max(hi[a], p[a]);
            }
    for (std::size_t a = 0; a < dim; ++a)
        if (!(hi[a] - lo[a] > 0)) hi[a] = lo[a] + 1.0;  // degenerate axis: unit width
    return AmbientSpace::euclidean_box(std::move(lo), std::move(hi));
}

struct Workspace {
    SystemSpec sys;
    SpacePtr space;
    SizeConfig mu;
};

Workspace make_workspace(const RunConfig& cfg) {
    if (cfg.system_id.empty())
        throw std::invalid_argument("config: mode \"" + cfg.mode + "\" requires a system");
    SystemSpec sys = SystemSpec::from_catalog_id(cfg.system_id, cfg.system_params,
                                                 cfg.integrator_h);
    SpacePtr space = sys.default_space();
    SizeConfig mu;
    mu.depth = cfg.mu_depth;
    mu.seq = std::make_shared<DenseSequence>(space);
    return {std::move(sys), std::move(space), std::move(mu)};
}

std::vector<Point> starts_for(const RunConfig& cfg, const AmbientSpace& space,
                              const std::optional<Point>& center, double radius) {
    if (!cfg.inputs.empty()) return load_point_csv(cfg.inputs[0]).points;
    std::mt19937_64 rng(std::uint64_t(cfg.seed));
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::vector<Point> out;
    while (int(out.size()) < cfg.samples) {
        Point p(space.dim());
        if (center) {
            for (std::size_t a = 0; a < p.size(); ++a)
                p[a] = (*center)[a] + radius * unit(rng);
            if (space.distance(p, *center) >= radius) continue;
        } else if (const auto* b = std::get_if<EuclideanBoxRule>(&space.rule())) {
            for (std::size_t a = 0; a < p.size(); ++a)
                p[a] = 0.5 * (b->lo[a] + b->hi[a]) + 0.5 * (b->hi[a] - b->lo[a]) * unit(rng);
        } else {
            for (std::size_t a = 0; a < p.size(); ++a)
                p[a] = 0.5 * (unit(rng) + 1.0) * space.diameter_upper();
        }
        if (!space.contains(p)) continue;
        out.push_back(std::move(p));
    }
    return out;
}

/// Shared tail of the lyap-* modes: audit every series, write the first
/// series plus an aggregate summary.
int finish_lyap(const RunConfig& cfg, const fs::path& out_dir, bool quiet,
                const std::vector<LyapunovReport>& reps) {
    if (reps.empty()) throw std::runtime_error("lyap: no evaluation points");
    std::size_t total_viol = 0;
    LyapunovReport agg = reps.front();
    for (const LyapunovReport& r : reps) {
        total_viol += r.violations.size();
        agg.max_step_delta = std::max(agg.max_step_delta, r.max_step_delta);
    }
    agg.violations.resize(total_viol);
    export_series_csv(out_path(cfg, out_dir, 0, "series.csv"), reps.front());
    export_summary_json(out_path(cfg, out_dir, 1, "summary.json"), agg);
    if (!quiet)
        fmt::print("{} series audited, {} violations at tol {}\n", reps.size(), total_viol,
                   agg.tol);
    return total_viol ? ExitAuditViolation : ExitClean;
}

int report_exit(const ExpansivityReport& rep) {
    if (rep.verdict == "counterexample") return ExitCounterexample;
    if (rep.verdict == "separated-at-horizon") return ExitClean;
    return ExitAuditViolation;
}

int run_expansive(const RunConfig& cfg, const fs::path& out_dir, bool quiet, bool chains) {
    Workspace w = make_workspace(cfg);
    double eps = cfg.eps_chain > 0 ? cfg.eps_chain : cfg.delta / 10.0;
    ExpansivityReport rep;
    if (!cfg.inputs.empty()) {
        if (chains)
            rep = check_cw_expansive(w.sys, *w.space, cfg.delta, cfg.audit_horizon,
                                     load_chains_csv(cfg.inputs[0], *w.space, eps));
        else
            rep = check_expansive_pairs(w.sys, *w.space, cfg.delta, cfg.audit_horizon,
                                        load_pairs_csv(cfg.inputs[0], w.space->dim()));
    } else {
        std::mt19937_64 rng(std::uint64_t(cfg.seed));
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        std::size_t dim = w.space->dim();
        auto random_endpoints = [&]() {
            Point a(dim), b(dim);
            for (std::size_t k = 0; k < dim; ++k) a[k] = unit(rng) * w.space->diameter_upper();
            double mag = (0.1 + 0.8 * unit(rng)) * cfg.delta;
            double ang = dim == 1 ? 0.0 : 6.283185307179586 * unit(rng);
            for (std::size_t k = 0; k < dim; ++k)
                b[k] = a[k] + mag * (dim == 1 ? 1.0 : (k == 0 ? std::cos(ang) : std::sin(ang)));
            return std::pair<Point, Point>{a, b};
        };
        if (chains) {
            std::vector<Chain> seeds;
            for (int i = 0; i < cfg.samples; ++i) {
                auto [a, b] = random_endpoints();
                seeds.push_back(dim == 1 ? make_arc_chain(*w.space, a[0], b[0], eps)
                                         : make_segment_chain(*w.space, a, b, eps));
            }
            rep = check_cw_expansive(w.sys, *w.space, cfg.delta, cfg.audit_horizon, seeds);
        } else {
            std::vector<PairState> pairs;
            for (int i = 0; i < cfg.samples; ++i) {
                auto [a, b] = random_endpoints();
                if (const auto* t = std::get_if<FlatTorusRule>(&w.space->rule()))
                    for (std::size_t k = 0; k < dim; ++k) b[k] = wrap_coord(b[k], t->periods[k]);
                else if (const auto* c = std::get_if<CircleArcRule>(&w.space->rule()))
                    b[0] = wrap_coord(b[0], c->circumference);
                if (!w.space->contains(a) || !w.space->contains(b)) {
                    --i;
                    continue;
                }
                pairs.push_back({a, b});
            }
            rep = check_expansive_pairs(w.sys, *w.space, cfg.delta, cfg.audit_horizon, pairs);
        }
    }
    export_expansivity_json(out_path(cfg, out_dir, 0, "expansivity.json"), rep);
    export_separation_csv(out_path(cfg, out_dir, 1, "separation.csv"), rep);
    if (!quiet) fmt::print("verdict: {}\n", rep.verdict);
    return report_exit(rep);
}

}  // namespace

void export_separation_csv(const fs::path& path, const ExpansivityReport& rep) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write file: " + path.string());
    out << "sample,first_separation\n";
    for (std::size_t i = 0; i < rep.first_separation.size(); ++i) {
        out << i << ",";
        if (rep.first_separation[i]) out << *rep.first_separation[i];
        out << "\n";
    }
}

int run_config(const RunConfig& cfg, const fs::path& out_dir, bool quiet) {
    fs::create_directories(out_dir);

    if (cfg.mode == "size" || cfg.mode == "hausdorff") {
        if (cfg.inputs.size() < (cfg.mode == "size" ? 1u : 2u))
            throw std::invalid_argument("config: mode \"" + cfg.mode + "\" needs input CSV files");
        FinitePointSet A = load_point_csv(cfg.inputs[0]);
        SpacePtr space;
        FinitePointSet B;
        if (cfg.mode == "hausdorff") B = load_point_csv(cfg.inputs[1]);
        if (!cfg.system_id.empty())
            space = SystemSpec::from_catalog_id(cfg.system_id, cfg.system_params, cfg.integrator_h)
                        .default_space();
        else
            space = cfg.mode == "size" ? bounding_space({&A}) : bounding_space({&A, &B});
        double value, tail;
        if (cfg.mode == "size") {
            SizeConfig mu;
            mu.depth = cfg.mu_depth;
            mu.seq = std::make_shared<DenseSequence>(space);
            SizeValue sv = whitney_size(*space, A, mu);
            value = sv.value;
            tail = sv.tail_bound;
        } else {
            value = hausdorff_distance(*space, A, B);
            tail = 0.0;
        }
        fmt::print("{},{}\n", num(value), num(tail));
        if (!cfg.outputs.empty()) {
            std::ofstream out(out_path(cfg, out_dir, 0, "value.csv"));
            out << num(value) << "," << num(tail) << "\n";
        }
        return ExitClean;
    }

    if (cfg.mode == "audit") {
        if (cfg.inputs.empty()) throw std::invalid_argument("config: audit needs an input CSV");
        auto rows = read_csv_rows(cfg.inputs[0]);
        if (rows.front().size() != 2)
            throw std::invalid_argument("audit: input must have param,V columns");
        std::vector<std::pair<double, double>> series;
        for (const auto& r : rows) series.emplace_back(r[0], r[1]);
        auto viol = monotonicity_audit(series, cfg.audit_tol);
        json j{{"violations", viol}, {"count", viol.size()}, {"tol", cfg.audit_tol}};
        std::ofstream out(out_path(cfg, out_dir, 0, "audit.json"));
        out << j.dump(2) << "\n";
        if (!quiet) fmt::print("{} violations at tol {}\n", viol.size(), cfg.audit_tol);
        return viol.empty() ? ExitClean : ExitAuditViolation;
    }

    if (cfg.mode == "expansive") return run_expansive(cfg, out_dir, quiet, false);
    if (cfg.mode == "cw-expansive") return run_expansive(cfg, out_dir, quiet, true);

    // lyap-* family
    Workspace w = make_workspace(cfg);
    std::vector<LyapunovReport> reps;

    if (cfg.mode == "lyap-asymptotic") {
        Point p = cfg.neighborhood ? cfg.neighborhood->p : Point(w.space->dim(), 0.0);
        for (const Point& x : starts_for(cfg, *w.space, std::nullopt, 0.0)) {
            if (w.space->distance(x, p) <= cfg.integrate.eps_stop) continue;
            reps.push_back(lyap_asymptotic_series(w.sys, *w.space, p, w.mu, x, cfg.integrate));
        }
        return finish_lyap(cfg, out_dir, quiet, reps);
    }

    if (cfg.mode == "lyap-singularity") {
        if (!cfg.neighborhood)
            throw std::invalid_argument("config: lyap-singularity needs a neighborhood block");
        NeighborhoodSpec nb = *cfg.neighborhood;
        if (nb.rho <= 0)
            nb = find_adapted_neighborhood(w.sys, *w.space, nb.p, nb.r, 0.1, cfg.integrate.T_max)
                     .nbhd;
        SingularityContext ctx(w.sys, w.space, nb, w.mu);
        for (const Point& x : starts_for(cfg, *w.space, nb.p, nb.r)) {
            if (!ctx.in_U(x) || w.space->distance(x, nb.p) <= 1e-6) continue;
            reps.push_back(ctx.series(x));
        }
        return finish_lyap(cfg, out_dir, quiet, reps);
    }

    if (cfg.mode == "lyap-isolated" || cfg.mode == "lyap-discrete") {
        if (cfg.mode == "lyap-discrete" && w.sys.kind() != SystemKind::Map)
            throw std::invalid_argument("config: lyap-discrete requires a map system");
        FinitePointSet lambda;
        if (cfg.inputs.size() >= 2)
            lambda = load_point_csv(cfg.inputs[1]);
        else if (cfg.neighborhood)
            lambda = FinitePointSet({cfg.neighborhood->p});
        else
            lambda = FinitePointSet({Point(w.space->dim(), 0.0)});
        IsolatedOpts opts;
        if (cfg.neighborhood && cfg.neighborhood->r > 0) opts.r = cfg.neighborhood->r;
        opts.integrate = cfg.integrate;
        IsolatedLyapunov lyap(w.sys, w.space, lambda, w.mu, opts);
        Point center = lambda.points.front();
        for (const Point& x : starts_for(cfg, *w.space, center, opts.r)) {
            if (w.space->distance(x, center) <= 1e-6) continue;
            reps.push_back(lyap.series(x));
        }
        return finish_lyap(cfg, out_dir, quiet, reps);
    }

    throw std::logic_error("run_config: unhandled mode " + cfg.mode);
}

}  // namespace whitlyap
