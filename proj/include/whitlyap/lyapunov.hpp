#pragma once

#include "whitlyap/dynamics.hpp"
#include "whitlyap/hyperspace.hpp"

namespace whitlyap {

/// Evaluation trace of a Lyapunov function along one orbit, with the
/// strictness tolerance actually used and the resolution metadata behind it.
struct LyapunovReport {
    std::vector<double> params;  // time (flows) or iterate index (maps)
    std::vector<double> V;
    std::vector<double> mu_plus, mu_minus;  // empty in asymptotic mode
    std::vector<std::size_t> violations;    // steps with V[i+1] >= V[i] - tol
    double max_step_delta = 0.0;            // max over steps of V[i+1] - V[i]
    double tol = 0.0;
    double mesh = 0.0;
    double tail_bound = 0.0;
    int depth = 0;
    double truncation_horizon = 0.0;

    void run_audit();  // fills violations/max_step_delta from V and tol
};

/// Subsample a report to the evaluation points where V has dropped by more
/// than tol since the previously kept point. The truncated series is exactly
/// non-increasing but can stall below resolution for many consecutive fine
/// steps; the kept samples are the ones whose decrease the truncation can
/// certify. A series with no certifiable change collapses to its first sample
/// (the audit then has nothing to check either way at this resolution).
void coarsen_to_certified_drops(LyapunovReport& rep);

struct IntegrateOpts {
    double eps_stop = 1e-5;
    double T_max = 20.0;
};

/// V(x) = mu( {phi_t(x) : t >= 0} U {p} ), the asymptotic construction.
double lyap_asymptotic(const SystemSpec& sys, const AmbientSpace& space, const Point& p,
                       const SizeConfig& cfg, const Point& x, const IntegrateOpts& opts = {});

/// V evaluated at every sample of the orbit of x, via one pass of suffix
/// extremes; identical to calling lyap_asymptotic at each sample because the
/// sampled orbit sets are exactly nested.
LyapunovReport lyap_asymptotic_series(const SystemSpec& sys, const AmbientSpace& space,
                                      const Point& p, const SizeConfig& cfg, const Point& x,
                                      const IntegrateOpts& opts = {});

/// Precomputed surroundings of an isolated singular point: the complement
/// sample C = X \ U, the invariant-manifold samples, and their per-q extremes.
class SingularityContext {
  public:
    SingularityContext(SystemSpec sys, SpacePtr space, NeighborhoodSpec nbhd, SizeConfig cfg,
                       double grid_density = 0.1, double horizon = 1000.0);

    const NeighborhoodSpec& nbhd() const { return nbhd_; }
    const SpacePtr& space() const { return space_; }
    const SystemSpec& system() const { return sys_; }
    const SizeConfig& config() const { return cfg_; }
    const FinitePointSet& complement() const { return C_; }
    const FinitePointSet& unstable() const { return Wu_; }
    const FinitePointSet& stable() const { return Ws_; }
    double horizon() const { return horizon_; }
    double mesh() const { return mesh_; }
    double strictness_tol() const;  // 1e-9 + 2*tail + Lipschitz slack from mesh

    bool in_U(const Point& x) const;

    /// V_p^+(x), V_p^-(x) as sampled sets (orbit segment U manifold U C).
    std::pair<FinitePointSet, FinitePointSet> vpm_sets(const Point& x) const;

    /// V(x) = mu(V_p^+(x)) - mu(V_p^-(x)).
    double value(const Point& x) const;

    /// V along the in-U orbit through x (from x forward to the exit of B_r).
    LyapunovReport series(const Point& x) const;

  private:
    struct MuParts {
        double mu_plus, mu_minus;
    };
    MuParts eval(const std::vector<Point>& fwd, const std::vector<Point>& bwd) const;

    SystemSpec sys_;
    SpacePtr space_;
    NeighborhoodSpec nbhd_;
    SizeConfig cfg_;
    double grid_density_, horizon_, mesh_ = 0.0;
    FinitePointSet C_, Wu_, Ws_;
    std::vector<Point> qs_;
    std::vector<double> wts_;
    std::vector<double> maxC_, minC_, maxWu_, minWu_, maxWs_, minWs_;
};

std::pair<FinitePointSet, FinitePointSet> vpm_sets(const SingularityContext& ctx, const Point& x);
double lyap_singularity(const SingularityContext& ctx, const Point& x);

struct IsolatedOpts {
    double r = 0.5;          // neighborhood radius around the collapsed point
    double rho = 0.0;        // 0 = search rho downward from r/2
    double grid_density = 0.1;
    double horizon = 1000.0;
    IntegrateOpts integrate;
    int probe_count = 16;    // starts used to classify attracting vs not / check isolation
};

/// Lyapunov function for an isolated set Lambda, built on the quotient space
/// that collapses Lambda to a point. Attracting sets use the asymptotic
/// construction at the collapsed point, general ones the singularity
/// construction normalized to vanish on Lambda. Construction throws
/// IsolationViolation when a sampled non-Lambda orbit stays in U for the full
/// horizon without approaching Lambda.
class IsolatedLyapunov {
  public:
    IsolatedLyapunov(SystemSpec sys, SpacePtr base_space, FinitePointSet lambda,
                     const SizeConfig& cfg, const IsolatedOpts& opts = {});

    double value(const Point& x) const;
    LyapunovReport series(const Point& x) const;
    bool attracting() const { return attracting_; }
    const SpacePtr& quotient_space() const { return qspace_; }
    const Point& token() const { return token_; }
    double mesh_slack() const;

  private:
    IntegrateOpts mesh_aware(const IntegrateOpts& opts) const;

    SystemSpec sys_;
    SpacePtr qspace_;
    FinitePointSet lambda_;
    SizeConfig cfg_;
    IsolatedOpts opts_;
    Point token_;
    bool attracting_ = false;
    std::shared_ptr<SingularityContext> ctx_;  // non-attracting case
    double v_token_ = 0.0;                     // normalization offset
};

/// Free-function entry points on top of IsolatedLyapunov.
double lyap_isolated_set(const SystemSpec& sys, const SpacePtr& base_space,
                         const FinitePointSet& lambda, const SizeConfig& cfg, const Point& x,
                         const IsolatedOpts& opts = {});
double lyap_discrete(const SystemSpec& map, const SpacePtr& base_space,
                     const FinitePointSet& lambda, const SizeConfig& cfg, const Point& x,
                     const IsolatedOpts& opts = {});

}  // namespace whitlyap
