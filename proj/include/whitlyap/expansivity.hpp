#pragma once

#include <optional>

#include "whitlyap/lyapunov.hpp"

namespace whitlyap {

/// Unordered two-point subset, the computational restriction of K(X) used by
/// the pairwise expansivity checker.
struct PairState {
    Point x, y;

    double diam(const AmbientSpace& space) const { return space.distance(x, y); }
};

/// Ordered eps-dense polygonal sample of a continuum, carrying the source
/// parameterization so iterated refinement re-samples the true curve.
struct Chain {
    /// Segment in cover coordinates; linear torus maps act on it exactly.
    struct LinearSegment {
        Point a, b;
    };
    /// Arc [a,b] in arc-length coordinates on a circle.
    struct Arc {
        double a, b;
    };

    std::vector<Point> points;
    double eps_chain = 0.0;
    std::variant<LinearSegment, Arc> source;
};

struct RefinementOverflow : std::runtime_error {
    using std::runtime_error::runtime_error;
};

Chain make_segment_chain(const AmbientSpace& space, const Point& a, const Point& b,
                         double eps_chain);
Chain make_arc_chain(const AmbientSpace& space, double a, double b, double eps_chain);

/// Exact diameter of the represented continuum (capped at half the injectivity
/// radius on periodic spaces, which is above every threshold in use).
double chain_diameter(const AmbientSpace& space, const Chain& c);

/// Image chain under the map, re-sampled from the source parameterization so
/// consecutive gaps stay <= eps_chain. Point budget guards refinement.
Chain advance_chain(const SystemSpec& map, const AmbientSpace& space, const Chain& c,
                    Direction direction = Direction::Forward,
                    std::size_t point_budget = 1'000'000);

struct ExpansivityReport {
    std::string verdict;  // separated-at-horizon | counterexample | inconclusive
    double delta = 0.0;
    long horizon = 0;
    /// Signed first-separation iterate per sample (+forward / -backward),
    /// nullopt when the sample never separated within the horizon.
    std::vector<std::optional<long>> first_separation;
    std::vector<std::string> errors;  // per-sample, empty string when clean
    std::optional<std::size_t> witness;  // first non-separating sample
    std::vector<double> witness_diameters;  // diam at n = -horizon..horizon
};

/// Iterate each pair forward and backward up to the horizon looking for
/// separation beyond delta. Degenerate pairs are skipped.
ExpansivityReport check_expansive_pairs(const SystemSpec& map, const AmbientSpace& space,
                                        double delta, long horizon,
                                        const std::vector<PairState>& samples);

ExpansivityReport check_cw_expansive(const SystemSpec& map, const AmbientSpace& space, double delta,
                                     long horizon, const std::vector<Chain>& seeds);

struct HyperOpts {
    long horizon = 64;           // run truncation, iterates
    double anchor_spacing = 0.25;
    double collar = 0.4;         // complement sample diameters in delta*(1, 1+collar]
    double iso_tol = 1e-4;       // distance to F1 below which a state counts as diagonal
};

struct HyperAuditResult {
    LyapunovReport report;
    bool isolation_suspect = false;  // full orbit trapped in U off the diagonal
};

/// Lyapunov construction on the hyperspace neighborhood U = { diam < delta }
/// of the diagonal F1, with F1 collapsed to a point. States are pairs or
/// chains; the metric is the Hausdorff distance with the collapse shortcut
/// di(A,B) = min(dH(A,B), rad(A)+rad(B)).
class HyperLyapunov {
  public:
    HyperLyapunov(SystemSpec map, SpacePtr base_space, double delta, SizeConfig cfg,
                  HyperOpts opts = {});

    double value_pair(const PairState& A) const;
    double value_chain(const Chain& C) const;

    HyperAuditResult audit_pair(const PairState& A) const;
    HyperAuditResult audit_chain(const Chain& C) const;

    double delta() const { return delta_; }
    double strictness_tol() const;

  private:
    struct State {
        FinitePointSet pts;
        double radius = 0.0;  // distance to F1 (0 marks the collapsed token)
        std::optional<Chain> chain;
    };
    State pair_state(const PairState& A) const;
    State chain_state(const Chain& C) const;
    State advance_state(const State& s, Direction dir) const;
    double state_dist(const State& a, const State& b) const;
    std::vector<State> run_in_U(State s, Direction dir) const;
    double mu(const std::vector<const State*>& set) const;
    HyperAuditResult audit(const State& s) const;
    double value(const State& s) const;

    SystemSpec map_;
    SpacePtr space_;
    double delta_;
    SizeConfig cfg_;
    HyperOpts opts_;
    State token_;
    std::vector<State> qs_;
    std::vector<double> wts_;
    std::vector<State> wu_, ws_, comp_;
    double v_token_ = 0.0;
    double mesh_ = 0.0;
    double tail_ = 0.0;
};

/// V(A) for a two-point set, via the hyperspace construction; vanishes exactly
/// on the diagonal. Requires diam(A) < delta.
double lyap_pair(const HyperLyapunov& lyap, const AmbientSpace& space, const PairState& A);
double lyap_chain(const HyperLyapunov& lyap, const AmbientSpace& space, const Chain& C);

}  // namespace whitlyap
