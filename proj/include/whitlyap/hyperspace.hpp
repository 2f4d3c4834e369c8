#pragma once

#include "whitlyap/metric.hpp"

namespace whitlyap {

class SystemSpec;

/// Truncation setup for the size-function series. The reported tail bound
/// is diameter_upper / 2^depth.
struct SizeConfig {
    int depth = 64;
    DenseSeqPtr seq;

    double tail_bound() const;
};

struct SizeValue {
    double value = 0.0;
    double tail_bound = 0.0;
};

/// max(sup_{a in A} d(a,B), sup_{b in B} d(b,A)) over the sampled sets.
double hausdorff_distance(const AmbientSpace& space, const FinitePointSet& A,
                          const FinitePointSet& B);

/// Single series term: max-minus-min of distances from q to A.
double size_component(const AmbientSpace& space, const FinitePointSet& A, const Point& q);

/// Truncated Whitney size  sum_{i=1..N} size_component(A, q_i) / 2^i.
SizeValue whitney_size(const AmbientSpace& space, const FinitePointSet& A, const SizeConfig& cfg);

/// Sign of mu(A) - mu(B) evaluated in extended precision, for flat-torus
/// dyadic grids (all coordinates multiples of period/2^k). On such grids the
/// squared distances are exact in double and the series can be compared down
/// to its last term, so proper inclusions order strictly at any depth.
int whitney_compare_grid(const AmbientSpace& space, const FinitePointSet& A,
                         const FinitePointSet& B, const SizeConfig& cfg);

/// Pointwise image f'(A) = { f(x) : x in A } under a map system.
FinitePointSet induced_image(const SystemSpec& f, const FinitePointSet& A);

}  // namespace whitlyap
