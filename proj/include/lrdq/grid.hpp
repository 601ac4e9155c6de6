#pragma once

#include <Eigen/Dense>
#include <cstdint>

namespace lrdq {

// Evaluation grids on the open unit interval.  Weighted sup-norm statistics
// over (0,1) need points that crowd the endpoints, since the weight functions
// (y(1-y))^kappa blow up there; a plain uniform grid badly under-samples the
// region where the supremum is typically attained.
struct YGrid {
  Eigen::VectorXd points;  // strictly increasing, all in (0,1)

  // m equally spaced interior points i/(m+1), i = 1..m.
  static YGrid uniform(int m);

  // Uniform interior points plus dyadic refinements 2^-j and 1 - 2^-j for
  // j = 2..j_max near each endpoint.  Duplicates are removed.
  static YGrid tail_refined(int m, int j_max = 16);

  // Grid merged with the jump locations i/n (i = 1..n-1) of an empirical CDF
  // and their left limits; sup over the merged grid is exact for piecewise
  // constant/linear functionals of a sample of size n.
  YGrid merged_with_sample_points(std::int64_t n) const;

  Eigen::Index size() const { return points.size(); }
};

}  // namespace lrdq
