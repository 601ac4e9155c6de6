#include "lrdq/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace lrdq {

namespace {

YGrid from_sorted_unique(std::vector<double> pts) {
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  // keep strictly inside (0,1)
  std::vector<double> interior;
  interior.reserve(pts.size());
  for (double y : pts)
    if (y > 0.0 && y < 1.0) interior.push_back(y);
  YGrid g;
  g.points = Eigen::Map<const Eigen::VectorXd>(interior.data(),
                                               static_cast<Eigen::Index>(interior.size()));
  return g;
}

}  // namespace

YGrid YGrid::uniform(int m) {
  if (m < 1) throw std::invalid_argument("YGrid::uniform: m must be >= 1");
  YGrid g;
  g.points = Eigen::VectorXd::LinSpaced(m, 1.0 / (m + 1.0), m / (m + 1.0));
  return g;
}

YGrid YGrid::tail_refined(int m, int j_max) {
  if (m < 1) throw std::invalid_argument("YGrid::tail_refined: m must be >= 1");
  if (j_max < 2) throw std::invalid_argument("YGrid::tail_refined: j_max must be >= 2");
  std::vector<double> pts;
  pts.reserve(static_cast<std::size_t>(m) + 2 * static_cast<std::size_t>(j_max));
  for (int i = 1; i <= m; ++i) pts.push_back(i / (m + 1.0));
  for (int j = 2; j <= j_max; ++j) {
    const double q = std::ldexp(1.0, -j);
    pts.push_back(q);
    pts.push_back(1.0 - q);
  }
  return from_sorted_unique(std::move(pts));
}

YGrid YGrid::merged_with_sample_points(std::int64_t n) const {
  if (n < 2) throw std::invalid_argument("merged_with_sample_points: n must be >= 2");
  std::vector<double> pts(points.data(), points.data() + points.size());
  pts.reserve(pts.size() + 2 * static_cast<std::size_t>(n));
  for (std::int64_t i = 1; i < n; ++i) {
    const double y = static_cast<double>(i) / static_cast<double>(n);
    pts.push_back(y);
    // just below the jump of the empirical CDF / just before the quantile step
    pts.push_back(std::nextafter(y, 0.0));
  }
  return from_sorted_unique(std::move(pts));
}

}  // namespace lrdq
