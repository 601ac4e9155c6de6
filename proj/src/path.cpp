#include "lrdq/path.hpp"

#include <stdexcept>

#include "lrdq/convolution.hpp"
#include "lrdq/rng.hpp"

namespace lrdq {

LrdPath sample_path(const CoefficientSpec& spec, const InnovationSpec& innovation_spec,
                    Eigen::Index n, std::uint64_t seed, std::uint64_t K) {
  spec.validate();
  innovation_spec.validate();
  if (n < 1) throw std::invalid_argument("sample_path: n must be >= 1");
  if (static_cast<std::uint64_t>(n) + K + 1 > kPathBudget)
    throw std::runtime_error("sample_path: n+K = " + std::to_string(n + K) +
                             " exceeds the memory budget of " + std::to_string(kPathBudget));

  LrdPath path;
  path.spec = spec;
  path.innovation_spec = innovation_spec;
  path.seed = seed;
  path.K = K;
  path.coeffs = make_coefficients(spec, K);

  path.innovations.resize(n + static_cast<Eigen::Index>(K));
  InnovationSampler sampler(innovation_spec, make_stream(seed, 0));
  sampler.fill(path.innovations);

  // innovations[t] holds eps_{t+1-K}; X_i = conv(c, eps)[i + K - 1].
  Eigen::VectorXd conv = fft_convolve(path.coeffs, path.innovations);
  path.x = conv.segment(static_cast<Eigen::Index>(K), n);
  return path;
}

LrdPath sample_path(const CoefficientSpec& spec, const InnovationSpec& innovation_spec,
                    Eigen::Index n, std::uint64_t seed) {
  return sample_path(spec, innovation_spec, n, seed, tail_truncation_index(spec));
}

double partial_sum_y(const LrdPath& path, int r) {
  if (r < 0 || r > 2) throw std::invalid_argument("partial_sum_y: order r must be 0, 1 or 2");
  if (r == 0) return static_cast<double>(path.n());
  if (r == 1) return path.x.sum();

  // W_i = sum_j c_j^2 eps^2_{i-j}, same alignment as the path convolution.
  Eigen::VectorXd c2 = path.coeffs.array().square();
  Eigen::VectorXd e2 = path.innovations.array().square();
  Eigen::VectorXd conv = fft_convolve(c2, e2);
  Eigen::VectorXd w = conv.segment(static_cast<Eigen::Index>(path.K), path.n());
  return 0.5 * (path.x.array().square() - w.array()).sum();
}

}  // namespace lrdq
