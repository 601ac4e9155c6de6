#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "lrdq/coefficients.hpp"
#include "lrdq/innovations.hpp"

namespace lrdq {

// One simulated trajectory X_1..X_n of the truncated linear process
// X_i = sum_{k=0}^{K} c_k eps_{i-k}, together with its innovation record.
// Immutable after construction; regenerating from (seed, specs, n, K)
// reproduces the path bit-identically.
struct LrdPath {
  Eigen::VectorXd x;            // X_1..X_n
  Eigen::VectorXd innovations;  // eps_{1-K}..eps_n, length n+K
  Eigen::VectorXd coeffs;       // c_0..c_K as realized (after normalization)
  CoefficientSpec spec;
  InnovationSpec innovation_spec;
  std::uint64_t seed = 0;
  std::uint64_t K = 0;

  Eigen::Index n() const { return x.size(); }
};

// Largest n+K the generator will materialize (doubles); beyond it the
// sampler throws instead of exhausting memory.
inline constexpr std::uint64_t kPathBudget = 1ULL << 26;

// Draw n+K innovations from the stream derived from `seed` and convolve
// with the truncated coefficients (FFT-based). K defaults to the
// spec-driven truncation index; callers with a runtime budget pass their
// own cap explicitly.
LrdPath sample_path(const CoefficientSpec& spec, const InnovationSpec& innovation_spec,
                    Eigen::Index n, std::uint64_t seed, std::uint64_t K);

LrdPath sample_path(const CoefficientSpec& spec, const InnovationSpec& innovation_spec,
                    Eigen::Index n, std::uint64_t seed);

// Multilinear partial sum Y_{n,r} for r in {0,1,2}. Y_{n,2} uses the
// identity term_i = (X_i^2 - W_i)/2 with W_i = sum_j c_j^2 eps^2_{i-j}.
double partial_sum_y(const LrdPath& path, int r);

}  // namespace lrdq
