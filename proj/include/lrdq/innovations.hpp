#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <memory>
#include <random>
#include <stdexcept>

namespace lrdq {

class MarginalModel;  // innovations with Pareto law sample through its quantile

struct InnovationSpec {
  enum class Law { StandardNormal, DoubleExponential, SmoothedSymmetricPareto };
  Law law = Law::StandardNormal;
  double pareto_alpha = 5.0;      // tail index; needs alpha > 4 for fourth moments
  double pareto_smoothing = 0.5;  // bridge half-width around the origin
  bool unit_variance = true;

  void validate() const {
    if (law == Law::SmoothedSymmetricPareto && !(pareto_alpha > 4.0))
      throw std::invalid_argument(
          "InnovationSpec: smoothed symmetric Pareto needs alpha > 4 (fourth moments)");
  }
};

// Stateful sampler for one stream of i.i.d. centered innovations.
class InnovationSampler {
 public:
  InnovationSampler(const InnovationSpec& spec, std::mt19937_64 engine);
  double operator()();
  void fill(Eigen::VectorXd& out);

 private:
  InnovationSpec spec_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> unif_{0.0, 1.0};
  double sd_ = 1.0;  // pre-scaling standard deviation of the chosen law
  std::shared_ptr<const MarginalModel> pareto_;  // only for the Pareto law
};

}  // namespace lrdq
