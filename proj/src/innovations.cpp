#include "lrdq/innovations.hpp"

#include <cmath>

#include "lrdq/marginals.hpp"

namespace lrdq {

InnovationSampler::InnovationSampler(const InnovationSpec& spec, std::mt19937_64 engine)
    : spec_(spec), engine_(engine) {
  spec_.validate();
  switch (spec_.law) {
    case InnovationSpec::Law::StandardNormal:
      sd_ = 1.0;
      break;
    case InnovationSpec::Law::DoubleExponential:
      sd_ = std::sqrt(2.0);  // Laplace with unit scale parameter
      break;
    case InnovationSpec::Law::SmoothedSymmetricPareto:
      pareto_ = smoothed_symmetric_pareto_marginal(spec_.pareto_alpha, spec_.pareto_smoothing);
      sd_ = std::sqrt(smoothed_pareto_variance(spec_.pareto_alpha, spec_.pareto_smoothing));
      break;
  }
}

double InnovationSampler::operator()() {
  double v = 0.0;
  switch (spec_.law) {
    case InnovationSpec::Law::StandardNormal:
      v = normal_(engine_);
      break;
    case InnovationSpec::Law::DoubleExponential: {
      // inverse CDF of the unit-scale Laplace law
      double u = unif_(engine_);
      v = u < 0.5 ? std::log(2.0 * u) : -std::log(2.0 * (1.0 - u));
      break;
    }
    case InnovationSpec::Law::SmoothedSymmetricPareto: {
      double u = unif_(engine_);
      while (u <= 0.0 || u >= 1.0) u = unif_(engine_);
      v = pareto_->quantile(u);
      break;
    }
  }
  return spec_.unit_variance ? v / sd_ : v;
}

void InnovationSampler::fill(Eigen::VectorXd& out) {
  for (Eigen::Index i = 0; i < out.size(); ++i) out[i] = (*this)();
}

}  // namespace lrdq
