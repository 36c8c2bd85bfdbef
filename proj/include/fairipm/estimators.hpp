#ifndef FAIRIPM_ESTIMATORS_HPP
#define FAIRIPM_ESTIMATORS_HPP

#include <cstddef>
#include <span>
#include <vector>

#include "fairipm/ipm.hpp"

namespace fairipm {

// Per-batch model outputs split by protected class. scores are h(X) at the
// batch points, losses the matching L(h(X), Y) values.
struct BatchOutputs {
  std::vector<double> scores0;
  std::vector<double> scores1;
  std::vector<double> losses0;
  std::vector<double> losses1;
  size_t target_size = 4;  // the batch law's Nbar

  size_t total() const { return scores0.size() + scores1.size(); }
};

// Unbiased estimator of the squared MMD between the group-conditional score
// distributions: within-class sums over ordered pairs without repetition
// minus twice the cross-class mean. May be negative; clamping would
// reintroduce the bias this construction removes.
double u_stat_mmd(const BatchOutputs& out, const KernelSpec& kernel);

// Bias-corrected prediction loss (1/N) sum_a Delta(N, n_a) sum_{i in a} L_i.
double corrected_loss(const BatchOutputs& out);

// corrected_loss + lambda * u_stat_mmd.
double objective_estimate(const BatchOutputs& out, double lambda, const KernelSpec& kernel);

// rho(z) = coefficient * z (linear) or coefficient * z^2 (squared).
struct RhoSpec {
  enum class Kind { linear, squared };
  Kind kind = Kind::squared;
  double coefficient = 1.0;

  double operator()(double z) const {
    return kind == Kind::linear ? coefficient * z : coefficient * z * z;
  }
};

// The plain plug-in penalty rho(D(P0_hat, P1_hat)) on the uniform empirical
// score measures. Biased for the population penalty; kept for comparison
// experiments.
double naive_penalty(std::span<const double> scores0, std::span<const double> scores1,
                     Metric metric, const RhoSpec& rho,
                     const KernelSpec& kernel = KernelSpec::distance_induced());

}  // namespace fairipm

#endif
