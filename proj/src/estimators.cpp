#include "fairipm/estimators.hpp"

#include <stdexcept>

#include "fairipm/batching.hpp"

namespace fairipm {

namespace {

double within_class_pair_mean(std::span<const double> scores, const KernelSpec& kernel) {
  const size_t n = scores.size();
  double total = 0.0;
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      total += kernel_eval(kernel, scores[i], scores[j]);
    }
  }
  return total / (static_cast<double>(n) * static_cast<double>(n - 1));
}

double cross_class_mean(std::span<const double> a, std::span<const double> b,
                        const KernelSpec& kernel) {
  double total = 0.0;
  for (double u : a) {
    for (double v : b) total += kernel_eval(kernel, u, v);
  }
  return total / (static_cast<double>(a.size()) * static_cast<double>(b.size()));
}

}  // namespace

double u_stat_mmd(const BatchOutputs& out, const KernelSpec& kernel) {
  if (out.scores0.size() < 2 || out.scores1.size() < 2)
    throw std::invalid_argument("u_stat_mmd: needs at least two scores per class");
  return within_class_pair_mean(out.scores0, kernel) +
         within_class_pair_mean(out.scores1, kernel) -
         2.0 * cross_class_mean(out.scores0, out.scores1, kernel);
}

double corrected_loss(const BatchOutputs& out) {
  if (out.scores0.size() != out.losses0.size() || out.scores1.size() != out.losses1.size())
    throw std::invalid_argument("corrected_loss: scores and losses must align per class");
  if (out.losses0.size() < 2 || out.losses1.size() < 2)
    throw std::invalid_argument("corrected_loss: needs at least two samples per class");

  const size_t total = out.total();
  double sum = 0.0;
  double class_sum = 0.0;
  for (double l : out.losses0) class_sum += l;
  sum += delta_correction(total, out.losses0.size(), out.target_size) * class_sum;
  class_sum = 0.0;
  for (double l : out.losses1) class_sum += l;
  sum += delta_correction(total, out.losses1.size(), out.target_size) * class_sum;
  return sum / static_cast<double>(total);
}

double objective_estimate(const BatchOutputs& out, double lambda, const KernelSpec& kernel) {
  if (lambda < 0.0) throw std::invalid_argument("objective_estimate: lambda must be nonnegative");
  return corrected_loss(out) + lambda * u_stat_mmd(out, kernel);
}

double naive_penalty(std::span<const double> scores0, std::span<const double> scores1,
                     Metric metric, const RhoSpec& rho, const KernelSpec& kernel) {
  if (scores0.empty() || scores1.empty())
    throw std::invalid_argument("naive_penalty: needs at least one score per class");
  const EmpiricalSample p0(std::vector<double>(scores0.begin(), scores0.end()));
  const EmpiricalSample p1(std::vector<double>(scores1.begin(), scores1.end()));
  return rho(distance(p0, p1, metric, kernel));
}

}  // namespace fairipm
