#ifndef FAIRIPM_IPM_HPP
#define FAIRIPM_IPM_HPP

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace fairipm {

// Discrete univariate probability measure. Values are sorted ascending and
// tied values are merged by summing their weights, so equal measures compare
// equal representation-wise. Weights are strictly positive and sum to one.
class EmpiricalSample {
 public:
  // Uniform weights over the given points.
  explicit EmpiricalSample(std::vector<double> values);
  // Explicit weights; they are normalized by their sum, which must be positive.
  EmpiricalSample(std::vector<double> values, std::vector<double> weights);

  const std::vector<double>& values() const { return values_; }
  const std::vector<double>& weights() const { return weights_; }
  size_t support_size() const { return values_.size(); }

  // Sorted raw points including duplicates (pre-merge). Only meaningful for
  // uniformly weighted samples, where it carries the multiplicities.
  const std::vector<double>& raw_values() const { return raw_values_; }
  bool uniform_weights() const { return uniform_; }

  // Right-continuous empirical CDF, F(x) = P[Z <= x].
  double cdf(double x) const;

 private:
  void finalize(std::vector<double> values, std::vector<double> weights);
  std::vector<double> values_;
  std::vector<double> weights_;
  std::vector<double> raw_values_;
  bool uniform_ = true;
};

struct KernelSpec {
  enum class Kind { distance_induced, gaussian };
  Kind kind = Kind::distance_induced;
  double anchor = 0.0;     // distance_induced only
  double bandwidth = 1.0;  // gaussian only, > 0

  static KernelSpec distance_induced(double anchor = 0.0) {
    return KernelSpec{Kind::distance_induced, anchor, 1.0};
  }
  static KernelSpec gaussian(double bandwidth);
};

double kernel_eval(const KernelSpec& kernel, double u, double v);
// Partial derivative of the kernel in its first argument. Kink points of the
// distance-induced kernel use the subgradient value 0.
double kernel_partial_u(const KernelSpec& kernel, double u, double v);

enum class Lp { l1, l2, linf };

double kolmogorov(const EmpiricalSample& a, const EmpiricalSample& b);
double lp_distance(const EmpiricalSample& a, const EmpiricalSample& b, Lp p);
double wasserstein1(const EmpiricalSample& a, const EmpiricalSample& b);
double energy_distance(const EmpiricalSample& a, const EmpiricalSample& b);
double mmd(const EmpiricalSample& a, const EmpiricalSample& b, const KernelSpec& kernel);
double total_variation(const EmpiricalSample& a, const EmpiricalSample& b);

// Brute-force duals used to cross-check the closed-form routines above.
// total variation as a sup over all subsets of the merged support (<= 16
// points), and the Kolmogorov distance as a sup over step test functions.
double tv_dual_bruteforce(const EmpiricalSample& a, const EmpiricalSample& b);
double kolmogorov_dual_check(const EmpiricalSample& a, const EmpiricalSample& b);

enum class Metric { kolmogorov, l1, l2, wasserstein1, energy, total_variation, mmd };

double distance(const EmpiricalSample& a, const EmpiricalSample& b, Metric metric,
                const KernelSpec& kernel = KernelSpec::distance_induced());

Metric metric_from_name(const std::string& name);
std::string metric_name(Metric metric);

}  // namespace fairipm

#endif
