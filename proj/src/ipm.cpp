#include "fairipm/ipm.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "fairipm/errors.hpp"

namespace fairipm {

namespace {

// Walks the union of the two supports once, exposing both CDFs at every
// breakpoint. visit(z, fa, fb, gap) is called per merged point, where gap is
// the distance to the next merged point (0 after the last one).
template <typename Visitor>
void walk_merged_cdfs(const EmpiricalSample& a, const EmpiricalSample& b, Visitor&& visit) {
  const auto& av = a.values();
  const auto& bv = b.values();
  size_t i = 0, j = 0;
  double fa = 0.0, fb = 0.0;
  while (i < av.size() || j < bv.size()) {
    double z;
    if (j == bv.size() || (i < av.size() && av[i] <= bv[j])) {
      z = av[i];
    } else {
      z = bv[j];
    }
    while (i < av.size() && av[i] == z) fa += a.weights()[i++];
    while (j < bv.size() && bv[j] == z) fb += b.weights()[j++];
    double next = z;
    if (i < av.size()) next = av[i];
    if (j < bv.size() && (i == av.size() || bv[j] < next)) next = bv[j];
    visit(z, fa, fb, next - z);
  }
}

// Merged support with the two probability mass functions aligned on it.
struct MergedPmf {
  std::vector<double> support;
  std::vector<double> pa;
  std::vector<double> pb;
};

MergedPmf merge_pmfs(const EmpiricalSample& a, const EmpiricalSample& b) {
  MergedPmf out;
  const auto& av = a.values();
  const auto& bv = b.values();
  size_t i = 0, j = 0;
  while (i < av.size() || j < bv.size()) {
    double z;
    if (j == bv.size() || (i < av.size() && av[i] <= bv[j])) {
      z = av[i];
    } else {
      z = bv[j];
    }
    double wa = 0.0, wb = 0.0;
    while (i < av.size() && av[i] == z) wa += a.weights()[i++];
    while (j < bv.size() && bv[j] == z) wb += b.weights()[j++];
    out.support.push_back(z);
    out.pa.push_back(wa);
    out.pb.push_back(wb);
  }
  return out;
}

double mean_abs_cross(const EmpiricalSample& a, const EmpiricalSample& b) {
  double total = 0.0;
  for (size_t i = 0; i < a.support_size(); ++i) {
    for (size_t j = 0; j < b.support_size(); ++j) {
      total += a.weights()[i] * b.weights()[j] * std::abs(a.values()[i] - b.values()[j]);
    }
  }
  return total;
}

double kernel_double_sum(const EmpiricalSample& a, const EmpiricalSample& b,
                         const KernelSpec& kernel) {
  double total = 0.0;
  for (size_t i = 0; i < a.support_size(); ++i) {
    for (size_t j = 0; j < b.support_size(); ++j) {
      total += a.weights()[i] * b.weights()[j] *
               kernel_eval(kernel, a.values()[i], b.values()[j]);
    }
  }
  return total;
}

}  // namespace

EmpiricalSample::EmpiricalSample(std::vector<double> values) {
  std::vector<double> weights;
  if (!values.empty()) weights.assign(values.size(), 1.0 / static_cast<double>(values.size()));
  uniform_ = true;
  finalize(std::move(values), std::move(weights));
}

EmpiricalSample::EmpiricalSample(std::vector<double> values, std::vector<double> weights) {
  if (values.size() != weights.size())
    throw std::invalid_argument("sample: values and weights must have equal length");
  uniform_ = false;
  finalize(std::move(values), std::move(weights));
}

void EmpiricalSample::finalize(std::vector<double> values, std::vector<double> weights) {
  if (values.empty()) throw std::invalid_argument("sample: at least one value is required");
  for (double v : values) {
    if (!std::isfinite(v)) throw std::invalid_argument("sample: values must be finite");
  }
  double total = 0.0;
  for (double w : weights) {
    if (!(w > 0.0) || !std::isfinite(w))
      throw std::invalid_argument("sample: weights must be strictly positive");
    total += w;
  }
  if (!(total > 0.0)) throw std::invalid_argument("sample: weight total must be positive");

  std::vector<size_t> order(values.size());
  std::iota(order.begin(), order.end(), size_t{0});
  std::sort(order.begin(), order.end(),
            [&](size_t l, size_t r) { return values[l] < values[r]; });

  raw_values_.reserve(values.size());
  for (size_t k : order) raw_values_.push_back(values[k]);

  values_.clear();
  weights_.clear();
  for (size_t k : order) {
    const double v = values[k];
    const double w = weights[k] / total;
    if (!values_.empty() && values_.back() == v) {
      weights_.back() += w;  // merge ties
    } else {
      values_.push_back(v);
      weights_.push_back(w);
    }
  }
}

double EmpiricalSample::cdf(double x) const {
  double f = 0.0;
  for (size_t i = 0; i < values_.size() && values_[i] <= x; ++i) f += weights_[i];
  return f;
}

KernelSpec KernelSpec::gaussian(double bandwidth) {
  if (!(bandwidth > 0.0)) throw std::invalid_argument("kernel: bandwidth must be positive");
  return KernelSpec{Kind::gaussian, 0.0, bandwidth};
}

double kernel_eval(const KernelSpec& kernel, double u, double v) {
  switch (kernel.kind) {
    case KernelSpec::Kind::distance_induced:
      return 0.5 * (std::abs(u - kernel.anchor) + std::abs(v - kernel.anchor) - std::abs(u - v));
    case KernelSpec::Kind::gaussian: {
      const double d = u - v;
      return std::exp(-d * d / (2.0 * kernel.bandwidth * kernel.bandwidth));
    }
  }
  throw std::invalid_argument("kernel: unknown kind");
}

double kernel_partial_u(const KernelSpec& kernel, double u, double v) {
  auto sgn = [](double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); };
  switch (kernel.kind) {
    case KernelSpec::Kind::distance_induced:
      return 0.5 * (sgn(u - kernel.anchor) - sgn(u - v));
    case KernelSpec::Kind::gaussian: {
      const double d = u - v;
      const double s2 = kernel.bandwidth * kernel.bandwidth;
      return -(d / s2) * std::exp(-d * d / (2.0 * s2));
    }
  }
  throw std::invalid_argument("kernel: unknown kind");
}

double kolmogorov(const EmpiricalSample& a, const EmpiricalSample& b) {
  // Both CDFs are right-continuous step functions, so the sup is attained at
  // a support point evaluated from the right.
  double sup = 0.0;
  walk_merged_cdfs(a, b, [&](double, double fa, double fb, double) {
    sup = std::max(sup, std::abs(fa - fb));
  });
  return sup;
}

double lp_distance(const EmpiricalSample& a, const EmpiricalSample& b, Lp p) {
  if (p == Lp::linf) return kolmogorov(a, b);
  double integral = 0.0;
  walk_merged_cdfs(a, b, [&](double, double fa, double fb, double gap) {
    const double d = std::abs(fa - fb);
    integral += (p == Lp::l1 ? d : d * d) * gap;
  });
  return p == Lp::l1 ? integral : std::sqrt(integral);
}

double wasserstein1(const EmpiricalSample& a, const EmpiricalSample& b) {
  // Sorted matching for equally sized uniform samples; the CDF integral
  // otherwise. The two routes agree (Salvemini identity).
  if (a.uniform_weights() && b.uniform_weights() &&
      a.raw_values().size() == b.raw_values().size()) {
    const size_t n = a.raw_values().size();
    double total = 0.0;
    for (size_t i = 0; i < n; ++i) total += std::abs(a.raw_values()[i] - b.raw_values()[i]);
    return total / static_cast<double>(n);
  }
  return lp_distance(a, b, Lp::l1);
}

double energy_distance(const EmpiricalSample& a, const EmpiricalSample& b) {
  return 2.0 * mean_abs_cross(a, b) - mean_abs_cross(a, a) - mean_abs_cross(b, b);
}

double mmd(const EmpiricalSample& a, const EmpiricalSample& b, const KernelSpec& kernel) {
  const double squared = kernel_double_sum(a, a, kernel) + kernel_double_sum(b, b, kernel) -
                         2.0 * kernel_double_sum(a, b, kernel);
  if (squared < -1e-12)
    throw NumericError("mmd: squared form is negative beyond round-off");
  return squared > 0.0 ? std::sqrt(squared) : 0.0;
}

double total_variation(const EmpiricalSample& a, const EmpiricalSample& b) {
  const MergedPmf merged = merge_pmfs(a, b);
  double l1 = 0.0;
  for (size_t i = 0; i < merged.support.size(); ++i) l1 += std::abs(merged.pa[i] - merged.pb[i]);
  return 0.5 * l1;
}

double tv_dual_bruteforce(const EmpiricalSample& a, const EmpiricalSample& b) {
  const MergedPmf merged = merge_pmfs(a, b);
  const size_t m = merged.support.size();
  if (m > 16) throw std::invalid_argument("tv_dual_bruteforce: merged support exceeds 16 points");
  double sup = 0.0;
  for (uint32_t mask = 0; mask < (uint32_t{1} << m); ++mask) {
    double qa = 0.0, qb = 0.0;
    for (size_t i = 0; i < m; ++i) {
      if (mask & (uint32_t{1} << i)) {
        qa += merged.pa[i];
        qb += merged.pb[i];
      }
    }
    sup = std::max(sup, std::abs(qa - qb));
  }
  return sup;
}

double kolmogorov_dual_check(const EmpiricalSample& a, const EmpiricalSample& b) {
  // Test functions are the steps psi(z) = 1{z <= tau} with tau ranging over
  // the merged support; E[psi] is evaluated directly from each measure.
  const MergedPmf merged = merge_pmfs(a, b);
  double sup = 0.0;
  for (double tau : merged.support) {
    double ea = 0.0, eb = 0.0;
    for (size_t i = 0; i < a.support_size(); ++i)
      if (a.values()[i] <= tau) ea += a.weights()[i];
    for (size_t i = 0; i < b.support_size(); ++i)
      if (b.values()[i] <= tau) eb += b.weights()[i];
    sup = std::max(sup, std::abs(ea - eb));
  }
  return sup;
}

double distance(const EmpiricalSample& a, const EmpiricalSample& b, Metric metric,
                const KernelSpec& kernel) {
  switch (metric) {
    case Metric::kolmogorov: return kolmogorov(a, b);
    case Metric::l1: return lp_distance(a, b, Lp::l1);
    case Metric::l2: return lp_distance(a, b, Lp::l2);
    case Metric::wasserstein1: return wasserstein1(a, b);
    case Metric::energy: return energy_distance(a, b);
    case Metric::total_variation: return total_variation(a, b);
    case Metric::mmd: return mmd(a, b, kernel);
  }
  throw std::invalid_argument("distance: unknown metric");
}

Metric metric_from_name(const std::string& name) {
  if (name == "kolmogorov") return Metric::kolmogorov;
  if (name == "l1") return Metric::l1;
  if (name == "l2") return Metric::l2;
  if (name == "w1" || name == "wasserstein1") return Metric::wasserstein1;
  if (name == "energy") return Metric::energy;
  if (name == "tv" || name == "total_variation") return Metric::total_variation;
  if (name == "mmd") return Metric::mmd;
  throw std::invalid_argument("unknown metric: " + name);
}

std::string metric_name(Metric metric) {
  switch (metric) {
    case Metric::kolmogorov: return "kolmogorov";
    case Metric::l1: return "l1";
    case Metric::l2: return "l2";
    case Metric::wasserstein1: return "w1";
    case Metric::energy: return "energy";
    case Metric::total_variation: return "tv";
    case Metric::mmd: return "mmd";
  }
  return "?";
}

}  // namespace fairipm
