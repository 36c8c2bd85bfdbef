#include "fairipm/batching.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "fairipm/errors.hpp"

namespace fairipm {

namespace {

void check_law_arguments(double pa, size_t target_size) {
  if (target_size < 4)
    throw std::invalid_argument("batch law: target size must be at least 4");
  if (!(pa > 0.0) || !(pa < 1.0))
    throw std::invalid_argument("batch law: class probability must lie in (0, 1)");
}

double binomial_coefficient(size_t n, size_t k) {
  if (k > n) return 0.0;
  k = std::min(k, n - k);
  double result = 1.0;
  for (size_t i = 1; i <= k; ++i)
    result = result * static_cast<double>(n - k + i) / static_cast<double>(i);
  return result;
}

}  // namespace

OnlineBatcher::OnlineBatcher(size_t target_size) : target_size_(target_size) {
  // A batch of exactly target_size must be able to hold two of each class.
  if (target_size < 4)
    throw std::invalid_argument("online batcher: target size must be at least 4");
}

Batch OnlineBatcher::next_batch(PointStream& stream, std::vector<LabeledPoint>* sink) {
  Batch batch;
  const size_t sink_base = sink ? sink->size() : 0;
  auto pull = [&]() {
    std::optional<LabeledPoint> point = stream.next();
    if (!point) {
      if (sink) sink->resize(sink_base);  // discard the partial batch
      throw StreamExhausted("online batcher: stream ended after " +
                                std::to_string(batch.total()) +
                                " samples of an incomplete batch",
                            batch.total());
    }
    const size_t index = cursor_++;
    batch.indices.push_back(index);
    (point->group == 0 ? batch.group0 : batch.group1).push_back(index);
    if (sink) sink->push_back(std::move(*point));
  };

  for (size_t i = 0; i < target_size_; ++i) pull();
  // At most one class can be short here since target_size >= 4; extend until
  // it has exactly two representatives.
  while (batch.count0() < 2 || batch.count1() < 2) pull();
  return batch;
}

OfflineBatcher::OfflineBatcher(size_t count0, size_t count1, size_t target_size, uint64_t seed)
    : rng_(seed) {
  if (target_size < 4)
    throw std::invalid_argument("offline batcher: target size must be at least 4");
  if (count0 < 2 || count1 < 2)
    throw std::invalid_argument("offline batcher: each class needs at least 2 samples");

  const double p0 = static_cast<double>(count0) / static_cast<double>(count0 + count1);
  size_t want0 = static_cast<size_t>(std::ceil(p0 * static_cast<double>(target_size)));
  if (want0 < 2) {
    want0 = 2;
    clamped_ = true;
  }
  if (want0 > target_size - 2) {
    want0 = target_size - 2;
    clamped_ = true;
  }
  want0_ = want0;
  want1_ = target_size - want0;

  pool0_.resize(count0);
  pool1_.resize(count1);
  std::iota(pool0_.begin(), pool0_.end(), size_t{0});
  std::iota(pool1_.begin(), pool1_.end(), count0);
  rng_.shuffle(std::span<size_t>(pool0_));
  rng_.shuffle(std::span<size_t>(pool1_));
}

size_t OfflineBatcher::draw_from_pool(std::vector<size_t>& pool, size_t& pos, Rng& rng) {
  if (pos == pool.size()) {
    rng.shuffle(std::span<size_t>(pool));
    pos = 0;
  }
  return pool[pos++];
}

Batch OfflineBatcher::next_batch() {
  Batch batch;
  for (size_t i = 0; i < want0_; ++i) {
    const size_t idx = draw_from_pool(pool0_, pos0_, rng_);
    batch.indices.push_back(idx);
    batch.group0.push_back(idx);
  }
  for (size_t i = 0; i < want1_; ++i) {
    const size_t idx = draw_from_pool(pool1_, pos1_, rng_);
    batch.indices.push_back(idx);
    batch.group1.push_back(idx);
  }
  return batch;
}

double batch_pmf(size_t total, size_t class_count, double pa, size_t target_size) {
  check_law_arguments(pa, target_size);
  if (total < target_size)
    throw std::invalid_argument("batch law: total size below target size");
  if (class_count > total)
    throw std::invalid_argument("batch law: class count exceeds total");

  const double qa = 1.0 - pa;
  const size_t n = class_count;
  if (total == target_size) {
    if (n < 2 || n > total - 2) return 0.0;
    return binomial_coefficient(total, n) * std::pow(pa, static_cast<double>(n)) *
           std::pow(qa, static_cast<double>(total - n));
  }
  const double factor = static_cast<double>(total - 1);
  if (n == 2)
    return factor * pa * pa * std::pow(qa, static_cast<double>(total - 2));
  if (n == total - 2)
    return factor * std::pow(pa, static_cast<double>(total - 2)) * qa * qa;
  return 0.0;
}

double delta_correction(size_t total, size_t class_count, size_t target_size) {
  if (target_size < 4)
    throw std::invalid_argument("delta correction: target size must be at least 4");
  if (total < target_size)
    throw std::invalid_argument("delta correction: total size below target size");
  if (class_count > total)
    throw std::invalid_argument("delta correction: class count exceeds total");

  if (total == target_size) return 1.0;
  const double n_over = static_cast<double>(total) / static_cast<double>(total - 1);
  if (class_count == 2) return 0.5 * n_over;
  if (class_count == total - 2) return n_over;
  return 0.0;
}

double beta_bias(double pa, size_t target_size) {
  check_law_arguments(pa, target_size);
  const double qa = 1.0 - pa;
  const double nbar = static_cast<double>(target_size);

  // Finite power sums sum_{N=1}^{Nbar} x^N / N.
  auto power_sum = [target_size](double x) {
    double sum = 0.0;
    double xn = 1.0;
    for (size_t n = 1; n <= target_size; ++n) {
      xn *= x;
      sum += xn / static_cast<double>(n);
    }
    return sum;
  };

  return std::pow(qa, nbar - 1.0) - qa * std::pow(pa, nbar - 2.0) +
         (2.0 * pa / (qa * qa)) * (std::log(pa) + power_sum(qa)) -
         (2.0 * qa * qa / (pa * pa * pa)) * (std::log(qa) + power_sum(pa));
}

double expected_ratio(double pa, size_t target_size) {
  return pa * (1.0 + beta_bias(pa, target_size));
}

}  // namespace fairipm
