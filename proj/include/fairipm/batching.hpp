#ifndef FAIRIPM_BATCHING_HPP
#define FAIRIPM_BATCHING_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "fairipm/rng.hpp"

namespace fairipm {

struct LabeledPoint {
  std::vector<double> features;
  double target = 0.0;
  int group = 0;  // protected class, 0 or 1
};

// One training batch: stream/dataset positions partitioned by protected class.
struct Batch {
  std::vector<size_t> indices;
  std::vector<size_t> group0;
  std::vector<size_t> group1;

  size_t total() const { return indices.size(); }
  size_t count0() const { return group0.size(); }
  size_t count1() const { return group1.size(); }
  size_t count(int a) const { return a == 0 ? count0() : count1(); }
};

// Source of labelled samples; next() returns nothing once exhausted.
class PointStream {
 public:
  virtual ~PointStream() = default;
  virtual std::optional<LabeledPoint> next() = 0;
};

// Builds the randomized online batches: each batch takes at least
// `target_size` consecutive samples and extends one sample at a time until
// both classes have at least two representatives. Consecutive batches cover
// contiguous disjoint index ranges.
class OnlineBatcher {
 public:
  explicit OnlineBatcher(size_t target_size);

  // Consumes the minimal prefix of the stream satisfying the constraints.
  // Consumed points are appended to `sink` when it is non-null, aligned with
  // batch.indices. Throws StreamExhausted if the stream ends mid-batch.
  Batch next_batch(PointStream& stream, std::vector<LabeledPoint>* sink = nullptr);

  size_t target_size() const { return target_size_; }
  size_t cursor() const { return cursor_; }

 private:
  size_t target_size_;
  size_t cursor_ = 0;  // absolute index of the next stream element
};

// Deterministic-size batches for finite datasets: every batch holds exactly
// ceil(p0 * target_size) class-0 samples (clamped to keep two per class),
// drawn without replacement from per-class pools that reshuffle once
// exhausted.
class OfflineBatcher {
 public:
  // group_counts[a] = number of class-a samples in the dataset.
  OfflineBatcher(size_t count0, size_t count1, size_t target_size, uint64_t seed);

  Batch next_batch();

  size_t per_class_count(int a) const { return a == 0 ? want0_ : want1_; }
  bool composition_clamped() const { return clamped_; }

 private:
  size_t draw_from_pool(std::vector<size_t>& pool, size_t& pos, Rng& rng);

  size_t want0_ = 0;
  size_t want1_ = 0;
  bool clamped_ = false;
  std::vector<size_t> pool0_;
  std::vector<size_t> pool1_;
  size_t pos0_ = 0;
  size_t pos1_ = 0;
  Rng rng_;
};

// Closed-form law of the online batch construction. pmf of observing a batch
// of total size N with n samples of the chosen class, for target size Nbar:
//   N == Nbar: C(Nbar, n) pa^n (1-pa)^(Nbar-n) on n in {2..Nbar-2}
//   N >  Nbar: (N-1) pa^2 (1-pa)^(N-2) at n = 2,
//              (N-1) pa^(N-2) (1-pa)^2 at n = N-2, and 0 elsewhere.
double batch_pmf(size_t total, size_t class_count, double pa, size_t target_size);

// Bias-correction multiplier Delta(N, n): 1 when N == Nbar, N/(2(N-1)) when
// the class ended the batch with exactly two samples, N/(N-1) for the
// complementary class, 0 off the support.
double delta_correction(size_t total, size_t class_count, size_t target_size);

// Relative bias of the naive class-frequency ratio n/N under the batch law:
// E[n/N] = pa * (1 + beta_bias(pa, target_size)).
double beta_bias(double pa, size_t target_size);

// E[n/N] in closed form, i.e. pa * (1 + beta_bias).
double expected_ratio(double pa, size_t target_size);

}  // namespace fairipm

#endif
