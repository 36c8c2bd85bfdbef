#ifndef FAIRIPM_MODEL_HPP
#define FAIRIPM_MODEL_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "fairipm/batching.hpp"
#include "fairipm/estimators.hpp"
#include "fairipm/ipm.hpp"

namespace fairipm {

// Hypothesis classes: a linear score or a one-hidden-layer ReLU network,
// with sigmoid or identity output.
struct ModelSpec {
  enum class Output { sigmoid, identity };
  size_t input_dim = 1;
  size_t hidden_width = 0;  // 0 selects the linear model
  Output output = Output::identity;

  bool is_mlp() const { return hidden_width > 0; }
};

// Flat parameter vector. Layout: linear = [w(input_dim), b]; mlp =
// [W1(hidden x input, row-major), b1(hidden), w2(hidden), b2].
struct ModelParams {
  std::vector<double> theta;
};

enum class LossKind { cross_entropy, squared_error };

size_t param_count(const ModelSpec& spec);

// Uniform init on [-1/sqrt(fan_in), +1/sqrt(fan_in)] per layer, drawn from the
// seeded deterministic generator; equal seeds give bitwise-equal parameters.
ModelParams init_params(const ModelSpec& spec, uint64_t seed);

double forward(const ModelSpec& spec, const ModelParams& params, std::span<const double> x);

// Pointwise loss on a post-activation score. Cross-entropy requires the score
// strictly inside (0,1) and a 0/1 target.
double loss_value(LossKind kind, double score, double target);

// Batch view used by the objective and its gradient.
struct TrainingBatch {
  std::vector<const LabeledPoint*> group0;
  std::vector<const LabeledPoint*> group1;
  size_t target_size = 4;

  size_t total() const { return group0.size() + group1.size(); }
};

// Scores and losses of the batch under the model (cross-entropy evaluated in
// logit form internally, so saturated sigmoids stay finite).
BatchOutputs batch_outputs(const ModelSpec& spec, const ModelParams& params,
                           const TrainingBatch& batch, LossKind loss);

// corrected_loss + lambda * u_stat_mmd of the batch under the model.
double objective_value(const ModelSpec& spec, const ModelParams& params,
                       const TrainingBatch& batch, double lambda, const KernelSpec& kernel,
                       LossKind loss);

// Exact reverse-mode gradient of objective_value with respect to theta. ReLU
// and absolute-value kinks use the subgradient value 0.
std::vector<double> grad_objective(const ModelSpec& spec, const ModelParams& params,
                                   const TrainingBatch& batch, double lambda,
                                   const KernelSpec& kernel, LossKind loss);

// Central finite differences of objective_value, coordinate by coordinate.
std::vector<double> finite_diff_grad(const ModelSpec& spec, const ModelParams& params,
                                     const TrainingBatch& batch, double lambda,
                                     const KernelSpec& kernel, LossKind loss, double step);

// Plain-text checkpoint with spec, seed and the parameters at full precision;
// save/load round-trips bitwise.
void save_checkpoint(const ModelSpec& spec, const ModelParams& params, uint64_t seed,
                     const std::string& path);

struct Checkpoint {
  ModelSpec spec;
  ModelParams params;
  uint64_t seed = 0;
};

Checkpoint load_checkpoint(const std::string& path);

}  // namespace fairipm

#endif
