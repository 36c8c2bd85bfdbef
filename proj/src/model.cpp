#include "fairipm/model.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "fairipm/errors.hpp"
#include "fairipm/io.hpp"
#include "fairipm/rng.hpp"

namespace fairipm {

namespace {

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// log(1 + exp(z)) without overflow.
double softplus(double z) { return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

void require_targets_binary(const TrainingBatch& batch) {
  auto check = [](const std::vector<const LabeledPoint*>& pts) {
    for (const LabeledPoint* p : pts) {
      if (p->target != 0.0 && p->target != 1.0)
        throw std::invalid_argument("cross-entropy: targets must be 0 or 1");
    }
  };
  check(batch.group0);
  check(batch.group1);
}

struct SampleEval {
  double z2 = 0.0;             // pre-activation output
  double score = 0.0;          // post-activation output
  double loss = 0.0;
  double dloss_dz2 = 0.0;      // derivative of the loss through the output unit
  double dscore_dz2 = 0.0;
  std::vector<double> hidden;  // post-ReLU activations (mlp only)
};

struct ParamView {
  const double* w1;  // hidden x input (row-major), or the linear weights
  const double* b1;
  const double* w2;
  const double* b2;
};

ParamView view(const ModelSpec& spec, const double* theta) {
  ParamView v{};
  if (spec.is_mlp()) {
    v.w1 = theta;
    v.b1 = theta + spec.hidden_width * spec.input_dim;
    v.w2 = v.b1 + spec.hidden_width;
    v.b2 = v.w2 + spec.hidden_width;
  } else {
    v.w1 = theta;
    v.b1 = theta + spec.input_dim;  // the single bias
  }
  return v;
}

SampleEval evaluate_sample(const ModelSpec& spec, const ModelParams& params,
                           const LabeledPoint& point, LossKind loss) {
  if (point.features.size() != spec.input_dim)
    throw std::invalid_argument("model: feature dimension mismatch");
  const ParamView v = view(spec, params.theta.data());
  SampleEval eval;

  if (spec.is_mlp()) {
    eval.hidden.resize(spec.hidden_width);
    double z2 = v.b2[0];
    for (size_t h = 0; h < spec.hidden_width; ++h) {
      double z1 = v.b1[h];
      const double* row = v.w1 + h * spec.input_dim;
      for (size_t i = 0; i < spec.input_dim; ++i) z1 += row[i] * point.features[i];
      const double a1 = z1 > 0.0 ? z1 : 0.0;
      eval.hidden[h] = a1;
      z2 += v.w2[h] * a1;
    }
    eval.z2 = z2;
  } else {
    double z2 = v.b1[0];
    for (size_t i = 0; i < spec.input_dim; ++i) z2 += v.w1[i] * point.features[i];
    eval.z2 = z2;
  }

  const bool sig = spec.output == ModelSpec::Output::sigmoid;
  eval.score = sig ? sigmoid(eval.z2) : eval.z2;
  eval.dscore_dz2 = sig ? eval.score * (1.0 - eval.score) : 1.0;

  if (loss == LossKind::cross_entropy) {
    if (!sig) throw std::invalid_argument("cross-entropy requires a sigmoid output");
    // Stable logit form: L = softplus(z) - y z, dL/dz = score - y.
    eval.loss = softplus(eval.z2) - point.target * eval.z2;
    eval.dloss_dz2 = eval.score - point.target;
  } else {
    const double r = eval.score - point.target;
    eval.loss = r * r;
    eval.dloss_dz2 = 2.0 * r * eval.dscore_dz2;
  }
  return eval;
}

void validate(const ModelSpec& spec, const ModelParams& params, const TrainingBatch& batch,
              double lambda, LossKind loss) {
  if (spec.input_dim == 0) throw std::invalid_argument("model: input dimension must be positive");
  if (params.theta.size() != param_count(spec))
    throw std::invalid_argument("model: parameter vector length does not match the spec");
  if (batch.group0.size() < 2 || batch.group1.size() < 2)
    throw std::invalid_argument("model: batch needs at least two samples per class");
  if (lambda < 0.0) throw std::invalid_argument("model: lambda must be nonnegative");
  if (loss == LossKind::cross_entropy) require_targets_binary(batch);
}

}  // namespace

size_t param_count(const ModelSpec& spec) {
  if (spec.is_mlp()) return spec.hidden_width * spec.input_dim + 2 * spec.hidden_width + 1;
  return spec.input_dim + 1;
}

ModelParams init_params(const ModelSpec& spec, uint64_t seed) {
  Rng rng(seed);
  ModelParams params;
  params.theta.resize(param_count(spec));
  auto fill = [&rng](double* dst, size_t count, size_t fan_in) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    for (size_t i = 0; i < count; ++i) dst[i] = rng.uniform(-bound, bound);
  };
  if (spec.is_mlp()) {
    double* theta = params.theta.data();
    const size_t first = spec.hidden_width * spec.input_dim + spec.hidden_width;
    fill(theta, first, spec.input_dim);
    fill(theta + first, spec.hidden_width + 1, spec.hidden_width);
  } else {
    fill(params.theta.data(), spec.input_dim + 1, spec.input_dim);
  }
  return params;
}

double forward(const ModelSpec& spec, const ModelParams& params, std::span<const double> x) {
  if (params.theta.size() != param_count(spec))
    throw std::invalid_argument("model: parameter vector length does not match the spec");
  LabeledPoint point;
  point.features.assign(x.begin(), x.end());
  return evaluate_sample(spec, params, point, LossKind::squared_error).score;
}

double loss_value(LossKind kind, double score, double target) {
  if (kind == LossKind::cross_entropy) {
    if (!(score > 0.0) || !(score < 1.0))
      throw std::invalid_argument("cross-entropy: score must lie strictly in (0, 1)");
    if (target != 0.0 && target != 1.0)
      throw std::invalid_argument("cross-entropy: target must be 0 or 1");
    return -(target * std::log(score) + (1.0 - target) * std::log(1.0 - score));
  }
  const double r = score - target;
  return r * r;
}

BatchOutputs batch_outputs(const ModelSpec& spec, const ModelParams& params,
                           const TrainingBatch& batch, LossKind loss) {
  validate(spec, params, batch, 0.0, loss);
  BatchOutputs out;
  out.target_size = batch.target_size;
  for (const LabeledPoint* p : batch.group0) {
    const SampleEval eval = evaluate_sample(spec, params, *p, loss);
    out.scores0.push_back(eval.score);
    out.losses0.push_back(eval.loss);
  }
  for (const LabeledPoint* p : batch.group1) {
    const SampleEval eval = evaluate_sample(spec, params, *p, loss);
    out.scores1.push_back(eval.score);
    out.losses1.push_back(eval.loss);
  }
  return out;
}

double objective_value(const ModelSpec& spec, const ModelParams& params,
                       const TrainingBatch& batch, double lambda, const KernelSpec& kernel,
                       LossKind loss) {
  validate(spec, params, batch, lambda, loss);
  const BatchOutputs out = batch_outputs(spec, params, batch, loss);
  return corrected_loss(out) + lambda * u_stat_mmd(out, kernel);
}

std::vector<double> grad_objective(const ModelSpec& spec, const ModelParams& params,
                                   const TrainingBatch& batch, double lambda,
                                   const KernelSpec& kernel, LossKind loss) {
  validate(spec, params, batch, lambda, loss);

  const size_t n0 = batch.group0.size();
  const size_t n1 = batch.group1.size();
  const size_t total = batch.total();

  std::vector<SampleEval> evals;
  std::vector<const LabeledPoint*> points;
  evals.reserve(total);
  points.reserve(total);
  for (const LabeledPoint* p : batch.group0) {
    evals.push_back(evaluate_sample(spec, params, *p, loss));
    points.push_back(p);
  }
  for (const LabeledPoint* p : batch.group1) {
    evals.push_back(evaluate_sample(spec, params, *p, loss));
    points.push_back(p);
  }

  // dU/ds_i: within-class pair terms plus the cross-class term. The kernel is
  // symmetric, so each unordered pair contributes twice its partial.
  std::vector<double> dU_ds(total, 0.0);
  if (lambda > 0.0) {
    const double w0 = 2.0 / (static_cast<double>(n0) * static_cast<double>(n0 - 1));
    const double w1 = 2.0 / (static_cast<double>(n1) * static_cast<double>(n1 - 1));
    const double wx = 2.0 / (static_cast<double>(n0) * static_cast<double>(n1));
    for (size_t i = 0; i < n0; ++i) {
      for (size_t j = 0; j < n0; ++j) {
        if (i == j) continue;
        dU_ds[i] += w0 * kernel_partial_u(kernel, evals[i].score, evals[j].score);
      }
      for (size_t j = n0; j < total; ++j)
        dU_ds[i] -= wx * kernel_partial_u(kernel, evals[i].score, evals[j].score);
    }
    for (size_t i = n0; i < total; ++i) {
      for (size_t j = n0; j < total; ++j) {
        if (i == j) continue;
        dU_ds[i] += w1 * kernel_partial_u(kernel, evals[i].score, evals[j].score);
      }
      for (size_t j = 0; j < n0; ++j)
        dU_ds[i] -= wx * kernel_partial_u(kernel, evals[i].score, evals[j].score);
    }
  }

  const double delta0 = delta_correction(total, n0, batch.target_size);
  const double delta1 = delta_correction(total, n1, batch.target_size);

  std::vector<double> grad(params.theta.size(), 0.0);
  const ParamView v = view(spec, params.theta.data());

  for (size_t i = 0; i < total; ++i) {
    const SampleEval& eval = evals[i];
    const LabeledPoint& point = *points[i];
    const double loss_weight = (i < n0 ? delta0 : delta1) / static_cast<double>(total);
    const double dJ_dz2 = loss_weight * eval.dloss_dz2 + lambda * dU_ds[i] * eval.dscore_dz2;

    if (spec.is_mlp()) {
      double* gW1 = grad.data();
      double* gb1 = gW1 + spec.hidden_width * spec.input_dim;
      double* gw2 = gb1 + spec.hidden_width;
      double* gb2 = gw2 + spec.hidden_width;
      gb2[0] += dJ_dz2;
      for (size_t h = 0; h < spec.hidden_width; ++h) {
        gw2[h] += dJ_dz2 * eval.hidden[h];
        if (eval.hidden[h] > 0.0) {  // ReLU gate; subgradient 0 at the kink
          const double dJ_dz1 = dJ_dz2 * v.w2[h];
          gb1[h] += dJ_dz1;
          double* row = gW1 + h * spec.input_dim;
          for (size_t k = 0; k < spec.input_dim; ++k) row[k] += dJ_dz1 * point.features[k];
        }
      }
    } else {
      for (size_t k = 0; k < spec.input_dim; ++k) grad[k] += dJ_dz2 * point.features[k];
      grad[spec.input_dim] += dJ_dz2;
    }
  }
  return grad;
}

std::vector<double> finite_diff_grad(const ModelSpec& spec, const ModelParams& params,
                                     const TrainingBatch& batch, double lambda,
                                     const KernelSpec& kernel, LossKind loss, double step) {
  if (!(step > 0.0)) throw std::invalid_argument("finite_diff_grad: step must be positive");
  ModelParams shifted = params;
  std::vector<double> grad(params.theta.size(), 0.0);
  for (size_t k = 0; k < params.theta.size(); ++k) {
    const double saved = shifted.theta[k];
    shifted.theta[k] = saved + step;
    const double up = objective_value(spec, shifted, batch, lambda, kernel, loss);
    shifted.theta[k] = saved - step;
    const double down = objective_value(spec, shifted, batch, lambda, kernel, loss);
    shifted.theta[k] = saved;
    grad[k] = (up - down) / (2.0 * step);
  }
  return grad;
}

void save_checkpoint(const ModelSpec& spec, const ModelParams& params, uint64_t seed,
                     const std::string& path) {
  if (params.theta.size() != param_count(spec))
    throw std::invalid_argument("checkpoint: parameter vector length does not match the spec");
  std::ostringstream out;
  out << "fairipm_checkpoint_v1\n";
  out << "input_dim " << spec.input_dim << "\n";
  out << "hidden_width " << spec.hidden_width << "\n";
  out << "output " << (spec.output == ModelSpec::Output::sigmoid ? "sigmoid" : "identity")
      << "\n";
  out << "seed " << seed << "\n";
  out << "param_count " << params.theta.size() << "\n";
  char buffer[64];
  for (double value : params.theta) {
    std::snprintf(buffer, sizeof buffer, "%.17g", value);
    out << buffer << "\n";
  }
  write_file_atomic(path, out.str());
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("checkpoint: cannot open " + path);
  std::string token;
  in >> token;
  if (token != "fairipm_checkpoint_v1") throw ParseError("checkpoint: bad header in " + path);

  Checkpoint cp;
  size_t count = 0;
  auto expect = [&](const char* key) {
    in >> token;
    if (token != key) throw ParseError(std::string("checkpoint: expected key ") + key);
  };
  expect("input_dim");
  in >> cp.spec.input_dim;
  expect("hidden_width");
  in >> cp.spec.hidden_width;
  expect("output");
  in >> token;
  if (token == "sigmoid") {
    cp.spec.output = ModelSpec::Output::sigmoid;
  } else if (token == "identity") {
    cp.spec.output = ModelSpec::Output::identity;
  } else {
    throw ParseError("checkpoint: unknown output activation " + token);
  }
  expect("seed");
  in >> cp.seed;
  expect("param_count");
  in >> count;
  if (!in || count != param_count(cp.spec))
    throw ParseError("checkpoint: parameter count does not match the spec");
  cp.params.theta.resize(count);
  for (size_t i = 0; i < count; ++i) {
    in >> token;
    if (!in) throw ParseError("checkpoint: truncated parameter list");
    const char* begin = token.data();
    const char* end = begin + token.size();
    auto [ptr, ec] = std::from_chars(begin, end, cp.params.theta[i]);
    if (ec != std::errc{} || ptr != end)
      throw ParseError("checkpoint: bad parameter value '" + token + "'");
  }
  return cp;
}

}  // namespace fairipm
