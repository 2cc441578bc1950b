#include "clc/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "clc/errors.hpp"
#include "clc/prob.hpp"

namespace clc {

std::string to_string(BaselineMethod method) {
  switch (method) {
    case BaselineMethod::standard: return "standard";
    case BaselineMethod::bootstrap: return "bootstrap";
    case BaselineMethod::forward: return "forward";
    case BaselineMethod::decouple: return "decouple";
    case BaselineMethod::self_paced: return "self_paced";
    case BaselineMethod::co_teaching: return "co_teaching";
    case BaselineMethod::co_distillation: return "co_distillation";
  }
  return "unknown";
}

void BaselineConfig::validate() const {
  train.validate();
  if (!(bootstrap_kappa >= 0.0 && bootstrap_kappa <= 1.0))
    throw ConfigError("bootstrap_kappa must lie in [0, 1]");
  if (!(codistill_lambda >= 0.0)) throw ConfigError("codistill_lambda must be >= 0");
  if ((method == BaselineMethod::self_paced || method == BaselineMethod::co_teaching) &&
      !(noise_ratio >= 0.0 && noise_ratio < 1.0))
    throw ConfigError("noise_ratio must lie in [0, 1) for small-loss methods");
  if (schedule_epochs == 0) throw ConfigError("schedule_epochs must be positive");
}

double keep_fraction(double noise_ratio, std::size_t epochs_since_warm_up,
                     std::size_t schedule_epochs) {
  const double progress = std::min(
      static_cast<double>(epochs_since_warm_up) / static_cast<double>(schedule_epochs), 1.0);
  return 1.0 - noise_ratio * progress;
}

std::vector<std::size_t> small_loss_indices(std::span<const double> losses, double fraction) {
  std::vector<std::size_t> order(losses.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  const auto keep = std::min<std::size_t>(
      losses.size(), static_cast<std::size_t>(std::llround(fraction * static_cast<double>(losses.size()))));
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return losses[a] < losses[b]; });
  order.resize(keep);
  std::sort(order.begin(), order.end());
  return order;
}

Matrix bootstrap_targets(const Matrix& onehot, const Matrix& probs, double kappa) {
  if (!onehot.same_shape(probs)) throw InvalidInput("bootstrap_targets: shape mismatch");
  Matrix out(probs.rows(), probs.cols());
  auto o = out.values();
  auto y = onehot.values();
  auto p = probs.values();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] = kappa * y[i] + (1.0 - kappa) * p[i];
  return out;
}

Matrix forward_corrected_probs(const Matrix& probs, const TransitionMatrix& t) {
  if (probs.cols() != t.classes()) throw InvalidInput("forward: class count mismatch");
  const std::size_t c = t.classes();
  Matrix q(probs.rows(), c);
  for (std::size_t r = 0; r < probs.rows(); ++r) {
    for (std::size_t j = 0; j < c; ++j) {
      double sum = 0.0;
      for (std::size_t i = 0; i < c; ++i) sum += probs(r, i) * t(i, j);
      q(r, j) = sum;
    }
  }
  return q;
}

ForwardLoss forward_corrected_loss(const Matrix& probs, std::span<const Label> noisy_labels,
                                   const TransitionMatrix& t) {
  if (noisy_labels.size() != probs.rows()) throw InvalidInput("forward: one label per row required");
  const Matrix q = forward_corrected_probs(probs, t);
  ForwardLoss out;
  out.targets = Matrix(probs.rows(), probs.cols());
  double total = 0.0;
  for (std::size_t r = 0; r < probs.rows(); ++r) {
    const auto y = static_cast<std::size_t>(noisy_labels[r]);
    if (y >= t.classes()) throw InvalidInput("forward: label out of range");
    const double qy = q(r, y);
    total -= std::log(std::max(qy, kLogClamp));
    const double denom = qy > 0.0 ? qy : kLogClamp;
    for (std::size_t k = 0; k < probs.cols(); ++k) out.targets(r, k) = (probs(r, k) * t(k, y)) / denom;
  }
  out.loss = total / static_cast<double>(probs.rows());
  return out;
}

namespace {

LoopSpec single_spec() { return {1, MetricsLayout::single, GammaPolicy::automatic(), false}; }
LoopSpec dual_spec() { return {2, MetricsLayout::dual, GammaPolicy::automatic(), false}; }

// Cross-entropy step on the noisy labels of `keep` only; the gradient rows of
// the other samples are zero. Returns the loss, or nothing if `keep` is empty.
std::optional<double> subset_step(NetUnit& unit, const ForwardResult& fwd, const Matrix& probs,
                                  const Batch& batch, std::span<const std::size_t> keep) {
  if (keep.empty()) return std::nullopt;
  const Matrix q = gather_rows(probs, keep);
  const Matrix y = gather_rows(batch.onehot, keep);
  Matrix grad(probs.rows(), probs.cols());
  scatter_add_rows(grad, keep, softce_grad_logits(y, q));
  apply_gradient(unit, fwd.cache, grad);
  return cross_entropy(y, q);
}

void record_subset(EpochStats& stats, const Batch& batch, std::span<const std::size_t> keep) {
  for (auto pos : keep) stats.effective_targets[batch.indices[pos]] = batch.labels[pos];
}

}  // namespace

TrainResult train_standard(const TrainView& data, const Evaluator& evaluator,
                           const BaselineConfig& config) {
  config.validate();
  auto step = [](std::span<NetUnit> units, std::span<const Batch> batches, const StepInfo&,
                 EpochStats& stats) {
    stats.record_loss(standard_step(units[0], batches[0]));
    stats.record_noisy(batches[0]);
  };
  return run_training(data, evaluator, config.train, single_spec(), step);
}

TrainResult train_bootstrap(const TrainView& data, const Evaluator& evaluator,
                            const BaselineConfig& config) {
  config.validate();
  auto step = [&](std::span<NetUnit> units, std::span<const Batch> batches, const StepInfo&,
                  EpochStats& stats) {
    const Batch& b = batches[0];
    auto fwd = forward(units[0].net, b.x);
    const Matrix probs = softmax_rows(fwd.logits);
    const Matrix targets = bootstrap_targets(b.onehot, probs, config.bootstrap_kappa);
    stats.record_loss(cross_entropy(targets, probs));
    apply_gradient(units[0], fwd.cache, softce_grad_logits(targets, probs));
    stats.record_noisy(b);
  };
  return run_training(data, evaluator, config.train, single_spec(), step);
}

TrainResult train_forward(const TrainView& data, const Evaluator& evaluator,
                          const BaselineConfig& config, const TransitionMatrix& t) {
  config.validate();
  if (t.classes() != data.classes) throw ConfigError("forward: transition matrix size mismatch");
  auto step = [&](std::span<NetUnit> units, std::span<const Batch> batches, const StepInfo&,
                  EpochStats& stats) {
    const Batch& b = batches[0];
    auto fwd = forward(units[0].net, b.x);
    const Matrix probs = softmax_rows(fwd.logits);
    const auto corrected = forward_corrected_loss(probs, b.labels, t);
    stats.record_loss(corrected.loss);
    apply_gradient(units[0], fwd.cache, softce_grad_logits(corrected.targets, probs));
    stats.record_noisy(b);
  };
  return run_training(data, evaluator, config.train, single_spec(), step);
}

TrainResult train_decouple(const TrainView& data, const Evaluator& evaluator,
                           const BaselineConfig& config) {
  config.validate();
  auto step = [&](std::span<NetUnit> units, std::span<const Batch> batches, const StepInfo&,
                  EpochStats& stats) {
    std::vector<ForwardResult> fwd;
    std::vector<Matrix> own, partner;
    for (std::size_t u = 0; u < 2; ++u) {
      fwd.push_back(forward(units[u].net, batches[u].x));
      own.push_back(softmax_rows(fwd[u].logits));
      partner.push_back(predict_probs(units[1 - u].net, batches[u].x));
    }
    for (std::size_t u = 0; u < 2; ++u) {
      const auto mine = argmax_rows(own[u]);
      const auto theirs = argmax_rows(partner[u]);
      std::vector<std::size_t> disagree;
      for (std::size_t k = 0; k < mine.size(); ++k)
        if (mine[k] != theirs[k]) disagree.push_back(k);
      const auto loss = subset_step(units[u], fwd[u], own[u], batches[u], disagree);
      if (u == 0) {
        if (loss) stats.record_loss(*loss);
        record_subset(stats, batches[0], disagree);
      }
    }
  };
  return run_training(data, evaluator, config.train, dual_spec(), step);
}

TrainResult train_self_paced(const TrainView& data, const Evaluator& evaluator,
                             const BaselineConfig& config) {
  config.validate();
  auto step = [&](std::span<NetUnit> units, std::span<const Batch> batches, const StepInfo& info,
                  EpochStats& stats) {
    const Batch& b = batches[0];
    auto fwd = forward(units[0].net, b.x);
    const Matrix probs = softmax_rows(fwd.logits);
    const double fraction =
        keep_fraction(config.noise_ratio, info.epochs_since_warm_up, config.schedule_epochs);
    const auto keep = small_loss_indices(cross_entropy_rows(b.onehot, probs), fraction);
    if (auto loss = subset_step(units[0], fwd, probs, b, keep)) stats.record_loss(*loss);
    record_subset(stats, b, keep);
  };
  return run_training(data, evaluator, config.train, single_spec(), step);
}

TrainResult train_coteaching(const TrainView& data, const Evaluator& evaluator,
                             const BaselineConfig& config) {
  config.validate();
  auto step = [&](std::span<NetUnit> units, std::span<const Batch> batches, const StepInfo& info,
                  EpochStats& stats) {
    const double fraction =
        keep_fraction(config.noise_ratio, info.epochs_since_warm_up, config.schedule_epochs);
    std::vector<ForwardResult> fwd;
    std::vector<Matrix> own;
    std::vector<std::vector<std::size_t>> keep;
    for (std::size_t u = 0; u < 2; ++u) {
      fwd.push_back(forward(units[u].net, batches[u].x));
      own.push_back(softmax_rows(fwd[u].logits));
      // The partner ranks this network's batch by its own losses.
      const Matrix partner = predict_probs(units[1 - u].net, batches[u].x);
      keep.push_back(small_loss_indices(cross_entropy_rows(batches[u].onehot, partner), fraction));
    }
    for (std::size_t u = 0; u < 2; ++u) {
      const auto loss = subset_step(units[u], fwd[u], own[u], batches[u], keep[u]);
      if (u == 0) {
        if (loss) stats.record_loss(*loss);
        record_subset(stats, batches[0], keep[0]);
      }
    }
  };
  return run_training(data, evaluator, config.train, dual_spec(), step);
}

TrainResult train_codistillation(const TrainView& data, const Evaluator& evaluator,
                                 const BaselineConfig& config) {
  config.validate();
  const double lambda = config.codistill_lambda;
  auto step = [&](std::span<NetUnit> units, std::span<const Batch> batches, const StepInfo&,
                  EpochStats& stats) {
    std::vector<ForwardResult> fwd;
    std::vector<Matrix> own, partner;
    for (std::size_t u = 0; u < 2; ++u) {
      fwd.push_back(forward(units[u].net, batches[u].x));
      own.push_back(softmax_rows(fwd[u].logits));
      partner.push_back(predict_probs(units[1 - u].net, batches[u].x));
    }
    for (std::size_t u = 0; u < 2; ++u) {
      const Batch& b = batches[u];
      Matrix grad = softce_grad_logits(b.onehot, own[u]);
      const Matrix distill = softce_grad_logits(partner[u], own[u]);
      auto gv = grad.values();
      auto dv = distill.values();
      for (std::size_t i = 0; i < gv.size(); ++i) gv[i] += lambda * dv[i];
      const double loss = cross_entropy(b.onehot, own[u]) + lambda * cross_entropy(partner[u], own[u]);
      apply_gradient(units[u], fwd[u].cache, grad);
      if (u == 0) {
        stats.record_loss(loss);
        stats.record_noisy(b);
      }
    }
  };
  return run_training(data, evaluator, config.train, dual_spec(), step);
}

TrainResult train_baseline(const TrainView& data, const Evaluator& evaluator,
                           const BaselineConfig& config, const TransitionMatrix& t) {
  switch (config.method) {
    case BaselineMethod::standard: return train_standard(data, evaluator, config);
    case BaselineMethod::bootstrap: return train_bootstrap(data, evaluator, config);
    case BaselineMethod::forward: return train_forward(data, evaluator, config, t);
    case BaselineMethod::decouple: return train_decouple(data, evaluator, config);
    case BaselineMethod::self_paced: return train_self_paced(data, evaluator, config);
    case BaselineMethod::co_teaching: return train_coteaching(data, evaluator, config);
    case BaselineMethod::co_distillation: return train_codistillation(data, evaluator, config);
  }
  throw ConfigError("unknown baseline method");
}

}  // namespace clc
