#include "clc/clc.hpp"

#include <cmath>

#include "clc/errors.hpp"
#include "clc/prob.hpp"

namespace clc {

void ClcConfig::validate() const {
  train.validate();
  if (!(alpha >= 0.0)) throw ConfigError("alpha must be >= 0");
  if (!(beta >= 0.0)) throw ConfigError("beta must be >= 0");
  // Negative fixed thresholds are allowed here (every sample lands in the
  // high set); the experiment config only accepts values >= 0.
  if (gamma.mode == GammaPolicy::Mode::fixed && std::isnan(gamma.value))
    throw ConfigError("fixed gamma must be a number");
}

BatchLoss clc_batch_loss(const Matrix& own_probs, const BatchPartition& partner,
                         const BatchPartition& own, const Matrix& noisy_onehot, double alpha,
                         double beta) {
  const std::size_t n = own_probs.rows();
  if (partner.batch_size() != n || own.batch_size() != n || !noisy_onehot.same_shape(own_probs))
    throw InvalidInput("clc_batch_loss: partitions do not match the batch");

  BatchLoss out;
  out.grad_logits = Matrix(n, own_probs.cols());

  if (!partner.low_indices.empty()) {
    const Matrix q = gather_rows(own_probs, partner.low_indices);
    out.loss.ce_low = cross_entropy(partner.low_targets, q);
    scatter_add_rows(out.grad_logits, partner.low_indices, softce_grad_logits(partner.low_targets, q));
  }
  if (!own.low_indices.empty()) {
    const Matrix q = gather_rows(own_probs, own.low_indices);
    double sum = 0.0;
    for (double h : shannon_entropy_rows(q)) sum += h;
    out.loss.ent_own = sum / static_cast<double>(q.rows());
    scatter_add_rows(out.grad_logits, own.low_indices, entropy_grad_logits(q), alpha);
  }
  if (!partner.high_indices.empty()) {
    const Matrix q = gather_rows(own_probs, partner.high_indices);
    const Matrix y = gather_rows(noisy_onehot, partner.high_indices);
    out.loss.ce_high = cross_entropy(y, q);
    scatter_add_rows(out.grad_logits, partner.high_indices, softce_grad_logits(y, q), beta);
  }
  out.loss.total = out.loss.ce_low + alpha * out.loss.ent_own + beta * out.loss.ce_high;
  return out;
}

namespace {

PseudoLabel pseudo_mode(const ClcConfig& c) {
  return c.hard_pseudo_labels ? PseudoLabel::hard : PseudoLabel::soft;
}

// Effective label of every sample in `batch` under the supervising partition.
void record_targets(EpochStats& stats, const Batch& batch, const BatchPartition& supervisor) {
  for (std::size_t k = 0; k < supervisor.low_indices.size(); ++k) {
    const auto pos = supervisor.low_indices[k];
    stats.effective_targets[batch.indices[pos]] = argmax(supervisor.low_targets.row(k));
  }
  for (auto pos : supervisor.high_indices)
    stats.effective_targets[batch.indices[pos]] = batch.labels[pos];
}

void record_terms(EpochStats& stats, const LossBreakdown& loss) {
  stats.term_sums.ce_low += loss.ce_low;
  stats.term_sums.ent_own += loss.ent_own;
  stats.term_sums.ce_high += loss.ce_high;
  stats.term_sums.total += loss.total;
  ++stats.term_batches;
  stats.record_loss(loss.total);
}

}  // namespace

TrainResult train_clc(const TrainView& data, const Evaluator& evaluator, const ClcConfig& config) {
  config.validate();
  const auto mode = pseudo_mode(config);
  auto step = [&](std::span<NetUnit> units, std::span<const Batch> batches, const StepInfo& info,
                  EpochStats& stats) {
    NetUnit& f = units[0];
    NetUnit& g = units[1];
    const Batch& bf = batches[0];
    const Batch& bg = batches[1];

    // Every prediction is taken before either network moves.
    auto f_on_bf = forward(f.net, bf.x);
    auto g_on_bg = forward(g.net, bg.x);
    const Matrix pf_bf = softmax_rows(f_on_bf.logits);
    const Matrix pg_bg = softmax_rows(g_on_bg.logits);
    const Matrix pg_bf = predict_probs(g.net, bf.x);
    const Matrix pf_bg = predict_probs(f.net, bg.x);

    const auto f_own = partition_by_entropy(pf_bf, bf.onehot, info.gamma, mode);
    const auto g_for_f = partition_by_entropy(pg_bf, bf.onehot, info.gamma, mode);
    const auto g_own = partition_by_entropy(pg_bg, bg.onehot, info.gamma, mode);
    const auto f_for_g = partition_by_entropy(pf_bg, bg.onehot, info.gamma, mode);

    const auto loss_f = clc_batch_loss(pf_bf, g_for_f, f_own, bf.onehot, config.alpha, config.beta);
    const auto loss_g = clc_batch_loss(pg_bg, f_for_g, g_own, bg.onehot, config.alpha, config.beta);
    apply_gradient(f, f_on_bf.cache, loss_f.grad_logits);
    apply_gradient(g, g_on_bg.cache, loss_g.grad_logits);

    record_targets(stats, bf, g_for_f);
    record_terms(stats, loss_f.loss);
    stats.partitioned = true;
    stats.n_low[0] += f_own.low_indices.size();
    stats.n_high[0] += f_own.high_indices.size();
    stats.n_low[1] += g_own.low_indices.size();
    stats.n_high[1] += g_own.high_indices.size();
  };
  LoopSpec spec{2, MetricsLayout::clc, config.gamma, config.gamma_from_both};
  return run_training(data, evaluator, config.train, spec, step);
}

TrainResult train_slc(const TrainView& data, const Evaluator& evaluator, const ClcConfig& config) {
  config.validate();
  const auto mode = pseudo_mode(config);
  auto step = [&](std::span<NetUnit> units, std::span<const Batch> batches, const StepInfo& info,
                  EpochStats& stats) {
    NetUnit& f = units[0];
    const Batch& b = batches[0];
    auto fwd = forward(f.net, b.x);
    const Matrix probs = softmax_rows(fwd.logits);
    const auto own = partition_by_entropy(probs, b.onehot, info.gamma, mode);
    const auto loss = clc_batch_loss(probs, own, own, b.onehot, config.alpha, config.beta);
    apply_gradient(f, fwd.cache, loss.grad_logits);

    record_targets(stats, b, own);
    record_terms(stats, loss.loss);
    stats.partitioned = true;
    stats.n_low[0] += own.low_indices.size();
    stats.n_high[0] += own.high_indices.size();
  };
  LoopSpec spec{1, MetricsLayout::slc, config.gamma, false};
  return run_training(data, evaluator, config.train, spec, step);
}

}  // namespace clc
