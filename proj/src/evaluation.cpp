#include "clc/evaluation.hpp"

#include "clc/entropy_select.hpp"
#include "clc/prob.hpp"

namespace clc {

namespace {

double accuracy(const std::vector<Label>& predicted, std::span<const Label> labels) {
  std::size_t hits = 0;
  for (std::size_t n = 0; n < predicted.size(); ++n) hits += predicted[n] == labels[n];
  return static_cast<double>(hits) / static_cast<double>(predicted.size());
}

}  // namespace

Evaluator::Evaluator(const LabeledDataset& train, const LabeledDataset& test)
    : train_(train), test_(test) {}

double Evaluator::test_accuracy(const MlpNetwork& net) const {
  return accuracy(argmax_rows(predict_logits(net, test_.features)), test_.clean_labels);
}

EpochMetrics Evaluator::evaluate(int epoch, const MlpNetwork& f, const MlpNetwork* g,
                                 const EpochStats& stats, std::optional<double> gamma,
                                 MetricsLayout layout) const {
  EpochMetrics m;
  m.epoch = epoch;
  m.test_accuracy = test_accuracy(f);
  if (g != nullptr && (layout == MetricsLayout::dual || layout == MetricsLayout::clc))
    m.test_accuracy_g = test_accuracy(*g);

  m.train_supervision_precision = supervision_precision(stats.effective_targets, train_.clean_labels);
  for (Label t : stats.effective_targets) m.n_selected += t >= 0;

  const Matrix probs = predict_probs(f, train_.features);
  const auto predicted = argmax_rows(probs);
  m.train_noisy_accuracy = accuracy(predicted, train_.noisy_labels);
  const auto gap = entropy_gap_stats(probs, train_.clean_labels);
  m.mean_entropy_correct = gap.correct;
  m.mean_entropy_incorrect = gap.incorrect;
  m.mean_entropy_all = gap.all;

  if (gamma) {
    m.gamma = *gamma;
    const auto entropies = shannon_entropy_rows(probs);
    std::size_t low = 0, low_correct = 0;
    for (std::size_t n = 0; n < entropies.size(); ++n) {
      if (entropies[n] > *gamma) continue;
      ++low;
      low_correct += predicted[n] == train_.clean_labels[n];
    }
    m.low_eval_count = low;
    if (low > 0) m.low_eval_precision = static_cast<double>(low_correct) / static_cast<double>(low);
  }

  m.train_loss = stats.loss_batches ? stats.loss_sum / static_cast<double>(stats.loss_batches) : 0.0;
  if ((layout == MetricsLayout::slc || layout == MetricsLayout::clc) && stats.partitioned) {
    m.n_low_f = stats.n_low[0];
    m.n_high_f = stats.n_high[0];
    if (layout == MetricsLayout::clc) {
      m.n_low_g = stats.n_low[1];
      m.n_high_g = stats.n_high[1];
    }
    if (stats.term_batches > 0) {
      const auto k = static_cast<double>(stats.term_batches);
      m.ce_low = stats.term_sums.ce_low / k;
      m.ent_own = stats.term_sums.ent_own / k;
      m.ce_high = stats.term_sums.ce_high / k;
    }
  }
  return m;
}

}  // namespace clc
