#include "clc/entropy_select.hpp"

#include <cmath>

#include "clc/errors.hpp"
#include "clc/prob.hpp"

namespace clc {

BatchPartition partition_by_entropy(const Matrix& probs, const Matrix& noisy_onehot, double gamma,
                                    PseudoLabel targets) {
  return partition_by_entropy(probs, shannon_entropy_rows(probs), noisy_onehot, gamma, targets);
}

BatchPartition partition_by_entropy(const Matrix& probs, std::span<const double> entropies,
                                    const Matrix& noisy_onehot, double gamma,
                                    PseudoLabel targets) {
  if (!probs.same_shape(noisy_onehot))
    throw InvalidInput("partition_by_entropy: probs and labels differ in shape");
  if (entropies.size() != probs.rows())
    throw InvalidInput("partition_by_entropy: one entropy per row required");
  if (std::isnan(gamma)) throw InvalidInput("partition_by_entropy: gamma is NaN");

  BatchPartition part;
  for (std::size_t k = 0; k < probs.rows(); ++k) {
    if (entropies[k] <= gamma)
      part.low_indices.push_back(k);
    else
      part.high_indices.push_back(k);
  }
  part.low_targets = gather_rows(probs, part.low_indices);
  if (targets == PseudoLabel::hard && !part.low_targets.empty()) {
    for (std::size_t r = 0; r < part.low_targets.rows(); ++r) {
      auto row = part.low_targets.row(r);
      const auto best = static_cast<std::size_t>(argmax(row));
      for (std::size_t c = 0; c < row.size(); ++c) row[c] = c == best ? 1.0 : 0.0;
    }
  }
  part.high_targets = gather_rows(noisy_onehot, part.high_indices);
  return part;
}

double estimate_gamma(const MlpNetwork& net, const Matrix& x) {
  if (x.empty()) throw InvalidInput("estimate_gamma: empty feature matrix");
  const auto entropies = shannon_entropy_rows(predict_probs(net, x));
  double sum = 0.0;
  for (double h : entropies) sum += h;
  return sum / static_cast<double>(entropies.size());
}

EntropyGap entropy_gap_stats(const Matrix& probs, std::span<const Label> clean_labels) {
  if (probs.rows() != clean_labels.size())
    throw InvalidInput("entropy_gap_stats: one label per prediction row required");
  if (probs.empty()) throw InvalidInput("entropy_gap_stats: empty input");
  const auto entropies = shannon_entropy_rows(probs);
  const auto predicted = argmax_rows(probs);
  double sum_correct = 0.0;
  double sum_incorrect = 0.0;
  EntropyGap gap;
  for (std::size_t k = 0; k < entropies.size(); ++k) {
    if (predicted[k] == clean_labels[k]) {
      sum_correct += entropies[k];
      ++gap.n_correct;
    } else {
      sum_incorrect += entropies[k];
      ++gap.n_incorrect;
    }
  }
  if (gap.n_correct > 0) gap.correct = sum_correct / static_cast<double>(gap.n_correct);
  if (gap.n_incorrect > 0) gap.incorrect = sum_incorrect / static_cast<double>(gap.n_incorrect);
  gap.all = (sum_correct + sum_incorrect) / static_cast<double>(entropies.size());
  return gap;
}

}  // namespace clc
