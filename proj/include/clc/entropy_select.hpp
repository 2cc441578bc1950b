#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "clc/matrix.hpp"
#include "clc/mlp.hpp"

namespace clc {

// Split of one mini-batch by prediction entropy. Low positions (H <= gamma)
// carry the predictor's probability rows as targets, high positions carry
// the original one-hot noisy labels. Both index lists are ascending batch
// positions and together cover the batch exactly once.
struct BatchPartition {
  std::vector<std::size_t> low_indices;
  Matrix low_targets;
  std::vector<std::size_t> high_indices;
  Matrix high_targets;

  std::size_t batch_size() const { return low_indices.size() + high_indices.size(); }
};

enum class PseudoLabel { soft, hard };

struct GammaPolicy {
  enum class Mode { automatic, fixed };
  Mode mode = Mode::automatic;
  double value = 0.0;  // nats, fixed mode only

  static GammaPolicy automatic() { return {}; }
  static GammaPolicy fixed(double nats) { return {Mode::fixed, nats}; }
};

BatchPartition partition_by_entropy(const Matrix& probs, const Matrix& noisy_onehot, double gamma,
                                    PseudoLabel targets = PseudoLabel::soft);
// Same, with the per-row entropies already computed.
BatchPartition partition_by_entropy(const Matrix& probs, std::span<const double> entropies,
                                    const Matrix& noisy_onehot, double gamma,
                                    PseudoLabel targets = PseudoLabel::soft);

// Mean prediction entropy of `net` over the rows of `x`.
double estimate_gamma(const MlpNetwork& net, const Matrix& x);

struct EntropyGap {
  std::optional<double> correct;    // absent when no prediction is correct
  std::optional<double> incorrect;  // absent when every prediction is correct
  double all = 0.0;
  std::size_t n_correct = 0;
  std::size_t n_incorrect = 0;
};

EntropyGap entropy_gap_stats(const Matrix& probs, std::span<const Label> clean_labels);

}  // namespace clc
