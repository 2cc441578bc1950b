#pragma once

#include "clc/dataset.hpp"
#include "clc/entropy_select.hpp"
#include "clc/evaluation.hpp"
#include "clc/training.hpp"

namespace clc {

struct ClcConfig {
  TrainSettings train;
  double alpha = 0.1;  // weight of the own-low-set entropy term
  double beta = 0.5;   // weight of the cross-entropy on the partner's high set
  GammaPolicy gamma = GammaPolicy::automatic();
  bool hard_pseudo_labels = false;
  // Auto threshold from the mean of both networks instead of f alone.
  bool gamma_from_both = false;

  void validate() const;
};

struct BatchLoss {
  LossBreakdown loss;
  Matrix grad_logits;
};

// Objective of one network on one mini-batch:
//   CE(own, partner's low-set targets) over the partner's low set
// + alpha * mean entropy of own predictions over the own low set
// + beta * CE(own, noisy one-hot) over the partner's high set.
// Each term averages over its own subset; an empty subset contributes 0.
BatchLoss clc_batch_loss(const Matrix& own_probs, const BatchPartition& partner,
                         const BatchPartition& own, const Matrix& noisy_onehot, double alpha,
                         double beta);

// Two networks correcting each other's labels with their low-entropy
// predictions. networks[0] = f, networks[1] = g.
TrainResult train_clc(const TrainView& data, const Evaluator& evaluator, const ClcConfig& config);

// Single-network ablation: the network's own partition plays the partner.
TrainResult train_slc(const TrainView& data, const Evaluator& evaluator, const ClcConfig& config);

}  // namespace clc
