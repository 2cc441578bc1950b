#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "clc/dataset.hpp"
#include "clc/evaluation.hpp"
#include "clc/noise.hpp"
#include "clc/training.hpp"

namespace clc {

enum class BaselineMethod {
  standard,
  bootstrap,
  forward,
  decouple,
  self_paced,
  co_teaching,
  co_distillation,
};

std::string to_string(BaselineMethod method);

struct BaselineConfig {
  BaselineMethod method = BaselineMethod::standard;
  TrainSettings train;
  double bootstrap_kappa = 0.95;
  double codistill_lambda = 1.0;
  // Noise ratio given to the small-loss methods as side information.
  double noise_ratio = 0.0;
  std::size_t schedule_epochs = 10;

  void validate() const;
};

// Fraction of each batch kept by the small-loss methods after
// `epochs_since_warm_up` epochs: 1 - r * min(t / schedule_epochs, 1).
double keep_fraction(double noise_ratio, std::size_t epochs_since_warm_up,
                     std::size_t schedule_epochs);

// Positions (ascending) of the round(fraction * n) smallest losses; ties go
// to the lower position.
std::vector<std::size_t> small_loss_indices(std::span<const double> losses, double fraction);

// kappa * onehot + (1 - kappa) * probs, row by row.
Matrix bootstrap_targets(const Matrix& onehot, const Matrix& probs, double kappa);

// Noisy-label posteriors pushed through T: q = p T.
Matrix forward_corrected_probs(const Matrix& probs, const TransitionMatrix& t);

struct ForwardLoss {
  double loss = 0.0;
  // Row-stochastic targets r_k = p_k T(k, y) / q_y; the logit gradient of the
  // forward-corrected loss is (p - r) / n.
  Matrix targets;
};

ForwardLoss forward_corrected_loss(const Matrix& probs, std::span<const Label> noisy_labels,
                                   const TransitionMatrix& t);

TrainResult train_standard(const TrainView& data, const Evaluator& evaluator,
                           const BaselineConfig& config);
TrainResult train_bootstrap(const TrainView& data, const Evaluator& evaluator,
                            const BaselineConfig& config);
TrainResult train_forward(const TrainView& data, const Evaluator& evaluator,
                          const BaselineConfig& config, const TransitionMatrix& t);
TrainResult train_decouple(const TrainView& data, const Evaluator& evaluator,
                           const BaselineConfig& config);
TrainResult train_self_paced(const TrainView& data, const Evaluator& evaluator,
                             const BaselineConfig& config);
TrainResult train_coteaching(const TrainView& data, const Evaluator& evaluator,
                             const BaselineConfig& config);
TrainResult train_codistillation(const TrainView& data, const Evaluator& evaluator,
                                 const BaselineConfig& config);

// Dispatches on config.method; `t` is only read by forward.
TrainResult train_baseline(const TrainView& data, const Evaluator& evaluator,
                           const BaselineConfig& config, const TransitionMatrix& t);

}  // namespace clc
