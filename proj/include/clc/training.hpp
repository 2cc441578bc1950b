#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "clc/dataset.hpp"
#include "clc/entropy_select.hpp"
#include "clc/metrics.hpp"
#include "clc/mlp.hpp"

namespace clc {

class Evaluator;

// Settings shared by every trainer.
struct TrainSettings {
  std::size_t epochs = 200;
  std::size_t batch_size = 128;
  std::size_t warm_up_epochs = 10;
  double learning_rate = 1e-3;
  std::vector<std::size_t> hidden_dims{64, 64};
  std::uint64_t seed = 0;
  // Stream labels for network f and g. Each network draws its weight init
  // from "init/<label>" and its batch order from "shuffle/<label>".
  std::array<std::string, 2> net_streams{"f", "g"};

  void validate() const;
};

// Values of the three CLC objective terms and their weighted sum.
struct LossBreakdown {
  double ce_low = 0.0;
  double ent_own = 0.0;
  double ce_high = 0.0;
  double total = 0.0;
};

// A network with its optimizer and its own batch-order stream.
struct NetUnit {
  MlpNetwork net;
  AdamState adam;
  SeededRng shuffle;
};

NetUnit make_unit(const TrainView& data, const TrainSettings& settings, std::size_t which);

struct Batch {
  std::vector<std::size_t> indices;  // positions in the training set
  Matrix x;
  std::vector<Label> labels;  // noisy
  Matrix onehot;

  std::size_t size() const { return indices.size(); }
};

Batch make_batch(const TrainView& data, std::span<const std::size_t> indices);

// Fresh permutation split into consecutive batches; the last may be short.
std::vector<std::vector<std::size_t>> epoch_batches(SeededRng& rng, std::size_t n,
                                                    std::size_t batch_size);

// Backward + Adam update from a logit gradient.
void apply_gradient(NetUnit& unit, const ForwardCache& cache, const Matrix& grad_logits);
// One cross-entropy step on the noisy labels; returns the batch loss.
double standard_step(NetUnit& unit, const Batch& batch);

// Writes `rows` of `sub` into `full` at `indices`, adding to what is there.
void scatter_add_rows(Matrix& full, std::span<const std::size_t> indices, const Matrix& sub,
                      double scale = 1.0);

// Per-epoch bookkeeping filled by the trainers.
struct EpochStats {
  // Effective label network f was trained towards for every training
  // sample this epoch; -1 if the sample gave f no supervision.
  std::vector<Label> effective_targets;
  double loss_sum = 0.0;
  std::size_t loss_batches = 0;
  std::array<std::size_t, 2> n_low{};
  std::array<std::size_t, 2> n_high{};
  LossBreakdown term_sums{};
  std::size_t term_batches = 0;
  bool partitioned = false;  // n_low/n_high were filled this epoch

  void reset(std::size_t n);
  void record_noisy(const Batch& batch);
  void record_loss(double loss) {
    loss_sum += loss;
    ++loss_batches;
  }
};

struct StepInfo {
  std::size_t epoch = 0;                 // 1-based
  std::size_t epochs_since_warm_up = 0;  // 0 in the first post-warm-up epoch
  double gamma = 0.0;
};

// Post-warm-up update for one step. units[i] trains on batches[i].
using MethodStep =
    std::function<void(std::span<NetUnit> units, std::span<const Batch> batches,
                       const StepInfo& info, EpochStats& stats)>;

struct LoopSpec {
  std::size_t network_count = 1;
  MetricsLayout layout = MetricsLayout::single;
  GammaPolicy gamma = GammaPolicy::automatic();
  bool gamma_from_both = false;
};

struct TrainResult {
  MetricsLayout layout = MetricsLayout::single;
  std::vector<EpochMetrics> history;
  std::vector<MlpNetwork> networks;
  // effective_targets of the final epoch (network f)
  std::vector<Label> final_targets;
  std::optional<double> gamma;
};

// Shared epoch/batch driver: warm-up epochs train every network with plain
// cross-entropy on its own batch order; the threshold is resolved right after
// warm-up; later steps are delegated to `step`. Metrics are taken by the
// evaluator after every epoch.
TrainResult run_training(const TrainView& data, const Evaluator& evaluator,
                         const TrainSettings& settings, const LoopSpec& spec,
                         const MethodStep& step);

}  // namespace clc
