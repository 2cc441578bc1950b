#include "clc/training.hpp"

#include <cmath>
#include <numeric>

#include "clc/errors.hpp"
#include "clc/evaluation.hpp"
#include "clc/prob.hpp"

namespace clc {

void TrainSettings::validate() const {
  if (epochs == 0) throw ConfigError("epochs must be positive");
  if (batch_size == 0) throw ConfigError("batch_size must be positive");
  if (!(learning_rate > 0.0)) throw ConfigError("learning_rate must be positive");
  if (warm_up_epochs >= epochs) throw ConfigError("warm_up_epochs must be below epochs");
  for (auto h : hidden_dims)
    if (h == 0) throw ConfigError("hidden dims must be positive");
}

NetUnit make_unit(const TrainView& data, const TrainSettings& settings, std::size_t which) {
  const auto& label = settings.net_streams.at(which);
  std::vector<std::size_t> dims{data.features.cols()};
  dims.insert(dims.end(), settings.hidden_dims.begin(), settings.hidden_dims.end());
  dims.push_back(data.classes);
  SeededRng init(settings.seed, "init/" + label);
  MlpNetwork net = init_network(dims, init);
  AdamState adam(net, settings.learning_rate);
  return NetUnit{std::move(net), std::move(adam), SeededRng(settings.seed, "shuffle/" + label)};
}

Batch make_batch(const TrainView& data, std::span<const std::size_t> indices) {
  Batch b;
  b.indices.assign(indices.begin(), indices.end());
  b.x = gather_rows(data.features, indices);
  for (auto i : indices) b.labels.push_back(data.noisy_labels[i]);
  b.onehot = one_hot(b.labels, data.classes);
  return b;
}

std::vector<std::vector<std::size_t>> epoch_batches(SeededRng& rng, std::size_t n,
                                                    std::size_t batch_size) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  rng.shuffle(std::span<std::size_t>(order));
  std::vector<std::vector<std::size_t>> batches;
  for (std::size_t start = 0; start < n; start += batch_size) {
    const auto end = std::min(n, start + batch_size);
    batches.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(start),
                         order.begin() + static_cast<std::ptrdiff_t>(end));
  }
  return batches;
}

void apply_gradient(NetUnit& unit, const ForwardCache& cache, const Matrix& grad_logits) {
  adam_step(unit.net, backward(unit.net, cache, grad_logits), unit.adam);
}

double standard_step(NetUnit& unit, const Batch& batch) {
  auto fwd = forward(unit.net, batch.x);
  const Matrix probs = softmax_rows(fwd.logits);
  const double loss = cross_entropy(batch.onehot, probs);
  apply_gradient(unit, fwd.cache, softce_grad_logits(batch.onehot, probs));
  return loss;
}

void scatter_add_rows(Matrix& full, std::span<const std::size_t> indices, const Matrix& sub,
                      double scale) {
  if (indices.empty()) return;
  if (sub.rows() != indices.size() || sub.cols() != full.cols())
    throw InvalidInput("scatter_add_rows: shape mismatch");
  for (std::size_t k = 0; k < indices.size(); ++k) {
    auto dst = full.row(indices[k]);
    auto src = sub.row(k);
    for (std::size_t c = 0; c < dst.size(); ++c) dst[c] += scale * src[c];
  }
}

void EpochStats::reset(std::size_t n) {
  *this = EpochStats{};
  effective_targets.assign(n, -1);
}

void EpochStats::record_noisy(const Batch& batch) {
  for (std::size_t k = 0; k < batch.size(); ++k)
    effective_targets[batch.indices[k]] = batch.labels[k];
}

namespace {

double resolve_gamma(const GammaPolicy& policy, bool from_both, std::span<const NetUnit> units,
                     const Matrix& features) {
  if (policy.mode == GammaPolicy::Mode::fixed) return policy.value;
  double gamma = estimate_gamma(units[0].net, features);
  if (from_both && units.size() > 1) gamma = 0.5 * (gamma + estimate_gamma(units[1].net, features));
  return gamma;
}

}  // namespace

TrainResult run_training(const TrainView& data, const Evaluator& evaluator,
                         const TrainSettings& settings, const LoopSpec& spec,
                         const MethodStep& step) {
  settings.validate();
  if (spec.network_count < 1 || spec.network_count > 2)
    throw ConfigError("run_training: one or two networks supported");
  if (spec.gamma.mode == GammaPolicy::Mode::fixed && std::isnan(spec.gamma.value))
    throw ConfigError("fixed gamma must be a number");
  if (data.size() == 0) throw InvalidInput("run_training: empty training set");

  std::vector<NetUnit> units;
  for (std::size_t u = 0; u < spec.network_count; ++u) units.push_back(make_unit(data, settings, u));

  TrainResult result;
  result.layout = spec.layout;
  std::optional<double> gamma;
  if (settings.warm_up_epochs == 0)
    gamma = resolve_gamma(spec.gamma, spec.gamma_from_both, units, data.features);

  EpochStats stats;
  std::vector<Batch> batches(units.size());
  for (std::size_t epoch = 1; epoch <= settings.epochs; ++epoch) {
    stats.reset(data.size());
    std::vector<std::vector<std::vector<std::size_t>>> plans;
    for (auto& unit : units) plans.push_back(epoch_batches(unit.shuffle, data.size(), settings.batch_size));
    const bool warm = epoch <= settings.warm_up_epochs;
    StepInfo info{epoch, warm ? 0 : epoch - settings.warm_up_epochs - 1, gamma.value_or(0.0)};

    for (std::size_t j = 0; j < plans[0].size(); ++j) {
      for (std::size_t u = 0; u < units.size(); ++u) batches[u] = make_batch(data, plans[u][j]);
      if (warm) {
        for (std::size_t u = 0; u < units.size(); ++u) {
          const double loss = standard_step(units[u], batches[u]);
          if (u == 0) {
            stats.record_loss(loss);
            stats.record_noisy(batches[0]);
          }
        }
      } else {
        step(units, batches, info, stats);
      }
    }

    if (epoch == settings.warm_up_epochs)
      gamma = resolve_gamma(spec.gamma, spec.gamma_from_both, units, data.features);

    result.history.push_back(evaluator.evaluate(static_cast<int>(epoch), units[0].net,
                                                units.size() > 1 ? &units[1].net : nullptr,
                                                stats, gamma, spec.layout));
  }
  for (auto& unit : units) result.networks.push_back(std::move(unit.net));
  result.final_targets = std::move(stats.effective_targets);
  result.gamma = gamma;
  return result;
}

}  // namespace clc
