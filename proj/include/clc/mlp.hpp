#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "clc/matrix.hpp"
#include "clc/rng.hpp"

namespace clc {

// Fully-connected classifier: ReLU hidden layers, raw logits out.
// weights[l] has shape layer_dims[l] x layer_dims[l+1].
struct MlpNetwork {
  std::vector<std::size_t> layer_dims;
  std::vector<Matrix> weights;
  std::vector<std::vector<double>> biases;
  // Incremented by every optimizer step; forward caches remember it so a
  // backward pass against an updated network is rejected.
  std::uint64_t version = 0;

  std::size_t input_dim() const { return layer_dims.front(); }
  std::size_t classes() const { return layer_dims.back(); }
  std::size_t layer_count() const { return weights.size(); }
  std::size_t parameter_count() const;
};

// Activations retained by forward(): inputs[l] is the input to layer l and
// pre_activations[l] its affine output.
struct ForwardCache {
  std::vector<Matrix> inputs;
  std::vector<Matrix> pre_activations;
  std::uint64_t network_version = 0;

  std::size_t batch_size() const { return inputs.empty() ? 0 : inputs.front().rows(); }
};

struct Gradients {
  std::vector<Matrix> weights;
  std::vector<std::vector<double>> biases;

  Gradients& operator*=(double s);
  Gradients& operator+=(const Gradients& other);
};

struct AdamState {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::uint64_t step = 0;
  std::vector<Matrix> m_weights, v_weights;
  std::vector<std::vector<double>> m_biases, v_biases;

  AdamState() = default;
  AdamState(const MlpNetwork& net, double learning_rate);
};

struct ForwardResult {
  Matrix logits;
  ForwardCache cache;
};

// He-normal weights (std sqrt(2 / fan_in)), zero biases.
MlpNetwork init_network(std::span<const std::size_t> layer_dims, SeededRng& rng);

ForwardResult forward(const MlpNetwork& net, const Matrix& x);
// Forward pass without retaining a cache.
Matrix predict_logits(const MlpNetwork& net, const Matrix& x);
Matrix predict_probs(const MlpNetwork& net, const Matrix& x);

Gradients backward(const MlpNetwork& net, const ForwardCache& cache, const Matrix& grad_logits);

// Gradient of mean soft-target cross-entropy through softmax: (probs - targets) / n.
Matrix softce_grad_logits(const Matrix& targets, const Matrix& probs);
// Gradient of mean entropy through softmax: -q_k (ln q_k + H(q)) / n per row.
Matrix entropy_grad_logits(const Matrix& probs);

void adam_step(MlpNetwork& net, const Gradients& grads, AdamState& state);

}  // namespace clc
