#include "clc/mlp.hpp"

#include <algorithm>
#include <cmath>

#include "clc/errors.hpp"
#include "clc/prob.hpp"

namespace clc {

namespace {

void add_bias(Matrix& z, const std::vector<double>& bias) {
  for (std::size_t r = 0; r < z.rows(); ++r) {
    auto row = z.row(r);
    for (std::size_t c = 0; c < row.size(); ++c) row[c] += bias[c];
  }
}

void relu_in_place(Matrix& m) {
  for (double& v : m.values()) v = v > 0.0 ? v : 0.0;
}

void check_input(const MlpNetwork& net, const Matrix& x) {
  if (net.weights.empty()) throw InvalidInput("forward: uninitialized network");
  if (x.empty() || x.cols() != net.input_dim())
    throw InvalidInput("forward: input has " + std::to_string(x.cols()) +
                       " columns, network expects " + std::to_string(net.input_dim()));
}

void check_same_parameters(const MlpNetwork& net, const Gradients& grads) {
  if (grads.weights.size() != net.weights.size() || grads.biases.size() != net.biases.size())
    throw InvalidInput("adam_step: gradient layer count mismatch");
  for (std::size_t l = 0; l < net.weights.size(); ++l) {
    if (!grads.weights[l].same_shape(net.weights[l]) ||
        grads.biases[l].size() != net.biases[l].size())
      throw InvalidInput("adam_step: gradient shape mismatch at layer " + std::to_string(l));
  }
}

}  // namespace

std::size_t MlpNetwork::parameter_count() const {
  std::size_t n = 0;
  for (std::size_t l = 0; l < weights.size(); ++l) n += weights[l].size() + biases[l].size();
  return n;
}

Gradients& Gradients::operator*=(double s) {
  for (auto& w : weights)
    for (double& v : w.values()) v *= s;
  for (auto& b : biases)
    for (double& v : b) v *= s;
  return *this;
}

Gradients& Gradients::operator+=(const Gradients& other) {
  if (other.weights.size() != weights.size()) throw InvalidInput("Gradients: layer mismatch");
  for (std::size_t l = 0; l < weights.size(); ++l) {
    if (!weights[l].same_shape(other.weights[l])) throw InvalidInput("Gradients: shape mismatch");
    auto dst = weights[l].values();
    auto src = other.weights[l].values();
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
    for (std::size_t i = 0; i < biases[l].size(); ++i) biases[l][i] += other.biases[l][i];
  }
  return *this;
}

AdamState::AdamState(const MlpNetwork& net, double lr) : learning_rate(lr) {
  for (std::size_t l = 0; l < net.layer_count(); ++l) {
    m_weights.emplace_back(net.weights[l].rows(), net.weights[l].cols());
    v_weights.emplace_back(net.weights[l].rows(), net.weights[l].cols());
    m_biases.emplace_back(net.biases[l].size(), 0.0);
    v_biases.emplace_back(net.biases[l].size(), 0.0);
  }
}

MlpNetwork init_network(std::span<const std::size_t> layer_dims, SeededRng& rng) {
  if (layer_dims.size() < 2) throw InvalidInput("init_network: need at least two layer dims");
  if (std::find(layer_dims.begin(), layer_dims.end(), 0u) != layer_dims.end())
    throw InvalidInput("init_network: layer dims must be positive");
  MlpNetwork net;
  net.layer_dims.assign(layer_dims.begin(), layer_dims.end());
  for (std::size_t l = 0; l + 1 < layer_dims.size(); ++l) {
    const double stddev = std::sqrt(2.0 / static_cast<double>(layer_dims[l]));
    Matrix w(layer_dims[l], layer_dims[l + 1]);
    for (double& v : w.values()) v = stddev * rng.normal();
    net.weights.push_back(std::move(w));
    net.biases.emplace_back(layer_dims[l + 1], 0.0);
  }
  return net;
}

ForwardResult forward(const MlpNetwork& net, const Matrix& x) {
  check_input(net, x);
  ForwardResult result;
  result.cache.network_version = net.version;
  Matrix a = x;
  for (std::size_t l = 0; l < net.layer_count(); ++l) {
    Matrix z = matmul(a, net.weights[l]);
    add_bias(z, net.biases[l]);
    result.cache.inputs.push_back(std::move(a));
    a = z;
    if (l + 1 < net.layer_count()) relu_in_place(a);
    result.cache.pre_activations.push_back(std::move(z));
  }
  result.logits = std::move(a);
  return result;
}

Matrix predict_logits(const MlpNetwork& net, const Matrix& x) {
  check_input(net, x);
  Matrix a = matmul(x, net.weights[0]);
  add_bias(a, net.biases[0]);
  for (std::size_t l = 1; l < net.layer_count(); ++l) {
    relu_in_place(a);
    Matrix z = matmul(a, net.weights[l]);
    add_bias(z, net.biases[l]);
    a = std::move(z);
  }
  return a;
}

Matrix predict_probs(const MlpNetwork& net, const Matrix& x) {
  return softmax_rows(predict_logits(net, x));
}

Gradients backward(const MlpNetwork& net, const ForwardCache& cache, const Matrix& grad_logits) {
  const std::size_t layers = net.layer_count();
  if (cache.network_version != net.version)
    throw InvalidInput("backward: cache was produced by a different network state");
  if (cache.inputs.size() != layers || cache.pre_activations.size() != layers)
    throw InvalidInput("backward: cache layer count mismatch");
  for (std::size_t l = 0; l < layers; ++l) {
    if (cache.inputs[l].cols() != net.layer_dims[l] ||
        cache.pre_activations[l].cols() != net.layer_dims[l + 1])
      throw InvalidInput("backward: cache does not match network shape");
  }
  if (grad_logits.rows() != cache.batch_size() || grad_logits.cols() != net.classes())
    throw InvalidInput("backward: grad_logits shape does not match forward batch");

  Gradients grads;
  grads.weights.resize(layers);
  grads.biases.resize(layers);
  Matrix delta = grad_logits;
  for (std::size_t l = layers; l-- > 0;) {
    grads.weights[l] = matmul_at_b(cache.inputs[l], delta);
    std::vector<double> db(delta.cols(), 0.0);
    for (std::size_t r = 0; r < delta.rows(); ++r) {
      auto row = delta.row(r);
      for (std::size_t c = 0; c < row.size(); ++c) db[c] += row[c];
    }
    grads.biases[l] = std::move(db);
    if (l == 0) break;
    Matrix upstream = matmul_a_bt(delta, net.weights[l]);
    const Matrix& z = cache.pre_activations[l - 1];
    auto up = upstream.values();
    auto zv = z.values();
    for (std::size_t i = 0; i < up.size(); ++i)
      if (!(zv[i] > 0.0)) up[i] = 0.0;
    delta = std::move(upstream);
  }
  return grads;
}

Matrix softce_grad_logits(const Matrix& targets, const Matrix& probs) {
  if (!targets.same_shape(probs)) throw InvalidInput("softce_grad_logits: shape mismatch");
  if (probs.empty()) return {};
  const double n = static_cast<double>(probs.rows());
  Matrix grad(probs.rows(), probs.cols());
  auto g = grad.values();
  auto p = probs.values();
  auto t = targets.values();
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = (p[i] - t[i]) / n;
  return grad;
}

Matrix entropy_grad_logits(const Matrix& probs) {
  if (probs.empty()) return {};
  const double n = static_cast<double>(probs.rows());
  Matrix grad(probs.rows(), probs.cols());
  for (std::size_t r = 0; r < probs.rows(); ++r) {
    auto q = probs.row(r);
    auto g = grad.row(r);
    double h = 0.0;
    for (double v : q)
      if (v > 0.0) h -= v * std::log(v);
    for (std::size_t k = 0; k < q.size(); ++k) {
      const double log_q = q[k] > 0.0 ? std::log(q[k]) : 0.0;
      g[k] = -q[k] * (log_q + h) / n;
    }
  }
  return grad;
}

void adam_step(MlpNetwork& net, const Gradients& grads, AdamState& state) {
  check_same_parameters(net, grads);
  if (state.m_weights.size() != net.layer_count())
    throw InvalidInput("adam_step: optimizer state does not match network");
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double correction1 = 1.0 - std::pow(state.beta1, t);
  const double correction2 = 1.0 - std::pow(state.beta2, t);
  auto update = [&](std::span<double> params, std::span<const double> g, std::span<double> m,
                    std::span<double> v) {
    if (m.size() != params.size()) throw InvalidInput("adam_step: optimizer state shape mismatch");
    for (std::size_t i = 0; i < params.size(); ++i) {
      m[i] = state.beta1 * m[i] + (1.0 - state.beta1) * g[i];
      v[i] = state.beta2 * v[i] + (1.0 - state.beta2) * g[i] * g[i];
      const double m_hat = m[i] / correction1;
      const double v_hat = v[i] / correction2;
      params[i] -= state.learning_rate * m_hat / (std::sqrt(v_hat) + state.epsilon);
    }
  };
  for (std::size_t l = 0; l < net.layer_count(); ++l) {
    update(net.weights[l].values(), grads.weights[l].values(), state.m_weights[l].values(),
           state.v_weights[l].values());
    update(net.biases[l], grads.biases[l], state.m_biases[l], state.v_biases[l]);
  }
  ++net.version;
}

}  // namespace clc
