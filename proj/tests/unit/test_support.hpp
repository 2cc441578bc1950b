#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "clc/matrix.hpp"
#include "clc/rng.hpp"

namespace clc::test {

inline Matrix random_matrix(std::size_t rows, std::size_t cols, SeededRng& rng, double scale = 1.0) {
  Matrix m(rows, cols);
  for (double& v : m.values()) v = scale * rng.normal();
  return m;
}

// Rows drawn from a softmax of random logits, so every entry is positive.
inline Matrix random_probs(std::size_t rows, std::size_t cols, SeededRng& rng, double spread = 2.0) {
  Matrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    double total = 0.0;
    for (std::size_t c = 0; c < cols; ++c) total += (m(r, c) = std::exp(spread * rng.normal()));
    for (std::size_t c = 0; c < cols; ++c) m(r, c) /= total;
  }
  return m;
}

// Central difference of a scalar function with respect to one entry of x.
inline double central_diff(const std::function<double()>& f, double& x, double h = 1e-5) {
  const double saved = x;
  x = saved + h;
  const double up = f();
  x = saved - h;
  const double down = f();
  x = saved;
  return (up - down) / (2 * h);
}

inline double rel_err(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-6});
}

}  // namespace clc::test

#include "clc/dataset.hpp"
#include "clc/noise.hpp"

namespace clc::test {

struct NoisyData {
  LabeledDataset train;
  LabeledDataset test;
};

inline NoisyData noisy_blobs(NoiseSpec noise, std::size_t classes = 4, std::size_t n_per_class = 100,
                             std::size_t dim = 2, double separation = 10.0, std::uint64_t seed = 1) {
  SeededRng gen(seed, "data");
  LabeledDataset all = gen_gaussian_blobs(classes, n_per_class, dim, separation, gen);
  SeededRng split(seed, "split");
  auto [train, test] = train_test_split(all, 0.2, split);
  SeededRng noise_rng(seed, "noise");
  train.noisy_labels = inject_noise(train.clean_labels, build_transition(noise, classes), noise_rng);
  return {std::move(train), std::move(test)};
}

}  // namespace clc::test
