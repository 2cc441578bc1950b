#pragma once

#include <span>
#include <vector>

#include "clc/matrix.hpp"

namespace clc {

// Entropies are measured in nats throughout.
inline constexpr double kLogClamp = 1e-12;

Matrix softmax_rows(const Matrix& logits);

// Shannon entropy of a single probability vector, 0 log 0 = 0.
double shannon_entropy(std::span<const double> p);
std::vector<double> shannon_entropy_rows(const Matrix& probs);

// Mean over rows of -sum_i t_i log max(q_i, kLogClamp).
double cross_entropy(const Matrix& targets, const Matrix& probs);
// Per-row version of cross_entropy.
std::vector<double> cross_entropy_rows(const Matrix& targets, const Matrix& probs);

// Ties resolve to the lowest index.
std::vector<Label> argmax_rows(const Matrix& m);
Label argmax(std::span<const double> row);

}  // namespace clc
