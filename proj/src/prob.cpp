#include "clc/prob.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "clc/errors.hpp"

namespace clc {

Matrix softmax_rows(const Matrix& logits) {
  if (!all_finite(logits)) throw InvalidInput("softmax_rows: non-finite logits");
  Matrix out = logits;
  for (std::size_t r = 0; r < out.rows(); ++r) {
    auto row = out.row(r);
    const double peak = *std::max_element(row.begin(), row.end());
    double sum = 0.0;
    for (double& v : row) {
      v = std::exp(v - peak);
      sum += v;
    }
    for (double& v : row) v /= sum;
  }
  return out;
}

double shannon_entropy(std::span<const double> p) {
  double h = 0.0;
  double total = 0.0;
  for (double v : p) {
    if (v < 0.0 || !std::isfinite(v))
      throw InvalidInput("shannon_entropy: negative or non-finite probability");
    total += v;
    if (v > 0.0) h -= v * std::log(v);
  }
  if (std::abs(total - 1.0) > 1e-9)
    throw InvalidInput("shannon_entropy: row does not sum to 1");
  return std::max(h, 0.0);
}

std::vector<double> shannon_entropy_rows(const Matrix& probs) {
  std::vector<double> out(probs.rows());
  for (std::size_t r = 0; r < probs.rows(); ++r) out[r] = shannon_entropy(probs.row(r));
  return out;
}

std::vector<double> cross_entropy_rows(const Matrix& targets, const Matrix& probs) {
  if (!targets.same_shape(probs)) throw InvalidInput("cross_entropy: shape mismatch");
  std::vector<double> out(probs.rows());
  for (std::size_t r = 0; r < probs.rows(); ++r) {
    auto t = targets.row(r);
    auto q = probs.row(r);
    double loss = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) {
      if (t[i] != 0.0) loss -= t[i] * std::log(std::max(q[i], kLogClamp));
    }
    out[r] = loss;
  }
  return out;
}

double cross_entropy(const Matrix& targets, const Matrix& probs) {
  auto rows = cross_entropy_rows(targets, probs);
  if (rows.empty()) return 0.0;
  double sum = 0.0;
  for (double v : rows) sum += v;
  return sum / static_cast<double>(rows.size());
}

Label argmax(std::span<const double> row) {
  if (row.empty()) throw InvalidInput("argmax: empty row");
  std::size_t best = 0;
  for (std::size_t i = 1; i < row.size(); ++i)
    if (row[i] > row[best]) best = i;
  return static_cast<Label>(best);
}

std::vector<Label> argmax_rows(const Matrix& m) {
  if (m.empty()) throw InvalidInput("argmax_rows: empty input");
  std::vector<Label> out(m.rows());
  for (std::size_t r = 0; r < m.rows(); ++r) out[r] = argmax(m.row(r));
  return out;
}

}  // namespace clc
