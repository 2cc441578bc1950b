#include "clc/noise.hpp"

#include <cmath>
#include <numeric>
#include <set>

#include "clc/errors.hpp"

namespace clc {

std::string to_string(NoiseKind kind) {
  switch (kind) {
    case NoiseKind::symmetric: return "symmetric";
    case NoiseKind::pairwise: return "pairwise";
    case NoiseKind::asymmetric: return "asymmetric";
  }
  return "unknown";
}

NoiseKind parse_noise_kind(const std::string& name) {
  if (name == "symmetric") return NoiseKind::symmetric;
  if (name == "pairwise") return NoiseKind::pairwise;
  if (name == "asymmetric") return NoiseKind::asymmetric;
  throw ConfigError("unknown noise kind '" + name + "'");
}

std::vector<std::pair<Label, Label>> default_asymmetric_pairs(std::size_t classes) {
  std::vector<std::pair<Label, Label>> pairs;
  for (std::size_t k = 0; 2 * k + 1 < classes; ++k)
    pairs.emplace_back(static_cast<Label>(2 * k + 1), static_cast<Label>(2 * k));
  return pairs;
}

TransitionMatrix::TransitionMatrix(Matrix entries) : entries_(std::move(entries)) {
  if (entries_.empty() || entries_.rows() != entries_.cols())
    throw InvalidInput("TransitionMatrix: must be square and non-empty");
  for (std::size_t i = 0; i < entries_.rows(); ++i) {
    double sum = 0.0;
    for (double v : entries_.row(i)) {
      if (!(v >= 0.0 && v <= 1.0)) throw InvalidInput("TransitionMatrix: entry outside [0,1]");
      sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-12)
      throw InvalidInput("TransitionMatrix: row " + std::to_string(i) + " does not sum to 1");
  }
}

TransitionMatrix TransitionMatrix::identity(std::size_t classes) {
  Matrix m(classes, classes);
  for (std::size_t i = 0; i < classes; ++i) m(i, i) = 1.0;
  return TransitionMatrix(std::move(m));
}

TransitionMatrix build_transition(const NoiseSpec& spec, std::size_t classes) {
  if (classes < 2) throw ConfigError("build_transition: need at least two classes");
  const double r = spec.ratio;
  if (!(r >= 0.0 && r < 1.0)) throw ConfigError("build_transition: ratio must lie in [0, 1)");

  Matrix m(classes, classes);
  const std::size_t c = classes;
  switch (spec.kind) {
    case NoiseKind::symmetric: {
      const double off = r / static_cast<double>(c - 1);
      for (std::size_t i = 0; i < c; ++i)
        for (std::size_t j = 0; j < c; ++j) m(i, j) = i == j ? 1.0 - r : off;
      break;
    }
    case NoiseKind::pairwise:
      for (std::size_t i = 0; i < c; ++i) {
        m(i, i) = 1.0 - r;
        m(i, (i + 1) % c) += r;
      }
      break;
    case NoiseKind::asymmetric: {
      auto pairs = spec.pairs.empty() ? default_asymmetric_pairs(c) : spec.pairs;
      for (std::size_t i = 0; i < c; ++i) m(i, i) = 1.0;
      std::set<Label> sources;
      for (auto [src, dst] : pairs) {
        if (src < 0 || dst < 0 || static_cast<std::size_t>(src) >= c ||
            static_cast<std::size_t>(dst) >= c)
          throw ConfigError("build_transition: pair class out of range");
        if (src == dst) throw ConfigError("build_transition: pair source equals destination");
        if (!sources.insert(src).second)
          throw ConfigError("build_transition: duplicate pair source " + std::to_string(src));
        m(src, src) = 1.0 - r;
        m(src, dst) = r;
      }
      break;
    }
  }
  return TransitionMatrix(std::move(m));
}

std::vector<Label> inject_noise(std::span<const Label> clean_labels, const TransitionMatrix& t,
                                SeededRng& rng) {
  std::vector<Label> noisy(clean_labels.size());
  for (std::size_t n = 0; n < clean_labels.size(); ++n) {
    const Label y = clean_labels[n];
    if (y < 0 || static_cast<std::size_t>(y) >= t.classes())
      throw InvalidInput("inject_noise: label " + std::to_string(y) + " out of range");
    noisy[n] = static_cast<Label>(rng.categorical(t.entries().row(static_cast<std::size_t>(y))));
  }
  return noisy;
}

std::uint64_t ConfusionMatrix::total() const {
  return std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
}

Matrix ConfusionMatrix::normalized() const {
  Matrix m(classes, classes);
  for (std::size_t i = 0; i < classes; ++i) {
    std::uint64_t row_total = 0;
    for (std::size_t j = 0; j < classes; ++j) row_total += count(i, j);
    if (row_total == 0) continue;
    for (std::size_t j = 0; j < classes; ++j)
      m(i, j) = static_cast<double>(count(i, j)) / static_cast<double>(row_total);
  }
  return m;
}

ConfusionMatrix confusion_matrix(std::span<const Label> labels_a, std::span<const Label> labels_b,
                                 std::size_t classes) {
  if (labels_a.size() != labels_b.size())
    throw InvalidInput("confusion_matrix: label sequences differ in length");
  if (classes == 0) throw InvalidInput("confusion_matrix: classes must be positive");
  ConfusionMatrix cm{classes, std::vector<std::uint64_t>(classes * classes, 0)};
  for (std::size_t n = 0; n < labels_a.size(); ++n) {
    const Label a = labels_a[n];
    const Label b = labels_b[n];
    if (a < 0 || b < 0 || static_cast<std::size_t>(a) >= classes ||
        static_cast<std::size_t>(b) >= classes)
      throw InvalidInput("confusion_matrix: label out of range");
    ++cm.counts[static_cast<std::size_t>(a) * classes + static_cast<std::size_t>(b)];
  }
  return cm;
}

}  // namespace clc
