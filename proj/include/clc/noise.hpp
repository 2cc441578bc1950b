#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "clc/matrix.hpp"
#include "clc/rng.hpp"

namespace clc {

enum class NoiseKind { symmetric, pairwise, asymmetric };

std::string to_string(NoiseKind kind);
NoiseKind parse_noise_kind(const std::string& name);

struct NoiseSpec {
  NoiseKind kind = NoiseKind::symmetric;
  double ratio = 0.0;
  // (source -> destination) flips, asymmetric only. Empty means the default
  // pairing (2k+1 -> 2k).
  std::vector<std::pair<Label, Label>> pairs;
  std::uint64_t seed = 0;
};

std::vector<std::pair<Label, Label>> default_asymmetric_pairs(std::size_t classes);

// Row-stochastic c x c matrix: entries(i, j) = P(noisy = j | clean = i).
class TransitionMatrix {
 public:
  explicit TransitionMatrix(Matrix entries);
  static TransitionMatrix identity(std::size_t classes);

  std::size_t classes() const { return entries_.rows(); }
  const Matrix& entries() const { return entries_; }
  double operator()(std::size_t i, std::size_t j) const { return entries_(i, j); }

 private:
  Matrix entries_;
};

TransitionMatrix build_transition(const NoiseSpec& spec, std::size_t classes);

// Each label is resampled independently from its transition row.
std::vector<Label> inject_noise(std::span<const Label> clean_labels, const TransitionMatrix& t,
                                SeededRng& rng);

struct ConfusionMatrix {
  std::size_t classes = 0;
  std::vector<std::uint64_t> counts;  // row-major, counts[i*c + j] = #{a = i, b = j}

  std::uint64_t count(std::size_t i, std::size_t j) const { return counts[i * classes + j]; }
  std::uint64_t total() const;
  // Rows scaled to sum to 1; all-zero rows stay zero.
  Matrix normalized() const;
};

ConfusionMatrix confusion_matrix(std::span<const Label> labels_a, std::span<const Label> labels_b,
                                 std::size_t classes);

}  // namespace clc
