#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <utility>
#include <vector>

#include "clc/matrix.hpp"
#include "clc/rng.hpp"

namespace clc {

// Features plus both label sets. clean_labels feed metrics only; trainers
// receive a TrainView, which does not expose them.
struct LabeledDataset {
  Matrix features;
  std::vector<Label> clean_labels;
  std::vector<Label> noisy_labels;
  std::size_t classes = 0;

  std::size_t size() const { return clean_labels.size(); }
  std::size_t dim() const { return features.cols(); }
  // Throws InvalidInput if labels are out of range, lengths disagree or
  // features are non-finite.
  void validate() const;
};

struct TrainView {
  const Matrix& features;
  std::span<const Label> noisy_labels;
  std::size_t classes;

  std::size_t size() const { return noisy_labels.size(); }
};

inline TrainView train_view(const LabeledDataset& d) {
  return TrainView{d.features, d.noisy_labels, d.classes};
}

// Isotropic unit-variance clusters whose means sit on a circle in the first
// two dimensions, adjacent means `separation` apart. Features standardized.
LabeledDataset gen_gaussian_blobs(std::size_t classes, std::size_t n_per_class, std::size_t dim,
                                  double separation, SeededRng& rng);

// Concentric rings in 2-D, class k at radius k+1 with N(0, noise_std) radial
// jitter. Features standardized.
LabeledDataset gen_rings(std::size_t classes, std::size_t n_per_class, double noise_std,
                         SeededRng& rng);

// IDX images (magic 0x00000803, u8) and labels (magic 0x00000801, u8).
// Pixels scaled to [0,1]; max_n == 0 keeps every example.
LabeledDataset load_idx(const std::filesystem::path& images_path,
                        const std::filesystem::path& labels_path, std::size_t max_n);

// Class-stratified disjoint split; each part keeps the original order.
std::pair<LabeledDataset, LabeledDataset> train_test_split(const LabeledDataset& data,
                                                           double test_fraction, SeededRng& rng);

LabeledDataset subset(const LabeledDataset& data, std::span<const std::size_t> indices);

}  // namespace clc
