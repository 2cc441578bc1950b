#include "clc/dataset.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <numbers>
#include <string>

#include "clc/errors.hpp"

namespace clc {

namespace {

void standardize_columns(Matrix& x) {
  const auto n = static_cast<double>(x.rows());
  for (std::size_t c = 0; c < x.cols(); ++c) {
    double mean = 0.0;
    for (std::size_t r = 0; r < x.rows(); ++r) mean += x(r, c);
    mean /= n;
    double var = 0.0;
    for (std::size_t r = 0; r < x.rows(); ++r) var += (x(r, c) - mean) * (x(r, c) - mean);
    const double stddev = std::sqrt(var / n);
    const double scale = stddev > 0.0 ? 1.0 / stddev : 1.0;
    for (std::size_t r = 0; r < x.rows(); ++r) x(r, c) = (x(r, c) - mean) * scale;
  }
}

std::uint32_t read_be32(std::ifstream& in, const std::string& field) {
  std::array<unsigned char, 4> b{};
  if (!in.read(reinterpret_cast<char*>(b.data()), 4))
    throw LoadError("IDX file truncated while reading " + field);
  return (std::uint32_t{b[0]} << 24) | (std::uint32_t{b[1]} << 16) | (std::uint32_t{b[2]} << 8) |
         std::uint32_t{b[3]};
}

std::ifstream open_binary(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError("cannot open " + path.string());
  return in;
}

}  // namespace

void LabeledDataset::validate() const {
  if (clean_labels.size() != noisy_labels.size() || features.rows() != clean_labels.size())
    throw InvalidInput("LabeledDataset: features and label lengths disagree");
  auto in_range = [&](Label y) { return y >= 0 && static_cast<std::size_t>(y) < classes; };
  if (!std::all_of(clean_labels.begin(), clean_labels.end(), in_range) ||
      !std::all_of(noisy_labels.begin(), noisy_labels.end(), in_range))
    throw InvalidInput("LabeledDataset: label out of range");
  if (!all_finite(features)) throw InvalidInput("LabeledDataset: non-finite feature");
}

LabeledDataset gen_gaussian_blobs(std::size_t classes, std::size_t n_per_class, std::size_t dim,
                                  double separation, SeededRng& rng) {
  if (classes < 2 || dim < 2 || n_per_class == 0)
    throw InvalidInput("gen_gaussian_blobs: need classes >= 2, dim >= 2, n_per_class >= 1");
  if (!(separation >= 0.0)) throw InvalidInput("gen_gaussian_blobs: separation must be >= 0");
  const double radius =
      separation / (2.0 * std::sin(std::numbers::pi / static_cast<double>(classes)));
  LabeledDataset d;
  d.classes = classes;
  d.features = Matrix(classes * n_per_class, dim);
  for (std::size_t k = 0; k < classes; ++k) {
    const double angle = 2.0 * std::numbers::pi * static_cast<double>(k) /
                         static_cast<double>(classes);
    for (std::size_t i = 0; i < n_per_class; ++i) {
      auto row = d.features.row(k * n_per_class + i);
      for (double& v : row) v = rng.normal();
      row[0] += radius * std::cos(angle);
      row[1] += radius * std::sin(angle);
      d.clean_labels.push_back(static_cast<Label>(k));
    }
  }
  standardize_columns(d.features);
  d.noisy_labels = d.clean_labels;
  return d;
}

LabeledDataset gen_rings(std::size_t classes, std::size_t n_per_class, double noise_std,
                         SeededRng& rng) {
  if (classes < 2 || n_per_class == 0)
    throw InvalidInput("gen_rings: need classes >= 2 and n_per_class >= 1");
  if (!(noise_std >= 0.0)) throw InvalidInput("gen_rings: noise_std must be >= 0");
  LabeledDataset d;
  d.classes = classes;
  d.features = Matrix(classes * n_per_class, 2);
  for (std::size_t k = 0; k < classes; ++k) {
    for (std::size_t i = 0; i < n_per_class; ++i) {
      const double angle = 2.0 * std::numbers::pi * rng.uniform();
      const double radius = static_cast<double>(k + 1) + noise_std * rng.normal();
      auto row = d.features.row(k * n_per_class + i);
      row[0] = radius * std::cos(angle);
      row[1] = radius * std::sin(angle);
      d.clean_labels.push_back(static_cast<Label>(k));
    }
  }
  standardize_columns(d.features);
  d.noisy_labels = d.clean_labels;
  return d;
}

LabeledDataset load_idx(const std::filesystem::path& images_path,
                        const std::filesystem::path& labels_path, std::size_t max_n) {
  auto images = open_binary(images_path);
  auto labels = open_binary(labels_path);

  const auto image_magic = read_be32(images, "images.magic");
  if (image_magic != 0x00000803)
    throw LoadError("images.magic: expected 0x00000803 in " + images_path.string());
  const auto label_magic = read_be32(labels, "labels.magic");
  if (label_magic != 0x00000801)
    throw LoadError("labels.magic: expected 0x00000801 in " + labels_path.string());

  const std::size_t image_count = read_be32(images, "images.count");
  const std::size_t rows = read_be32(images, "images.rows");
  const std::size_t cols = read_be32(images, "images.cols");
  const std::size_t label_count = read_be32(labels, "labels.count");
  if (image_count != label_count)
    throw LoadError("images.count (" + std::to_string(image_count) + ") != labels.count (" +
                    std::to_string(label_count) + ")");
  if (image_count == 0 || rows == 0 || cols == 0) throw LoadError("images.count: empty IDX file");

  const std::size_t n = max_n == 0 ? image_count : std::min(max_n, image_count);
  const std::size_t d = rows * cols;
  std::vector<unsigned char> pixels(n * d);
  if (!images.read(reinterpret_cast<char*>(pixels.data()), static_cast<std::streamsize>(pixels.size())))
    throw LoadError("images.data: truncated pixel block in " + images_path.string());
  std::vector<unsigned char> raw_labels(n);
  if (!labels.read(reinterpret_cast<char*>(raw_labels.data()), static_cast<std::streamsize>(n)))
    throw LoadError("labels.data: truncated label block in " + labels_path.string());

  LabeledDataset out;
  out.features = Matrix(n, d);
  auto values = out.features.values();
  for (std::size_t i = 0; i < pixels.size(); ++i) values[i] = pixels[i] / 255.0;
  out.clean_labels.assign(raw_labels.begin(), raw_labels.end());
  const auto max_label = *std::max_element(raw_labels.begin(), raw_labels.end());
  out.classes = std::max<std::size_t>(2, std::size_t{max_label} + 1);
  out.noisy_labels = out.clean_labels;
  return out;
}

LabeledDataset subset(const LabeledDataset& data, std::span<const std::size_t> indices) {
  LabeledDataset out;
  out.classes = data.classes;
  out.features = gather_rows(data.features, indices);
  for (auto i : indices) {
    out.clean_labels.push_back(data.clean_labels[i]);
    out.noisy_labels.push_back(data.noisy_labels[i]);
  }
  return out;
}

std::pair<LabeledDataset, LabeledDataset> train_test_split(const LabeledDataset& data,
                                                           double test_fraction, SeededRng& rng) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0))
    throw InvalidInput("train_test_split: test_fraction must lie in (0, 1)");
  std::vector<std::vector<std::size_t>> by_class(data.classes);
  for (std::size_t i = 0; i < data.size(); ++i)
    by_class.at(static_cast<std::size_t>(data.clean_labels[i])).push_back(i);

  std::vector<bool> is_test(data.size(), false);
  for (auto& members : by_class) {
    rng.shuffle(std::span<std::size_t>(members));
    const auto n_test = static_cast<std::size_t>(
        std::llround(test_fraction * static_cast<double>(members.size())));
    for (std::size_t k = 0; k < n_test; ++k) is_test[members[k]] = true;
  }
  std::vector<std::size_t> train_idx, test_idx;
  for (std::size_t i = 0; i < data.size(); ++i) (is_test[i] ? test_idx : train_idx).push_back(i);
  if (train_idx.empty() || test_idx.empty())
    throw InvalidInput("train_test_split: split leaves an empty part");
  return {subset(data, train_idx), subset(data, test_idx)};
}

}  // namespace clc
