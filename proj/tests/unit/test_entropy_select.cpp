#include <doctest.h>

#include <cmath>
#include <set>

#include "clc/entropy_select.hpp"
#include "clc/prob.hpp"
#include "test_support.hpp"

using namespace clc;

TEST_CASE("partition boundaries") {
  SeededRng rng(1, "part");
  Matrix p = test::random_probs(8, 4, rng);
  Matrix y = one_hot(std::vector<Label>{0, 1, 2, 3, 0, 1, 2, 3}, 4);

  BatchPartition all_low = partition_by_entropy(p, y, std::log(4.0) + 1e-9);
  CHECK(all_low.low_indices.size() == 8);
  CHECK(all_low.high_indices.empty());
  CHECK(all_low.low_targets == p);

  BatchPartition all_high = partition_by_entropy(p, y, -1e-9);
  CHECK(all_high.low_indices.empty());
  CHECK(all_high.high_indices.size() == 8);
  CHECK(all_high.high_targets == y);

  Matrix rows{{1, 0, 0}, {0.7, 0.2, 0.1}, {1.0 / 3, 1.0 / 3, 1.0 / 3}};
  Matrix labels = one_hot(std::vector<Label>{2, 2, 2}, 3);
  BatchPartition mixed = partition_by_entropy(rows, labels, 1.0);
  CHECK(mixed.low_indices == std::vector<std::size_t>{0, 1});
  CHECK(mixed.high_indices == std::vector<std::size_t>{2});
  CHECK(mixed.low_targets(1, 0) == 0.7);
  CHECK(mixed.high_targets(0, 2) == 1.0);

  BatchPartition hard = partition_by_entropy(rows, labels, 1.0, PseudoLabel::hard);
  CHECK(hard.low_targets == Matrix{{1, 0, 0}, {1, 0, 0}});

  // H = Γ exactly belongs to the low set.
  const auto h = shannon_entropy_rows(rows);
  BatchPartition edge = partition_by_entropy(rows, h, labels, h[1]);
  CHECK(edge.low_indices == std::vector<std::size_t>{0, 1});
}

TEST_CASE("partition properties over random cases") {
  SeededRng rng(2, "part-prop");
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 1 + rng.below(20), c = 2 + rng.below(8);
    Matrix p = test::random_probs(n, c, rng, 3.0 * rng.uniform());
    std::vector<Label> labels(n);
    for (auto& l : labels) l = static_cast<Label>(rng.below(c));
    Matrix y = one_hot(labels, c);
    const double g1 = (rng.uniform() * 1.2 - 0.1) * std::log(static_cast<double>(c));
    const double g2 = g1 + rng.uniform();
    const auto h = shannon_entropy_rows(p);
    BatchPartition a = partition_by_entropy(p, y, g1);
    BatchPartition b = partition_by_entropy(p, y, g2);

    std::set<std::size_t> seen(a.low_indices.begin(), a.low_indices.end());
    for (auto i : a.high_indices) CHECK(seen.insert(i).second);
    CHECK(seen.size() == n);
    for (auto i : a.low_indices) CHECK(h[i] <= g1);
    for (auto i : a.high_indices) CHECK(h[i] > g1);
    for (std::size_t k = 0; k < a.low_indices.size(); ++k)
      for (std::size_t j = 0; j < c; ++j) CHECK(a.low_targets(k, j) == p(a.low_indices[k], j));
    for (std::size_t k = 0; k < a.high_indices.size(); ++k)
      for (std::size_t j = 0; j < c; ++j) CHECK(a.high_targets(k, j) == y(a.high_indices[k], j));
    // Raising Γ only moves samples from high to low.
    std::set<std::size_t> low_b(b.low_indices.begin(), b.low_indices.end());
    for (auto i : a.low_indices) CHECK(low_b.count(i) == 1);
    for (double v : h) {
      CHECK(v >= 0.0);
      CHECK(v <= std::log(static_cast<double>(c)) + 1e-12);
    }
  }
}

TEST_CASE("gamma estimate") {
  SeededRng rng(3, "gamma");
  std::vector<std::size_t> dims{3, 5, 4};
  MlpNetwork zero = init_network(dims, rng);
  for (auto& w : zero.weights) std::fill(w.values().begin(), w.values().end(), 0.0);
  Matrix x = test::random_matrix(10, 3, rng);
  CHECK(estimate_gamma(zero, x) == doctest::Approx(std::log(4.0)).epsilon(1e-12));

  // Output bias saturates class 1 for inputs with a positive first feature,
  // and nothing else reaches the logits.
  MlpNetwork half = zero;
  half.weights[0](0, 0) = 1.0;
  half.weights[1](0, 1) = 1e4;
  Matrix mixed{{1, 0, 0}, {-1, 0, 0}, {2, 0, 0}, {-2, 0, 0}};
  CHECK(estimate_gamma(half, mixed) == doctest::Approx(std::log(4.0) / 2).epsilon(1e-9));

  MlpNetwork sure = zero;
  sure.biases[1][2] = 1e4;
  CHECK(estimate_gamma(sure, x) <= 1e-12);
}

TEST_CASE("entropy gap statistics") {
  Matrix p{{1, 0}, {0.5, 0.5}, {0.9, 0.1}, {0.2, 0.8}};
  const auto h = shannon_entropy_rows(p);
  EntropyGap all_right = entropy_gap_stats(p, std::vector<Label>{0, 0, 0, 1});
  CHECK(!all_right.incorrect.has_value());
  CHECK(all_right.n_correct == 4);

  EntropyGap mixed = entropy_gap_stats(p, std::vector<Label>{0, 1, 1, 1});
  REQUIRE(mixed.correct.has_value());
  REQUIRE(mixed.incorrect.has_value());
  CHECK(mixed.n_correct == 2);
  CHECK(*mixed.correct == doctest::Approx((h[0] + h[3]) / 2));
  CHECK(*mixed.incorrect == doctest::Approx((h[1] + h[2]) / 2));
  CHECK(mixed.all == doctest::Approx((2 * *mixed.correct + 2 * *mixed.incorrect) / 4));
}
