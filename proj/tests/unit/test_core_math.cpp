#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "clc/errors.hpp"
#include "clc/prob.hpp"
#include "test_support.hpp"

using namespace clc;

TEST_CASE("softmax rows") {
  Matrix p = softmax_rows(Matrix{{0, 0}, {1000, 0}, {std::log(2.0), 0}});
  CHECK(p(0, 0) == doctest::Approx(0.5));
  CHECK(p(0, 1) == doctest::Approx(0.5));
  CHECK(std::abs(p(1, 0) - 1.0) <= 1e-12);
  CHECK(std::abs(p(1, 1)) <= 1e-12);
  CHECK(p(2, 0) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(p(2, 1) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));

  SeededRng rng(3, "softmax");
  Matrix q = softmax_rows(test::random_matrix(50, 7, rng, 30.0));
  for (std::size_t r = 0; r < q.rows(); ++r) {
    double sum = 0.0;
    for (double v : q.row(r)) {
      CHECK(v >= 0.0);
      sum += v;
    }
    CHECK(std::abs(sum - 1.0) <= 1e-12);
  }
  CHECK_THROWS_AS(softmax_rows(Matrix{{std::numeric_limits<double>::quiet_NaN(), 0}}), InvalidInput);
}

TEST_CASE("shannon entropy") {
  const std::vector<double> one_hot{0, 1, 0};
  CHECK(shannon_entropy(one_hot) == 0.0);
  const std::vector<double> uniform(10, 0.1);
  CHECK(shannon_entropy(uniform) == doctest::Approx(std::log(10.0)).epsilon(1e-12));
  const std::vector<double> skewed{0.7, 0.2, 0.1};
  CHECK(shannon_entropy(skewed) == doctest::Approx(0.801819).epsilon(1e-6));
  const std::vector<double> negative{1.2, -0.2};
  CHECK_THROWS_AS(shannon_entropy(negative), InvalidInput);
  const std::vector<double> short_sum{0.5, 0.4};
  CHECK_THROWS_AS(shannon_entropy(short_sum), InvalidInput);
}

TEST_CASE("cross entropy") {
  CHECK(cross_entropy(Matrix{{0, 1}}, Matrix{{0, 1}}) == 0.0);
  CHECK(cross_entropy(Matrix{{0, 0, 1}}, Matrix{{0.2, 0.3, 0.5}}) ==
        doctest::Approx(-std::log(0.5)).epsilon(1e-12));
  CHECK(cross_entropy(Matrix{{0.5, 0.5}}, Matrix{{0.5, 0.5}}) ==
        doctest::Approx(std::numbers::ln2).epsilon(1e-12));
  // q = 0 on a target class is clamped rather than infinite.
  CHECK(std::isfinite(cross_entropy(Matrix{{1, 0}}, Matrix{{0, 1}})));
  CHECK(cross_entropy(Matrix{}, Matrix{}) == 0.0);
  CHECK_THROWS_AS(cross_entropy(Matrix{{1, 0}}, Matrix{{1, 0, 0}}), InvalidInput);
}

TEST_CASE("argmax with lowest-index ties") {
  CHECK(argmax(std::vector<double>{0.1, 0.9}) == 1);
  CHECK(argmax(std::vector<double>{0.5, 0.5}) == 0);
  Matrix eye(4, 4);
  for (std::size_t i = 0; i < 4; ++i) eye(i, i) = 1.0;
  CHECK(argmax_rows(eye) == std::vector<Label>{0, 1, 2, 3});
}

TEST_CASE("matrix kernels agree with naive loops") {
  SeededRng rng(11, "matmul");
  Matrix a = test::random_matrix(5, 3, rng), b = test::random_matrix(3, 4, rng);
  Matrix c = matmul(a, b);
  for (std::size_t i = 0; i < 5; ++i)
    for (std::size_t j = 0; j < 4; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < 3; ++k) s += a(i, k) * b(k, j);
      CHECK(c(i, j) == doctest::Approx(s).epsilon(1e-14));
    }
  Matrix d = test::random_matrix(5, 4, rng);
  Matrix atd = matmul_at_b(a, d);
  Matrix dbt = matmul_a_bt(d, b);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 4; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < 5; ++k) s += a(k, i) * d(k, j);
      CHECK(atd(i, j) == doctest::Approx(s).epsilon(1e-14));
    }
  for (std::size_t i = 0; i < 5; ++i)
    for (std::size_t j = 0; j < 3; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < 4; ++k) s += d(i, k) * b(j, k);
      CHECK(dbt(i, j) == doctest::Approx(s).epsilon(1e-14));
    }
  CHECK_THROWS_AS(matmul(a, a), InvalidInput);
}

TEST_CASE("seeded rng streams") {
  SeededRng a(5, "x"), b(5, "x"), c(5, "y"), d(6, "x");
  const auto first = a.next_u64();
  CHECK(first == b.next_u64());
  CHECK(first != c.next_u64());
  CHECK(first != d.next_u64());

  SeededRng u(1, "moments");
  double sum = 0.0, sq = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double z = u.normal();
    sum += z;
    sq += z * z;
  }
  CHECK(std::abs(sum / n) < 0.01);
  CHECK(std::abs(sq / n - 1.0) < 0.02);

  std::vector<int> counts(3, 0);
  for (int i = 0; i < 30000; ++i) ++counts[u.below(3)];
  for (int k : counts) CHECK(std::abs(k - 10000) < 400);

  std::vector<int> items{0, 1, 2, 3, 4, 5, 6, 7};
  u.shuffle(std::span<int>(items));
  std::vector<int> sorted = items;
  std::sort(sorted.begin(), sorted.end());
  CHECK(sorted == std::vector<int>{0, 1, 2, 3, 4, 5, 6, 7});
}
