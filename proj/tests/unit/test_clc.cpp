#include <doctest.h>

#include <cmath>

#include "clc/baselines.hpp"
#include "clc/clc.hpp"
#include "clc/errors.hpp"
#include "clc/evaluation.hpp"
#include "clc/prob.hpp"
#include "test_support.hpp"

using namespace clc;

namespace {

TrainSettings small_settings(std::size_t epochs, std::size_t warm_up) {
  TrainSettings s;
  s.epochs = epochs;
  s.warm_up_epochs = warm_up;
  s.batch_size = 32;
  s.learning_rate = 1e-2;
  s.hidden_dims = {16};
  s.seed = 3;
  return s;
}

bool same_networks(const std::vector<MlpNetwork>& a, const std::vector<MlpNetwork>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i].weights != b[i].weights || a[i].biases != b[i].biases) return false;
  return true;
}

}  // namespace

TEST_CASE("clc loss with an empty partner low set is beta times standard") {
  SeededRng rng(1, "clc-loss");
  Matrix p = test::random_probs(6, 3, rng);
  Matrix y = one_hot(std::vector<Label>{0, 1, 2, 2, 1, 0}, 3);
  BatchPartition partner = partition_by_entropy(test::random_probs(6, 3, rng), y, -1.0);
  BatchPartition own = partition_by_entropy(p, y, -1.0);
  BatchLoss l = clc_batch_loss(p, partner, own, y, 0.1, 0.5);
  CHECK(l.loss.ce_low == 0.0);
  CHECK(l.loss.total == doctest::Approx(0.5 * cross_entropy(y, p)).epsilon(1e-14));
  const Matrix standard = softce_grad_logits(y, p);
  for (std::size_t i = 0; i < standard.size(); ++i)
    CHECK(std::abs(l.grad_logits.values()[i] - 0.5 * standard.values()[i]) <= 1e-12);
}

TEST_CASE("clc loss at its fixed point") {
  Matrix p{{1, 0}, {0, 1}, {1, 0}};
  Matrix y = one_hot(std::vector<Label>{1, 1, 0}, 2);
  BatchPartition part = partition_by_entropy(p, y, 0.1);
  REQUIRE(part.low_indices.size() == 3);
  BatchLoss l = clc_batch_loss(p, part, part, y, 0.1, 0.5);
  CHECK(l.loss.ce_low == 0.0);
  CHECK(l.loss.ent_own == 0.0);
  CHECK(l.loss.ce_high == 0.0);
  CHECK(l.loss.total == 0.0);
}

TEST_CASE("clc loss, two samples by hand") {
  const double alpha = 0.1, beta = 0.5, gamma = 0.6;
  Matrix z{{std::log(9.0), 0.0}, {0.0, std::log(1.5)}};  // own probs (0.9, 0.1), (0.4, 0.6)
  Matrix own_p = softmax_rows(z);
  Matrix partner_p{{0.8, 0.2}, {0.5, 0.5}};
  Matrix y = one_hot(std::vector<Label>{1, 0}, 2);
  BatchPartition partner = partition_by_entropy(partner_p, y, gamma);
  BatchPartition own = partition_by_entropy(own_p, y, gamma);
  REQUIRE(partner.low_indices == std::vector<std::size_t>{0});
  REQUIRE(own.low_indices == std::vector<std::size_t>{0});

  const double ce_low = -(0.8 * std::log(0.9) + 0.2 * std::log(0.1));
  const double ent_own = -(0.9 * std::log(0.9) + 0.1 * std::log(0.1));
  const double ce_high = -std::log(0.4);
  BatchLoss l = clc_batch_loss(own_p, partner, own, y, alpha, beta);
  CHECK(l.loss.ce_low == doctest::Approx(ce_low).epsilon(1e-12));
  CHECK(l.loss.ent_own == doctest::Approx(ent_own).epsilon(1e-12));
  CHECK(l.loss.ce_high == doctest::Approx(ce_high).epsilon(1e-12));
  CHECK(l.loss.total == doctest::Approx(ce_low + alpha * ent_own + beta * ce_high).epsilon(1e-12));
  CHECK(std::abs(l.loss.total - (l.loss.ce_low + alpha * l.loss.ent_own + beta * l.loss.ce_high)) <= 1e-12);

  auto total = [&] { return clc_batch_loss(softmax_rows(z), partner, own, y, alpha, beta).loss.total; };
  for (std::size_t i = 0; i < z.size(); ++i)
    CHECK(std::abs(l.grad_logits.values()[i] - test::central_diff(total, z.values()[i])) <= 1e-6);
}

TEST_CASE("clc config validation") {
  ClcConfig c;
  c.train = small_settings(5, 2);
  c.validate();
  c.alpha = -0.1;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c.alpha = 0.1;
  c.train.warm_up_epochs = 5;
  CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("clc training loop") {
  auto data = test::noisy_blobs({NoiseKind::symmetric, 0.3, {}, 0});
  Evaluator eval(data.train, data.test);
  ClcConfig c;
  c.train = small_settings(4, 3);
  TrainResult r = train_clc(train_view(data.train), eval, c);
  REQUIRE(r.history.size() == 4);
  CHECK(r.layout == MetricsLayout::clc);
  REQUIRE(r.gamma.has_value());
  for (std::size_t e = 0; e < 3; ++e) CHECK(!r.history[e].n_low_f.has_value());
  const auto& last = r.history.back();
  REQUIRE(last.n_low_f.has_value());
  CHECK(*last.n_low_f + *last.n_high_f == data.train.size());
  CHECK(*last.n_low_g + *last.n_high_g == data.train.size());
  CHECK(last.n_selected == data.train.size());

  TrainResult again = train_clc(train_view(data.train), eval, c);
  CHECK(again.history == r.history);
  CHECK(same_networks(again.networks, r.networks));

  // Swapping the network streams swaps the roles of f and g.
  ClcConfig both = c;
  both.gamma_from_both = true;
  ClcConfig swapped = both;
  swapped.train.net_streams = {"g", "f"};
  TrainResult fg = train_clc(train_view(data.train), eval, both);
  TrainResult gf = train_clc(train_view(data.train), eval, swapped);
  CHECK(gf.networks[0].weights == fg.networks[1].weights);
  CHECK(gf.networks[1].weights == fg.networks[0].weights);
  CHECK(gf.history.back().test_accuracy == fg.history.back().test_accuracy_g.value());
}

TEST_CASE("clc does no harm on clean separable data") {
  auto data = test::noisy_blobs({NoiseKind::symmetric, 0.0, {}, 0});
  Evaluator eval(data.train, data.test);
  ClcConfig c;
  c.train = small_settings(50, 10);
  BaselineConfig b;
  b.train = c.train;
  const double clc_acc = train_clc(train_view(data.train), eval, c).history.back().test_accuracy;
  const double std_acc = train_standard(train_view(data.train), eval, b).history.back().test_accuracy;
  CHECK(clc_acc >= std_acc - 0.01);
}

TEST_CASE("slc below every entropy is standard scaled by beta") {
  auto data = test::noisy_blobs({NoiseKind::pairwise, 0.3, {}, 0}, 4, 100, 2, 4.0);
  Evaluator eval(data.train, data.test);
  BaselineConfig b;
  b.train = small_settings(12, 2);
  TrainResult standard = train_standard(train_view(data.train), eval, b);
  const auto standard_pred = argmax_rows(predict_logits(standard.networks[0], data.train.features));

  SUBCASE("beta 1 is standard exactly") {
    ClcConfig c;
    c.train = b.train;
    c.gamma = GammaPolicy::fixed(-1.0);
    c.beta = 1.0;
    TrainResult slc = train_slc(train_view(data.train), eval, c);
    CHECK(slc.networks[0].weights == standard.networks[0].weights);
    CHECK(slc.networks[0].biases == standard.networks[0].biases);
    CHECK(slc.history.back().n_low_f.value() == 0);
  }
  SUBCASE("default beta follows the same argmax trajectory") {
    // Adam cancels the constant scale except through its epsilon, which
    // nudges parameters with tiny gradients; only boundary samples move.
    ClcConfig c;
    c.train = b.train;
    c.gamma = GammaPolicy::fixed(-1.0);
    TrainResult slc = train_slc(train_view(data.train), eval, c);
    REQUIRE(slc.history.size() == standard.history.size());
    for (std::size_t e = 0; e < slc.history.size(); ++e)
      CHECK(std::abs(slc.history[e].test_accuracy - standard.history[e].test_accuracy) <= 0.05);
    const auto pred = argmax_rows(predict_logits(slc.networks[0], data.train.features));
    std::size_t agree = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) agree += pred[i] == standard_pred[i];
    CHECK(static_cast<double>(agree) >= 0.97 * static_cast<double>(pred.size()));
  }
}
