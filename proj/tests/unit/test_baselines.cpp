#include <doctest.h>

#include <cmath>

#include "clc/baselines.hpp"
#include "clc/errors.hpp"
#include "clc/evaluation.hpp"
#include "clc/prob.hpp"
#include "test_support.hpp"

using namespace clc;

namespace {

BaselineConfig small_config(BaselineMethod method, std::size_t epochs = 5, std::size_t warm_up = 1) {
  BaselineConfig c;
  c.method = method;
  c.train.epochs = epochs;
  c.train.warm_up_epochs = warm_up;
  c.train.batch_size = 32;
  c.train.learning_rate = 1e-2;
  c.train.hidden_dims = {16};
  c.train.seed = 5;
  return c;
}

struct Fixture {
  test::NoisyData data = test::noisy_blobs({NoiseKind::symmetric, 0.4, {}, 0}, 4, 100, 2, 4.0);
  Evaluator eval{data.train, data.test};
  TrainView view() const { return train_view(data.train); }
};

void check_same_run(const TrainResult& a, const TrainResult& b, std::size_t net_a = 0, std::size_t net_b = 0) {
  CHECK(a.networks[net_a].weights == b.networks[net_b].weights);
  CHECK(a.networks[net_a].biases == b.networks[net_b].biases);
}

}  // namespace

TEST_CASE("keep fraction schedule") {
  CHECK(keep_fraction(0.45, 0, 10) == doctest::Approx(1.0));
  CHECK(keep_fraction(0.45, 5, 10) == doctest::Approx(0.775));
  CHECK(keep_fraction(0.45, 10, 10) == doctest::Approx(0.55));
  CHECK(keep_fraction(0.45, 40, 10) == doctest::Approx(0.55));
  CHECK(keep_fraction(0.5, 20, 10) == doctest::Approx(0.5));
  CHECK(keep_fraction(0.0, 3, 10) == 1.0);
}

TEST_CASE("small-loss selection") {
  const std::vector<double> losses{0.9, 0.1, 0.5, 0.3};
  CHECK(small_loss_indices(losses, 0.5) == std::vector<std::size_t>{1, 3});
  CHECK(small_loss_indices(losses, 1.0).size() == 4);
  CHECK(small_loss_indices(losses, 0.0).empty());
}

TEST_CASE("bootstrap targets") {
  SeededRng rng(1, "boot");
  Matrix p = test::random_probs(5, 3, rng);
  Matrix y = one_hot(std::vector<Label>{0, 1, 2, 0, 1}, 3);
  CHECK(bootstrap_targets(y, p, 1.0) == y);
  CHECK(bootstrap_targets(y, p, 0.0) == p);
  const Matrix self_distill = softce_grad_logits(bootstrap_targets(y, p, 0.0), p);
  for (double v : self_distill.values()) CHECK(v == 0.0);
  Matrix mix = bootstrap_targets(y, p, 0.7);
  for (std::size_t r = 0; r < 5; ++r) {
    double s = 0.0;
    for (double v : mix.row(r)) s += v;
    CHECK(std::abs(s - 1.0) <= 1e-12);
  }
}

TEST_CASE("forward correction") {
  TransitionMatrix t(Matrix{{0.7, 0.3}, {0.3, 0.7}});
  Matrix p{{0.8, 0.2}};
  Matrix q = forward_corrected_probs(p, t);
  CHECK(q(0, 0) == doctest::Approx(0.62).epsilon(1e-14));
  CHECK(q(0, 1) == doctest::Approx(0.38).epsilon(1e-14));
  ForwardLoss l = forward_corrected_loss(p, std::vector<Label>{1}, t);
  CHECK(l.loss == doctest::Approx(-std::log(0.38)).epsilon(1e-12));

  SeededRng rng(2, "fwd");
  TransitionMatrix sym = build_transition({NoiseKind::symmetric, 0.4, {}, 0}, 4);
  Matrix z = test::random_matrix(3, 4, rng);
  const std::vector<Label> labels{0, 3, 1};
  Matrix pq = forward_corrected_probs(softmax_rows(z), sym);
  for (std::size_t r = 0; r < 3; ++r) {
    double s = 0.0;
    for (double v : pq.row(r)) s += v;
    CHECK(std::abs(s - 1.0) <= 1e-12);
  }
  // (p - r)/n is the logit gradient of the forward-corrected loss.
  Matrix analytic = softce_grad_logits(forward_corrected_loss(softmax_rows(z), labels, sym).targets,
                                       softmax_rows(z));
  auto loss = [&] { return forward_corrected_loss(softmax_rows(z), labels, sym).loss; };
  for (std::size_t i = 0; i < z.size(); ++i)
    CHECK(std::abs(analytic.values()[i] - test::central_diff(loss, z.values()[i])) <= 1e-6);
}

TEST_CASE("co-distillation gradient") {
  SeededRng rng(3, "codistill");
  for (double lambda : {0.0, 0.5, 2.0}) {
    Matrix z = test::random_matrix(4, 3, rng);
    Matrix partner = test::random_probs(4, 3, rng);
    Matrix y = one_hot(std::vector<Label>{2, 0, 1, 1}, 3);
    Matrix p = softmax_rows(z);
    Matrix analytic = softce_grad_logits(y, p);
    Matrix distill = softce_grad_logits(partner, p);
    for (std::size_t i = 0; i < analytic.size(); ++i) analytic.values()[i] += lambda * distill.values()[i];
    auto loss = [&] {
      Matrix q = softmax_rows(z);
      return cross_entropy(y, q) + lambda * cross_entropy(partner, q);
    };
    for (std::size_t i = 0; i < z.size(); ++i)
      CHECK(test::rel_err(analytic.values()[i], test::central_diff(loss, z.values()[i])) <= 1e-4);
  }
}

TEST_CASE("degenerate settings reproduce standard training exactly") {
  Fixture fx;
  const TrainResult standard = train_standard(fx.view(), fx.eval, small_config(BaselineMethod::standard));

  SUBCASE("bootstrap kappa 1") {
    auto c = small_config(BaselineMethod::bootstrap);
    c.bootstrap_kappa = 1.0;
    TrainResult r = train_bootstrap(fx.view(), fx.eval, c);
    check_same_run(r, standard);
    CHECK(r.history == standard.history);
  }
  SUBCASE("forward with identity transition") {
    TrainResult r = train_forward(fx.view(), fx.eval, small_config(BaselineMethod::forward),
                                  TransitionMatrix::identity(fx.data.train.classes));
    check_same_run(r, standard);
    CHECK(r.history == standard.history);
  }
  SUBCASE("self-paced with r = 0") {
    auto c = small_config(BaselineMethod::self_paced);
    c.noise_ratio = 0.0;
    TrainResult r = train_self_paced(fx.view(), fx.eval, c);
    check_same_run(r, standard);
    CHECK(r.history == standard.history);
  }
  SUBCASE("co-distillation lambda 0 and co-teaching r = 0 are two standards") {
    auto g_config = small_config(BaselineMethod::standard);
    g_config.train.net_streams = {"g", "f"};
    const TrainResult standard_g = train_standard(fx.view(), fx.eval, g_config);
    auto cd = small_config(BaselineMethod::co_distillation);
    cd.codistill_lambda = 0.0;
    TrainResult r = train_codistillation(fx.view(), fx.eval, cd);
    check_same_run(r, standard, 0, 0);
    check_same_run(r, standard_g, 1, 0);
    auto ct = small_config(BaselineMethod::co_teaching);
    ct.noise_ratio = 0.0;
    TrainResult t = train_coteaching(fx.view(), fx.eval, ct);
    check_same_run(t, standard, 0, 0);
    check_same_run(t, standard_g, 1, 0);
  }
}

TEST_CASE("decouple with identical networks never updates") {
  Fixture fx;
  auto c = small_config(BaselineMethod::decouple, 4, 0);
  c.train.net_streams = {"f", "f"};
  TrainResult r = train_decouple(fx.view(), fx.eval, c);
  const NetUnit init = make_unit(fx.view(), c.train, 0);
  CHECK(r.networks[0].weights == init.net.weights);
  for (const auto& m : r.history) CHECK(m.n_selected == 0);

  TrainResult normal = train_decouple(fx.view(), fx.eval, small_config(BaselineMethod::decouple));
  for (const auto& m : normal.history) CHECK(m.n_selected <= fx.data.train.size());
}

TEST_CASE("co-teaching keeps the scheduled fraction") {
  Fixture fx;
  auto c = small_config(BaselineMethod::co_teaching, 16, 2);
  c.noise_ratio = 0.4;
  c.schedule_epochs = 5;
  TrainResult r = train_coteaching(fx.view(), fx.eval, c);
  const double n = static_cast<double>(fx.data.train.size());
  const auto& last = r.history.back();
  CHECK(std::abs(static_cast<double>(last.n_selected) - 0.6 * n) <= 0.02 * n);
  REQUIRE(last.train_supervision_precision.has_value());
  CHECK(*last.train_supervision_precision > 0.6);
}

TEST_CASE("standard training") {
  SUBCASE("clean separable blobs") {
    auto data = test::noisy_blobs({NoiseKind::symmetric, 0.0, {}, 0});
    Evaluator eval(data.train, data.test);
    TrainResult r = train_standard(train_view(data.train), eval, small_config(BaselineMethod::standard, 30));
    CHECK(r.history.back().test_accuracy >= 0.95);
  }
  SUBCASE("memorizes heavily noisy labels") {
    auto data = test::noisy_blobs({NoiseKind::symmetric, 0.5, {}, 0}, 4, 50, 20, 4.0);
    Evaluator eval(data.train, data.test);
    auto c = small_config(BaselineMethod::standard, 300, 1);
    c.train.hidden_dims = {128, 128};
    c.train.learning_rate = 3e-3;
    TrainResult r = train_standard(train_view(data.train), eval, c);
    CHECK(r.history.back().train_noisy_accuracy >= 0.99);
  }
  SUBCASE("deterministic") {
    Fixture fx;
    auto c = small_config(BaselineMethod::standard);
    CHECK(train_standard(fx.view(), fx.eval, c).history == train_standard(fx.view(), fx.eval, c).history);
  }
}

TEST_CASE("baseline config validation") {
  auto c = small_config(BaselineMethod::co_teaching);
  c.noise_ratio = 1.0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c.noise_ratio = 0.2;
  c.bootstrap_kappa = 1.5;
  CHECK_THROWS_AS(c.validate(), ConfigError);
}
