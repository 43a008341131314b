#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "annplan/mlp.hpp"

using namespace annplan;

namespace {

// Two well-separated gaussian blobs; class 1 sits at (offset, offset, ...).
void make_blobs(std::size_t n, std::size_t dim, double offset, uint64_t seed, Matrix& x,
                std::vector<int>& y) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    int label = static_cast<int>(i % 2);
    std::vector<double> row(dim);
    for (double& v : row) v = gauss(rng) + (label ? offset : 0.0);
    x.push_row(row);
    y.push_back(label);
  }
}

}  // namespace

TEST_CASE("zero-initialized network outputs (0.5, 0.5)") {
  MLPClassifier net(3);
  auto [p0, p1] = net.predict_proba(std::vector<double>{1.0, -2.0, 0.5});
  CHECK(p0 == 0.5);
  CHECK(p1 == 0.5);
}

TEST_CASE("probabilities sum to one") {
  MLPClassifier net(4);
  net.init_weights(77);
  std::mt19937_64 rng(1);
  std::normal_distribution<double> gauss(0.0, 2.0);
  for (int i = 0; i < 50; ++i) {
    std::vector<double> x{gauss(rng), gauss(rng), gauss(rng), gauss(rng)};
    auto [p0, p1] = net.predict_proba(x);
    CHECK(std::abs(p0 + p1 - 1.0) < 1e-9);
  }
}

TEST_CASE("softmax is invariant to shifting both logits") {
  MLPClassifier net(2);
  net.init_weights(5);
  std::vector<double> x{0.3, -1.2};
  auto [p0, p1] = net.predict_proba(x);
  // Adding a constant to both output biases shifts both logits equally.
  net.biases().back()[0] += 3.75;
  net.biases().back()[1] += 3.75;
  auto [q0, q1] = net.predict_proba(x);
  CHECK_THAT(q0, Catch::Matchers::WithinAbs(p0, 1e-12));
  CHECK_THAT(q1, Catch::Matchers::WithinAbs(p1, 1e-12));
}

TEST_CASE("adam first step with constant gradient moves by about lr") {
  TrainConfig cfg;
  AdamState adam(1);
  std::vector<double> params{1.0};
  std::vector<double> grads{0.5};
  adam.step(params, grads, cfg);
  // With bias correction, update = lr * g / (|g| + eps') ~ lr.
  CHECK_THAT(1.0 - params[0], Catch::Matchers::WithinAbs(cfg.adam_lr, 1e-6));

  // Direction follows the gradient sign.
  AdamState adam2(1);
  std::vector<double> params2{1.0};
  std::vector<double> grads2{-2.0};
  adam2.step(params2, grads2, cfg);
  CHECK(params2[0] > 1.0);
}

TEST_CASE("analytic gradients match central finite differences") {
  Matrix x;
  std::vector<int> y;
  make_blobs(20, 5, 2.0, 42, x, y);
  MLPClassifier net(5);
  net.init_weights(42);
  double err = numeric_gradient_check(net, x, y, 1e-4);
  CHECK(err < 1e-4);
}

TEST_CASE("gradient check flags a corrupted gradient") {
  Matrix x;
  std::vector<int> y;
  make_blobs(10, 3, 2.0, 9, x, y);
  MLPClassifier net(3);
  net.init_weights(9);

  MLPClassifier::Gradients g = net.backprop(x, y, 0.0);
  // Corrupt one output-layer weight gradient and recompute its relative
  // error against the finite difference by hand.
  std::size_t layer = g.weights.size() - 1;
  double& corrupted = g.weights[layer][0];
  corrupted += 0.5;

  double step = 1e-5;
  double saved = net.weights()[layer][0];
  net.weights()[layer][0] = saved + step;
  double up = net.loss(x, y, 0.0);
  net.weights()[layer][0] = saved - step;
  double down = net.loss(x, y, 0.0);
  net.weights()[layer][0] = saved;
  double numeric = (up - down) / (2.0 * step);
  double rel = std::abs(corrupted - numeric) /
               std::max(std::abs(corrupted) + std::abs(numeric), 1e-4);
  CHECK(rel > 1e-2);
}

TEST_CASE("zero-input zero-weight bias gradients match finite differences") {
  Matrix x;
  x.push_row({0.0, 0.0});
  x.push_row({0.0, 0.0});
  std::vector<int> y{0, 1};
  MLPClassifier net(2);  // all weights and biases zero
  CHECK(numeric_gradient_check(net, x, y, 0.0) < 1e-4);
}

TEST_CASE("linearly separable blobs reach 99% validation accuracy") {
  Matrix x;
  std::vector<int> y;
  make_blobs(500, 2, 4.0, 7, x, y);
  TrainConfig cfg;
  cfg.seed = 7;
  cfg.l2_lambda = 1e-4;
  MLPClassifier net = MLPClassifier::train(x, y, cfg);

  Matrix xv;
  std::vector<int> yv;
  make_blobs(200, 2, 4.0, 8, xv, yv);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < xv.rows(); ++i)
    hits += static_cast<std::size_t>(net.predict_class(xv.row(i)) == yv[i]);
  CHECK(static_cast<double>(hits) / static_cast<double>(xv.rows()) >= 0.99);

  // Argmax matches the label on at least 99% of training points too.
  std::size_t train_hits = 0;
  for (std::size_t i = 0; i < x.rows(); ++i)
    train_hits += static_cast<std::size_t>(net.predict_class(x.row(i)) == y[i]);
  CHECK(static_cast<double>(train_hits) / static_cast<double>(x.rows()) >= 0.99);
}

TEST_CASE("training loss decreases over the first epochs on separable data") {
  Matrix x;
  std::vector<int> y;
  make_blobs(300, 2, 4.0, 11, x, y);
  TrainConfig cfg;
  cfg.seed = 11;
  cfg.max_epochs = 10;
  cfg.patience = 100;
  MLPClassifier::TrainHistory hist;
  MLPClassifier::train(x, y, cfg, &hist);
  REQUIRE(hist.train_loss.size() == 10);
  CHECK(hist.train_loss.back() < hist.train_loss.front());
}

TEST_CASE("early stopping returns the best validation snapshot") {
  Matrix x;
  std::vector<int> y;
  // Noisy blobs so validation loss wobbles.
  make_blobs(200, 2, 1.0, 13, x, y);
  TrainConfig cfg;
  cfg.seed = 13;
  cfg.max_epochs = 80;
  cfg.patience = 5;
  MLPClassifier::TrainHistory hist;
  MLPClassifier::train(x, y, cfg, &hist);
  REQUIRE(!hist.val_loss.empty());
  double best = *std::min_element(hist.val_loss.begin(), hist.val_loss.end());
  CHECK(hist.val_loss[hist.best_epoch] == best);
  // Stopped before max_epochs (patience fired) or exhausted the budget.
  CHECK(hist.val_loss.size() <= 80);
}

TEST_CASE("training is reproducible given the seed") {
  Matrix x;
  std::vector<int> y;
  make_blobs(120, 3, 3.0, 17, x, y);
  TrainConfig cfg;
  cfg.seed = 99;
  cfg.max_epochs = 30;
  MLPClassifier a = MLPClassifier::train(x, y, cfg);
  MLPClassifier b = MLPClassifier::train(x, y, cfg);
  CHECK(a.weights() == b.weights());
  CHECK(a.biases() == b.biases());

  cfg.seed = 100;
  MLPClassifier c = MLPClassifier::train(x, y, cfg);
  CHECK(a.weights() != c.weights());
}

TEST_CASE("single-class data is a training error") {
  Matrix x;
  x.push_row({1.0});
  x.push_row({2.0});
  std::vector<int> y{1, 1};
  CHECK_THROWS_AS(MLPClassifier::train(x, y, TrainConfig{}), TrainError);
}

TEST_CASE("feature arity is validated") {
  MLPClassifier net(3);
  CHECK_THROWS_AS(net.predict_proba(std::vector<double>{1.0}), InputError);
}
