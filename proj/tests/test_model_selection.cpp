#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <random>

#include "annplan/mlp.hpp"
#include "annplan/model_selection.hpp"

using namespace annplan;

TEST_CASE("perfectly separating scores give AUC 1") {
  std::vector<double> scores{0.1, 0.2, 0.8, 0.9};
  std::vector<int> labels{0, 0, 1, 1};
  CHECK(roc_auc(scores, labels) == 1.0);
}

TEST_CASE("constant scores give AUC 0.5") {
  std::vector<double> scores{0.5, 0.5, 0.5, 0.5, 0.5};
  std::vector<int> labels{0, 1, 0, 1, 1};
  CHECK(roc_auc(scores, labels) == 0.5);
}

TEST_CASE("eight-point hand case with an inversion and a tie") {
  // negatives score {1,2,3,5}, positives {2,4,6,7}:
  // U = 1.5 + 3 + 4 + 4 = 12.5 over 16 pairs -> 0.78125.
  std::vector<double> scores{1, 2, 3, 5, 2, 4, 6, 7};
  std::vector<int> labels{0, 0, 0, 0, 1, 1, 1, 1};
  CHECK(roc_auc(scores, labels) == 0.78125);
}

TEST_CASE("AUC is invariant under strictly monotone transforms") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> scores;
  std::vector<int> labels;
  for (int i = 0; i < 60; ++i) {
    scores.push_back(u(rng));
    labels.push_back(static_cast<int>(rng() % 2));
  }
  labels[0] = 0;
  labels[1] = 1;
  double base = roc_auc(scores, labels);
  std::vector<double> transformed = scores;
  for (double& s : transformed) s = std::exp(3.0 * s) - 7.0;
  CHECK(roc_auc(transformed, labels) == base);
}

TEST_CASE("single-class labels are rejected") {
  std::vector<double> scores{0.1, 0.2};
  std::vector<int> labels{1, 1};
  CHECK_THROWS_AS(roc_auc(scores, labels), InputError);
}

namespace {

struct ScaleParam {
  double scale = 1.0;
};

// Score = scale * first feature; AUC is scale-sign-sensitive, so the grid
// point with positive scale wins on data where feature 0 separates classes.
std::vector<double> linear_scorer(const Matrix&, const std::vector<int>&, const Matrix& x_val,
                                  const std::vector<int>&, const ScaleParam& p) {
  std::vector<double> out;
  for (std::size_t i = 0; i < x_val.rows(); ++i) out.push_back(p.scale * x_val.at(i, 0));
  return out;
}

}  // namespace

TEST_CASE("grid search: one-point grid returns that point") {
  Matrix x;
  std::vector<int> y;
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int i = 0; i < 40; ++i) {
    int label = i % 2;
    x.push_row({g(rng) + (label ? 2.0 : 0.0)});
    y.push_back(label);
  }
  auto result = grid_search<ScaleParam>(x, y, {ScaleParam{1.0}}, 4, 7, linear_scorer);
  CHECK(result.best_index == 0);
  CHECK(result.best.scale == 1.0);
}

TEST_CASE("grid search picks the separating configuration") {
  Matrix x;
  std::vector<int> y;
  std::mt19937_64 rng(6);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    int label = i % 2;
    x.push_row({g(rng) + (label ? 3.0 : 0.0)});
    y.push_back(label);
  }
  std::vector<ScaleParam> grid{{-1.0}, {1.0}};
  auto result = grid_search(x, y, grid, 5, 11, linear_scorer);
  CHECK(result.best.scale == 1.0);
  CHECK(result.best_score > 0.9);

  // Distinct scores: permuting the grid preserves the winner.
  std::vector<ScaleParam> flipped{{1.0}, {-1.0}};
  auto result2 = grid_search(x, y, flipped, 5, 11, linear_scorer);
  CHECK(result2.best.scale == result.best.scale);
}

TEST_CASE("fold assignment is deterministic and balanced") {
  auto a = fold_assignment(100, 4, 42);
  auto b = fold_assignment(100, 4, 42);
  CHECK(a == b);
  std::vector<int> counts(4, 0);
  for (std::size_t f : a) ++counts[f];
  for (int c : counts) CHECK(c == 25);
  auto c = fold_assignment(100, 4, 43);
  CHECK(a != c);
}

TEST_CASE("ties keep the earliest grid point") {
  Matrix x;
  std::vector<int> y;
  std::mt19937_64 rng(8);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int i = 0; i < 40; ++i) {
    int label = i % 2;
    x.push_row({g(rng) + (label ? 3.0 : 0.0)});
    y.push_back(label);
  }
  // Same scale twice -> identical scores -> first index wins.
  std::vector<ScaleParam> grid{{2.0}, {2.0}};
  auto result = grid_search(x, y, grid, 4, 3, linear_scorer);
  CHECK(result.best_index == 0);
}

TEST_CASE("degenerate folds error out") {
  Matrix x;
  std::vector<int> y;
  for (int i = 0; i < 8; ++i) {
    x.push_row({static_cast<double>(i)});
    y.push_back(i == 0 ? 1 : 0);  // a single positive cannot reach every fold
  }
  CHECK_THROWS_AS(grid_search<ScaleParam>(x, y, {ScaleParam{1.0}}, 4, 1, linear_scorer),
                  TrainError);
  CHECK_THROWS_AS(grid_search<ScaleParam>(x, y, {}, 4, 1, linear_scorer), ConfigError);
  CHECK_THROWS_AS(grid_search<ScaleParam>(x, y, {ScaleParam{1.0}}, 1, 1, linear_scorer),
                  ConfigError);
}
