#pragma once

#include <algorithm>
#include <iostream>
#include <numeric>
#include <random>
#include <span>
#include <vector>

#include "annplan/error.hpp"
#include "annplan/matrix.hpp"

namespace annplan {

// Mann-Whitney formulation: probability that a random positive outranks a
// random negative, ties counted half.
inline double roc_auc(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) throw InputError("roc_auc: size mismatch");
  std::size_t n_pos = 0;
  for (int y : labels) n_pos += static_cast<std::size_t>(y == 1);
  std::size_t n_neg = labels.size() - n_pos;
  if (n_pos == 0 || n_neg == 0)
    throw InputError("roc_auc is undefined when only one class is present");

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  double rank_sum_pos = 0.0;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
    double avg_rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;  // 1-based
    for (std::size_t k = i; k < j; ++k)
      if (labels[order[k]] == 1) rank_sum_pos += avg_rank;
    i = j;
  }
  double u = rank_sum_pos - static_cast<double>(n_pos) * (static_cast<double>(n_pos) + 1.0) / 2.0;
  return u / (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

// Deterministic k-fold assignment: seeded shuffle, then stripe row i into
// fold i mod k.
inline std::vector<std::size_t> fold_assignment(std::size_t n, int folds, uint64_t seed) {
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<std::size_t> fold(n);
  for (std::size_t i = 0; i < n; ++i) fold[perm[i]] = i % static_cast<std::size_t>(folds);
  return fold;
}

template <typename Params>
struct GridSearchResult {
  Params best{};
  std::size_t best_index = 0;
  double best_score = 0.0;
  std::vector<double> mean_scores;  // aligned with the grid
};

// Cross-validated grid search maximizing mean ROC-AUC. fit_score is called
// as fit_score(x_train, y_train, x_val, y_val, params) and returns the
// validation scores for AUC. Folds where either split is single-class are
// skipped with a warning; ties keep the earliest grid point.
template <typename Params, typename FitScoreFn>
GridSearchResult<Params> grid_search(const Matrix& features, std::span<const int> labels,
                                     const std::vector<Params>& grid, int folds, uint64_t seed,
                                     FitScoreFn fit_score) {
  if (grid.empty()) throw ConfigError("grid_search: empty grid");
  if (folds < 2) throw ConfigError("grid_search: folds must be >= 2");

  std::vector<std::size_t> fold = fold_assignment(features.rows(), folds, seed);

  struct FoldData {
    Matrix x_train, x_val;
    std::vector<int> y_train, y_val;
  };
  std::vector<FoldData> usable;
  for (int f = 0; f < folds; ++f) {
    FoldData d;
    for (std::size_t i = 0; i < features.rows(); ++i) {
      if (fold[i] == static_cast<std::size_t>(f)) {
        d.x_val.push_row(features.row(i));
        d.y_val.push_back(labels[i]);
      } else {
        d.x_train.push_row(features.row(i));
        d.y_train.push_back(labels[i]);
      }
    }
    auto has_both = [](const std::vector<int>& y) {
      bool c0 = false, c1 = false;
      for (int v : y) (v == 1 ? c1 : c0) = true;
      return c0 && c1;
    };
    if (!has_both(d.y_train) || !has_both(d.y_val)) {
      std::cerr << "[annplan] warning: fold " << f << " is single-class; skipping\n";
      continue;
    }
    usable.push_back(std::move(d));
  }
  if (usable.empty()) throw TrainError("grid_search: every fold was single-class");

  GridSearchResult<Params> result;
  result.best_score = -1.0;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    double total = 0.0;
    for (const FoldData& d : usable) {
      std::vector<double> scores = fit_score(d.x_train, d.y_train, d.x_val, d.y_val, grid[g]);
      total += roc_auc(scores, d.y_val);
    }
    double mean = total / static_cast<double>(usable.size());
    result.mean_scores.push_back(mean);
    if (mean > result.best_score) {
      result.best_score = mean;
      result.best = grid[g];
      result.best_index = g;
    }
  }
  return result;
}

}  // namespace annplan
