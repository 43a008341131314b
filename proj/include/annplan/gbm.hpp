#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <span>
#include <vector>

#include "annplan/error.hpp"
#include "annplan/matrix.hpp"
#include "annplan/serialize.hpp"

namespace annplan {

struct GBMConfig {
  int n_estimators = 300;
  int max_depth = 4;
  double learning_rate = 0.05;
  int min_samples_leaf = 5;
};

// Gradient-boosted regression trees with exact greedy variance-reduction
// splits. Every reduction runs over a canonical ordering (sorted values), so
// the fitted model is invariant to permutations of the training rows.
class GBMRegressor {
 public:
  struct Node {
    int32_t feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    int32_t left = -1;
    int32_t right = -1;
    double value = 0.0;
  };

  struct Tree {
    std::vector<Node> nodes;

    double predict(std::span<const double> x) const {
      int32_t cur = 0;
      while (nodes[cur].feature >= 0)
        cur = x[nodes[cur].feature] <= nodes[cur].threshold ? nodes[cur].left : nodes[cur].right;
      return nodes[cur].value;
    }
  };

  static GBMRegressor fit(const Matrix& features, std::span<const double> targets,
                          const GBMConfig& config = {});

  double predict(std::span<const double> x) const {
    if (x.size() != n_features_)
      throw InputError("gbm_predict: feature arity " + std::to_string(x.size()) +
                       " != training arity " + std::to_string(n_features_));
    double out = base_prediction_;
    for (const Tree& t : trees_) out += config_.learning_rate * t.predict(x);
    return out;
  }

  double base_prediction() const { return base_prediction_; }
  const std::vector<Tree>& trees() const { return trees_; }
  const GBMConfig& config() const { return config_; }
  std::size_t n_features() const { return n_features_; }
  const std::vector<double>& training_mse_per_tree() const { return train_mse_; }

  // Deserializer hook.
  static GBMRegressor assemble(GBMConfig cfg, std::size_t n_features, double base,
                               std::vector<Tree> trees) {
    GBMRegressor m;
    m.config_ = cfg;
    m.n_features_ = n_features;
    m.base_prediction_ = base;
    m.trees_ = std::move(trees);
    return m;
  }

 private:
  struct SplitResult {
    double gain = 0.0;
    int feature = -1;
    double threshold = 0.0;
  };

  // Mean of a multiset of doubles, accumulated in a canonical order so the
  // result is invariant to row permutations. Identical values short-circuit
  // to the value itself (the FP sum of n copies of x need not be n*x).
  static double canonical_mean(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    if (v.front() == v.back()) return v.front();
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
  }

  static SplitResult best_split(const Matrix& x, const std::vector<double>& residual,
                                const std::vector<std::size_t>& rows, int min_leaf) {
    SplitResult best;
    const std::size_t n = rows.size();
    std::vector<std::pair<double, double>> order(n);  // (feature value, residual)
    for (std::size_t f = 0; f < x.cols(); ++f) {
      for (std::size_t i = 0; i < n; ++i) order[i] = {x.at(rows[i], f), residual[rows[i]]};
      std::sort(order.begin(), order.end());
      double total = 0.0;
      for (const auto& [v, r] : order) total += r;
      double left_sum = 0.0;
      for (std::size_t i = 0; i + 1 < n; ++i) {
        left_sum += order[i].second;
        if (order[i].first == order[i + 1].first) continue;  // no boundary between equals
        std::size_t n_left = i + 1, n_right = n - n_left;
        if (n_left < static_cast<std::size_t>(min_leaf) ||
            n_right < static_cast<std::size_t>(min_leaf))
          continue;
        double right_sum = total - left_sum;
        // Variance reduction up to a constant: sum^2/n left + right.
        double gain = left_sum * left_sum / static_cast<double>(n_left) +
                      right_sum * right_sum / static_cast<double>(n_right) -
                      total * total / static_cast<double>(n);
        if (gain > best.gain) {
          best.gain = gain;
          best.feature = static_cast<int>(f);
          best.threshold = (order[i].first + order[i + 1].first) / 2.0;
        }
      }
    }
    return best;
  }

  static int32_t grow(const Matrix& x, const std::vector<double>& residual,
                      const std::vector<std::size_t>& rows, int depth, const GBMConfig& cfg,
                      Tree& tree) {
    int32_t id = static_cast<int32_t>(tree.nodes.size());
    tree.nodes.emplace_back();
    std::vector<double> vals;
    vals.reserve(rows.size());
    for (std::size_t r : rows) vals.push_back(residual[r]);
    double mean = canonical_mean(std::move(vals));

    SplitResult split;
    if (depth < cfg.max_depth &&
        rows.size() >= 2 * static_cast<std::size_t>(cfg.min_samples_leaf))
      split = best_split(x, residual, rows, cfg.min_samples_leaf);

    if (split.feature < 0 || !(split.gain > 0.0)) {
      tree.nodes[id].value = mean;
      return id;
    }

    std::vector<std::size_t> left_rows, right_rows;
    for (std::size_t r : rows)
      (x.at(r, split.feature) <= split.threshold ? left_rows : right_rows).push_back(r);

    tree.nodes[id].feature = split.feature;
    tree.nodes[id].threshold = split.threshold;
    int32_t l = grow(x, residual, left_rows, depth + 1, cfg, tree);
    int32_t r = grow(x, residual, right_rows, depth + 1, cfg, tree);
    tree.nodes[id].left = l;
    tree.nodes[id].right = r;
    return id;
  }

  GBMConfig config_;
  std::size_t n_features_ = 0;
  double base_prediction_ = 0.0;
  std::vector<Tree> trees_;
  std::vector<double> train_mse_;
};

inline GBMRegressor GBMRegressor::fit(const Matrix& features, std::span<const double> targets,
                                      const GBMConfig& config) {
  if (features.rows() < 2) throw TrainError("gbm_fit requires at least 2 rows");
  if (features.rows() != targets.size())
    throw InputError("gbm_fit: feature/target row count mismatch");
  for (std::size_t i = 0; i < features.rows(); ++i)
    for (double v : features.row(i))
      if (!std::isfinite(v)) throw InputError("gbm_fit: non-finite feature value");
  for (double t : targets)
    if (!std::isfinite(t)) throw InputError("gbm_fit: non-finite target value");

  GBMRegressor model;
  model.config_ = config;
  model.n_features_ = features.cols();
  model.base_prediction_ = canonical_mean({targets.begin(), targets.end()});

  std::vector<double> residual(targets.begin(), targets.end());
  for (double& r : residual) r -= model.base_prediction_;

  std::vector<std::size_t> all_rows(features.rows());
  std::iota(all_rows.begin(), all_rows.end(), 0);

  for (int t = 0; t < config.n_estimators; ++t) {
    Tree tree;
    grow(features, residual, all_rows, 0, config, tree);
    if (tree.nodes.size() == 1 && tree.nodes[0].value == 0.0) break;  // no progress left
    for (std::size_t i = 0; i < features.rows(); ++i)
      residual[i] -= config.learning_rate * tree.predict(features.row(i));
    model.trees_.push_back(std::move(tree));
    double mse = 0.0;
    for (double r : residual) mse += r * r;
    model.train_mse_.push_back(mse / static_cast<double>(features.rows()));
  }
  return model;
}

inline std::string serialize_gbm(const GBMRegressor& model) {
  ContainerWriter c("gbm");
  c.header()["n_estimators"] = model.config().n_estimators;
  c.header()["max_depth"] = model.config().max_depth;
  c.header()["learning_rate"] = model.config().learning_rate;
  c.header()["min_samples_leaf"] = model.config().min_samples_leaf;

  ByteWriter meta;
  meta.u32(static_cast<uint32_t>(model.n_features()));
  meta.f64(model.base_prediction());
  c.add_section("GBMMETA", meta.take());

  ByteWriter trees;
  trees.u32(static_cast<uint32_t>(model.trees().size()));
  for (const auto& tree : model.trees()) {
    trees.u32(static_cast<uint32_t>(tree.nodes.size()));
    for (const auto& n : tree.nodes) {
      trees.i32(n.feature);
      trees.f64(n.threshold);
      trees.i32(n.left);
      trees.i32(n.right);
      trees.f64(n.value);
    }
  }
  c.add_section("GBMTREES", trees.take());
  return c.serialize();
}

inline void save_gbm(const GBMRegressor& model, const std::string& path) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  std::string bytes = serialize_gbm(model);
  f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw IoError("short write to '" + path + "'");
}

inline GBMRegressor load_gbm_container(const ContainerReader& c) {
  c.require_kind("gbm");
  GBMConfig cfg;
  cfg.n_estimators = c.header().value("n_estimators", cfg.n_estimators);
  cfg.max_depth = c.header().value("max_depth", cfg.max_depth);
  cfg.learning_rate = c.header().value("learning_rate", cfg.learning_rate);
  cfg.min_samples_leaf = c.header().value("min_samples_leaf", cfg.min_samples_leaf);

  ByteReader meta = c.section("GBMMETA");
  uint32_t n_features = meta.u32();
  double base = meta.f64();

  ByteReader tr = c.section("GBMTREES");
  uint32_t n_trees = tr.u32();
  std::vector<GBMRegressor::Tree> trees(n_trees);
  for (auto& tree : trees) {
    uint32_t n_nodes = tr.u32();
    tree.nodes.resize(n_nodes);
    for (auto& n : tree.nodes) {
      n.feature = tr.i32();
      n.threshold = tr.f64();
      n.left = tr.i32();
      n.right = tr.i32();
      n.value = tr.f64();
      if (n.feature >= static_cast<int32_t>(n_features))
        throw IoError("gbm container: split feature out of range");
    }
  }
  return GBMRegressor::assemble(cfg, n_features, base, std::move(trees));
}

inline GBMRegressor load_gbm(const std::string& path) {
  return load_gbm_container(ContainerReader::from_file(path));
}

}  // namespace annplan
