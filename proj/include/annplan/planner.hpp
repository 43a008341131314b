#pragma once

#include <algorithm>
#include <cmath>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "annplan/engines.hpp"
#include "annplan/error.hpp"
#include "annplan/index.hpp"
#include "annplan/mlp.hpp"
#include "annplan/model_selection.hpp"
#include "annplan/selectivity.hpp"
#include "annplan/stats.hpp"
#include "annplan/workload.hpp"

namespace annplan {

// Query/dataset features feeding the strategy classifier. Corpus size is
// log-scaled; selectivity is clamped into [1/N, 1]. The include_k flag
// drops k for the four-feature variant.
struct PlannerFeatures {
  double dim = 0.0;
  double log_corpus_size = 0.0;
  double distribution_measure = 0.0;
  double estimated_selectivity = 0.0;
  double k = 0.0;

  std::vector<double> to_vector(bool include_k) const {
    std::vector<double> v{dim, log_corpus_size, distribution_measure, estimated_selectivity};
    if (include_k) v.push_back(k);
    return v;
  }
};

struct UtilityLabel {
  double u_pre = 0.0;
  double u_post = 0.0;
  Strategy label = Strategy::Post;
  double recall_pre = 1.0;
  double recall_post = 0.0;
  double t_pre = 0.0;
  double t_post = 0.0;
};

struct PlannerTrainRow {
  PlannerFeatures features;
  UtilityLabel utility;
  double achieved_selectivity = 0.0;
};

struct PlannerTrainOptions {
  std::size_t n_queries = 300;
  double selectivity_lo = 0.01;
  double selectivity_hi = 0.25;
  std::size_t k = 10;
  int timing_repeats = 3;  // median over repeats; 1 reproduces the single-shot protocol
  PredicateMixWeights mix{.label = 0.3, .multi_label = 0.0, .range = 0.4, .multi_range = 0.3,
                          .mixed = 0.0};
  bool include_k = true;
};

inline double recall_against(const ResultSet& got, const ResultSet& truth) {
  if (truth.size() == 0) return 1.0;
  std::vector<std::size_t> t = truth.ids;
  std::sort(t.begin(), t.end());
  std::size_t hits = 0;
  for (std::size_t id : got.ids)
    hits += static_cast<std::size_t>(std::binary_search(t.begin(), t.end(), id));
  return static_cast<double>(hits) / static_cast<double>(truth.size());
}

inline PlannerFeatures make_planner_features(const DatasetStats& stats, double estimated_sel,
                                             std::size_t k) {
  PlannerFeatures f;
  f.dim = static_cast<double>(stats.d);
  f.log_corpus_size = std::log(static_cast<double>(stats.n));
  f.distribution_measure = stats.distribution_measure;
  double floor = 1.0 / static_cast<double>(stats.n);
  f.estimated_selectivity = std::clamp(estimated_sel, floor, 1.0);
  f.k = static_cast<double>(k);
  return f;
}

// alpha0 = clamp(ceil(1/s), 10, N/k): start the candidate expansion near the
// expected need.
inline std::size_t alpha_from_selectivity(double est_sel, std::size_t n, std::size_t k) {
  double inv = est_sel > 0.0 ? std::ceil(1.0 / est_sel) : static_cast<double>(n);
  double cap = std::max(1.0, static_cast<double>(n) / static_cast<double>(k));
  return static_cast<std::size_t>(std::clamp(inv, 10.0, cap));
}

namespace detail {

inline double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  std::size_t n = v.size();
  return n % 2 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2.0;
}

}  // namespace detail

// Runs both strategies on controlled-selectivity queries and labels each
// with argmax utility U = recall / time. recall_pre is 1 by construction;
// post-filter recall is measured against the pre-filter output. Timing per
// strategy is the median over timing_repeats runs.
inline std::vector<PlannerTrainRow> generate_training_set(
    const VectorCorpus& corpus, const DatasetStats& stats, const AnnIndex& index,
    const GBMRegressor* sel_model, const PlannerTrainOptions& opt, uint64_t seed) {
  WorkloadSpec wspec;
  wspec.n_queries = opt.n_queries;
  wspec.k = opt.k;
  wspec.target_lo = opt.selectivity_lo;
  wspec.target_hi = opt.selectivity_hi;
  wspec.mix = opt.mix;
  Workload workload = gen_workload(corpus, stats, wspec, seed);

  std::vector<PlannerTrainRow> rows;
  for (std::size_t i = 0; i < workload.size(); ++i) {
    const FilteredQuery& q = workload.queries[i];
    double est;
    try {
      est = estimate_selectivity(stats, sel_model, q.predicate);
    } catch (const MissingArtifactError&) {
      std::cerr << "[annplan] warning: skipping training query " << i
                << " (needs the learned selectivity estimator)\n";
      continue;
    }

    std::vector<double> t_pre, t_post;
    ExecutionReport pre, post;
    std::size_t alpha0 = alpha_from_selectivity(est, corpus.size(), q.k);
    int repeats = std::max(opt.timing_repeats, 1);
    for (int r = 0; r < repeats; ++r) {
      pre = prefilter_search(corpus, q, index.metric());
      t_pre.push_back(pre.elapsed_seconds);
      post = postfilter_search(index, corpus, q, alpha0);
      t_post.push_back(post.elapsed_seconds);
    }

    PlannerTrainRow row;
    row.features = make_planner_features(stats, est, q.k);
    row.achieved_selectivity = workload.achieved_selectivities[i];
    UtilityLabel& u = row.utility;
    u.t_pre = detail::median_of(t_pre);
    u.t_post = detail::median_of(t_post);
    u.recall_pre = 1.0;
    u.recall_post = recall_against(post.results, pre.results);
    u.u_pre = u.recall_pre / u.t_pre;
    u.u_post = u.recall_post / u.t_post;
    u.label = u.u_pre - u.u_post > 1e-9 ? Strategy::Pre : Strategy::Post;
    rows.push_back(std::move(row));
  }
  return rows;
}

struct FeatureScaler {
  std::vector<double> mean, stddev;

  void fit(const Matrix& x) {
    mean.assign(x.cols(), 0.0);
    stddev.assign(x.cols(), 0.0);
    for (std::size_t i = 0; i < x.rows(); ++i)
      for (std::size_t j = 0; j < x.cols(); ++j) mean[j] += x.at(i, j);
    for (double& m : mean) m /= static_cast<double>(x.rows());
    for (std::size_t i = 0; i < x.rows(); ++i)
      for (std::size_t j = 0; j < x.cols(); ++j) {
        double d = x.at(i, j) - mean[j];
        stddev[j] += d * d;
      }
    for (double& s : stddev) {
      s = std::sqrt(s / static_cast<double>(x.rows()));
      if (s < 1e-12) s = 1.0;  // constant feature
    }
  }

  std::vector<double> apply(std::span<const double> row) const {
    std::vector<double> out(row.size());
    for (std::size_t j = 0; j < row.size(); ++j) out[j] = (row[j] - mean[j]) / stddev[j];
    return out;
  }

  Matrix apply(const Matrix& x) const {
    Matrix out;
    for (std::size_t i = 0; i < x.rows(); ++i) out.push_row(apply(x.row(i)));
    return out;
  }
};

struct PlannerHyperGrid {
  std::vector<double> l2_lambda{1e-5, 1e-4, 1e-3};
  std::vector<int> patience{10, 20};
};

class PlannerModel {
 public:
  MLPClassifier mlp;
  FeatureScaler scaler;
  bool include_k = true;
  uint64_t stats_fingerprint = 0;
  double best_cv_auc = 0.0;
  TrainConfig chosen_config;

  std::pair<double, double> predict_proba(const PlannerFeatures& f) const {
    return mlp.predict_proba(scaler.apply(f.to_vector(include_k)));
  }

  Strategy decide(const PlannerFeatures& f) const {
    auto [p_pre, p_post] = predict_proba(f);
    return p_post >= p_pre ? Strategy::Post : Strategy::Pre;  // argmax, tie to post
  }
};

// Standardize features, pick (l2, patience) by cross-validated ROC-AUC,
// then train the final network on the full training set.
inline PlannerModel train_planner(const std::vector<PlannerTrainRow>& rows,
                                  const TrainConfig& base, const PlannerHyperGrid& grid,
                                  int folds, uint64_t seed, bool include_k,
                                  uint64_t stats_fingerprint) {
  if (rows.empty()) throw TrainError("train_planner: empty training set");
  Matrix x_raw;
  std::vector<int> y;
  for (const PlannerTrainRow& r : rows) {
    x_raw.push_row(r.features.to_vector(include_k));
    y.push_back(r.utility.label == Strategy::Post ? 1 : 0);
  }
  bool has0 = false, has1 = false;
  for (int v : y) (v ? has1 : has0) = true;
  if (!has0 || !has1)
    throw TrainError(
        "train_planner: every query favors the same strategy; widen the selectivity range");

  PlannerModel model;
  model.include_k = include_k;
  model.stats_fingerprint = stats_fingerprint;
  model.scaler.fit(x_raw);
  Matrix x = model.scaler.apply(x_raw);

  struct GridPoint {
    double l2;
    int patience;
  };
  std::vector<GridPoint> points;
  for (double l2 : grid.l2_lambda)
    for (int p : grid.patience) points.push_back({l2, p});

  auto fit_score = [&](const Matrix& xt, const std::vector<int>& yt, const Matrix& xv,
                       const std::vector<int>&, const GridPoint& gp) {
    TrainConfig cfg = base;
    cfg.l2_lambda = gp.l2;
    cfg.patience = gp.patience;
    cfg.seed = seed;
    MLPClassifier net = MLPClassifier::train(xt, yt, cfg);
    std::vector<double> scores;
    for (std::size_t i = 0; i < xv.rows(); ++i)
      scores.push_back(net.predict_proba(xv.row(i)).second);
    return scores;
  };
  auto result = grid_search(x, y, points, folds, seed, fit_score);

  TrainConfig cfg = base;
  cfg.l2_lambda = result.best.l2;
  cfg.patience = result.best.patience;
  cfg.seed = seed;
  model.mlp = MLPClassifier::train(x, y, cfg);
  model.best_cv_auc = result.best_score;
  model.chosen_config = cfg;
  return model;
}

// Estimate selectivity, classify, dispatch. elapsed covers estimation,
// inference, and the execution itself; an unavailable learned estimator
// degrades to post-filtering rather than failing the query.
inline ExecutionReport plan_and_execute(const PlannerModel& model, const DatasetStats& stats,
                                        const GBMRegressor* sel_model, const AnnIndex& index,
                                        const VectorCorpus& corpus, const FilteredQuery& query) {
  detail::StopWatch total;
  std::optional<double> est;
  try {
    est = estimate_selectivity(stats, sel_model, query.predicate);
  } catch (const MissingArtifactError&) {
    std::cerr << "[annplan] warning: no selectivity estimator for this predicate; "
                 "falling back to post-filtering\n";
  }

  Strategy strategy = Strategy::Post;
  std::size_t alpha0 = 10;
  if (est) {
    strategy = model.decide(make_planner_features(stats, *est, query.k));
    alpha0 = alpha_from_selectivity(*est, corpus.size(), query.k);
  }
  double planning = total.seconds();

  ExecutionReport report = strategy == Strategy::Pre
                               ? prefilter_search(corpus, query, index.metric())
                               : postfilter_search(index, corpus, query, alpha0);
  report.planning_seconds = planning;
  report.elapsed_seconds += planning;
  return report;
}

// --- persistence ---------------------------------------------------------

inline std::string serialize_planner(const PlannerModel& m) {
  ContainerWriter c("planner");
  c.header()["include_k"] = m.include_k;
  c.header()["stats_fingerprint"] = m.stats_fingerprint;
  c.header()["best_cv_auc"] = m.best_cv_auc;
  c.header()["l2_lambda"] = m.chosen_config.l2_lambda;
  c.header()["patience"] = m.chosen_config.patience;

  ByteWriter scaler;
  scaler.u32(static_cast<uint32_t>(m.scaler.mean.size()));
  for (double v : m.scaler.mean) scaler.f64(v);
  for (double v : m.scaler.stddev) scaler.f64(v);
  c.add_section("SCALER", scaler.take());

  ByteWriter arch;
  const auto& sizes = m.mlp.layer_sizes();
  arch.u32(static_cast<uint32_t>(sizes.size()));
  for (int s : sizes) arch.u32(static_cast<uint32_t>(s));
  c.add_section("MLPARCH", arch.take());

  ByteWriter params;
  for (std::size_t l = 0; l < m.mlp.weights().size(); ++l) {
    for (double w : m.mlp.weights()[l]) params.f64(w);
    for (double b : m.mlp.biases()[l]) params.f64(b);
  }
  c.add_section("MLPPARAM", params.take());
  return c.serialize();
}

inline void save_planner(const PlannerModel& m, const std::string& path) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  std::string bytes = serialize_planner(m);
  f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw IoError("short write to '" + path + "'");
}

inline PlannerModel load_planner_container(const ContainerReader& c) {
  c.require_kind("planner");
  PlannerModel m;
  m.include_k = c.header().value("include_k", true);
  m.stats_fingerprint = c.header().value("stats_fingerprint", 0ull);
  m.best_cv_auc = c.header().value("best_cv_auc", 0.0);
  m.chosen_config.l2_lambda = c.header().value("l2_lambda", 0.0);
  m.chosen_config.patience = c.header().value("patience", 20);

  ByteReader scaler = c.section("SCALER");
  uint32_t arity = scaler.u32();
  m.scaler.mean.resize(arity);
  m.scaler.stddev.resize(arity);
  for (double& v : m.scaler.mean) v = scaler.f64();
  for (double& v : m.scaler.stddev) v = scaler.f64();

  ByteReader arch = c.section("MLPARCH");
  uint32_t n_layers = arch.u32();
  std::vector<int> sizes(n_layers);
  for (uint32_t i = 0; i < n_layers; ++i) sizes[i] = static_cast<int>(arch.u32());
  if (sizes.empty() || sizes.front() != static_cast<int>(arity))
    throw IoError("planner container: scaler arity does not match network input");

  std::vector<int> hidden(sizes.begin() + 1, sizes.end() - 1);
  m.mlp = MLPClassifier(sizes.front(), hidden);
  ByteReader params = c.section("MLPPARAM");
  for (std::size_t l = 0; l < m.mlp.weights().size(); ++l) {
    for (double& w : m.mlp.weights()[l]) w = params.f64();
    for (double& b : m.mlp.biases()[l]) b = params.f64();
  }
  return m;
}

// Callers holding the stats should compare model.stats_fingerprint against
// stats_fingerprint(stats) and warn on mismatch.
inline PlannerModel load_planner(const std::string& path) {
  return load_planner_container(ContainerReader::from_file(path));
}

}  // namespace annplan
