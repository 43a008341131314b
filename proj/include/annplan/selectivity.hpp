#pragma once

#include <algorithm>
#include <array>
#include <string>
#include <vector>

#include "annplan/corpus.hpp"
#include "annplan/error.hpp"
#include "annplan/exact.hpp"
#include "annplan/gbm.hpp"
#include "annplan/matrix.hpp"
#include "annplan/predicate.hpp"
#include "annplan/stats.hpp"

namespace annplan {

// Fixed-arity feature vector for the learned estimator. Label-only
// predicates short-circuit the four range features to zero; predicates with
// a single label degenerate the pair statistics to that label's frequency
// and a zero PMI.
struct PredicateFeatures {
  double indep_product = 0.0;
  double pair_joint_min = 0.0;
  double pair_joint_mean = 0.0;
  double pair_joint_max = 0.0;
  double avg_pmi = 0.0;
  double n_labels = 0.0;
  double range_sel_hist = 0.0;
  double range_total_width = 0.0;
  double range_midpoint = 0.0;
  double label_range_joint_sum = 0.0;

  static constexpr std::size_t kArity = 10;

  std::array<double, kArity> to_array() const {
    return {indep_product, pair_joint_min,    pair_joint_mean, pair_joint_max,
            avg_pmi,       n_labels,          range_sel_hist,  range_total_width,
            range_midpoint, label_range_joint_sum};
  }
};

// Which estimation path a predicate takes; exactly one per legal predicate.
enum class EstimatePath { MatchAll, SingleLabel, LabelPair, Histogram, Learned };

inline EstimatePath route_predicate(const Predicate& p) {
  if (p.empty()) return EstimatePath::MatchAll;
  if (!p.has_ranges()) {
    if (p.num_labels() == 1) return EstimatePath::SingleLabel;
    if (p.num_labels() == 2) return EstimatePath::LabelPair;
    return EstimatePath::Learned;
  }
  return p.num_labels() == 0 ? EstimatePath::Histogram : EstimatePath::Learned;
}

inline PredicateFeatures extract_features(const DatasetStats& stats, const Predicate& p) {
  if (route_predicate(p) != EstimatePath::Learned)
    throw InputError("extract_features expects a >=3-label or mixed predicate");

  std::vector<uint32_t> gids;
  for (const LabelTerm& t : p.label_terms) gids.push_back(stats.require_label(t.attribute, t.label));
  std::sort(gids.begin(), gids.end());

  PredicateFeatures f;
  f.n_labels = static_cast<double>(gids.size());
  f.indep_product = 1.0;
  for (uint32_t g : gids) f.indep_product *= stats.frequency(g);

  if (gids.size() == 1) {
    double freq = stats.frequency(gids[0]);
    f.pair_joint_min = f.pair_joint_mean = f.pair_joint_max = freq;
    f.avg_pmi = 0.0;
  } else {
    double lo = 1.0, hi = 0.0, sum = 0.0, pmi_sum = 0.0;
    std::size_t pairs = 0;
    for (std::size_t i = 0; i < gids.size(); ++i)
      for (std::size_t j = i + 1; j < gids.size(); ++j) {
        double joint = stats.pair_fraction(gids[i], gids[j]);
        lo = std::min(lo, joint);
        hi = std::max(hi, joint);
        sum += joint;
        pmi_sum += stats.pmi(gids[i], gids[j]);
        ++pairs;
      }
    f.pair_joint_min = lo;
    f.pair_joint_max = hi;
    f.pair_joint_mean = sum / static_cast<double>(pairs);
    f.avg_pmi = pmi_sum / static_cast<double>(pairs);
  }

  if (p.has_ranges()) {
    std::size_t attr = stats.schema.require(p.range_attribute);
    const Attribute& a = stats.schema.at(attr);
    const double span = a.max - a.min;
    f.range_sel_hist = stats.histogram_mass(attr, p.ranges);

    double width = 0.0;
    double hull_lo = a.max, hull_hi = a.min;
    for (const Interval& raw : p.ranges) {
      double lo = std::max(raw.lo, a.min);
      double hi = std::min(raw.hi, a.max);
      if (!(lo < hi)) continue;
      width += hi - lo;
      hull_lo = std::min(hull_lo, lo);
      hull_hi = std::max(hull_hi, hi);
    }
    f.range_total_width = width / span;
    // Midpoint of the covering hull, normalized into [0,1] by the span.
    f.range_midpoint =
        hull_lo <= hull_hi ? ((hull_lo + hull_hi) / 2.0 - a.min) / span : 0.0;

    // Sum over (queried label x overlapped super-bin), each joint fraction
    // weighted by the covered share of the super-bin.
    const double super_width = span / static_cast<double>(DatasetStats::kSuperBins);
    for (uint32_t g : gids) {
      for (uint32_t sb = 0; sb < DatasetStats::kSuperBins; ++sb) {
        double bin_lo = a.min + sb * super_width;
        double bin_hi = sb + 1 == DatasetStats::kSuperBins ? a.max : bin_lo + super_width;
        double covered = 0.0;
        for (const Interval& raw : p.ranges) {
          double lo = std::max({raw.lo, a.min, bin_lo});
          double hi = std::min({raw.hi, a.max, bin_hi});
          if (lo < hi) covered += hi - lo;
        }
        if (covered > 0.0)
          f.label_range_joint_sum +=
              stats.label_range_fraction(g, static_cast<uint32_t>(attr), sb) *
              (covered / super_width);
      }
    }
  }
  return f;
}

// Dispatches to the exact-lookup, histogram, or learned path. The GBM output
// is clamped into [1/N, 1]; the exact lookup paths return the precomputed
// fractions untouched so they match the full-scan oracle bit-for-bit.
inline double estimate_selectivity(const DatasetStats& stats, const GBMRegressor* model,
                                   const Predicate& p, EstimatePath* path_out = nullptr) {
  EstimatePath path = route_predicate(p);
  if (path_out) *path_out = path;
  switch (path) {
    case EstimatePath::MatchAll:
      return 1.0;
    case EstimatePath::SingleLabel:
      return stats.frequency(
          stats.require_label(p.label_terms[0].attribute, p.label_terms[0].label));
    case EstimatePath::LabelPair: {
      uint32_t x = stats.require_label(p.label_terms[0].attribute, p.label_terms[0].label);
      uint32_t y = stats.require_label(p.label_terms[1].attribute, p.label_terms[1].label);
      return stats.pair_fraction(x, y);
    }
    case EstimatePath::Histogram:
      return stats.histogram_mass(stats.schema.require(p.range_attribute), p.ranges);
    case EstimatePath::Learned:
      break;
  }
  if (!model)
    throw MissingArtifactError(
        "predicate needs the learned estimator; build one with train-estimator");
  PredicateFeatures f = extract_features(stats, p);
  auto arr = f.to_array();
  double raw = model->predict(arr);
  double floor = 1.0 / static_cast<double>(stats.n);
  return std::clamp(raw, floor, 1.0);
}

// Fits the default GBM (300 trees, depth 4, lr 0.05) on full-corpus exact
// selectivities of a >=3-label / mixed workload.
inline GBMRegressor train_estimator(const VectorCorpus& corpus, const DatasetStats& stats,
                                    const std::vector<Predicate>& workload, uint64_t seed,
                                    const GBMConfig& config = {}) {
  (void)seed;  // the exact greedy fit has no stochastic component
  if (workload.empty()) throw TrainError("train_estimator: empty workload");
  Matrix features;
  std::vector<double> targets;
  for (std::size_t i = 0; i < workload.size(); ++i) {
    const Predicate& p = workload[i];
    if (route_predicate(p) != EstimatePath::Learned)
      throw InputError("train_estimator: workload predicate " + std::to_string(i) +
                       " is not a >=3-label or mixed predicate");
    double sel = exact_selectivity(corpus, p);
    if (sel <= 0.0)
      throw TrainError("train_estimator: workload predicate " + std::to_string(i) +
                       " matches no rows");
    features.push_row(extract_features(stats, p).to_array());
    targets.push_back(sel);
  }
  return GBMRegressor::fit(features, targets, config);
}

}  // namespace annplan
