#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iostream>
#include <numeric>
#include <random>
#include <string>
#include <unordered_map>
#include <vector>

#include "annplan/corpus.hpp"
#include "annplan/error.hpp"
#include "annplan/exact.hpp"
#include "annplan/predicate.hpp"

namespace annplan {

// Precomputed dataset statistics consumed by the selectivity estimator and
// the planner: per-label frequencies, label-pair and label-range
// co-occurrence tables, equal-width histograms, a reproducible row sample,
// and global descriptors. Counts are kept as integers; fractions are always
// count/N so lookup paths agree bit-for-bit with the full-scan oracle.
class DatasetStats {
 public:
  static constexpr uint32_t kDefaultBins = 1024;
  static constexpr uint32_t kSuperBins = 16;  // label-range table granularity
  static constexpr uint32_t kNoLabel = std::numeric_limits<uint32_t>::max();

  struct LabelEntry {
    uint32_t attr = 0;     // schema index of the categorical attribute
    std::string label;
    uint64_t count = 0;
  };

  uint64_t n = 0;
  uint64_t d = 0;
  uint32_t bins = kDefaultBins;
  double sample_rate = 0.0;
  uint64_t seed = 0;
  double distribution_measure = 0.0;
  AttributeSchema schema;

  std::vector<LabelEntry> labels;  // indexed by global label id
  std::vector<std::vector<uint64_t>> histograms;  // per attribute; empty if categorical
  std::vector<uint64_t> sample_ids;

  uint32_t find_label(uint32_t attr, const std::string& label) const {
    auto it = gid_.find(key_of(attr, label));
    return it == gid_.end() ? kNoLabel : it->second;
  }

  uint32_t require_label(const std::string& attr_name, const std::string& label) const {
    std::size_t attr = schema.find(attr_name);
    if (attr == AttributeSchema::npos)
      throw LookupError("stats: unknown attribute '" + attr_name + "'");
    uint32_t gid = find_label(static_cast<uint32_t>(attr), label);
    if (gid == kNoLabel)
      throw LookupError("stats: unknown label '" + label + "' for attribute '" + attr_name + "'");
    return gid;
  }

  double frequency(uint32_t gid) const {
    return static_cast<double>(labels[gid].count) / static_cast<double>(n);
  }

  uint64_t pair_count(uint32_t x, uint32_t y) const {
    if (x == y) return labels[x].count;
    auto it = pair_counts_.find(pack_pair(x, y));
    return it == pair_counts_.end() ? 0 : it->second;
  }

  double pair_fraction(uint32_t x, uint32_t y) const {
    return static_cast<double>(pair_count(x, y)) / static_cast<double>(n);
  }

  // Natural-log pointwise mutual information. Zero co-occurrence floors at
  // ln(1/N), one pseudo-count, so the regressor sees bounded features.
  double pmi(uint32_t x, uint32_t y) const {
    if (x >= labels.size() || y >= labels.size()) throw LookupError("pmi: unknown label id");
    uint64_t joint = pair_count(x, y);
    if (joint == 0) return std::log(1.0 / static_cast<double>(n));
    return std::log(pair_fraction(x, y) / (frequency(x) * frequency(y)));
  }

  double pmi(const std::string& attr_x, const std::string& label_x, const std::string& attr_y,
             const std::string& label_y) const {
    return pmi(require_label(attr_x, label_x), require_label(attr_y, label_y));
  }

  double label_range_fraction(uint32_t gid, uint32_t attr, uint32_t super_bin) const {
    auto it = label_range_counts_.find(pack_label_range(gid, attr, super_bin));
    if (it == label_range_counts_.end()) return 0.0;
    return static_cast<double>(it->second) / static_cast<double>(n);
  }

  // Estimated fraction of rows whose `attr` value falls in the interval
  // union: full bins contribute count/N, boundary bins count/N scaled by the
  // covered share of the bin width (uniform-within-bin assumption).
  double histogram_mass(std::size_t attr, const std::vector<Interval>& intervals) const {
    const Attribute& a = schema.at(attr);
    if (a.kind != AttributeKind::Numeric)
      throw SchemaError("histogram_mass: attribute '" + a.name + "' is not numeric");
    const std::vector<uint64_t>& hist = histograms[attr];
    const double width = (a.max - a.min) / static_cast<double>(bins);
    uint64_t full = 0;
    double partial = 0.0;
    for (const Interval& raw : intervals) {
      double lo = std::max(raw.lo, a.min);
      double hi = std::min(raw.hi, a.max);
      if (!(lo < hi)) continue;  // clamped away, or a zero-width point
      auto bin_of = [&](double x) {
        double b = std::floor((x - a.min) / width);
        return static_cast<std::size_t>(std::clamp(b, 0.0, static_cast<double>(bins - 1)));
      };
      std::size_t b_lo = bin_of(lo);
      std::size_t b_hi = bin_of(hi);
      for (std::size_t b = b_lo; b <= b_hi; ++b) {
        double edge_lo = a.min + static_cast<double>(b) * width;
        double edge_hi = b + 1 == bins ? a.max : a.min + static_cast<double>(b + 1) * width;
        double covered = std::min(hi, edge_hi) - std::max(lo, edge_lo);
        if (covered <= 0.0) continue;
        if (covered >= edge_hi - edge_lo) {
          full += hist[b];
        } else {
          partial += static_cast<double>(hist[b]) * (covered / width);
        }
      }
    }
    double mass = static_cast<double>(full) / static_cast<double>(n) +
                  partial / static_cast<double>(n);
    return std::min(mass, 1.0);
  }

  std::size_t num_labels() const { return labels.size(); }

  // Mutation hooks for the builder and the deserializer.
  uint32_t intern_label(uint32_t attr, const std::string& label) {
    std::string key = key_of(attr, label);
    auto it = gid_.find(key);
    if (it != gid_.end()) return it->second;
    uint32_t gid = static_cast<uint32_t>(labels.size());
    labels.push_back({attr, label, 0});
    gid_.emplace(std::move(key), gid);
    return gid;
  }
  void bump_pair(uint32_t x, uint32_t y) { ++pair_counts_[pack_pair(x, y)]; }
  void set_pair_count(uint32_t x, uint32_t y, uint64_t c) { pair_counts_[pack_pair(x, y)] = c; }
  void bump_label_range(uint32_t gid, uint32_t attr, uint32_t super_bin) {
    ++label_range_counts_[pack_label_range(gid, attr, super_bin)];
  }
  void set_label_range_count(uint32_t gid, uint32_t attr, uint32_t super_bin, uint64_t c) {
    label_range_counts_[pack_label_range(gid, attr, super_bin)] = c;
  }
  const std::unordered_map<uint64_t, uint64_t>& pair_table() const { return pair_counts_; }
  const std::unordered_map<uint64_t, uint64_t>& label_range_table() const {
    return label_range_counts_;
  }

  static uint64_t pack_pair(uint32_t x, uint32_t y) {
    if (x > y) std::swap(x, y);
    return (static_cast<uint64_t>(x) << 32) | y;
  }
  static uint64_t pack_label_range(uint32_t gid, uint32_t attr, uint32_t super_bin) {
    return (static_cast<uint64_t>(gid) << 16) | (static_cast<uint64_t>(attr & 0xff) << 8) |
           super_bin;
  }

 private:
  static std::string key_of(uint32_t attr, const std::string& label) {
    return std::to_string(attr) + '\x1f' + label;
  }

  std::unordered_map<std::string, uint32_t> gid_;
  std::unordered_map<uint64_t, uint64_t> pair_counts_;
  std::unordered_map<uint64_t, uint64_t> label_range_counts_;
};

// Normalized sampled mean pairwise Euclidean distance: a one-number
// summary of vector spread. Deliberately isolated behind this function so
// the definition can be swapped.
inline double distribution_measure(const VectorCorpus& corpus, uint64_t seed,
                                   std::size_t max_pairs = 1000) {
  const std::size_t n = corpus.size();
  if (n < 2) throw InputError("distribution_measure requires N >= 2");
  double sum = 0.0;
  std::size_t count = 0;
  const std::size_t all_pairs = n * (n - 1) / 2;
  if (all_pairs <= max_pairs) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) {
        sum += std::sqrt(distance(corpus.row(i), corpus.row(j), Metric::L2Squared));
        ++count;
      }
  } else {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    while (count < max_pairs) {
      std::size_t i = pick(rng);
      std::size_t j = pick(rng);
      if (i == j) continue;
      sum += std::sqrt(distance(corpus.row(i), corpus.row(j), Metric::L2Squared));
      ++count;
    }
  }
  return sum / static_cast<double>(count) / std::sqrt(static_cast<double>(corpus.dim()));
}

// Deterministic sample of `k` distinct row ids (partial Fisher-Yates).
inline std::vector<uint64_t> sample_rows(std::size_t n, std::size_t k, uint64_t seed) {
  k = std::min(k, n);
  std::vector<uint64_t> ids(n);
  std::iota(ids.begin(), ids.end(), 0);
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < k; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, n - 1);
    std::swap(ids[i], ids[pick(rng)]);
  }
  ids.resize(k);
  std::sort(ids.begin(), ids.end());
  return ids;
}

struct StatsBuildOptions {
  double sample_rate = 0.02;
  uint64_t seed = 0;
  uint32_t bins = DatasetStats::kDefaultBins;
};

// One full pass for tables and histograms plus one sampled pass; fully
// deterministic given the seed.
inline DatasetStats build_stats(const VectorCorpus& corpus, const StatsBuildOptions& opt) {
  if (opt.sample_rate < 0.01 || opt.sample_rate > 0.05)
    std::cerr << "[annplan] warning: sample_rate " << opt.sample_rate
              << " outside the recommended [0.01, 0.05] range\n";
  if (opt.bins < 1) throw ConfigError("build_stats: bins must be >= 1");

  DatasetStats s;
  s.n = corpus.size();
  s.d = corpus.dim();
  s.bins = opt.bins;
  s.sample_rate = opt.sample_rate;
  s.seed = opt.seed;
  s.schema = corpus.schema();

  const std::size_t num_attrs = s.schema.size();
  std::vector<std::size_t> cat_attrs, num_attrs_idx;
  for (std::size_t a = 0; a < num_attrs; ++a)
    (s.schema.at(a).kind == AttributeKind::Categorical ? cat_attrs : num_attrs_idx).push_back(a);

  // Pre-intern every dictionary label in (attribute, code) order so global
  // label ids do not depend on row iteration.
  std::vector<std::vector<uint32_t>> code_to_gid(num_attrs);
  for (std::size_t a : cat_attrs) {
    const auto& col = corpus.categorical(a);
    code_to_gid[a].resize(col.dictionary.size());
    for (uint32_t c = 0; c < col.dictionary.size(); ++c)
      code_to_gid[a][c] = s.intern_label(static_cast<uint32_t>(a), col.dictionary[c]);
  }

  s.histograms.assign(num_attrs, {});
  for (std::size_t a : num_attrs_idx) s.histograms[a].assign(opt.bins, 0);

  auto bin_index = [&](const Attribute& attr, double v, uint32_t nbins) {
    double w = (attr.max - attr.min) / static_cast<double>(nbins);
    double b = std::floor((v - attr.min) / w);
    // Out-of-bound values are clamped into the edge bins.
    return static_cast<uint32_t>(std::clamp(b, 0.0, static_cast<double>(nbins - 1)));
  };

  std::vector<uint32_t> row_gids;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    row_gids.clear();
    for (std::size_t a : cat_attrs) {
      uint32_t gid = code_to_gid[a][corpus.label_code(i, a)];
      ++s.labels[gid].count;
      row_gids.push_back(gid);
    }
    for (std::size_t x = 0; x < row_gids.size(); ++x)
      for (std::size_t y = x + 1; y < row_gids.size(); ++y)
        s.bump_pair(row_gids[x], row_gids[y]);
    for (std::size_t a : num_attrs_idx) {
      double v = corpus.numeric_value(i, a);
      ++s.histograms[a][bin_index(s.schema.at(a), v, opt.bins)];
      uint32_t sb = bin_index(s.schema.at(a), v, DatasetStats::kSuperBins);
      for (uint32_t gid : row_gids)
        s.bump_label_range(gid, static_cast<uint32_t>(a), sb);
    }
  }

  std::size_t sample_size =
      static_cast<std::size_t>(std::llround(opt.sample_rate * static_cast<double>(corpus.size())));
  s.sample_ids = sample_rows(corpus.size(), sample_size, opt.seed);
  s.distribution_measure = corpus.size() >= 2 ? distribution_measure(corpus, opt.seed) : 0.0;
  return s;
}

}  // namespace annplan
