#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "json.hpp"

#include "annplan/corpus.hpp"
#include "annplan/error.hpp"
#include "annplan/exact.hpp"
#include "annplan/predicate.hpp"
#include "annplan/predicate_parser.hpp"
#include "annplan/stats.hpp"

namespace annplan {

enum class PredicateKind { Label, MultiLabel, Range, MultiRange, Mixed };

struct PredicateMixWeights {
  double label = 0.25;
  double multi_label = 0.0;
  double range = 0.25;
  double multi_range = 0.25;
  double mixed = 0.25;

  double total() const { return label + multi_label + range + multi_range + mixed; }
};

struct WorkloadSpec {
  std::size_t n_queries = 100;
  std::size_t k = 10;
  double target_lo = 0.01;
  double target_hi = 0.25;
  std::vector<double> explicit_targets;  // cycled when non-empty
  PredicateMixWeights mix;
  double rel_tolerance = 0.20;
  std::size_t min_labels = 3;  // multi-label conjunction size
  std::size_t max_labels = 5;
  double perturbation = 0.05;  // query noise, in units of per-dim stddev
};

struct Workload {
  std::vector<FilteredQuery> queries;
  std::vector<double> target_selectivities;
  std::vector<double> achieved_selectivities;
  std::vector<uint8_t> flagged;  // achieved outside the relative tolerance
  std::size_t k = 10;

  std::size_t size() const { return queries.size(); }
};

namespace detail {

// Exact interval-union row counting over one numeric attribute, O(log N)
// per interval via a sorted copy of the column.
class SortedColumn {
 public:
  explicit SortedColumn(const std::vector<double>& values) : sorted_(values) {
    std::sort(sorted_.begin(), sorted_.end());
  }

  std::size_t count(const Interval& iv) const {
    auto lo = iv.lo_open ? std::upper_bound(sorted_.begin(), sorted_.end(), iv.lo)
                         : std::lower_bound(sorted_.begin(), sorted_.end(), iv.lo);
    auto hi = iv.hi_open ? std::lower_bound(sorted_.begin(), sorted_.end(), iv.hi)
                         : std::upper_bound(sorted_.begin(), sorted_.end(), iv.hi);
    return hi > lo ? static_cast<std::size_t>(hi - lo) : 0;
  }

  std::size_t count_union(const std::vector<Interval>& ivs) const {
    std::size_t total = 0;  // normalized unions are disjoint
    for (const Interval& iv : ivs) total += count(iv);
    return total;
  }

 private:
  std::vector<double> sorted_;
};

inline std::vector<uint32_t> intersect_sorted(const std::vector<uint32_t>& a,
                                              const std::vector<uint32_t>& b) {
  std::vector<uint32_t> out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

}  // namespace detail

// Synthesizes filtered queries whose exact selectivity tracks per-query
// targets. Range widths are found by binary search against exact counts;
// label conjunctions pick the stored frequency nearest the target and are
// flagged when it falls outside the relative tolerance.
class WorkloadGenerator {
 public:
  WorkloadGenerator(const VectorCorpus& corpus, const DatasetStats& stats)
      : corpus_(corpus), stats_(stats) {
    const AttributeSchema& schema = corpus.schema();
    for (std::size_t a = 0; a < schema.size(); ++a) {
      if (schema.at(a).kind == AttributeKind::Numeric) {
        numeric_attrs_.push_back(a);
        columns_.emplace_back(corpus.numeric(a).values);
      } else {
        categorical_attrs_.push_back(a);
        columns_.emplace_back(std::vector<double>{});
      }
    }
    postings_.resize(stats.num_labels());
    for (uint32_t row = 0; row < corpus.size(); ++row) {
      for (std::size_t a : categorical_attrs_) {
        uint32_t gid = stats.find_label(static_cast<uint32_t>(a),
                                        corpus.categorical(a).dictionary[corpus.label_code(row, a)]);
        if (gid != DatasetStats::kNoLabel) postings_[gid].push_back(row);
      }
    }
    per_dim_std_ = estimate_std();
  }

  Workload generate(const WorkloadSpec& spec, uint64_t seed) {
    validate(spec);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    Workload out;
    out.k = spec.k;
    std::size_t skipped = 0;
    for (std::size_t qi = 0; qi < spec.n_queries; ++qi) {
      double target = spec.explicit_targets.empty()
                          ? spec.target_lo + unit(rng) * (spec.target_hi - spec.target_lo)
                          : spec.explicit_targets[qi % spec.explicit_targets.size()];
      PredicateKind kind = draw_kind(spec.mix, unit(rng));
      std::optional<Generated> gen;
      for (int attempt = 0; attempt < 10 && !gen; ++attempt)
        gen = synthesize(kind, target, spec, rng);
      if (!gen) {
        std::cerr << "[annplan] warning: skipping query " << qi << " (kind "
                  << static_cast<int>(kind) << "): no predicate reaches selectivity " << target
                  << "\n";
        ++skipped;
        continue;
      }
      FilteredQuery q;
      q.predicate = std::move(gen->predicate);
      q.k = spec.k;
      q.vector = perturbed_row(rng, spec.perturbation);
      out.queries.push_back(std::move(q));
      out.target_selectivities.push_back(target);
      out.achieved_selectivities.push_back(gen->achieved);
      double rel = std::abs(gen->achieved - target) / target;
      out.flagged.push_back(rel > spec.rel_tolerance ? 1 : 0);
    }
    if (skipped > 0)
      std::cerr << "[annplan] warning: skipped " << skipped << " of " << spec.n_queries
                << " workload queries\n";
    return out;
  }

 private:
  struct Generated {
    Predicate predicate;
    double achieved = 0.0;
  };

  void validate(const WorkloadSpec& spec) const {
    if (spec.mix.total() <= 0.0) throw ConfigError("workload: predicate mix has zero weight");
    bool needs_numeric = spec.mix.range > 0 || spec.mix.multi_range > 0 || spec.mix.mixed > 0;
    bool needs_labels = spec.mix.label > 0 || spec.mix.multi_label > 0 || spec.mix.mixed > 0;
    if (needs_numeric && numeric_attrs_.empty())
      throw ConfigError("workload: range predicates requested but no numeric attribute exists");
    if (needs_labels && categorical_attrs_.empty())
      throw ConfigError("workload: label predicates requested but no categorical attribute exists");
    if (spec.mix.multi_label > 0 && categorical_attrs_.size() < spec.min_labels)
      throw ConfigError("workload: multi-label conjunctions need at least " +
                        std::to_string(spec.min_labels) + " categorical attributes");
    if (!(spec.target_lo > 0.0) || spec.target_hi > 1.0 || spec.target_lo > spec.target_hi)
      throw ConfigError("workload: selectivity targets must lie in (0,1]");
  }

  PredicateKind draw_kind(const PredicateMixWeights& mix, double u) const {
    double total = mix.total();
    double acc = 0.0;
    struct Entry {
      PredicateKind kind;
      double w;
    };
    for (const Entry& e : {Entry{PredicateKind::Label, mix.label},
                           Entry{PredicateKind::MultiLabel, mix.multi_label},
                           Entry{PredicateKind::Range, mix.range},
                           Entry{PredicateKind::MultiRange, mix.multi_range},
                           Entry{PredicateKind::Mixed, mix.mixed}}) {
      acc += e.w / total;
      if (u < acc) return e.kind;
    }
    return PredicateKind::Mixed;
  }

  std::optional<Generated> synthesize(PredicateKind kind, double target,
                                      const WorkloadSpec& spec, std::mt19937_64& rng) {
    switch (kind) {
      case PredicateKind::Label:
        return make_label(target, spec, rng);
      case PredicateKind::MultiLabel:
        return make_multi_label(target, spec, rng);
      case PredicateKind::Range:
        return make_range(target, spec, rng);
      case PredicateKind::MultiRange:
        return make_multi_range(target, spec, rng);
      case PredicateKind::Mixed:
        return make_mixed(target, spec, rng);
    }
    return std::nullopt;
  }

  double selectivity_of(std::size_t count) const {
    return static_cast<double>(count) / static_cast<double>(corpus_.size());
  }

  const std::string& label_name(uint32_t gid) const { return stats_.labels[gid].label; }
  const std::string& attr_name(uint32_t gid) const {
    return stats_.schema.at(stats_.labels[gid].attr).name;
  }

  // Single label (or pair) whose stored joint frequency is nearest the
  // target; flagged upstream if outside tolerance.
  std::optional<Generated> make_label(double target, const WorkloadSpec& spec,
                                      std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    bool try_pair = categorical_attrs_.size() >= 2 && unit(rng) < 0.5;
    if (!try_pair) {
      std::vector<uint32_t> close;
      uint32_t best = DatasetStats::kNoLabel;
      double best_err = std::numeric_limits<double>::infinity();
      for (uint32_t g = 0; g < stats_.num_labels(); ++g) {
        if (stats_.labels[g].count == 0) continue;
        double err = std::abs(stats_.frequency(g) - target) / target;
        if (err <= spec.rel_tolerance) close.push_back(g);
        if (err < best_err) {
          best_err = err;
          best = g;
        }
      }
      uint32_t pick = close.empty() ? best : close[rng() % close.size()];
      if (pick == DatasetStats::kNoLabel) return std::nullopt;
      Generated g;
      g.predicate.add_label(attr_name(pick), label_name(pick));
      g.achieved = stats_.frequency(pick);
      return g;
    }
    // Pair: sample conjunctions, keep the joint frequency nearest to target.
    std::optional<Generated> best;
    double best_err = std::numeric_limits<double>::infinity();
    for (int attempt = 0; attempt < 60; ++attempt) {
      auto [a, b] = two_distinct_attrs(rng);
      uint32_t ga = random_gid_of_attr(a, rng);
      uint32_t gb = random_gid_of_attr(b, rng);
      if (ga == DatasetStats::kNoLabel || gb == DatasetStats::kNoLabel) continue;
      double joint = stats_.pair_fraction(ga, gb);
      if (joint <= 0.0) continue;
      double err = std::abs(joint - target) / target;
      if (err < best_err) {
        best_err = err;
        Generated g;
        g.predicate.add_label(attr_name(ga), label_name(ga));
        g.predicate.add_label(attr_name(gb), label_name(gb));
        g.achieved = joint;
        best = std::move(g);
      }
      if (best_err <= spec.rel_tolerance) break;
    }
    return best;
  }

  std::optional<Generated> make_multi_label(double target, const WorkloadSpec& spec,
                                            std::mt19937_64& rng) {
    if (categorical_attrs_.size() < spec.min_labels) return std::nullopt;
    std::optional<Generated> best;
    double best_err = std::numeric_limits<double>::infinity();
    for (int attempt = 0; attempt < 120; ++attempt) {
      std::size_t max_l = std::min(spec.max_labels, categorical_attrs_.size());
      std::size_t n_labels = spec.min_labels + (max_l > spec.min_labels
                                                    ? rng() % (max_l - spec.min_labels + 1)
                                                    : 0);
      std::vector<std::size_t> attrs = categorical_attrs_;
      std::shuffle(attrs.begin(), attrs.end(), rng);
      attrs.resize(n_labels);
      std::vector<uint32_t> gids;
      for (std::size_t a : attrs) {
        uint32_t g = random_gid_of_attr(a, rng);
        if (g != DatasetStats::kNoLabel) gids.push_back(g);
      }
      if (gids.size() != n_labels) continue;
      std::size_t count = joint_count(gids);
      if (count == 0) continue;
      double sel = selectivity_of(count);
      double err = std::abs(sel - target) / target;
      if (err < best_err) {
        best_err = err;
        Generated g;
        for (uint32_t gid : gids) g.predicate.add_label(attr_name(gid), label_name(gid));
        g.achieved = sel;
        best = std::move(g);
      }
      if (best_err <= spec.rel_tolerance) break;
    }
    return best;
  }

  std::optional<Generated> make_range(double target, const WorkloadSpec& spec,
                                      std::mt19937_64& rng) {
    std::size_t attr = numeric_attrs_[rng() % numeric_attrs_.size()];
    const Attribute& a = corpus_.schema().at(attr);
    std::uniform_real_distribution<double> center(a.min, a.max);
    double c = center(rng);
    auto count_at = [&](double h) {
      return columns_[attr].count({c - h, c + h, false, true});
    };
    double h = search_width(count_at, target, a.max - a.min, spec.rel_tolerance);
    if (h < 0.0) return std::nullopt;
    Generated g;
    g.predicate.set_ranges(a.name, {{c - h, c + h, false, true}});
    g.achieved = selectivity_of(count_at(h));
    return g;
  }

  std::optional<Generated> make_multi_range(double target, const WorkloadSpec& spec,
                                            std::mt19937_64& rng) {
    std::size_t attr = numeric_attrs_[rng() % numeric_attrs_.size()];
    const Attribute& a = corpus_.schema().at(attr);
    const double span = a.max - a.min;
    const double gap = span * 0.01;
    const double mid = a.min + span / 2.0;
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    double share = 0.35 + 0.3 * unit(rng);

    std::uniform_real_distribution<double> left_center(a.min, mid - gap);
    std::uniform_real_distribution<double> right_center(mid + gap, a.max);
    double c1 = left_center(rng), c2 = right_center(rng);
    auto left_at = [&](double h) {
      return columns_[attr].count({c1 - h, std::min(c1 + h, mid - gap), false, true});
    };
    auto right_at = [&](double h) {
      return columns_[attr].count({std::max(c2 - h, mid + gap), c2 + h, false, true});
    };
    double h1 = search_width(left_at, target * share, span, spec.rel_tolerance);
    double h2 = search_width(right_at, target * (1.0 - share), span, spec.rel_tolerance);
    if (h1 <= 0.0 || h2 <= 0.0) return std::nullopt;

    std::vector<Interval> ivs = {{c1 - h1, std::min(c1 + h1, mid - gap), false, true},
                                 {std::max(c2 - h2, mid + gap), c2 + h2, false, true}};
    Predicate p;
    p.set_ranges(a.name, ivs);
    if (p.ranges.size() < 2) return std::nullopt;
    Generated g;
    g.achieved = selectivity_of(columns_[attr].count_union(p.ranges));
    g.predicate = std::move(p);
    double rel = std::abs(g.achieved - target) / target;
    if (rel > spec.rel_tolerance) return std::nullopt;
    return g;
  }

  std::optional<Generated> make_mixed(double target, const WorkloadSpec& spec,
                                      std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    // Pick labels with joint frequency comfortably above the target so the
    // range can cut it down.
    std::vector<uint32_t> gids;
    std::vector<uint32_t> rows;
    for (int attempt = 0; attempt < 60 && gids.empty(); ++attempt) {
      bool pair = categorical_attrs_.size() >= 2 && unit(rng) < 0.4;
      std::vector<uint32_t> cand;
      if (pair) {
        auto [a, b] = two_distinct_attrs(rng);
        uint32_t ga = random_gid_of_attr(a, rng);
        uint32_t gb = random_gid_of_attr(b, rng);
        if (ga == DatasetStats::kNoLabel || gb == DatasetStats::kNoLabel) continue;
        cand = {ga, gb};
      } else {
        uint32_t ga = random_gid_of_attr(categorical_attrs_[rng() % categorical_attrs_.size()], rng);
        if (ga == DatasetStats::kNoLabel) continue;
        cand = {ga};
      }
      std::vector<uint32_t> matched = posting_intersection(cand);
      if (selectivity_of(matched.size()) >= target * 1.2) {
        gids = cand;
        rows = std::move(matched);
      }
    }
    if (gids.empty()) return std::nullopt;

    std::size_t attr = numeric_attrs_[rng() % numeric_attrs_.size()];
    const Attribute& a = corpus_.schema().at(attr);
    std::vector<double> values;
    values.reserve(rows.size());
    for (uint32_t r : rows) values.push_back(corpus_.numeric_value(r, attr));
    detail::SortedColumn sub(values);

    std::uniform_real_distribution<double> center(a.min, a.max);
    double c = center(rng);
    auto count_at = [&](double h) { return sub.count({c - h, c + h, false, true}); };
    double h = search_width(count_at, target, a.max - a.min, spec.rel_tolerance);
    if (h <= 0.0) return std::nullopt;

    Generated g;
    for (uint32_t gid : gids) g.predicate.add_label(attr_name(gid), label_name(gid));
    g.predicate.set_ranges(a.name, {{c - h, c + h, false, true}});
    g.achieved = selectivity_of(count_at(h));
    return g;
  }

  // Monotone binary search for the half-width h with count(h)/N within the
  // relative tolerance of target; returns -1 when the search fails.
  template <typename CountFn>
  double search_width(CountFn count_at, double target, double span, double tol) const {
    const double n = static_cast<double>(corpus_.size());
    double lo = 0.0, hi = span;
    if (static_cast<double>(count_at(hi)) / n < target * (1.0 - tol)) return -1.0;
    double best = -1.0, best_err = std::numeric_limits<double>::infinity();
    for (int iter = 0; iter < 60; ++iter) {
      double mid = (lo + hi) / 2.0;
      double sel = static_cast<double>(count_at(mid)) / n;
      double err = target > 0 ? std::abs(sel - target) / target : 0.0;
      if (err < best_err) {
        best_err = err;
        best = mid;
      }
      if (err <= tol * 0.5) break;  // comfortably inside
      (sel < target ? lo : hi) = mid;
    }
    return best_err <= tol ? best : -1.0;
  }

  std::size_t joint_count(const std::vector<uint32_t>& gids) const {
    return posting_intersection(gids).size();
  }

  std::vector<uint32_t> posting_intersection(std::vector<uint32_t> gids) const {
    std::sort(gids.begin(), gids.end(), [&](uint32_t a, uint32_t b) {
      return postings_[a].size() < postings_[b].size();
    });
    std::vector<uint32_t> acc = postings_[gids.front()];
    for (std::size_t i = 1; i < gids.size() && !acc.empty(); ++i)
      acc = detail::intersect_sorted(acc, postings_[gids[i]]);
    return acc;
  }

  std::pair<std::size_t, std::size_t> two_distinct_attrs(std::mt19937_64& rng) const {
    std::size_t a = categorical_attrs_[rng() % categorical_attrs_.size()];
    std::size_t b = a;
    while (b == a) b = categorical_attrs_[rng() % categorical_attrs_.size()];
    return {a, b};
  }

  uint32_t random_gid_of_attr(std::size_t attr, std::mt19937_64& rng) const {
    std::vector<uint32_t> gids;
    for (uint32_t g = 0; g < stats_.num_labels(); ++g)
      if (stats_.labels[g].attr == attr && stats_.labels[g].count > 0) gids.push_back(g);
    if (gids.empty()) return DatasetStats::kNoLabel;
    return gids[rng() % gids.size()];
  }

  std::vector<double> estimate_std() const {
    const std::size_t probe = std::min<std::size_t>(corpus_.size(), 1000);
    std::vector<double> mean(corpus_.dim(), 0.0), var(corpus_.dim(), 0.0);
    for (std::size_t i = 0; i < probe; ++i) {
      auto row = corpus_.row(i);
      for (std::size_t j = 0; j < row.size(); ++j) mean[j] += row[j];
    }
    for (double& m : mean) m /= static_cast<double>(probe);
    for (std::size_t i = 0; i < probe; ++i) {
      auto row = corpus_.row(i);
      for (std::size_t j = 0; j < row.size(); ++j) {
        double d = row[j] - mean[j];
        var[j] += d * d;
      }
    }
    std::vector<double> sd(corpus_.dim());
    for (std::size_t j = 0; j < sd.size(); ++j)
      sd[j] = std::sqrt(var[j] / static_cast<double>(probe));
    return sd;
  }

  std::vector<float> perturbed_row(std::mt19937_64& rng, double perturbation) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::size_t row = rng() % corpus_.size();
    std::vector<float> q(corpus_.row(row).begin(), corpus_.row(row).end());
    for (std::size_t j = 0; j < q.size(); ++j)
      q[j] += static_cast<float>(perturbation * per_dim_std_[j] * gauss(rng));
    return q;
  }

  const VectorCorpus& corpus_;
  const DatasetStats& stats_;
  std::vector<std::size_t> numeric_attrs_, categorical_attrs_;
  std::vector<detail::SortedColumn> columns_;  // empty for categorical slots
  std::vector<std::vector<uint32_t>> postings_;
  std::vector<double> per_dim_std_;
};

inline Workload gen_workload(const VectorCorpus& corpus, const DatasetStats& stats,
                             const WorkloadSpec& spec, uint64_t seed) {
  WorkloadGenerator gen(corpus, stats);
  return gen.generate(spec, seed);
}

inline nlohmann::json workload_to_json(const Workload& w) {
  nlohmann::json j;
  j["k"] = w.k;
  nlohmann::json entries = nlohmann::json::array();
  for (std::size_t i = 0; i < w.size(); ++i) {
    nlohmann::json e;
    e["target"] = w.target_selectivities[i];
    e["achieved"] = w.achieved_selectivities[i];
    e["flagged"] = w.flagged[i] != 0;
    e["predicate"] = predicate_to_text(w.queries[i].predicate);
    e["vector"] = w.queries[i].vector;
    entries.push_back(std::move(e));
  }
  j["queries"] = std::move(entries);
  return j;
}

inline Workload workload_from_json(const nlohmann::json& j, const AttributeSchema& schema) {
  Workload w;
  w.k = j.at("k").get<std::size_t>();
  for (const auto& e : j.at("queries")) {
    FilteredQuery q;
    q.k = w.k;
    q.predicate = parse_predicate(schema, e.at("predicate").get<std::string>());
    q.vector = e.at("vector").get<std::vector<float>>();
    w.queries.push_back(std::move(q));
    w.target_selectivities.push_back(e.at("target").get<double>());
    w.achieved_selectivities.push_back(e.at("achieved").get<double>());
    w.flagged.push_back(e.value("flagged", false) ? 1 : 0);
  }
  return w;
}

inline void save_workload(const Workload& w, const std::string& path) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  f << workload_to_json(w).dump(2) << "\n";
  if (!f) throw IoError("short write to '" + path + "'");
}

inline Workload load_workload(const std::string& path, const AttributeSchema& schema) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open '" + path + "'");
  nlohmann::json j = nlohmann::json::parse(f, nullptr, false);
  if (j.is_discarded()) throw IoError(path + ": malformed workload JSON");
  return workload_from_json(j, schema);
}

}  // namespace annplan
