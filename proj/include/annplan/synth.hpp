#pragma once

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "annplan/corpus.hpp"
#include "annplan/error.hpp"

namespace annplan {

struct LabelAttributeSpec {
  std::string name;
  std::size_t num_labels = 8;
  double zipf_s = 1.0;  // 0 = uniform label frequencies
};

struct NumericAttributeSpec {
  enum class Dist { Uniform, Gaussian };
  std::string name;
  double min = 0.0;
  double max = 1.0;
  Dist dist = Dist::Uniform;
  double mean = 0.5;
  double stddev = 0.15;
};

// Plants P(a,b) = factor * P(a) * P(b), so the empirical PMI of the pair
// approaches ln(factor). The conditioning attribute must precede the target
// attribute in the label spec list.
struct LabelLabelCorrelation {
  std::string attr_a;
  std::size_t label_a = 0;
  std::string attr_b;
  std::size_t label_b = 0;
  double factor = 2.0;
};

// Rows carrying the label draw the numeric attribute from [lo, hi) with the
// given probability instead of the base distribution.
struct LabelRangeCorrelation {
  std::string attr;
  std::size_t label = 0;
  std::string numeric_attr;
  double lo = 0.0;
  double hi = 1.0;
  double prob = 0.8;
};

// Clustered draws from a gaussian mixture; i.i.d. normal/uniform vectors
// have no neighborhood structure at high dimension, which no embedding
// dataset resembles.
enum class VectorDist { Normal, Uniform, Clustered };

struct CorpusSpec {
  std::size_t n = 1000;
  std::size_t d = 8;
  VectorDist vectors = VectorDist::Normal;
  std::size_t n_clusters = 64;      // Clustered only
  double cluster_stddev = 0.3;      // within-cluster spread
  std::vector<LabelAttributeSpec> label_attrs;
  std::vector<NumericAttributeSpec> numeric_attrs;
  std::vector<LabelLabelCorrelation> label_correlations;
  std::vector<LabelRangeCorrelation> range_correlations;
};

inline std::string synth_label(const std::string& attr, std::size_t i) {
  return attr + "_" + std::to_string(i);
}

namespace detail {

// Zipf-like marginals: p_i proportional to 1/(i+1)^s.
inline std::vector<double> zipf_marginals(std::size_t count, double s) {
  std::vector<double> p(count);
  double total = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    p[i] = 1.0 / std::pow(static_cast<double>(i + 1), s);
    total += p[i];
  }
  for (double& v : p) v /= total;
  return p;
}

inline std::size_t draw_discrete(const std::vector<double>& p, double u) {
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    acc += p[i];
    if (u < acc) return i;
  }
  return p.size() - 1;
}

}  // namespace detail

// Deterministic synthetic corpus: i.i.d. vectors, Zipf-ish categorical
// attributes, uniform or clamped-gaussian numeric attributes, and optional
// planted label-label / label-range dependencies.
inline VectorCorpus gen_synthetic_corpus(const CorpusSpec& spec, uint64_t seed) {
  if (spec.n < 1 || spec.d < 1) throw ConfigError("corpus spec: n and d must be >= 1");
  std::vector<Attribute> attrs;
  for (const auto& a : spec.label_attrs) {
    if (a.num_labels < 1) throw ConfigError("corpus spec: attribute '" + a.name + "' needs labels");
    attrs.push_back({a.name, AttributeKind::Categorical, 0, 0});
  }
  for (const auto& a : spec.numeric_attrs) {
    if (!(a.min < a.max)) throw ConfigError("corpus spec: '" + a.name + "' needs min < max");
    attrs.push_back({a.name, AttributeKind::Numeric, a.min, a.max});
  }
  AttributeSchema schema(std::move(attrs));
  VectorCorpus corpus(schema, spec.n, spec.d);

  // Resolve correlation specs to indexes once, validating direction.
  struct LLPlan {
    std::size_t attr_a, label_a, attr_b, label_b;
    double factor;
  };
  std::vector<LLPlan> ll_plans;
  for (const auto& c : spec.label_correlations) {
    std::size_t ia = schema.require(c.attr_a);
    std::size_t ib = schema.require(c.attr_b);
    if (ia >= ib)
      throw ConfigError("label correlation: '" + c.attr_a + "' must precede '" + c.attr_b + "'");
    ll_plans.push_back({ia, c.label_a, ib, c.label_b, c.factor});
  }
  struct LRPlan {
    std::size_t attr, label, numeric_attr;
    double lo, hi, prob;
  };
  std::vector<LRPlan> lr_plans;
  for (const auto& c : spec.range_correlations) {
    lr_plans.push_back({schema.require(c.attr), c.label, schema.require(c.numeric_attr), c.lo,
                        c.hi, c.prob});
  }

  std::vector<std::vector<double>> marginals;
  for (const auto& a : spec.label_attrs)
    marginals.push_back(detail::zipf_marginals(a.num_labels, a.zipf_s));

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);

  std::vector<float> centers;
  if (spec.vectors == VectorDist::Clustered) {
    if (spec.n_clusters < 1) throw ConfigError("corpus spec: n_clusters must be >= 1");
    centers.resize(spec.n_clusters * spec.d);
    for (float& c : centers) c = static_cast<float>(gauss(rng));
  }

  std::vector<std::size_t> row_labels(spec.label_attrs.size());
  for (std::size_t row = 0; row < spec.n; ++row) {
    if (spec.vectors == VectorDist::Normal) {
      for (float& v : corpus.row_mut(row)) v = static_cast<float>(gauss(rng));
    } else if (spec.vectors == VectorDist::Uniform) {
      for (float& v : corpus.row_mut(row)) v = static_cast<float>(unit(rng));
    } else {
      const float* center = centers.data() + (rng() % spec.n_clusters) * spec.d;
      auto out = corpus.row_mut(row);
      for (std::size_t j = 0; j < spec.d; ++j)
        out[j] = center[j] + static_cast<float>(spec.cluster_stddev * gauss(rng));
    }

    for (std::size_t a = 0; a < spec.label_attrs.size(); ++a) {
      std::vector<double> dist = marginals[a];
      // When the drawn trigger label matches, the target label's conditional
      // probability becomes factor * base. Rows without the trigger use a
      // compensated conditional instead, keeping the target's marginal at
      // its base value so the empirical PMI of the pair approaches
      // ln(factor). With several plans on one attribute only the first
      // stays exact; later ones add approximate dependence.
      const LLPlan* matched = nullptr;
      const LLPlan* first_for_attr = nullptr;
      for (const LLPlan& plan : ll_plans) {
        if (plan.attr_b != a) continue;
        if (!first_for_attr) first_for_attr = &plan;
        if (row_labels[plan.attr_a] == plan.label_a) {
          matched = &plan;
          break;
        }
      }
      const LLPlan* applied = matched ? matched : first_for_attr;
      if (applied && marginals[a].size() > 1) {
        double base = marginals[a][applied->label_b];
        double conditional;
        if (matched) {
          conditional = std::min(applied->factor * base, 1.0);
        } else {
          double trigger = marginals[applied->attr_a][applied->label_a];
          conditional = std::clamp(
              base * (1.0 - applied->factor * trigger) / (1.0 - trigger), 0.0, 1.0);
        }
        double scale = base < 1.0 ? (1.0 - conditional) / (1.0 - base) : 0.0;
        for (std::size_t i = 0; i < dist.size(); ++i)
          dist[i] = i == applied->label_b ? conditional : marginals[a][i] * scale;
      }
      std::size_t code = detail::draw_discrete(dist, unit(rng));
      row_labels[a] = code;
      corpus.set_label(row, a, synth_label(spec.label_attrs[a].name, code));
    }

    for (std::size_t j = 0; j < spec.numeric_attrs.size(); ++j) {
      const auto& a = spec.numeric_attrs[j];
      std::size_t attr_idx = spec.label_attrs.size() + j;
      double v = 0.0;
      bool planted = false;
      for (const LRPlan& plan : lr_plans) {
        if (plan.numeric_attr != attr_idx || row_labels[plan.attr] != plan.label) continue;
        if (unit(rng) < plan.prob) {
          v = plan.lo + unit(rng) * (plan.hi - plan.lo);
          planted = true;
        }
        break;
      }
      if (!planted) {
        if (a.dist == NumericAttributeSpec::Dist::Uniform) {
          v = a.min + unit(rng) * (a.max - a.min);
        } else {
          v = std::clamp(a.mean + a.stddev * gauss(rng), a.min, a.max);
        }
      }
      corpus.set_numeric(row, attr_idx, v);
    }
  }
  return corpus;
}

}  // namespace annplan
