#pragma once

#include <random>
#include <string>
#include <vector>

#include "annplan/corpus.hpp"
#include "annplan/exact.hpp"

namespace annplan::testing {

inline AttributeSchema shop_schema() {
  return AttributeSchema({
      {"color", AttributeKind::Categorical, 0, 0},
      {"type", AttributeKind::Categorical, 0, 0},
      {"age", AttributeKind::Numeric, 0.0, 100.0},
  });
}

// Deterministic random corpus over the shop schema.
inline VectorCorpus random_corpus(std::size_t n, std::size_t d, uint64_t seed,
                                  std::size_t n_colors = 4, std::size_t n_types = 3) {
  VectorCorpus corpus(shop_schema(), n, d);
  std::mt19937_64 rng(seed);
  std::normal_distribution<float> gauss(0.0f, 1.0f);
  std::uniform_real_distribution<double> age(0.0, 100.0);
  std::uniform_int_distribution<std::size_t> color(0, n_colors - 1);
  std::uniform_int_distribution<std::size_t> type(0, n_types - 1);
  for (std::size_t i = 0; i < n; ++i) {
    for (float& v : corpus.row_mut(i)) v = gauss(rng);
    corpus.set_label(i, 0, "color" + std::to_string(color(rng)));
    corpus.set_label(i, 1, "type" + std::to_string(type(rng)));
    corpus.set_numeric(i, 2, age(rng));
  }
  return corpus;
}

// Test-side KNN oracle, kept independent of the library path: materializes
// every matching row then fully sorts by (distance, id).
inline ResultSet naive_knn(const VectorCorpus& corpus, std::span<const float> q, std::size_t k,
                           const Predicate& p, Metric metric = Metric::L2Squared) {
  struct Hit {
    double dist;
    std::size_t id;
  };
  std::vector<Hit> hits;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    if (!eval_predicate(corpus, i, p)) continue;
    double acc = 0.0;
    auto row = corpus.row(i);
    if (metric == Metric::L2Squared) {
      for (std::size_t j = 0; j < q.size(); ++j) {
        double diff = static_cast<double>(q[j]) - static_cast<double>(row[j]);
        acc += diff * diff;
      }
    } else {
      for (std::size_t j = 0; j < q.size(); ++j)
        acc += static_cast<double>(q[j]) * static_cast<double>(row[j]);
      acc = -acc;
    }
    hits.push_back({acc, i});
  }
  std::sort(hits.begin(), hits.end(), [](const Hit& a, const Hit& b) {
    if (a.dist != b.dist) return a.dist < b.dist;
    return a.id < b.id;
  });
  if (hits.size() > k) hits.resize(k);
  ResultSet rs;
  for (const Hit& h : hits) {
    rs.ids.push_back(h.id);
    rs.distances.push_back(h.dist);
  }
  return rs;
}

inline bool same_results(const ResultSet& a, const ResultSet& b) {
  return a.ids == b.ids && a.distances == b.distances;
}

}  // namespace annplan::testing
