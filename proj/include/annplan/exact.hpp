#pragma once

#include <algorithm>
#include <cstddef>
#include <queue>
#include <span>
#include <vector>

#include "annplan/corpus.hpp"
#include "annplan/error.hpp"
#include "annplan/predicate.hpp"

namespace annplan {

// Squared Euclidean is the default ranking; inner-product ranking negates
// the dot product so "smaller is better" holds for both.
enum class Metric { L2Squared, InnerProduct };

// Plain in-order accumulation. Every distance in the project goes through
// here so oracles, engines, and indexes agree bit-for-bit.
inline double distance(std::span<const float> a, std::span<const float> b, Metric metric) {
  double acc = 0.0;
  if (metric == Metric::L2Squared) {
    for (std::size_t i = 0; i < a.size(); ++i) {
      double diff = static_cast<double>(a[i]) - static_cast<double>(b[i]);
      acc += diff * diff;
    }
    return acc;
  }
  for (std::size_t i = 0; i < a.size(); ++i)
    acc += static_cast<double>(a[i]) * static_cast<double>(b[i]);
  return -acc;
}

struct FilteredQuery {
  std::vector<float> vector;
  Predicate predicate;
  std::size_t k = 1;
};

// ids sorted by ascending (distance, id); at most k entries, every one of
// them satisfying the query predicate.
struct ResultSet {
  std::vector<std::size_t> ids;
  std::vector<double> distances;

  std::size_t size() const { return ids.size(); }
};

namespace detail {

struct Candidate {
  double dist;
  std::size_t id;
};

struct CandidateWorseFirst {
  bool operator()(const Candidate& a, const Candidate& b) const {
    if (a.dist != b.dist) return a.dist < b.dist;
    return a.id < b.id;  // larger id is "worse" on a distance tie
  }
};

// Bounded top-k accumulator with (distance, id) ordering.
class TopK {
 public:
  explicit TopK(std::size_t k) : k_(k) {}

  void offer(double dist, std::size_t id) {
    if (heap_.size() < k_) {
      heap_.push({dist, id});
      return;
    }
    const Candidate& worst = heap_.top();
    if (dist < worst.dist || (dist == worst.dist && id < worst.id)) {
      heap_.pop();
      heap_.push({dist, id});
    }
  }

  ResultSet take() {
    std::vector<Candidate> sorted(heap_.size());
    for (std::size_t i = heap_.size(); i-- > 0;) {
      sorted[i] = heap_.top();
      heap_.pop();
    }
    ResultSet rs;
    rs.ids.reserve(sorted.size());
    rs.distances.reserve(sorted.size());
    for (const Candidate& c : sorted) {
      rs.ids.push_back(c.id);
      rs.distances.push_back(c.dist);
    }
    return rs;
  }

 private:
  std::size_t k_;
  std::priority_queue<Candidate, std::vector<Candidate>, CandidateWorseFirst> heap_;
};

}  // namespace detail

// Fraction of rows matching p, by full scan.
inline double exact_selectivity(const VectorCorpus& corpus, const Predicate& p) {
  if (corpus.size() == 0) throw InputError("exact_selectivity: empty corpus");
  CompiledPredicate cp(corpus, p);
  std::size_t matches = 0;
  for (std::size_t i = 0; i < corpus.size(); ++i)
    if (cp.matches(corpus, i)) ++matches;
  return static_cast<double>(matches) / static_cast<double>(corpus.size());
}

inline std::size_t count_matches(const VectorCorpus& corpus, const Predicate& p) {
  CompiledPredicate cp(corpus, p);
  std::size_t matches = 0;
  for (std::size_t i = 0; i < corpus.size(); ++i)
    if (cp.matches(corpus, i)) ++matches;
  return matches;
}

// Exact k nearest matching rows. Fewer than k matches returns all of them.
inline ResultSet knn_exact(const VectorCorpus& corpus, std::span<const float> q, std::size_t k,
                           const Predicate& p, Metric metric = Metric::L2Squared) {
  if (q.size() != corpus.dim())
    throw InputError("knn_exact: query dimension " + std::to_string(q.size()) +
                     " != corpus dimension " + std::to_string(corpus.dim()));
  if (k < 1) throw InputError("knn_exact: k must be >= 1");
  CompiledPredicate cp(corpus, p);
  detail::TopK top(k);
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    if (!cp.matches(corpus, i)) continue;
    top.offer(distance(q, corpus.row(i), metric), i);
  }
  return top.take();
}

// Exact top-k over an explicit id subset; used by the pre-filter engine.
inline ResultSet knn_over_subset(const VectorCorpus& corpus, std::span<const float> q,
                                 std::size_t k, std::span<const std::size_t> ids,
                                 Metric metric = Metric::L2Squared) {
  detail::TopK top(k);
  for (std::size_t id : ids) top.offer(distance(q, corpus.row(id), metric), id);
  return top.take();
}

}  // namespace annplan
