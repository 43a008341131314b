#pragma once

#include <chrono>
#include <cstddef>
#include <vector>

#include "annplan/corpus.hpp"
#include "annplan/exact.hpp"
#include "annplan/index.hpp"
#include "annplan/predicate.hpp"

namespace annplan {

enum class Strategy { Pre, Post };

inline const char* strategy_name(Strategy s) { return s == Strategy::Pre ? "pre" : "post"; }

struct ExecutionReport {
  ResultSet results;
  Strategy strategy = Strategy::Pre;
  double elapsed_seconds = 0.0;   // wall clock; includes planning when planned
  double planning_seconds = 0.0;  // estimation + model inference share
  std::size_t alpha_initial = 0;  // post-filtering only
  std::size_t alpha_final = 0;
  std::size_t candidates_scanned = 0;
  bool fallback = false;
};

namespace detail {

class StopWatch {
 public:
  StopWatch() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    auto dt = std::chrono::steady_clock::now() - start_;
    double s = std::chrono::duration<double>(dt).count();
    return s > 0.0 ? s : 1e-9;  // monotone clocks can report equal stamps
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

}  // namespace detail

// Filter-then-search: scan metadata for matching ids, then exact KNN over
// the subset. Recall is 1 by construction.
inline ExecutionReport prefilter_search(const VectorCorpus& corpus, const FilteredQuery& query,
                                        Metric metric = Metric::L2Squared) {
  detail::StopWatch timer;
  CompiledPredicate cp(corpus, query.predicate);
  std::vector<std::size_t> matching;
  for (std::size_t i = 0; i < corpus.size(); ++i)
    if (cp.matches(corpus, i)) matching.push_back(i);

  ExecutionReport report;
  report.strategy = Strategy::Pre;
  report.results = knn_over_subset(corpus, query.vector, query.k, matching, metric);
  report.candidates_scanned = matching.size();
  report.elapsed_seconds = timer.seconds();
  return report;
}

// Search-then-filter: fetch alpha*k candidates from the global index, keep
// those passing the predicate, and double alpha until k survive. Once
// alpha*k reaches N the loop falls back to a full filtered scan, which
// guarantees termination and exact results even when fewer than k rows
// match.
inline ExecutionReport postfilter_search(const AnnIndex& index, const VectorCorpus& corpus,
                                         const FilteredQuery& query, std::size_t alpha0 = 10) {
  detail::StopWatch timer;
  if (query.vector.size() != corpus.dim())
    throw InputError("postfilter_search: query dimension mismatch");
  CompiledPredicate cp(corpus, query.predicate);

  ExecutionReport report;
  report.strategy = Strategy::Post;
  report.alpha_initial = std::max<std::size_t>(alpha0, 1);

  const std::size_t n = corpus.size();
  const std::size_t k = query.k;
  std::size_t alpha = report.alpha_initial;
  while (alpha * k < n) {
    ResultSet candidates = index.search(query.vector, alpha * k);
    report.candidates_scanned += candidates.size();
    ResultSet survivors;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      if (!cp.matches(corpus, candidates.ids[i])) continue;
      survivors.ids.push_back(candidates.ids[i]);
      survivors.distances.push_back(candidates.distances[i]);
      if (survivors.size() == k) break;
    }
    if (survivors.size() >= k) {
      report.results = std::move(survivors);
      report.alpha_final = alpha;
      report.elapsed_seconds = timer.seconds();
      return report;
    }
    alpha *= 2;
  }

  // Full filtered scan over the candidate universe.
  std::vector<std::size_t> matching;
  for (std::size_t i = 0; i < n; ++i)
    if (cp.matches(corpus, i)) matching.push_back(i);
  report.results = knn_over_subset(corpus, query.vector, k, matching, index.metric());
  report.candidates_scanned += n;
  report.alpha_final = alpha;
  report.fallback = true;
  report.elapsed_seconds = timer.seconds();
  return report;
}

}  // namespace annplan
