#pragma once

#include <fstream>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"

#include "annplan/engines.hpp"
#include "annplan/error.hpp"
#include "annplan/planner.hpp"
#include "annplan/workload.hpp"

namespace annplan {

struct BenchConfig {
  bool warmup = true;            // one untimed pass per method
  std::size_t alpha0 = 10;       // fixed alpha for the pure post-filter method
  int threads = 1;               // ground-truth computation only
  bool recall_fixed_k = false;   // divide recall by k instead of min(k, matches)
};

struct QueryRecord {
  std::size_t query = 0;
  double seconds = 0.0;
  double recall = 0.0;
  double utility = 0.0;
  double planning_seconds = 0.0;
  std::size_t alpha_final = 0;
  Strategy strategy = Strategy::Pre;
};

struct MethodResult {
  std::string method;
  double mean_recall = 0.0;
  double mean_seconds = 0.0;
  double mean_utility = 0.0;
  std::vector<QueryRecord> records;
};

struct BenchReport {
  std::vector<MethodResult> methods;
  nlohmann::json metadata;
};

// Everything a bench run may need; absent artifacts only fail the methods
// that require them.
struct BenchArtifacts {
  const DatasetStats* stats = nullptr;
  const AnnIndex* index = nullptr;
  const PlannerModel* planner = nullptr;
  const GBMRegressor* sel_model = nullptr;
};

namespace detail {

inline double bench_recall(const ResultSet& got, const ResultSet& truth, std::size_t k,
                           bool fixed_k) {
  std::size_t denom = fixed_k ? k : truth.size();
  if (denom == 0) return 1.0;
  std::vector<std::size_t> t = truth.ids;
  std::sort(t.begin(), t.end());
  std::size_t hits = 0;
  for (std::size_t id : got.ids)
    hits += static_cast<std::size_t>(std::binary_search(t.begin(), t.end(), id));
  return static_cast<double>(hits) / static_cast<double>(denom);
}

// Ground truth = pre-filter output, provably exact. --threads parallelizes
// only this, never the timed sections.
inline std::vector<ResultSet> ground_truth(const VectorCorpus& corpus, const Workload& workload,
                                           Metric metric, int threads) {
  std::vector<ResultSet> truth(workload.size());
  auto worker = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i)
      truth[i] = knn_exact(corpus, workload.queries[i].vector, workload.k,
                           workload.queries[i].predicate, metric);
  };
  if (threads <= 1 || workload.size() < 2) {
    worker(0, workload.size());
  } else {
    std::size_t n_threads = std::min<std::size_t>(threads, workload.size());
    std::vector<std::thread> pool;
    std::size_t chunk = (workload.size() + n_threads - 1) / n_threads;
    for (std::size_t t = 0; t < n_threads; ++t) {
      std::size_t begin = t * chunk;
      std::size_t end = std::min(workload.size(), begin + chunk);
      if (begin < end) pool.emplace_back(worker, begin, end);
    }
    for (auto& th : pool) th.join();
  }
  return truth;
}

}  // namespace detail

inline BenchReport run_bench(const VectorCorpus& corpus, const Workload& workload,
                             const std::vector<std::string>& methods,
                             const BenchArtifacts& art, const BenchConfig& config = {}) {
  if (workload.size() == 0) throw InputError("run_bench: empty workload");
  for (const std::string& m : methods) {
    if (m != "pre" && m != "post" && m != "planned")
      throw ConfigError("run_bench: unknown method '" + m + "'");
    if ((m == "post" || m == "planned") && !art.index)
      throw MissingArtifactError("method '" + m +
                                 "' needs a global index; build one with `annplan build-index`");
    if (m == "planned" && !art.planner)
      throw MissingArtifactError(
          "method 'planned' needs a trained planner; run `annplan train-planner`");
    if (m == "planned" && !art.stats)
      throw MissingArtifactError(
          "method 'planned' needs dataset statistics; run `annplan build-stats`");
  }

  Metric metric = art.index ? art.index->metric() : Metric::L2Squared;
  std::vector<ResultSet> truth = detail::ground_truth(corpus, workload, metric, config.threads);

  auto run_one = [&](const std::string& method, std::size_t i) -> ExecutionReport {
    const FilteredQuery& q = workload.queries[i];
    if (method == "pre") return prefilter_search(corpus, q, metric);
    if (method == "post") return postfilter_search(*art.index, corpus, q, config.alpha0);
    return plan_and_execute(*art.planner, *art.stats, art.sel_model, *art.index, corpus, q);
  };

  BenchReport report;
  for (const std::string& method : methods) {
    MethodResult result;
    result.method = method;
    report.methods.push_back(std::move(result));
  }

  // Methods run back-to-back per query so clock drift and cache state hit
  // every method alike; the warm-up pass is excluded from timing.
  if (config.warmup)
    for (std::size_t i = 0; i < workload.size(); ++i)
      for (std::size_t m = 0; m < methods.size(); ++m) run_one(methods[m], i);

  for (std::size_t i = 0; i < workload.size(); ++i) {
    for (std::size_t m = 0; m < methods.size(); ++m) {
      ExecutionReport rep = run_one(methods[m], i);
      QueryRecord rec;
      rec.query = i;
      rec.seconds = rep.elapsed_seconds;
      rec.recall = detail::bench_recall(rep.results, truth[i], workload.k, config.recall_fixed_k);
      rec.utility = rec.recall / rec.seconds;
      rec.planning_seconds = rep.planning_seconds;
      rec.alpha_final = rep.alpha_final;
      rec.strategy = rep.strategy;
      report.methods[m].records.push_back(rec);
    }
  }

  for (MethodResult& result : report.methods) {
    for (const QueryRecord& r : result.records) {
      result.mean_recall += r.recall;
      result.mean_seconds += r.seconds;
      result.mean_utility += r.utility;
    }
    double n = static_cast<double>(result.records.size());
    result.mean_recall /= n;
    result.mean_seconds /= n;
    result.mean_utility /= n;
  }
  return report;
}

// Line-delimited report: one metadata line, one summary line per method,
// then one line per (method, query) record.
inline void write_bench_report(const BenchReport& report, std::ostream& out) {
  nlohmann::json meta = report.metadata;
  meta["type"] = "metadata";
  out << meta.dump() << "\n";
  for (const MethodResult& m : report.methods) {
    nlohmann::json s;
    s["type"] = "summary";
    s["method"] = m.method;
    s["mean_recall"] = m.mean_recall;
    s["mean_seconds"] = m.mean_seconds;
    s["mean_utility"] = m.mean_utility;
    s["queries"] = m.records.size();
    out << s.dump() << "\n";
  }
  for (const MethodResult& m : report.methods) {
    for (const QueryRecord& r : m.records) {
      nlohmann::json e;
      e["type"] = "query";
      e["method"] = m.method;
      e["query"] = r.query;
      e["seconds"] = r.seconds;
      e["recall"] = r.recall;
      e["utility"] = r.utility;
      e["planning_seconds"] = r.planning_seconds;
      e["strategy"] = strategy_name(r.strategy);
      if (r.alpha_final > 0) e["alpha_final"] = r.alpha_final;
      out << e.dump() << "\n";
    }
  }
}

inline void save_bench_report(const BenchReport& report, const std::string& path) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  write_bench_report(report, f);
}

// Two columns (latency seconds, recall), one row per query; consumable by
// any plotting tool.
inline void save_latency_recall_curves(const BenchReport& report, const std::string& prefix) {
  for (const MethodResult& m : report.methods) {
    std::string path = prefix + "." + m.method + ".curve";
    std::ofstream f(path, std::ios::trunc);
    if (!f) throw IoError("cannot open '" + path + "' for writing");
    for (const QueryRecord& r : m.records) f << r.seconds << " " << r.recall << "\n";
  }
}

}  // namespace annplan
