#pragma once

#include <memory>
#include <span>
#include <string>

#include "annplan/corpus.hpp"
#include "annplan/exact.hpp"
#include "annplan/serialize.hpp"

namespace annplan {

// Backend ANN index contract: built once over an immutable corpus, then
// read-only. search(q, m) returns up to m candidate ids ordered by
// ascending (distance, id), deterministic given the build seed. Indexes
// hold a reference to the corpus; the corpus must outlive them.
class AnnIndex {
 public:
  virtual ~AnnIndex() = default;

  virtual ResultSet search(std::span<const float> query, std::size_t m) const = 0;
  virtual std::string kind() const = 0;
  virtual std::size_t size() const = 0;
  virtual Metric metric() const = 0;

  // Adds kind-specific header fields and sections to a container.
  virtual void persist(ContainerWriter& out) const = 0;
};

// Exact top-m backend. Used in tests and benchmarks so post-filtering
// recall deficits are attributable to candidate truncation only.
class BruteForceIndex final : public AnnIndex {
 public:
  BruteForceIndex(const VectorCorpus& corpus, Metric metric)
      : corpus_(corpus), metric_(metric) {}

  ResultSet search(std::span<const float> query, std::size_t m) const override {
    return knn_exact(corpus_, query, std::max<std::size_t>(m, 1), Predicate{}, metric_);
  }

  std::string kind() const override { return "brute"; }
  std::size_t size() const override { return corpus_.size(); }
  Metric metric() const override { return metric_; }

  void persist(ContainerWriter& out) const override {
    out.header()["backend"] = "brute";
    out.header()["metric"] = metric_ == Metric::L2Squared ? "l2sq" : "ip";
    out.header()["n"] = corpus_.size();
  }

 private:
  const VectorCorpus& corpus_;
  Metric metric_;
};

inline std::unique_ptr<AnnIndex> brute_force_index(const VectorCorpus& corpus,
                                                   Metric metric = Metric::L2Squared) {
  return std::make_unique<BruteForceIndex>(corpus, metric);
}

}  // namespace annplan
