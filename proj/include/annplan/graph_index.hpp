#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <queue>
#include <random>
#include <vector>

#include "annplan/index.hpp"

namespace annplan {

struct GraphIndexParams {
  int max_degree = 16;       // M; level 0 allows 2M links
  int build_beam = 128;      // ef_construction
  int min_search_beam = 64;  // floor for the query-time beam
};

// Navigable-small-world graph: layered random-level structure with greedy
// descent through the upper layers and beam search at layer 0. Inserts run
// sequentially so the same seed always yields the same graph.
class GraphIndex final : public AnnIndex {
 public:
  GraphIndex(const VectorCorpus& corpus, GraphIndexParams params, uint64_t seed, Metric metric)
      : corpus_(corpus), params_(params), seed_(seed), metric_(metric) {
    build();
  }

  // Deserializing constructor; adjacency supplied by the loader.
  GraphIndex(const VectorCorpus& corpus, GraphIndexParams params, uint64_t seed, Metric metric,
             std::vector<std::vector<std::vector<uint32_t>>> links, uint32_t entry,
             int top_level)
      : corpus_(corpus),
        params_(params),
        seed_(seed),
        metric_(metric),
        links_(std::move(links)),
        entry_(entry),
        top_level_(top_level) {}

  ResultSet search(std::span<const float> query, std::size_t m) const override {
    if (query.size() != corpus_.dim()) throw InputError("graph search: dimension mismatch");
    m = std::max<std::size_t>(m, 1);
    uint32_t cur = entry_;
    double cur_dist = distance(query, corpus_.row(cur), metric_);
    for (int level = top_level_; level > 0; --level) greedy_step(query, level, cur, cur_dist);
    std::size_t ef = std::max<std::size_t>(m, static_cast<std::size_t>(params_.min_search_beam));
    std::vector<Candidate> found = search_layer(query, cur, cur_dist, 0, ef);
    if (found.size() > m) found.resize(m);
    ResultSet rs;
    for (const Candidate& c : found) {
      rs.ids.push_back(c.id);
      rs.distances.push_back(c.dist);
    }
    return rs;
  }

  std::string kind() const override { return "graph"; }
  std::size_t size() const override { return corpus_.size(); }
  Metric metric() const override { return metric_; }
  const GraphIndexParams& params() const { return params_; }
  uint64_t seed() const { return seed_; }

  void persist(ContainerWriter& out) const override {
    out.header()["backend"] = "graph";
    out.header()["metric"] = metric_ == Metric::L2Squared ? "l2sq" : "ip";
    out.header()["n"] = corpus_.size();
    out.header()["max_degree"] = params_.max_degree;
    out.header()["build_beam"] = params_.build_beam;
    out.header()["min_search_beam"] = params_.min_search_beam;
    out.header()["seed"] = seed_;

    ByteWriter w;
    w.u32(entry_);
    w.i32(top_level_);
    w.u32(static_cast<uint32_t>(links_.size()));
    for (const auto& level : links_) {
      w.u32(static_cast<uint32_t>(level.size()));
      for (const auto& nbrs : level) {
        w.u32(static_cast<uint32_t>(nbrs.size()));
        for (uint32_t id : nbrs) w.u32(id);
      }
    }
    out.add_section("GRAPH", w.take());
  }

 private:
  struct Candidate {
    double dist;
    uint32_t id;
    bool operator<(const Candidate& o) const {  // min-heap via greater, ties by id
      if (dist != o.dist) return dist < o.dist;
      return id < o.id;
    }
  };

  double dist_to(std::span<const float> q, uint32_t id) const {
    return distance(q, corpus_.row(id), metric_);
  }

  void greedy_step(std::span<const float> q, int level, uint32_t& cur, double& cur_dist) const {
    bool improved = true;
    while (improved) {
      improved = false;
      for (uint32_t nbr : links_[level][cur]) {
        double d = dist_to(q, nbr);
        if (d < cur_dist || (d == cur_dist && nbr < cur)) {
          cur = nbr;
          cur_dist = d;
          improved = true;
        }
      }
    }
  }

  // Beam search over one layer; returns candidates sorted by (dist, id).
  std::vector<Candidate> search_layer(std::span<const float> q, uint32_t entry,
                                      double entry_dist, int level, std::size_t ef) const {
    std::vector<uint8_t> visited(corpus_.size(), 0);
    visited[entry] = 1;

    auto cand_order = [](const Candidate& a, const Candidate& b) { return b < a; };
    std::priority_queue<Candidate, std::vector<Candidate>, decltype(cand_order)> frontier(
        cand_order);  // closest first
    std::priority_queue<Candidate> best;                 // farthest first
    frontier.push({entry_dist, entry});
    best.push({entry_dist, entry});

    while (!frontier.empty()) {
      Candidate cur = frontier.top();
      if (best.size() >= ef && best.top() < cur) break;
      frontier.pop();
      for (uint32_t nbr : links_[level][cur.id]) {
        if (visited[nbr]) continue;
        visited[nbr] = 1;
        Candidate c{dist_to(q, nbr), nbr};
        if (best.size() < ef || c < best.top()) {
          frontier.push(c);
          best.push(c);
          if (best.size() > ef) best.pop();
        }
      }
    }
    std::vector<Candidate> out(best.size());
    for (std::size_t i = best.size(); i-- > 0;) {
      out[i] = best.top();
      best.pop();
    }
    return out;
  }

  // Keep a candidate only if it is closer to the base than to every
  // already-kept neighbor; the usual diversification heuristic.
  std::vector<uint32_t> select_neighbors(const std::vector<Candidate>& sorted,
                                         std::size_t max_count) const {
    std::vector<uint32_t> kept;
    for (const Candidate& c : sorted) {
      if (kept.size() >= max_count) break;
      bool dominated = false;
      for (uint32_t r : kept) {
        if (distance(corpus_.row(c.id), corpus_.row(r), metric_) < c.dist) {
          dominated = true;
          break;
        }
      }
      if (!dominated) kept.push_back(c.id);
    }
    return kept;
  }

  void prune_links(int level, uint32_t node, std::size_t max_count) {
    auto& nbrs = links_[level][node];
    if (nbrs.size() <= max_count) return;
    std::vector<Candidate> cands;
    cands.reserve(nbrs.size());
    for (uint32_t nbr : nbrs)
      cands.push_back({distance(corpus_.row(node), corpus_.row(nbr), metric_), nbr});
    std::sort(cands.begin(), cands.end());
    nbrs = select_neighbors(cands, max_count);
  }

  void build() {
    const std::size_t n = corpus_.size();
    const double level_mult = 1.0 / std::log(static_cast<double>(params_.max_degree));
    std::mt19937_64 rng(seed_);
    std::uniform_real_distribution<double> u(0.0, 1.0);

    std::vector<int> node_level(n);
    int max_level = 0;
    for (std::size_t i = 0; i < n; ++i) {
      double r = std::max(u(rng), 1e-12);
      node_level[i] = static_cast<int>(-std::log(r) * level_mult);
      max_level = std::max(max_level, node_level[i]);
    }
    links_.assign(max_level + 1, {});
    for (auto& level : links_) level.assign(n, {});

    entry_ = 0;
    top_level_ = node_level[0];
    for (uint32_t i = 1; i < n; ++i) {
      auto q = corpus_.row(i);
      uint32_t cur = entry_;
      double cur_dist = dist_to(q, cur);
      for (int level = top_level_; level > node_level[i]; --level)
        greedy_step(q, level, cur, cur_dist);

      const std::size_t ef = static_cast<std::size_t>(params_.build_beam);
      for (int level = std::min(top_level_, node_level[i]); level >= 0; --level) {
        std::vector<Candidate> found = search_layer(q, cur, cur_dist, level, ef);
        std::size_t cap = level == 0 ? 2 * static_cast<std::size_t>(params_.max_degree)
                                     : static_cast<std::size_t>(params_.max_degree);
        std::vector<uint32_t> nbrs =
            select_neighbors(found, static_cast<std::size_t>(params_.max_degree));
        links_[level][i] = nbrs;
        for (uint32_t nbr : nbrs) {
          links_[level][nbr].push_back(i);
          prune_links(level, nbr, cap);
        }
        if (!found.empty()) {
          cur = found.front().id;
          cur_dist = found.front().dist;
        }
      }
      if (node_level[i] > top_level_) {
        top_level_ = node_level[i];
        entry_ = i;
      }
    }
  }

  const VectorCorpus& corpus_;
  GraphIndexParams params_;
  uint64_t seed_;
  Metric metric_;
  std::vector<std::vector<std::vector<uint32_t>>> links_;  // [level][node] -> neighbors
  uint32_t entry_ = 0;
  int top_level_ = 0;
};

inline std::unique_ptr<AnnIndex> build_graph_index(const VectorCorpus& corpus,
                                                   GraphIndexParams params = {},
                                                   uint64_t seed = 0,
                                                   Metric metric = Metric::L2Squared) {
  if (corpus.size() == 0) throw InputError("graph index requires N >= 1");
  return std::make_unique<GraphIndex>(corpus, params, seed, metric);
}

inline void save_index(const AnnIndex& index, const std::string& path) {
  ContainerWriter c("index");
  index.persist(c);
  c.write_file(path);
}

inline std::unique_ptr<AnnIndex> load_index(const std::string& path,
                                            const VectorCorpus& corpus) {
  ContainerReader c = ContainerReader::from_file(path);
  c.require_kind("index");
  std::string backend = c.header().value("backend", "");
  Metric metric = c.header().value("metric", "l2sq") == std::string("ip")
                      ? Metric::InnerProduct
                      : Metric::L2Squared;
  uint64_t n = c.header().value("n", 0ull);
  if (n != corpus.size())
    throw IoError(path + ": index built over " + std::to_string(n) + " rows, corpus has " +
                  std::to_string(corpus.size()));
  if (backend == "brute") return std::make_unique<BruteForceIndex>(corpus, metric);
  if (backend != "graph") throw IoError(path + ": unknown index backend '" + backend + "'");

  GraphIndexParams params;
  params.max_degree = c.header().value("max_degree", params.max_degree);
  params.build_beam = c.header().value("build_beam", params.build_beam);
  params.min_search_beam = c.header().value("min_search_beam", params.min_search_beam);
  uint64_t seed = c.header().value("seed", 0ull);

  ByteReader r = c.section("GRAPH");
  uint32_t entry = r.u32();
  int top_level = r.i32();
  uint32_t n_levels = r.u32();
  std::vector<std::vector<std::vector<uint32_t>>> links(n_levels);
  for (auto& level : links) {
    uint32_t n_nodes = r.u32();
    level.resize(n_nodes);
    for (auto& nbrs : level) {
      uint32_t count = r.u32();
      nbrs.resize(count);
      for (uint32_t& id : nbrs) {
        id = r.u32();
        if (id >= corpus.size()) throw IoError(path + ": neighbor id out of range");
      }
    }
  }
  return std::make_unique<GraphIndex>(corpus, params, seed, metric, std::move(links), entry,
                                      top_level);
}

}  // namespace annplan
