// annplan command-line surface: dataset/workload generation, artifact
// builds, single-query execution, and the latency-recall benchmark harness.
//
// Exit codes: 0 ok, 1 usage, 2 data error, 3 missing artifact.

#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "annplan/annplan.hpp"

namespace {

using namespace annplan;

struct GlobalOpts {
  uint64_t seed = 0;
  std::string config_path;
  int threads = 1;
};

struct CliConfig {
  TrainConfig train;
  GBMConfig gbm;
  GraphIndexParams graph;
  PlannerHyperGrid grid;
  std::size_t alpha0 = 10;
  int timing_repeats = 3;
  int folds = 3;
  bool include_k = true;
  bool warmup = true;
  bool recall_fixed_k = false;
  Metric metric = Metric::L2Squared;
};

CliConfig load_config(const std::string& path) {
  CliConfig cfg;
  if (path.empty()) return cfg;
  std::ifstream f(path);
  if (!f) throw IoError("cannot open config '" + path + "'");
  nlohmann::json j = nlohmann::json::parse(f, nullptr, false);
  if (j.is_discarded()) throw ConfigError(path + ": malformed config JSON");

  cfg.train.max_epochs = j.value("max_epochs", cfg.train.max_epochs);
  cfg.train.batch_size = j.value("batch_size", cfg.train.batch_size);
  cfg.train.adam_lr = j.value("adam_lr", cfg.train.adam_lr);
  cfg.train.patience = j.value("patience", cfg.train.patience);
  cfg.train.val_fraction = j.value("val_fraction", cfg.train.val_fraction);
  cfg.train.l2_lambda = j.value("l2_lambda", cfg.train.l2_lambda);

  if (j.contains("gbm")) {
    const auto& g = j["gbm"];
    cfg.gbm.n_estimators = g.value("n_estimators", cfg.gbm.n_estimators);
    cfg.gbm.max_depth = g.value("max_depth", cfg.gbm.max_depth);
    cfg.gbm.learning_rate = g.value("learning_rate", cfg.gbm.learning_rate);
    cfg.gbm.min_samples_leaf = g.value("min_samples_leaf", cfg.gbm.min_samples_leaf);
  }
  if (j.contains("graph")) {
    const auto& g = j["graph"];
    cfg.graph.max_degree = g.value("max_degree", cfg.graph.max_degree);
    cfg.graph.build_beam = g.value("build_beam", cfg.graph.build_beam);
    cfg.graph.min_search_beam = g.value("min_search_beam", cfg.graph.min_search_beam);
  }
  if (j.contains("l2_grid")) cfg.grid.l2_lambda = j["l2_grid"].get<std::vector<double>>();
  if (j.contains("patience_grid")) cfg.grid.patience = j["patience_grid"].get<std::vector<int>>();

  cfg.alpha0 = j.value("alpha0", cfg.alpha0);
  cfg.timing_repeats = j.value("timing_repeats", cfg.timing_repeats);
  cfg.folds = j.value("folds", cfg.folds);
  cfg.include_k = j.value("include_k", cfg.include_k);
  cfg.warmup = j.value("warmup", cfg.warmup);
  cfg.recall_fixed_k = j.value("recall_fixed_k", cfg.recall_fixed_k);
  std::string metric = j.value("metric", "l2sq");
  if (metric == "ip") {
    cfg.metric = Metric::InnerProduct;
  } else if (metric != "l2sq") {
    throw ConfigError("config: metric must be 'l2sq' or 'ip'");
  }
  return cfg;
}

struct DataPaths {
  std::string vectors, metadata, schema;
  explicit DataPaths(const std::string& prefix)
      : vectors(prefix + ".fvecs"),
        metadata(prefix + ".meta.jsonl"),
        schema(prefix + ".schema.json") {}
};

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  return out;
}

double parse_double(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("cannot parse " + what + " from '" + s + "'");
  }
}

LabelAttributeSpec parse_label_spec(const std::string& s) {
  auto parts = split(s, ':');
  if (parts.size() < 2 || parts.size() > 3)
    throw ConfigError("--labels expects name:count[:zipf], got '" + s + "'");
  LabelAttributeSpec spec;
  spec.name = parts[0];
  spec.num_labels = static_cast<std::size_t>(parse_double(parts[1], "label count"));
  if (parts.size() == 3) spec.zipf_s = parse_double(parts[2], "zipf exponent");
  return spec;
}

NumericAttributeSpec parse_numeric_spec(const std::string& s) {
  auto parts = split(s, ':');
  if (parts.size() < 3 || parts.size() > 4)
    throw ConfigError("--numeric expects name:min:max[:dist], got '" + s + "'");
  NumericAttributeSpec spec;
  spec.name = parts[0];
  spec.min = parse_double(parts[1], "numeric min");
  spec.max = parse_double(parts[2], "numeric max");
  if (parts.size() == 4) {
    if (parts[3] == "gaussian") {
      spec.dist = NumericAttributeSpec::Dist::Gaussian;
      spec.mean = (spec.min + spec.max) / 2.0;
      spec.stddev = (spec.max - spec.min) / 6.0;
    } else if (parts[3] != "uniform") {
      throw ConfigError("--numeric dist must be uniform or gaussian");
    }
  }
  return spec;
}

LabelLabelCorrelation parse_label_corr(const std::string& s) {
  auto parts = split(s, ':');
  if (parts.size() != 5)
    throw ConfigError("--correlate-labels expects attrA:i:attrB:j:factor, got '" + s + "'");
  LabelLabelCorrelation c;
  c.attr_a = parts[0];
  c.label_a = static_cast<std::size_t>(parse_double(parts[1], "label index"));
  c.attr_b = parts[2];
  c.label_b = static_cast<std::size_t>(parse_double(parts[3], "label index"));
  c.factor = parse_double(parts[4], "correlation factor");
  return c;
}

LabelRangeCorrelation parse_range_corr(const std::string& s) {
  auto parts = split(s, ':');
  if (parts.size() != 6)
    throw ConfigError("--correlate-range expects attr:i:numattr:lo:hi:prob, got '" + s + "'");
  LabelRangeCorrelation c;
  c.attr = parts[0];
  c.label = static_cast<std::size_t>(parse_double(parts[1], "label index"));
  c.numeric_attr = parts[2];
  c.lo = parse_double(parts[3], "range low");
  c.hi = parse_double(parts[4], "range high");
  c.prob = parse_double(parts[5], "range probability");
  return c;
}

PredicateMixWeights parse_mix(const std::string& s) {
  PredicateMixWeights mix{0, 0, 0, 0, 0};
  for (const std::string& part : split(s, ',')) {
    auto kv = split(part, '=');
    if (kv.size() != 2) throw ConfigError("--mix expects kind=weight pairs, got '" + part + "'");
    double w = parse_double(kv[1], "mix weight");
    if (kv[0] == "label") mix.label = w;
    else if (kv[0] == "multi-label") mix.multi_label = w;
    else if (kv[0] == "range") mix.range = w;
    else if (kv[0] == "multi-range") mix.multi_range = w;
    else if (kv[0] == "mixed") mix.mixed = w;
    else throw ConfigError("--mix: unknown predicate kind '" + kv[0] + "'");
  }
  return mix;
}

VectorCorpus load_data(const std::string& prefix) {
  DataPaths paths(prefix);
  return load_corpus(paths.vectors, paths.metadata, paths.schema);
}

DatasetStats load_stats_checked(const std::string& path, const VectorCorpus& corpus) {
  DatasetStats stats = load_stats(path);
  if (stats.n != corpus.size() || stats.d != corpus.dim())
    std::cerr << "[annplan] warning: stats file " << path << " was built over " << stats.n
              << "x" << stats.d << ", corpus is " << corpus.size() << "x" << corpus.dim()
              << "\n";
  return stats;
}

int run_cli(int argc, char** argv) {
  CLI::App app{"annplan: filtered ANN search with a learned pre/post-filtering planner"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOpts global;
  app.add_option("--seed", global.seed, "seed for every random choice")->capture_default_str();
  app.add_option("--config", global.config_path, "JSON config file (training/engine knobs)");
  app.add_option("--threads", global.threads, "threads for oracle computation (never timed parts)")
      ->capture_default_str();

  // ---- gen-data ----
  auto* gen_data = app.add_subcommand("gen-data", "generate a synthetic corpus");
  std::string gd_out;
  CorpusSpec gd_spec;
  std::vector<std::string> gd_labels, gd_numeric, gd_lcorr, gd_rcorr;
  std::string gd_vectors = "normal";
  gen_data->add_option("--out", gd_out, "output path prefix")->required();
  gen_data->add_option("--n", gd_spec.n, "rows")->required();
  gen_data->add_option("--d", gd_spec.d, "vector dimension")->required();
  gen_data->add_option("--vector-dist", gd_vectors, "normal|uniform|clustered");
  gen_data->add_option("--clusters", gd_spec.n_clusters, "cluster count (clustered mode)")
      ->capture_default_str();
  gen_data->add_option("--cluster-stddev", gd_spec.cluster_stddev,
                       "within-cluster spread (clustered mode)")
      ->capture_default_str();
  gen_data->add_option("--labels", gd_labels, "categorical attribute name:count[:zipf]");
  gen_data->add_option("--numeric", gd_numeric, "numeric attribute name:min:max[:dist]");
  gen_data->add_option("--correlate-labels", gd_lcorr, "attrA:i:attrB:j:factor");
  gen_data->add_option("--correlate-range", gd_rcorr, "attr:i:numattr:lo:hi:prob");

  // ---- build-stats ----
  auto* build_stats_cmd = app.add_subcommand("build-stats", "precompute dataset statistics");
  std::string bs_data, bs_out;
  double bs_sample_rate = 0.02;
  uint32_t bs_bins = DatasetStats::kDefaultBins;
  build_stats_cmd->add_option("--data", bs_data, "dataset prefix")->required();
  build_stats_cmd->add_option("--out", bs_out, "stats output file")->required();
  build_stats_cmd->add_option("--sample-rate", bs_sample_rate, "row sample fraction")
      ->capture_default_str();
  build_stats_cmd->add_option("--bins", bs_bins, "histogram bins")->capture_default_str();

  // ---- build-index ----
  auto* build_index_cmd = app.add_subcommand("build-index", "build the global ANN index");
  std::string bi_data, bi_out, bi_backend = "graph";
  std::optional<int> bi_degree, bi_beam, bi_search_beam;
  build_index_cmd->add_option("--data", bi_data, "dataset prefix")->required();
  build_index_cmd->add_option("--out", bi_out, "index output file")->required();
  build_index_cmd->add_option("--backend", bi_backend, "graph|brute")->capture_default_str();
  build_index_cmd->add_option("--max-degree", bi_degree, "graph max degree");
  build_index_cmd->add_option("--build-beam", bi_beam, "graph construction beam");
  build_index_cmd->add_option("--min-search-beam", bi_search_beam, "query beam floor");

  // ---- gen-workload ----
  auto* gen_wl = app.add_subcommand("gen-workload", "generate controlled-selectivity queries");
  std::string gw_data, gw_stats, gw_out, gw_mix, gw_targets, gw_range = "0.01:0.25";
  std::size_t gw_n = 100, gw_k = 10, gw_min_labels = 3, gw_max_labels = 5;
  double gw_tolerance = 0.20;
  gen_wl->add_option("--data", gw_data, "dataset prefix")->required();
  gen_wl->add_option("--stats", gw_stats, "stats file")->required();
  gen_wl->add_option("--out", gw_out, "workload output JSON")->required();
  gen_wl->add_option("--n-queries", gw_n, "query count")->capture_default_str();
  gen_wl->add_option("--k", gw_k, "neighbors per query")->capture_default_str();
  gen_wl->add_option("--range", gw_range, "selectivity range lo:hi")->capture_default_str();
  gen_wl->add_option("--targets", gw_targets, "explicit selectivity targets, comma-separated");
  gen_wl->add_option("--mix", gw_mix, "kind=weight list (label,multi-label,range,multi-range,mixed)");
  gen_wl->add_option("--tolerance", gw_tolerance, "relative selectivity tolerance")
      ->capture_default_str();
  gen_wl->add_option("--min-labels", gw_min_labels, "multi-label minimum")->capture_default_str();
  gen_wl->add_option("--max-labels", gw_max_labels, "multi-label maximum")->capture_default_str();

  // ---- train-estimator ----
  auto* train_est = app.add_subcommand("train-estimator",
                                       "fit the GBM selectivity estimator on a workload");
  std::string te_data, te_stats, te_workload, te_out;
  train_est->add_option("--data", te_data, "dataset prefix")->required();
  train_est->add_option("--stats", te_stats, "stats file")->required();
  train_est->add_option("--workload", te_workload, "workload JSON with >=3-label/mixed entries")
      ->required();
  train_est->add_option("--out", te_out, "estimator output file")->required();

  // ---- train-planner ----
  auto* train_pl = app.add_subcommand("train-planner", "train the pre/post strategy classifier");
  std::string tp_data, tp_stats, tp_index, tp_estimator, tp_out, tp_mix, tp_range = "0.01:0.25";
  std::size_t tp_n = 300, tp_k = 10;
  bool tp_no_k = false;
  train_pl->add_option("--data", tp_data, "dataset prefix")->required();
  train_pl->add_option("--stats", tp_stats, "stats file")->required();
  train_pl->add_option("--index", tp_index, "global index file")->required();
  train_pl->add_option("--estimator", tp_estimator, "optional selectivity estimator file");
  train_pl->add_option("--out", tp_out, "planner output file")->required();
  train_pl->add_option("--n-queries", tp_n, "training queries")->capture_default_str();
  train_pl->add_option("--k", tp_k, "neighbors per query")->capture_default_str();
  train_pl->add_option("--range", tp_range, "selectivity range lo:hi")->capture_default_str();
  train_pl->add_option("--mix", tp_mix, "predicate mix for training queries");
  train_pl->add_flag("--no-k-feature", tp_no_k, "drop k from the planner features (4-feature variant)");

  // ---- run ----
  auto* run_cmd = app.add_subcommand("run", "execute one filtered query");
  std::string r_data, r_stats, r_index, r_planner, r_estimator, r_predicate, r_qvec,
      r_strategy = "auto";
  std::size_t r_k = 10;
  std::optional<std::size_t> r_qrow;
  run_cmd->add_option("--data", r_data, "dataset prefix")->required();
  run_cmd->add_option("--stats", r_stats, "stats file");
  run_cmd->add_option("--index", r_index, "global index file");
  run_cmd->add_option("--planner", r_planner, "planner model file");
  run_cmd->add_option("--estimator", r_estimator, "selectivity estimator file");
  run_cmd->add_option("--predicate", r_predicate, "predicate text, e.g. 'color = \"green\"'");
  run_cmd->add_option("--k", r_k, "neighbors")->capture_default_str();
  run_cmd->add_option("--qrow", r_qrow, "query = corpus row index");
  run_cmd->add_option("--qvec", r_qvec, "query vector, comma-separated floats");
  run_cmd->add_option("--strategy", r_strategy, "auto|pre|post")->capture_default_str();

  // ---- bench ----
  auto* bench_cmd = app.add_subcommand("bench", "latency-recall benchmark over a workload");
  std::string b_data, b_stats, b_index, b_planner, b_estimator, b_workload, b_report, b_curves,
      b_methods = "pre,post";
  bool b_no_warmup = false;
  bench_cmd->add_option("--data", b_data, "dataset prefix")->required();
  bench_cmd->add_option("--workload", b_workload, "workload JSON")->required();
  bench_cmd->add_option("--methods", b_methods, "subset of pre,post,planned")
      ->capture_default_str();
  bench_cmd->add_option("--stats", b_stats, "stats file");
  bench_cmd->add_option("--index", b_index, "global index file");
  bench_cmd->add_option("--planner", b_planner, "planner model file");
  bench_cmd->add_option("--estimator", b_estimator, "selectivity estimator file");
  bench_cmd->add_option("--report", b_report, "report output (line-delimited JSON)");
  bench_cmd->add_option("--curves", b_curves, "latency-recall curve file prefix");
  bench_cmd->add_flag("--no-warmup", b_no_warmup, "skip the untimed warm-up pass");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? 0 : 1;
  }

  CliConfig cfg = load_config(global.config_path);

  if (gen_data->parsed()) {
    if (gd_vectors == "uniform") gd_spec.vectors = VectorDist::Uniform;
    else if (gd_vectors == "clustered") gd_spec.vectors = VectorDist::Clustered;
    else if (gd_vectors != "normal")
      throw ConfigError("--vector-dist must be normal, uniform, or clustered");
    for (const auto& s : gd_labels) gd_spec.label_attrs.push_back(parse_label_spec(s));
    for (const auto& s : gd_numeric) gd_spec.numeric_attrs.push_back(parse_numeric_spec(s));
    for (const auto& s : gd_lcorr) gd_spec.label_correlations.push_back(parse_label_corr(s));
    for (const auto& s : gd_rcorr) gd_spec.range_correlations.push_back(parse_range_corr(s));
    VectorCorpus corpus = gen_synthetic_corpus(gd_spec, global.seed);
    DataPaths paths(gd_out);
    save_corpus(corpus, paths.vectors, paths.metadata, paths.schema);
    std::cout << "wrote " << corpus.size() << "x" << corpus.dim() << " corpus to " << gd_out
              << ".{fvecs,meta.jsonl,schema.json} (fingerprint "
              << corpus_fingerprint(corpus) << ")\n";
    return 0;
  }

  if (build_stats_cmd->parsed()) {
    VectorCorpus corpus = load_data(bs_data);
    DatasetStats stats =
        build_stats(corpus, {.sample_rate = bs_sample_rate, .seed = global.seed, .bins = bs_bins});
    save_stats(stats, bs_out);
    std::cout << "stats: n=" << stats.n << " d=" << stats.d << " labels=" << stats.num_labels()
              << " bins=" << stats.bins << " distribution_measure=" << stats.distribution_measure
              << " -> " << bs_out << "\n";
    return 0;
  }

  if (build_index_cmd->parsed()) {
    VectorCorpus corpus = load_data(bi_data);
    GraphIndexParams params = cfg.graph;
    if (bi_degree) params.max_degree = *bi_degree;
    if (bi_beam) params.build_beam = *bi_beam;
    if (bi_search_beam) params.min_search_beam = *bi_search_beam;
    std::unique_ptr<AnnIndex> index;
    if (bi_backend == "graph") {
      index = build_graph_index(corpus, params, global.seed, cfg.metric);
    } else if (bi_backend == "brute") {
      index = brute_force_index(corpus, cfg.metric);
    } else {
      throw ConfigError("--backend must be graph or brute");
    }
    save_index(*index, bi_out);
    std::cout << bi_backend << " index over " << corpus.size() << " rows -> " << bi_out << "\n";
    return 0;
  }

  if (gen_wl->parsed()) {
    VectorCorpus corpus = load_data(gw_data);
    DatasetStats stats = load_stats_checked(gw_stats, corpus);
    WorkloadSpec spec;
    spec.n_queries = gw_n;
    spec.k = gw_k;
    spec.rel_tolerance = gw_tolerance;
    spec.min_labels = gw_min_labels;
    spec.max_labels = gw_max_labels;
    auto range_parts = split(gw_range, ':');
    if (range_parts.size() != 2) throw ConfigError("--range expects lo:hi");
    spec.target_lo = parse_double(range_parts[0], "range low");
    spec.target_hi = parse_double(range_parts[1], "range high");
    if (!gw_targets.empty())
      for (const auto& t : split(gw_targets, ','))
        spec.explicit_targets.push_back(parse_double(t, "target"));
    if (!gw_mix.empty()) spec.mix = parse_mix(gw_mix);
    Workload w = gen_workload(corpus, stats, spec, global.seed);
    save_workload(w, gw_out);
    std::size_t flagged = 0;
    for (uint8_t f : w.flagged) flagged += f;
    std::cout << "workload: " << w.size() << " queries (k=" << w.k << ", " << flagged
              << " flagged) -> " << gw_out << "\n";
    return 0;
  }

  if (train_est->parsed()) {
    VectorCorpus corpus = load_data(te_data);
    DatasetStats stats = load_stats_checked(te_stats, corpus);
    Workload w = load_workload(te_workload, corpus.schema());
    std::vector<Predicate> learned;
    for (const auto& q : w.queries)
      if (route_predicate(q.predicate) == EstimatePath::Learned) learned.push_back(q.predicate);
    if (learned.size() != w.size())
      std::cerr << "[annplan] warning: using " << learned.size() << " of " << w.size()
                << " workload predicates (the rest take exact or histogram paths)\n";
    if (learned.empty())
      throw DataError("train-estimator: workload has no >=3-label or mixed predicates");
    GBMRegressor model = train_estimator(corpus, stats, learned, global.seed, cfg.gbm);
    save_gbm(model, te_out);

    double mse = 0.0;
    for (const Predicate& p : learned) {
      double err = estimate_selectivity(stats, &model, p) - exact_selectivity(corpus, p);
      mse += err * err;
    }
    std::cout << "estimator: " << model.trees().size() << " trees over " << learned.size()
              << " predicates, training rmse "
              << std::sqrt(mse / static_cast<double>(learned.size())) << " -> " << te_out << "\n";
    return 0;
  }

  if (train_pl->parsed()) {
    VectorCorpus corpus = load_data(tp_data);
    DatasetStats stats = load_stats_checked(tp_stats, corpus);
    std::unique_ptr<AnnIndex> index = load_index(tp_index, corpus);
    std::optional<GBMRegressor> estimator;
    if (!tp_estimator.empty()) estimator = load_gbm(tp_estimator);

    PlannerTrainOptions opt;
    opt.n_queries = tp_n;
    opt.k = tp_k;
    opt.timing_repeats = cfg.timing_repeats;
    opt.include_k = !tp_no_k;
    auto range_parts = split(tp_range, ':');
    if (range_parts.size() != 2) throw ConfigError("--range expects lo:hi");
    opt.selectivity_lo = parse_double(range_parts[0], "range low");
    opt.selectivity_hi = parse_double(range_parts[1], "range high");
    if (!tp_mix.empty()) opt.mix = parse_mix(tp_mix);

    auto rows = generate_training_set(corpus, stats, *index,
                                      estimator ? &*estimator : nullptr, opt, global.seed);
    std::size_t n_pre = 0;
    for (const auto& r : rows) n_pre += r.utility.label == Strategy::Pre;
    PlannerModel model = train_planner(rows, cfg.train, cfg.grid, cfg.folds, global.seed,
                                       opt.include_k, stats_fingerprint(stats));
    save_planner(model, tp_out);
    std::cout << "planner: " << rows.size() << " training rows (" << n_pre << " pre / "
              << rows.size() - n_pre << " post), cv auc " << model.best_cv_auc << ", l2 "
              << model.chosen_config.l2_lambda << ", patience " << model.chosen_config.patience
              << " -> " << tp_out << "\n";
    return 0;
  }

  if (run_cmd->parsed()) {
    VectorCorpus corpus = load_data(r_data);
    Predicate predicate = parse_predicate(corpus.schema(), r_predicate);

    FilteredQuery query;
    query.predicate = predicate;
    query.k = r_k;
    if (r_qrow) {
      if (*r_qrow >= corpus.size()) throw InputError("--qrow out of range");
      auto row = corpus.row(*r_qrow);
      query.vector.assign(row.begin(), row.end());
    } else if (!r_qvec.empty()) {
      for (const auto& v : split(r_qvec, ','))
        query.vector.push_back(static_cast<float>(parse_double(v, "query component")));
    } else {
      throw ConfigError("run: provide --qrow or --qvec");
    }

    std::optional<DatasetStats> stats;
    if (!r_stats.empty()) stats = load_stats_checked(r_stats, corpus);
    std::unique_ptr<AnnIndex> index;
    if (!r_index.empty()) index = load_index(r_index, corpus);
    std::optional<GBMRegressor> estimator;
    if (!r_estimator.empty()) estimator = load_gbm(r_estimator);

    ExecutionReport report;
    if (r_strategy == "pre") {
      report = prefilter_search(corpus, query, cfg.metric);
    } else if (r_strategy == "post") {
      if (!index) throw MissingArtifactError("run --strategy post needs --index");
      report = postfilter_search(*index, corpus, query, cfg.alpha0);
    } else if (r_strategy == "auto") {
      if (!index) throw MissingArtifactError("run --strategy auto needs --index");
      if (!stats) throw MissingArtifactError("run --strategy auto needs --stats");
      if (r_planner.empty()) throw MissingArtifactError("run --strategy auto needs --planner");
      PlannerModel planner = load_planner(r_planner);
      if (planner.stats_fingerprint != stats_fingerprint(*stats))
        std::cerr << "[annplan] warning: planner was trained against different stats\n";
      report = plan_and_execute(planner, *stats, estimator ? &*estimator : nullptr, *index,
                                corpus, query);
    } else {
      throw ConfigError("--strategy must be auto, pre, or post");
    }

    nlohmann::json out;
    out["strategy"] = strategy_name(report.strategy);
    out["elapsed_seconds"] = report.elapsed_seconds;
    out["planning_seconds"] = report.planning_seconds;
    out["candidates_scanned"] = report.candidates_scanned;
    if (report.strategy == Strategy::Post) {
      out["alpha_final"] = report.alpha_final;
      out["fallback"] = report.fallback;
    }
    out["ids"] = report.results.ids;
    out["distances"] = report.results.distances;
    std::cout << out.dump(2) << "\n";
    return 0;
  }

  if (bench_cmd->parsed()) {
    VectorCorpus corpus = load_data(b_data);
    Workload workload = load_workload(b_workload, corpus.schema());

    std::optional<DatasetStats> stats;
    if (!b_stats.empty()) stats = load_stats_checked(b_stats, corpus);
    std::unique_ptr<AnnIndex> index;
    if (!b_index.empty()) index = load_index(b_index, corpus);
    std::optional<PlannerModel> planner;
    if (!b_planner.empty()) {
      planner = load_planner(b_planner);
      if (stats && planner->stats_fingerprint != stats_fingerprint(*stats))
        std::cerr << "[annplan] warning: planner was trained against different stats\n";
    }
    std::optional<GBMRegressor> estimator;
    if (!b_estimator.empty()) estimator = load_gbm(b_estimator);

    BenchArtifacts art;
    art.stats = stats ? &*stats : nullptr;
    art.index = index.get();
    art.planner = planner ? &*planner : nullptr;
    art.sel_model = estimator ? &*estimator : nullptr;

    BenchConfig bench_cfg;
    bench_cfg.warmup = cfg.warmup && !b_no_warmup;
    bench_cfg.alpha0 = cfg.alpha0;
    bench_cfg.threads = global.threads;
    bench_cfg.recall_fixed_k = cfg.recall_fixed_k;

    BenchReport report =
        run_bench(corpus, workload, split(b_methods, ','), art, bench_cfg);
    report.metadata["seed"] = global.seed;
    report.metadata["dataset_fingerprint"] = corpus_fingerprint(corpus);
    report.metadata["workload_file"] = b_workload;
    report.metadata["alpha0"] = bench_cfg.alpha0;
    report.metadata["warmup"] = bench_cfg.warmup;

    for (const MethodResult& m : report.methods)
      std::cout << m.method << ": mean recall " << m.mean_recall << ", mean seconds "
                << m.mean_seconds << ", mean utility " << m.mean_utility << " over "
                << m.records.size() << " queries\n";
    if (!b_report.empty()) {
      save_bench_report(report, b_report);
      std::cout << "report -> " << b_report << "\n";
    }
    if (!b_curves.empty()) {
      save_latency_recall_curves(report, b_curves);
      std::cout << "curves -> " << b_curves << ".<method>.curve\n";
    }
    return 0;
  }

  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run_cli(argc, argv);
  } catch (const annplan::MissingArtifactError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const annplan::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
