#include "nicdiag/pipeline.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace nicdiag {

namespace fs = std::filesystem;

Window load_sample_window(const Corpus& corpus, const CorpusSampleRef& ref) {
  const MetricStore metrics = load_metrics(ref.metrics_path, corpus.topology);
  const std::vector<LogRecord> logs = load_logs(ref.logs_path);
  return slice_windows(metrics, logs, corpus.pairs, ref.window_start,
                       ref.window_length);
}

std::map<int, NicPairFeatureVector> featurize_sample(
    const TrainedBundle& bundle, const Window& window,
    const std::string& window_id) {
  return featurize_window(window, bundle.schema,
                          bundle.pattern ? &*bundle.pattern : nullptr,
                          bundle.logs ? &*bundle.logs : nullptr, window_id);
}

TrainedBundle train_bundle(const Corpus& corpus, const TrainOptions& options) {
  if (corpus.samples.empty()) {
    throw TrainingError("corpus has no samples");
  }
  const bool has_normals =
      std::any_of(corpus.samples.begin(), corpus.samples.end(),
                  [](const CorpusSampleRef& s) { return s.failure_type < 0; });
  if (!has_normals) {
    throw TrainingError(
        "corpus has no failure-free samples; the normal sample library "
        "cannot be built");
  }

  TrainedBundle bundle;
  bundle.options = options;

  // Load every sample's window once; the corpus fits in memory at the
  // scales this tool targets.
  std::vector<Window> windows;
  windows.reserve(corpus.samples.size());
  for (const CorpusSampleRef& ref : corpus.samples) {
    windows.push_back(load_sample_window(corpus, ref));
  }

  FeatureFlags flags = options.flags;

  // Log features: mine templates over the whole training corpus, cluster
  // them, then fit per-cluster normal counts on failure-free windows.
  std::size_t total_log_lines = 0;
  for (const Window& w : windows) {
    for (const auto& [pair_id, ps] : w.pairs) total_log_lines += ps.logs.size();
  }
  if (flags.logs && total_log_lines == 0) {
    flags.logs = false;
    bundle.summary.logs_disabled_missing_data = true;
  }

  if (flags.logs) {
    DrainParser parser(options.drain);
    for (std::size_t i = 0; i < corpus.samples.size(); ++i) {
      for (const auto& [pair_id, ps] : windows[i].pairs) {
        for (const LogRecord& r : ps.logs) parser.add(r.message);
      }
    }
    const auto vectors = vectorize_templates(parser.templates());
    LogClusterModel clusters =
        cluster_templates(vectors, options.agnes_distance_threshold);

    LogFeatureModel log_model{std::move(parser), std::move(clusters)};
    std::vector<std::vector<double>> normal_counts;
    for (std::size_t i = 0; i < corpus.samples.size(); ++i) {
      if (corpus.samples[i].failure_type >= 0) continue;
      for (const auto& [pair_id, ps] : windows[i].pairs) {
        normal_counts.push_back(log_model.count_clusters(ps.logs));
      }
    }
    fit_normal_counts(log_model.clusters, normal_counts);
    bundle.summary.template_count = log_model.parser.templates().size();
    bundle.summary.cluster_count = log_model.clusters.cluster_count();
    bundle.logs = std::move(log_model);
  }

  // Pattern model: trained on generated labeled shapes, not on the corpus;
  // operators' labeled history is replaced by the closed-form generator.
  if (flags.metrics && flags.patterns) {
    const auto shapes =
        generate_shape_corpus(options.shape_samples_per_class, options.seed);
    std::vector<std::pair<std::vector<double>, PatternClass>> labeled;
    labeled.reserve(shapes.size());
    for (const ShapeSample& s : shapes) labeled.push_back({s.values, s.label});
    bundle.pattern = PatternModel::train(labeled, options.seed);
    bundle.summary.pattern_holdout_accuracy =
        bundle.pattern->meta().holdout_accuracy;
  }

  // Schema: metric lists observed in the corpus plus one slot per cluster.
  std::set<std::string> compute_metrics, switch_metrics;
  for (const Window& w : windows) {
    for (const auto& [pair_id, ps] : w.pairs) {
      for (const auto& [m, s] : ps.compute) compute_metrics.insert(m);
      for (const auto& [m, s] : ps.switch_side) switch_metrics.insert(m);
    }
  }
  bundle.schema = FeatureSchema::build(
      {compute_metrics.begin(), compute_metrics.end()},
      {switch_metrics.begin(), switch_metrics.end()},
      bundle.logs ? static_cast<int>(bundle.logs->clusters.cluster_count()) : 0,
      flags);
  bundle.summary.feature_dimension = bundle.schema.dimension();
  if (bundle.schema.dimension() == 0) {
    throw TrainingError("feature schema is empty; nothing to train on");
  }

  // Feature vectors for every (sample, pair); failure-free ones become the
  // normal library.
  std::vector<std::map<int, NicPairFeatureVector>> features;
  features.reserve(windows.size());
  for (std::size_t i = 0; i < windows.size(); ++i) {
    features.push_back(
        featurize_sample(bundle, windows[i], corpus.samples[i].id));
  }
  for (std::size_t i = 0; i < windows.size(); ++i) {
    if (corpus.samples[i].failure_type >= 0) continue;
    for (const auto& [pair_id, v] : features[i]) bundle.library.append(v);
  }
  bundle.summary.library_size = bundle.library.samples.size();

  // State classifier over compressed 0-1 vectors.
  std::vector<std::vector<std::uint8_t>> x;
  std::vector<StateLabel> y;
  for (std::size_t i = 0; i < windows.size(); ++i) {
    for (const auto& [pair_id, v] : features[i]) {
      auto label_it = corpus.samples[i].labels.find(pair_id);
      if (label_it == corpus.samples[i].labels.end()) continue;
      x.push_back(compress(v, bundle.library).bits);
      y.push_back(label_it->second);
    }
  }
  bundle.summary.training_rows = x.size();
  bundle.forest = ForestModel::train(x, y, options.seed);
  bundle.summary.forest_oob_accuracy = bundle.forest.oob_accuracy();
  return bundle;
}

Diagnosis diagnose(const TrainedBundle& bundle, const Topology& topology,
                   const MetricStore& metrics, const std::vector<LogRecord>& logs,
                   std::int64_t window_start, std::int64_t window_length,
                   const WalkConfig& walk) {
  const std::vector<NicPair> pairs = derive_nic_pairs(topology);
  if (pairs.empty()) throw ConfigError("topology has no NIC pairs");
  const Window window =
      slice_windows(metrics, logs, pairs, window_start, window_length);
  const auto features = featurize_sample(bundle, window, "online");

  std::vector<AnomalyVector> anomalies;
  anomalies.reserve(features.size());
  for (const auto& [pair_id, v] : features) {
    anomalies.push_back(compress(v, bundle.library));
  }

  Diagnosis d;
  d.states = predict_states(bundle.forest, anomalies);
  for (const auto& [pair_id, v] : features) d.pair_order.push_back(pair_id);
  std::sort(d.pair_order.begin(), d.pair_order.end());

  d.max_culprit_mass = 0.0;
  for (const auto& row : d.states.rows) {
    d.max_culprit_mass = std::max(d.max_culprit_mass, culprit_mass(row));
  }
  d.low_confidence = d.max_culprit_mass < kLowConfidenceThreshold;
  d.result = random_walk(d.states, walk);
  return d;
}

void save_bundle(const TrainedBundle& bundle, const std::string& dir) {
  fs::create_directories(dir);
  bundle.schema.save((fs::path(dir) / "schema.txt").string());
  if (bundle.pattern) {
    bundle.pattern->save((fs::path(dir) / "pattern_model.txt").string());
  }
  if (bundle.logs) {
    bundle.logs->save((fs::path(dir) / "log_model.txt").string());
  }
  bundle.library.save((fs::path(dir) / "library.txt").string());
  bundle.forest.save((fs::path(dir) / "forest.txt").string());

  nlohmann::json meta;
  meta["format"] = "nicdiag-bundle";
  meta["version"] = 1;
  meta["seed"] = bundle.options.seed;
  meta["flags"] = {{"patterns", bundle.options.flags.patterns},
                   {"levels", bundle.options.flags.levels},
                   {"metrics", bundle.options.flags.metrics},
                   {"logs", bundle.options.flags.logs}};
  meta["drain"] = {{"depth", bundle.options.drain.depth},
                   {"sim_threshold", bundle.options.drain.sim_threshold}};
  meta["agnes_distance_threshold"] = bundle.options.agnes_distance_threshold;
  meta["shape_samples_per_class"] = bundle.options.shape_samples_per_class;
  meta["summary"] = {
      {"pattern_holdout_accuracy", bundle.summary.pattern_holdout_accuracy},
      {"forest_oob_accuracy", bundle.summary.forest_oob_accuracy},
      {"feature_dimension", bundle.summary.feature_dimension},
      {"library_size", bundle.summary.library_size},
      {"template_count", bundle.summary.template_count},
      {"cluster_count", bundle.summary.cluster_count},
      {"training_rows", bundle.summary.training_rows},
      {"logs_disabled_missing_data", bundle.summary.logs_disabled_missing_data}};
  std::ofstream out(fs::path(dir) / "bundle.json");
  if (!out) throw ParseError("cannot write bundle metadata");
  out << meta.dump(2) << "\n";
}

TrainedBundle load_bundle(const std::string& dir) {
  std::ifstream in(fs::path(dir) / "bundle.json");
  if (!in) throw ParseError("cannot open bundle metadata in " + dir);
  nlohmann::json meta;
  try {
    in >> meta;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bundle.json: ") + e.what());
  }
  if (meta.value("format", "") != "nicdiag-bundle") {
    throw ParseError("not a bundle directory: " + dir);
  }

  TrainedBundle bundle;
  bundle.options.seed = meta["seed"].get<std::uint64_t>();
  bundle.options.flags.patterns = meta["flags"]["patterns"].get<bool>();
  bundle.options.flags.levels = meta["flags"]["levels"].get<bool>();
  bundle.options.flags.metrics = meta["flags"]["metrics"].get<bool>();
  bundle.options.flags.logs = meta["flags"]["logs"].get<bool>();
  bundle.options.drain.depth = meta["drain"]["depth"].get<int>();
  bundle.options.drain.sim_threshold =
      meta["drain"]["sim_threshold"].get<double>();
  bundle.options.agnes_distance_threshold =
      meta["agnes_distance_threshold"].get<double>();
  bundle.options.shape_samples_per_class =
      meta["shape_samples_per_class"].get<int>();
  const auto& s = meta["summary"];
  bundle.summary.pattern_holdout_accuracy =
      s["pattern_holdout_accuracy"].get<double>();
  bundle.summary.forest_oob_accuracy = s["forest_oob_accuracy"].get<double>();
  bundle.summary.feature_dimension = s["feature_dimension"].get<std::size_t>();
  bundle.summary.library_size = s["library_size"].get<std::size_t>();
  bundle.summary.template_count = s["template_count"].get<std::size_t>();
  bundle.summary.cluster_count = s["cluster_count"].get<std::size_t>();
  bundle.summary.training_rows = s["training_rows"].get<std::size_t>();
  bundle.summary.logs_disabled_missing_data =
      s["logs_disabled_missing_data"].get<bool>();

  bundle.schema = FeatureSchema::load_file((fs::path(dir) / "schema.txt").string());
  if (fs::exists(fs::path(dir) / "pattern_model.txt")) {
    bundle.pattern =
        PatternModel::load_file((fs::path(dir) / "pattern_model.txt").string());
  }
  if (fs::exists(fs::path(dir) / "log_model.txt")) {
    bundle.logs =
        LogFeatureModel::load_file((fs::path(dir) / "log_model.txt").string());
  }
  bundle.library =
      NormalSampleLibrary::load_file((fs::path(dir) / "library.txt").string());
  bundle.forest = ForestModel::load_file((fs::path(dir) / "forest.txt").string());
  return bundle;
}

void write_diagnosis_csv(const Diagnosis& diagnosis,
                         const std::vector<NicPair>& pairs,
                         const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write diagnosis: " + path);
  out << "rank,pair_id,compute_node,switch_port,failure_type,visit_count\n";
  for (std::size_t r = 0; r < diagnosis.result.ranked.size(); ++r) {
    const RankedCause& c = diagnosis.result.ranked[r];
    const NicPair& p = pairs[c.pair_id];
    out << (r + 1) << ',' << c.pair_id << ',' << p.compute_node << ','
        << p.switch_name << '/' << p.switch_port << ','
        << failure_type_name(c.failure_type) << ',' << c.visit_count << "\n";
  }
}

std::string format_diagnosis_table(const Diagnosis& diagnosis,
                                   const std::vector<NicPair>& pairs) {
  std::ostringstream out;
  out << "rank  pair  compute_node  switch_port   type  visits\n";
  for (std::size_t r = 0; r < diagnosis.result.ranked.size(); ++r) {
    const RankedCause& c = diagnosis.result.ranked[r];
    const NicPair& p = pairs[c.pair_id];
    char line[160];
    std::snprintf(line, sizeof(line), "%-5zu %-5d %-13s %-13s %-5s %ld\n",
                  r + 1, c.pair_id, p.compute_node.c_str(),
                  (p.switch_name + "/" + p.switch_port).c_str(),
                  failure_type_name(c.failure_type).c_str(), c.visit_count);
    out << line;
  }
  if (diagnosis.low_confidence) {
    out << "note: max culprit mass " << format_double(diagnosis.max_culprit_mass)
        << " is below " << format_double(kLowConfidenceThreshold)
        << "; no confident root cause in this window\n";
  }
  return out.str();
}

}  // namespace nicdiag
