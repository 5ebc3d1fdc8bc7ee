#include "nicdiag/evalharness.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>

namespace nicdiag {

namespace fs = std::filesystem;

MatchMode match_mode_from_string(const std::string& s) {
  if (s == "pair-only") return MatchMode::PairOnly;
  if (s == "type-only") return MatchMode::TypeOnly;
  if (s == "pair-and-type") return MatchMode::PairAndType;
  throw ConfigError("unknown match mode: '" + s + "'");
}

const char* to_string(MatchMode mode) {
  switch (mode) {
    case MatchMode::PairOnly: return "pair-only";
    case MatchMode::TypeOnly: return "type-only";
    case MatchMode::PairAndType: return "pair-and-type";
  }
  return "pair-and-type";
}

namespace {

bool matches(const TestCase& c, const std::pair<int, int>& predicted,
             MatchMode mode) {
  switch (mode) {
    case MatchMode::PairOnly: return predicted.first == c.true_pair;
    case MatchMode::TypeOnly: return predicted.second == c.true_type;
    case MatchMode::PairAndType:
      return predicted.first == c.true_pair && predicted.second == c.true_type;
  }
  return false;
}

bool hit_within(const TestCase& c, int k, MatchMode mode) {
  const int limit = std::min<int>(k, static_cast<int>(c.predicted.size()));
  for (int i = 0; i < limit; ++i) {
    if (matches(c, c.predicted[i], mode)) return true;
  }
  return false;
}

}  // namespace

double ac_at_k(const std::vector<TestCase>& cases, int k, MatchMode mode) {
  if (cases.empty()) throw ConfigError("ac@k over an empty case set");
  if (k < 1) throw ConfigError("k must be >= 1");
  std::size_t hits = 0;
  for (const TestCase& c : cases) {
    if (hit_within(c, k, mode)) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(cases.size());
}

double avg_at_k(const std::vector<TestCase>& cases, int k, MatchMode mode) {
  if (cases.empty()) throw ConfigError("avg@k over an empty case set");
  if (k < 1) throw ConfigError("k must be >= 1");
  double sum = 0.0;
  for (int i = 1; i <= k; ++i) sum += ac_at_k(cases, i, mode);
  return sum / static_cast<double>(k);
}

EvalReport make_report(const std::string& protocol, const std::string& variant,
                       const std::string& train_set, const std::string& test_set,
                       const std::vector<TestCase>& cases, int max_k,
                       MatchMode mode) {
  EvalReport report;
  report.protocol = protocol;
  report.variant = variant;
  report.train_set = train_set;
  report.test_set = test_set;
  report.case_count = cases.size();
  for (int k = 1; k <= max_k; ++k) {
    report.ac[k] = ac_at_k(cases, k, mode);
    report.avg[k] = avg_at_k(cases, k, mode);
  }
  for (int type = 0; type < kFailureTypeCount; ++type) {
    std::vector<TestCase> subset;
    for (const TestCase& c : cases) {
      if (c.true_type == type) subset.push_back(c);
    }
    if (subset.empty()) continue;
    for (int k = 1; k <= max_k; ++k) {
      report.type_ac[type][k] = ac_at_k(subset, k, mode);
    }
  }
  return report;
}

std::vector<TestCase> evaluate_cases(const TrainedBundle& bundle,
                                     const Corpus& corpus,
                                     std::uint64_t base_seed, int num_results,
                                     long walk_steps) {
  std::vector<TestCase> cases;
  for (std::size_t i = 0; i < corpus.samples.size(); ++i) {
    const CorpusSampleRef& ref = corpus.samples[i];
    if (ref.failure_type < 0) continue;

    const Window window = load_sample_window(corpus, ref);
    const auto features = featurize_sample(bundle, window, ref.id);
    std::vector<AnomalyVector> anomalies;
    anomalies.reserve(features.size());
    for (const auto& [pair_id, v] : features) {
      anomalies.push_back(compress(v, bundle.library));
    }
    const StateProbabilityMatrix states = predict_states(bundle.forest, anomalies);

    WalkConfig walk;
    walk.num_results = num_results;
    walk.steps_per_iteration = walk_steps;
    walk.seed = mix_seed(base_seed, i);
    const DiagnosisResult result = random_walk(states, walk);

    TestCase c;
    c.sample_id = ref.id;
    c.true_pair = ref.culprit_pair;
    c.true_type = ref.failure_type;
    for (const RankedCause& r : result.ranked) {
      c.predicted.push_back({r.pair_id, r.failure_type});
    }
    cases.push_back(std::move(c));
  }
  return cases;
}

std::vector<TestCase> evaluate_cases_no_walk(const TrainedBundle& bundle,
                                             const Corpus& corpus) {
  std::vector<TestCase> cases;
  for (const CorpusSampleRef& ref : corpus.samples) {
    if (ref.failure_type < 0) continue;

    const Window window = load_sample_window(corpus, ref);
    const auto features = featurize_sample(bundle, window, ref.id);
    std::vector<AnomalyVector> anomalies;
    for (const auto& [pair_id, v] : features) {
      anomalies.push_back(compress(v, bundle.library));
    }
    const StateProbabilityMatrix states = predict_states(bundle.forest, anomalies);

    // Rank by descending culprit mass; ties toward the smaller pair id.
    std::vector<std::size_t> order(states.rows.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return culprit_mass(states.rows[a]) > culprit_mass(states.rows[b]);
    });

    TestCase c;
    c.sample_id = ref.id;
    c.true_pair = ref.culprit_pair;
    c.true_type = ref.failure_type;
    for (std::size_t pair : order) {
      int best_type = 0;
      for (int k = 1; k < kFailureTypeCount; ++k) {
        if (states.rows[pair][k] > states.rows[pair][best_type]) best_type = k;
      }
      c.predicted.push_back({static_cast<int>(pair), best_type});
    }
    cases.push_back(std::move(c));
  }
  return cases;
}

namespace {

std::array<int, kFailureTypeCount> uniform_counts(int per_type) {
  std::array<int, kFailureTypeCount> counts{};
  counts.fill(per_type);
  return counts;
}

Corpus materialize_corpus(const std::string& dir, const Topology& topology,
                          const WorkloadProfile& profile, int per_type,
                          int normals, std::int64_t window_length,
                          std::uint64_t seed) {
  const auto samples = generate_corpus(topology, profile,
                                       uniform_counts(per_type), normals,
                                       window_length, seed);
  write_corpus(dir, topology, samples);
  return read_corpus(dir);
}

TrainedBundle train_on(const Corpus& corpus, std::uint64_t seed,
                       FeatureFlags flags = {}) {
  TrainOptions options;
  options.seed = seed;
  options.flags = flags;
  return train_bundle(corpus, options);
}

}  // namespace

std::vector<EvalReport> run_protocol(const std::string& name,
                                     const ProtocolConfig& config) {
  if (config.work_dir.empty()) {
    throw ConfigError("protocol config needs a work_dir");
  }
  fs::create_directories(config.work_dir);
  const fs::path work(config.work_dir);

  std::vector<EvalReport> reports;
  const auto protocol_steps = [&](const Corpus& corpus) {
    return config.walk_steps_per_pair > 0
               ? config.walk_steps_per_pair *
                     static_cast<long>(corpus.pairs.size())
               : 0L;
  };

  if (name == "overall" || name == "ablation") {
    const Topology topology =
        generate_cluster(config.n_compute, config.n_switch, config.seed);
    const WorkloadProfile& profile = profile_by_name(config.train_profile);
    const Corpus train = materialize_corpus(
        (work / "train").string(), topology, profile, config.train_per_type,
        config.train_normals, config.window_length, mix_seed(config.seed, 1));
    const Corpus test = materialize_corpus(
        (work / "test").string(), topology, profile, config.test_per_type,
        config.test_normals, config.window_length, mix_seed(config.seed, 2));
    const std::string train_name = profile.name + "_A";
    const std::string test_name = profile.name + "_B";

    const TrainedBundle full = train_on(train, config.seed);
    reports.push_back(make_report(
        name, "full", train_name, test_name,
        evaluate_cases(full, test, mix_seed(config.seed, 3), config.num_results,
                       protocol_steps(test)),
        config.max_k, config.match_mode));

    if (name == "ablation") {
      struct Variant {
        const char* label;
        FeatureFlags flags;
      };
      const std::vector<Variant> variants = {
          {"C1", {.patterns = false}},
          {"C2", {.levels = false}},
          {"C3", {.metrics = false}},
          {"C4", {.logs = false}},
      };
      for (const Variant& v : variants) {
        const TrainedBundle bundle = train_on(train, config.seed, v.flags);
        reports.push_back(make_report(
            name, v.label, train_name, test_name,
            evaluate_cases(bundle, test, mix_seed(config.seed, 3),
                           config.num_results, protocol_steps(test)),
            config.max_k, config.match_mode));
      }
      reports.push_back(make_report(name, "C5", train_name, test_name,
                                    evaluate_cases_no_walk(full, test),
                                    config.max_k, config.match_mode));
    }
    return reports;
  }

  if (name == "robustness") {
    const Topology topology =
        generate_cluster(config.n_compute, config.n_switch, config.seed);
    const WorkloadProfile& train_profile = profile_by_name(config.train_profile);
    const Corpus train = materialize_corpus(
        (work / "train").string(), topology, train_profile,
        config.train_per_type, config.train_normals, config.window_length,
        mix_seed(config.seed, 1));
    const TrainedBundle full = train_on(train, config.seed);
    const std::string train_name = train_profile.name + "_A";

    for (std::size_t pi = 0; pi < builtin_profiles().size(); ++pi) {
      const WorkloadProfile& profile = builtin_profiles()[pi];
      if (profile.name == train_profile.name) continue;
      const Corpus test = materialize_corpus(
          (work / ("test_" + profile.name)).string(), topology, profile,
          config.test_per_type, config.test_normals, config.window_length,
          mix_seed(config.seed, 100 + pi));
      reports.push_back(make_report(
          "robustness", "full", train_name, profile.name,
          evaluate_cases(full, test, mix_seed(config.seed, 4),
                         config.num_results, protocol_steps(test)),
          config.max_k, config.match_mode));
      reports.push_back(make_report("robustness", "C5", train_name,
                                    profile.name,
                                    evaluate_cases_no_walk(full, test),
                                    config.max_k, config.match_mode));
    }
    return reports;
  }

  if (name == "scalability") {
    const WorkloadProfile& profile = profile_by_name(config.train_profile);
    const Topology small = generate_cluster(config.scal_small_compute,
                                            config.scal_small_switch,
                                            config.seed);
    const Topology large = generate_cluster(config.scal_large_compute,
                                            config.scal_large_switch,
                                            config.seed);
    const std::string small_name =
        std::to_string(config.scal_small_compute) + "RANK";
    const std::string large_name =
        std::to_string(config.scal_large_compute) + "RANK";

    const Corpus train_small = materialize_corpus(
        (work / "train_small").string(), small, profile,
        config.scal_train_per_type, config.scal_train_normals,
        config.window_length, mix_seed(config.seed, 11));
    const Corpus train_large = materialize_corpus(
        (work / "train_large").string(), large, profile,
        config.scal_train_per_type, config.scal_train_normals,
        config.window_length, mix_seed(config.seed, 12));
    const Corpus test_small = materialize_corpus(
        (work / "test_small").string(), small, profile,
        config.scal_test_per_type, config.scal_test_normals,
        config.window_length, mix_seed(config.seed, 13));
    const Corpus test_large = materialize_corpus(
        (work / "test_large").string(), large, profile,
        config.scal_test_per_type, config.scal_test_normals,
        config.window_length, mix_seed(config.seed, 14));

    const TrainedBundle small_bundle = train_on(train_small, config.seed);
    const TrainedBundle large_bundle = train_on(train_large, config.seed);

    reports.push_back(make_report(
        "scalability", "full", small_name + "_A", small_name + "_B",
        evaluate_cases(small_bundle, test_small, mix_seed(config.seed, 15),
                       config.num_results, protocol_steps(test_small)),
        config.max_k, config.match_mode));
    reports.push_back(make_report(
        "scalability", "full", large_name + "_A", large_name + "_B",
        evaluate_cases(large_bundle, test_large, mix_seed(config.seed, 16),
                       config.num_results, protocol_steps(test_large)),
        config.max_k, config.match_mode));
    reports.push_back(make_report(
        "scalability", "full", small_name + "_A", large_name + "_B",
        evaluate_cases(small_bundle, test_large, mix_seed(config.seed, 17),
                       config.num_results, protocol_steps(test_large)),
        config.max_k, config.match_mode));
    return reports;
  }

  throw ConfigError("unknown protocol: '" + name +
                    "' (expected overall|robustness|ablation|scalability)");
}

void write_reports_csv(const std::vector<EvalReport>& reports,
                       const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write report: " + path);
  out << "protocol,variant,train_set,test_set,cases,metric,k,value\n";
  for (const EvalReport& r : reports) {
    auto row = [&](const std::string& metric, int k, double value) {
      out << r.protocol << ',' << r.variant << ',' << r.train_set << ','
          << r.test_set << ',' << r.case_count << ',' << metric << ',' << k
          << ',' << format_double(value) << "\n";
    };
    for (const auto& [k, v] : r.ac) row("ac", k, v);
    for (const auto& [k, v] : r.avg) row("avg", k, v);
    for (const auto& [type, by_k] : r.type_ac) {
      for (const auto& [k, v] : by_k) {
        row("ac_" + failure_type_name(type), k, v);
      }
    }
  }
}

std::string format_summary_table(const std::vector<EvalReport>& reports) {
  std::ostringstream out;
  out << "protocol     variant  train          test           cases  AC@1    "
         "AC@3    AC@5    Avg@5\n";
  for (const EvalReport& r : reports) {
    auto metric = [&](const std::map<int, double>& m, int k) {
      auto it = m.find(k);
      return it == m.end() ? 0.0 : it->second;
    };
    char line[200];
    std::snprintf(line, sizeof(line),
                  "%-12s %-8s %-14s %-14s %-6zu %.4f  %.4f  %.4f  %.4f\n",
                  r.protocol.c_str(), r.variant.c_str(), r.train_set.c_str(),
                  r.test_set.c_str(), r.case_count, metric(r.ac, 1),
                  metric(r.ac, 3), metric(r.ac, 5), metric(r.avg, 5));
    out << line;
  }
  return out.str();
}

}  // namespace nicdiag
