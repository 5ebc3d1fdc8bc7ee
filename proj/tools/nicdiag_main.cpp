#include <array>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "nicdiag/evalharness.hpp"

namespace fs = std::filesystem;
using namespace nicdiag;

namespace {

// --config JSON fills defaults; explicit flags still win because CLI11
// applies them after this runs.
nlohmann::json load_config(const std::string& path) {
  if (path.empty()) return nlohmann::json::object();
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  nlohmann::json doc;
  in >> doc;
  return doc;
}

template <typename T>
void from_config(const nlohmann::json& cfg, const char* key, T& target) {
  if (cfg.contains(key)) target = cfg[key].get<T>();
}

int run_simulate(const std::string& config_path, std::string out_dir,
                 int n_compute, int n_switch, std::uint64_t seed,
                 std::string profile_name, std::vector<int> counts,
                 int normals, std::int64_t window_length, bool preset_wrf,
                 const std::vector<std::string>& explicit_flags) {
  const nlohmann::json cfg = load_config(config_path);
  auto given = [&](const char* name) {
    return std::find(explicit_flags.begin(), explicit_flags.end(), name) !=
           explicit_flags.end();
  };
  if (!given("--out")) from_config(cfg, "out", out_dir);
  if (!given("--compute")) from_config(cfg, "compute", n_compute);
  if (!given("--switches")) from_config(cfg, "switches", n_switch);
  if (!given("--seed")) from_config(cfg, "seed", seed);
  if (!given("--profile")) from_config(cfg, "profile", profile_name);
  if (!given("--normal")) from_config(cfg, "normal", normals);
  if (!given("--window-length")) from_config(cfg, "window_length", window_length);
  if (!given("--counts")) from_config(cfg, "counts", counts);
  if (out_dir.empty()) throw ConfigError("simulate needs --out");

  std::array<int, kFailureTypeCount> per_type{};
  if (preset_wrf || profile_name == "table2-wrf") {
    // Desk-scale preset mirroring the WRF sample mix: 41,41,30,25,32,27,24
    // failures plus 67 normals.
    per_type = {41, 41, 30, 25, 32, 27, 24};
    normals = 67;
    profile_name = "wrf";
  } else {
    if (counts.size() != kFailureTypeCount) {
      throw ConfigError("--counts needs exactly 7 comma-separated values");
    }
    for (int i = 0; i < kFailureTypeCount; ++i) per_type[i] = counts[i];
  }

  const WorkloadProfile& profile = profile_by_name(profile_name);
  const Topology topology = generate_cluster(n_compute, n_switch, seed);
  const auto samples = generate_corpus(topology, profile, per_type, normals,
                                       window_length, seed);
  write_corpus(out_dir, topology, samples);
  std::cout << "wrote " << samples.size() << " samples ("
            << derive_nic_pairs(topology).size() << " NIC pairs, profile "
            << profile.name << ") to " << out_dir << "\n";
  return 0;
}

int run_train(const std::string& corpus_dir, const std::string& out_dir,
              std::uint64_t seed, bool drop_patterns, bool drop_levels,
              bool drop_metrics, bool drop_logs, double agnes_threshold) {
  Corpus corpus = read_corpus(corpus_dir);
  TrainOptions options;
  options.seed = seed;
  options.flags.patterns = !drop_patterns;
  options.flags.levels = !drop_levels;
  options.flags.metrics = !drop_metrics;
  options.flags.logs = !drop_logs;
  options.agnes_distance_threshold = agnes_threshold;

  const TrainedBundle bundle = train_bundle(corpus, options);
  save_bundle(bundle, out_dir);

  if (bundle.summary.logs_disabled_missing_data) {
    std::cerr << "warning: corpus has no log lines; trained without log "
                 "features\n";
  }
  std::cout << "bundle written to " << out_dir << "\n"
            << "  feature dimension: " << bundle.summary.feature_dimension
            << "\n"
            << "  library size:      " << bundle.summary.library_size << "\n"
            << "  templates/clusters: " << bundle.summary.template_count << "/"
            << bundle.summary.cluster_count << "\n"
            << "  training rows:     " << bundle.summary.training_rows << "\n";
  if (bundle.pattern) {
    std::cout << "  pattern holdout accuracy: "
              << format_double(bundle.summary.pattern_holdout_accuracy) << "\n";
  }
  std::cout << "  forest OOB accuracy: "
            << format_double(bundle.summary.forest_oob_accuracy) << "\n";
  return 0;
}

int run_diagnose(const std::string& bundle_dir, const std::string& corpus_dir,
                 const std::string& sample_id, std::string topology_path,
                 std::string metrics_path, std::string logs_path,
                 std::int64_t window_start, std::int64_t window_length,
                 const std::string& out_dir, int num_results, long steps,
                 std::uint64_t seed) {
  const TrainedBundle bundle = load_bundle(bundle_dir);

  if (!corpus_dir.empty()) {
    if (sample_id.empty()) throw ConfigError("--corpus needs --sample");
    const Corpus corpus = read_corpus(corpus_dir);
    const auto it = std::find_if(
        corpus.samples.begin(), corpus.samples.end(),
        [&](const CorpusSampleRef& s) { return s.id == sample_id; });
    if (it == corpus.samples.end()) {
      throw ConfigError("sample " + sample_id + " not found in " + corpus_dir);
    }
    topology_path = (fs::path(corpus_dir) / "topology.json").string();
    metrics_path = it->metrics_path;
    logs_path = it->logs_path;
    window_start = it->window_start;
    window_length = it->window_length;
  }
  if (topology_path.empty() || metrics_path.empty() || logs_path.empty()) {
    throw ConfigError(
        "diagnose needs either --corpus/--sample or --topology, --metrics "
        "and --logs");
  }

  const Topology topology = load_topology(topology_path);
  const std::vector<NicPair> pairs = derive_nic_pairs(topology);
  const MetricStore metrics = load_metrics(metrics_path, topology);
  const std::vector<LogRecord> logs = load_logs(logs_path);

  WalkConfig walk;
  walk.num_results = num_results;
  walk.steps_per_iteration = steps;
  walk.seed = seed;
  const Diagnosis diagnosis = diagnose(bundle, topology, metrics, logs,
                                       window_start, window_length, walk);

  std::cout << format_diagnosis_table(diagnosis, pairs);
  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    write_diagnosis_csv(diagnosis, pairs,
                        (fs::path(out_dir) / "diagnosis.csv").string());
    std::cout << "wrote " << (fs::path(out_dir) / "diagnosis.csv").string()
              << "\n";
  }
  return 0;
}

int run_evaluate(const std::string& protocol, const std::string& out_dir,
                 std::uint64_t seed, int train_per_type, int train_normals,
                 int test_per_type, int test_normals,
                 const std::string& match_mode) {
  if (out_dir.empty()) throw ConfigError("evaluate needs --out");
  ProtocolConfig config;
  config.seed = seed;
  config.work_dir = (fs::path(out_dir) / "work").string();
  config.train_per_type = train_per_type;
  config.train_normals = train_normals;
  config.test_per_type = test_per_type;
  config.test_normals = test_normals;
  config.match_mode = match_mode_from_string(match_mode);

  const std::vector<EvalReport> reports = run_protocol(protocol, config);
  fs::create_directories(out_dir);
  write_reports_csv(reports, (fs::path(out_dir) / "report.csv").string());
  const std::string table = format_summary_table(reports);
  std::ofstream summary(fs::path(out_dir) / "summary.txt");
  summary << table;
  std::cout << table;
  std::cout << "wrote " << (fs::path(out_dir) / "report.csv").string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"NIC-pair network failure diagnosis for HPC clusters"};
  app.require_subcommand(1);

  // simulate
  auto* simulate = app.add_subcommand(
      "simulate", "Generate a synthetic fault-injection corpus");
  std::string sim_out, sim_profile = "wrf", sim_config;
  int sim_compute = 4, sim_switch = 1, sim_normals = 30;
  std::uint64_t sim_seed = 7;
  std::int64_t sim_window = 3600;
  std::vector<int> sim_counts(kFailureTypeCount, 20);
  bool sim_preset_wrf = false;
  simulate->add_option("--out", sim_out, "Output corpus directory");
  simulate->add_option("--compute", sim_compute, "Compute node count");
  simulate->add_option("--switches", sim_switch, "Switch count");
  simulate->add_option("--seed", sim_seed, "Corpus seed");
  simulate->add_option("--profile", sim_profile,
                       "Workload profile (wrf|grapes|qe|gromacs|lammps|"
                       "openfoam|table2-wrf)");
  simulate->add_option("--counts", sim_counts,
                       "Failure sample counts for F1..F7")
      ->delimiter(',')
      ->expected(kFailureTypeCount);
  simulate->add_option("--normal", sim_normals, "Failure-free sample count");
  simulate->add_option("--window-length", sim_window, "Window length, seconds");
  simulate->add_flag("--table2-wrf", sim_preset_wrf,
                     "Use the WRF-shaped sample mix preset");
  simulate->add_option("--config", sim_config, "JSON config with defaults");

  // train
  auto* train = app.add_subcommand("train", "Train a model bundle");
  std::string train_corpus, train_out;
  std::uint64_t train_seed = 7;
  bool drop_patterns = false, drop_levels = false, drop_metrics = false,
       drop_logs = false;
  double agnes_threshold = 0.5;
  train->add_option("--corpus", train_corpus, "Corpus directory")->required();
  train->add_option("--out", train_out, "Bundle output directory")->required();
  train->add_option("--seed", train_seed, "Training seed");
  train->add_flag("--drop-pattern-features", drop_patterns,
                  "Train without metric pattern features");
  train->add_flag("--drop-level-features", drop_levels,
                  "Train without metric level features");
  train->add_flag("--drop-metric-input", drop_metrics,
                  "Train without any metric features");
  train->add_flag("--drop-log-input", drop_logs,
                  "Train without log features");
  train->add_option("--agnes-threshold", agnes_threshold,
                    "Template cluster cut distance");

  // diagnose
  auto* diagnose_cmd =
      app.add_subcommand("diagnose", "Rank root causes for one window");
  std::string diag_bundle, diag_corpus, diag_sample, diag_topology,
      diag_metrics, diag_logs, diag_out;
  std::int64_t diag_start = 0, diag_length = 3600;
  int diag_results = 5;
  long diag_steps = 0;
  std::uint64_t diag_seed = 7;
  diagnose_cmd->add_option("--bundle", diag_bundle, "Trained bundle directory")
      ->required();
  diagnose_cmd->add_option("--corpus", diag_corpus,
                           "Corpus directory (with --sample)");
  diagnose_cmd->add_option("--sample", diag_sample, "Sample id in --corpus");
  diagnose_cmd->add_option("--topology", diag_topology, "Topology JSON file");
  diagnose_cmd->add_option("--metrics", diag_metrics, "Metrics CSV file");
  diagnose_cmd->add_option("--logs", diag_logs, "Logs TSV file");
  diagnose_cmd->add_option("--window-start", diag_start, "Window start, epoch s");
  diagnose_cmd->add_option("--window-length", diag_length,
                           "Window length, seconds");
  diagnose_cmd->add_option("--out", diag_out, "Directory for diagnosis.csv");
  diagnose_cmd->add_option("--results", diag_results, "Ranked causes to emit");
  diagnose_cmd->add_option("--steps", diag_steps,
                           "Walk steps per iteration (0 = 100*N)");
  diagnose_cmd->add_option("--seed", diag_seed, "Walk seed");

  // evaluate
  auto* evaluate = app.add_subcommand("evaluate", "Run an experiment protocol");
  std::string eval_protocol, eval_out, eval_mode = "pair-and-type";
  std::uint64_t eval_seed = 7;
  int eval_train_per_type = 20, eval_train_normals = 30;
  int eval_test_per_type = 30, eval_test_normals = 5;
  evaluate
      ->add_option("--protocol", eval_protocol,
                   "overall|robustness|ablation|scalability")
      ->required();
  evaluate->add_option("--out", eval_out, "Report output directory")->required();
  evaluate->add_option("--seed", eval_seed, "Protocol seed");
  evaluate->add_option("--train-per-type", eval_train_per_type,
                       "Training failure samples per type");
  evaluate->add_option("--train-normals", eval_train_normals,
                       "Training failure-free samples");
  evaluate->add_option("--test-per-type", eval_test_per_type,
                       "Test failure samples per type");
  evaluate->add_option("--test-normals", eval_test_normals,
                       "Test failure-free samples");
  evaluate->add_option("--match-mode", eval_mode,
                       "pair-only|type-only|pair-and-type");

  CLI11_PARSE(app, argc, argv);

  try {
    if (simulate->parsed()) {
      std::vector<std::string> explicit_flags;
      for (const auto* opt : simulate->get_options()) {
        if (opt->count() > 0) explicit_flags.push_back(opt->get_name());
      }
      return run_simulate(sim_config, sim_out, sim_compute, sim_switch,
                          sim_seed, sim_profile, sim_counts, sim_normals,
                          sim_window, sim_preset_wrf, explicit_flags);
    }
    if (train->parsed()) {
      return run_train(train_corpus, train_out, train_seed, drop_patterns,
                       drop_levels, drop_metrics, drop_logs, agnes_threshold);
    }
    if (diagnose_cmd->parsed()) {
      return run_diagnose(diag_bundle, diag_corpus, diag_sample, diag_topology,
                          diag_metrics, diag_logs, diag_start, diag_length,
                          diag_out, diag_results, diag_steps, diag_seed);
    }
    if (evaluate->parsed()) {
      return run_evaluate(eval_protocol, eval_out, eval_seed,
                          eval_train_per_type, eval_train_normals,
                          eval_test_per_type, eval_test_normals, eval_mode);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
