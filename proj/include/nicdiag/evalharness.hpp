#pragma once

#include <map>
#include <string>
#include <vector>

#include "nicdiag/pipeline.hpp"

namespace nicdiag {

enum class MatchMode { PairOnly, TypeOnly, PairAndType };

MatchMode match_mode_from_string(const std::string& s);
const char* to_string(MatchMode mode);

/// One diagnosed failure sample: ground truth plus the ranked predictions.
struct TestCase {
  std::string sample_id;
  int true_pair = 0;
  int true_type = 0;                            // 0..6
  std::vector<std::pair<int, int>> predicted;   // (pair, type), rank order
};

/// Fraction of cases whose true root cause appears in the first k
/// predictions under the match mode.
double ac_at_k(const std::vector<TestCase>& cases, int k, MatchMode mode);

/// Mean of ac@1..ac@k.
double avg_at_k(const std::vector<TestCase>& cases, int k, MatchMode mode);

struct EvalReport {
  std::string protocol;
  std::string variant;    // "full", "C1".."C5"
  std::string train_set;
  std::string test_set;
  std::size_t case_count = 0;
  std::map<int, double> ac;                      // k -> fraction
  std::map<int, double> avg;                     // k -> fraction
  std::map<int, std::map<int, double>> type_ac;  // failure type -> k -> frac
};

EvalReport make_report(const std::string& protocol, const std::string& variant,
                       const std::string& train_set, const std::string& test_set,
                       const std::vector<TestCase>& cases, int max_k,
                       MatchMode mode);

/// Diagnoses every failure sample of the corpus with the bundle's full
/// pipeline (classifier + walk). Walk seeds derive from base_seed and the
/// sample index; steps = 0 keeps the walker's 100*N default.
std::vector<TestCase> evaluate_cases(const TrainedBundle& bundle,
                                     const Corpus& corpus,
                                     std::uint64_t base_seed, int num_results,
                                     long walk_steps = 0);

/// Classifier-only ranking: pairs by descending culprit mass, each with its
/// strongest failure type (the no-walk ablation).
std::vector<TestCase> evaluate_cases_no_walk(const TrainedBundle& bundle,
                                             const Corpus& corpus);

struct ProtocolConfig {
  std::uint64_t seed = 7;
  std::string work_dir;  // corpora and bundles are materialized here
  int n_compute = 4;
  int n_switch = 1;
  std::string train_profile = "wrf";
  int train_per_type = 20;
  int train_normals = 30;
  int test_per_type = 30;
  int test_normals = 5;
  std::int64_t window_length = 3600;
  int num_results = 5;
  int max_k = 5;  // reports cap at the first five results
  MatchMode match_mode = MatchMode::PairAndType;
  // Protocol runs walk long enough to drain sampling noise; the online
  // default of 100*N steps stays with the walker itself.
  long walk_steps_per_pair = 2000;  // steps = this * N; 0 keeps the default

  // Scalability: a small training cluster against a doubled one.
  int scal_small_compute = 16;
  int scal_small_switch = 2;
  int scal_large_compute = 32;
  int scal_large_switch = 4;
  int scal_train_per_type = 10;
  int scal_train_normals = 20;
  int scal_test_per_type = 6;
  int scal_test_normals = 2;
};

/// overall: train/test on the same profile, split by seed.
/// robustness: train on one profile, test on every other (full and C5).
/// ablation: overall corpora re-run with each feature family removed and
///           with the walk removed.
/// scalability: small-cluster training evaluated on the doubled cluster,
///              with same-scale references.
std::vector<EvalReport> run_protocol(const std::string& name,
                                     const ProtocolConfig& config);

void write_reports_csv(const std::vector<EvalReport>& reports,
                       const std::string& path);
std::string format_summary_table(const std::vector<EvalReport>& reports);

}  // namespace nicdiag
