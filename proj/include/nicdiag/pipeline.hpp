#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nicdiag/simulator.hpp"
#include "nicdiag/walker.hpp"

namespace nicdiag {

struct TrainOptions {
  std::uint64_t seed = 0;
  FeatureFlags flags;
  int shape_samples_per_class = 200;  // pattern trainer corpus size
  double agnes_distance_threshold = 0.5;
  DrainParams drain;
};

struct TrainSummary {
  double pattern_holdout_accuracy = 0.0;
  double forest_oob_accuracy = 0.0;
  std::size_t feature_dimension = 0;
  std::size_t library_size = 0;
  std::size_t template_count = 0;
  std::size_t cluster_count = 0;
  std::size_t training_rows = 0;
  bool logs_disabled_missing_data = false;  // degraded automatically
};

/// Every trained artifact needed for online diagnosis.
struct TrainedBundle {
  FeatureSchema schema;
  std::optional<PatternModel> pattern;
  std::optional<LogFeatureModel> logs;
  NormalSampleLibrary library;
  ForestModel forest;
  TrainOptions options;
  TrainSummary summary;
};

/// Offline phase: mines log templates and clusters, trains the shape
/// classifier on generated labeled shapes, assembles the schema, fills the
/// normal library, and fits the state classifier on compressed vectors.
/// Fails when the corpus has no failure-free samples. A corpus without any
/// log lines degrades to a metrics-only bundle.
TrainedBundle train_bundle(const Corpus& corpus, const TrainOptions& options);

void save_bundle(const TrainedBundle& bundle, const std::string& dir);
TrainedBundle load_bundle(const std::string& dir);

/// Online phase output: ranked causes plus the classifier view.
struct Diagnosis {
  DiagnosisResult result;
  StateProbabilityMatrix states;
  std::vector<int> pair_order;  // pair ids, row-aligned with states
  double max_culprit_mass = 0.0;
  bool low_confidence = false;  // no pair's culprit mass reached 0.5
};

inline constexpr double kLowConfidenceThreshold = 0.5;

Diagnosis diagnose(const TrainedBundle& bundle, const Topology& topology,
                   const MetricStore& metrics, const std::vector<LogRecord>& logs,
                   std::int64_t window_start, std::int64_t window_length,
                   const WalkConfig& walk);

/// Feature vectors for one already-sliced corpus sample.
std::map<int, NicPairFeatureVector> featurize_sample(
    const TrainedBundle& bundle, const Window& window,
    const std::string& window_id);

/// Loads a corpus sample's telemetry and slices its window.
Window load_sample_window(const Corpus& corpus, const CorpusSampleRef& ref);

/// Writes the ranked result table; one row per cause.
void write_diagnosis_csv(const Diagnosis& diagnosis,
                         const std::vector<NicPair>& pairs,
                         const std::string& path);
std::string format_diagnosis_table(const Diagnosis& diagnosis,
                                   const std::vector<NicPair>& pairs);

}  // namespace nicdiag
