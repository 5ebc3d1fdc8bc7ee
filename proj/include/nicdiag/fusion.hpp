#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nicdiag/logfeat.hpp"
#include "nicdiag/pattern.hpp"
#include "nicdiag/telemetry.hpp"

namespace nicdiag {

/// Slot-local categorical symbol. Pattern slots take PatternClass codes,
/// level slots take LevelSymbol codes, log slots take 0/1. kAbsentSymbol
/// marks telemetry that was missing for the window.
using Symbol = std::uint8_t;
inline constexpr Symbol kAbsentSymbol = 255;

enum class SlotKind { Pattern, Level, LogCluster };

struct SlotDef {
  SlotKind kind = SlotKind::Pattern;
  EndpointSide side = EndpointSide::Compute;  // metric slots only
  std::string metric;                         // metric slots only
  int cluster_id = -1;                        // log slots only
};

/// Which feature families participate. Dropping a family removes its slots
/// end to end (used by the ablation protocol and degraded-input training).
struct FeatureFlags {
  bool patterns = true;
  bool levels = true;
  bool metrics = true;  // false drops both pattern and level slots
  bool logs = true;
};

/// Fixed slot layout for one trained system: compute-side metric slots,
/// then switch-side metric slots, then one slot per log cluster. The two
/// sides carry their own metric lists; heterogeneity lives here.
class FeatureSchema {
 public:
  FeatureSchema() = default;

  static FeatureSchema build(std::vector<std::string> compute_metrics,
                             std::vector<std::string> switch_metrics,
                             int n_log_clusters, FeatureFlags flags = {});

  const std::vector<SlotDef>& slots() const { return slots_; }
  std::size_t dimension() const { return slots_.size(); }
  const FeatureFlags& flags() const { return flags_; }
  const std::vector<std::string>& compute_metrics() const {
    return compute_metrics_;
  }
  const std::vector<std::string>& switch_metrics() const {
    return switch_metrics_;
  }
  int log_cluster_count() const { return n_log_clusters_; }

  void save(std::ostream& out) const;
  static FeatureSchema load(std::istream& in);
  void save(const std::string& path) const;
  static FeatureSchema load_file(const std::string& path);

  bool operator==(const FeatureSchema& other) const;

 private:
  void rebuild_slots();

  std::vector<std::string> compute_metrics_;
  std::vector<std::string> switch_metrics_;
  int n_log_clusters_ = 0;
  FeatureFlags flags_;
  std::vector<SlotDef> slots_;
};

/// Symbolic description of one NIC pair in one window.
struct NicPairFeatureVector {
  int pair_id = 0;
  std::string window_id;
  std::vector<Symbol> symbols;
};

/// Formula-style positionwise agreement, in [0, 1].
double similarity(const NicPairFeatureVector& a, const NicPairFeatureVector& b);

/// Feature vectors drawn from failure-free operation. Extending coverage
/// is an append, never a retrain.
struct NormalSampleLibrary {
  std::vector<NicPairFeatureVector> samples;

  void append(NicPairFeatureVector v) { samples.push_back(std::move(v)); }

  void save(std::ostream& out) const;
  static NormalSampleLibrary load(std::istream& in);
  void save(const std::string& path) const;
  static NormalSampleLibrary load_file(const std::string& path);
};

struct AnomalyVector {
  int pair_id = 0;
  std::vector<std::uint8_t> bits;
};

/// Diffs the vector against its most similar library sample (ties toward
/// the smallest library index): bit i is 1 iff the symbols disagree.
AnomalyVector compress(const NicPairFeatureVector& v,
                       const NormalSampleLibrary& library);

/// Builds every pair's feature vector for one window. Pattern/log models
/// may be null when the schema carries no slots of that family.
std::map<int, NicPairFeatureVector> featurize_window(
    const Window& window, const FeatureSchema& schema,
    const PatternModel* pattern_model, const LogFeatureModel* log_model,
    const std::string& window_id);

/// Single-pair convenience wrapper; level slots still consult the whole
/// window (they are cross-device by definition).
NicPairFeatureVector build_feature_vector(int pair_id, const Window& window,
                                          const FeatureSchema& schema,
                                          const PatternModel* pattern_model,
                                          const LogFeatureModel* log_model,
                                          const std::string& window_id);

}  // namespace nicdiag
