#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "nicdiag/common.hpp"

namespace nicdiag {

/// Change-pattern taxonomy for one windowed metric slice.
enum class PatternClass : int {
  Flat = 0,
  SteadyRise = 1,
  SteadyFall = 2,
  SingleSpike = 3,
  MultiPeak = 4,
  LevelShiftUp = 5,
  LevelShiftDown = 6,
  SharpDecline = 7,
};

inline constexpr int kPatternClassCount = 8;
inline constexpr int kSliceLength = 64;

const char* to_string(PatternClass c);
PatternClass pattern_class_from_code(int code);

/// Linear resample to kSliceLength points followed by z-normalization.
/// Empty and all-constant inputs map to the zero vector.
std::vector<double> normalize_slice(const std::vector<double>& diffs);

/// Totally ordered mean-level symbol derived from cross-device box plots.
enum class LevelSymbol : int { VL = 0, L = 1, M = 2, H = 3, VH = 4 };

const char* to_string(LevelSymbol s);

/// Boxplot levels over per-device means of one metric in one window.
/// Fewer than four devices cannot support quartiles; everything is M then.
std::map<std::string, LevelSymbol> level_symbols(
    const std::map<std::string, double>& per_device_means);

struct PatternTrainingMeta {
  std::uint64_t seed = 0;
  int epochs = 0;
  double learning_rate = 0.0;
  double holdout_accuracy = 0.0;
};

/// Shape classifier: one 1-D convolution layer (8 kernels, width 5,
/// stride 1) -> max pooling over position regions -> one dense layer ->
/// softmax. Trained with mini-batch gradient descent on cross-entropy.
class PatternModel {
 public:
  static constexpr int kKernels = 8;
  static constexpr int kKernelWidth = 5;
  static constexpr int kPoolRegions = 4;
  static constexpr int kPooledSize = kKernels * kPoolRegions;

  PatternModel() = default;

  /// Requires at least two classes and at least 10 examples per present
  /// class. Records held-out accuracy in meta(). Reproducible under seed.
  static PatternModel train(
      const std::vector<std::pair<std::vector<double>, PatternClass>>& labeled,
      std::uint64_t seed);

  /// Argmax class for a raw slice of counter deltas; ties break toward the
  /// lowest class code.
  PatternClass classify(const std::vector<double>& slice) const;

  /// Softmax class scores for an already-normalized slice.
  std::array<double, kPatternClassCount> scores(
      const std::vector<double>& normalized) const;

  const PatternTrainingMeta& meta() const { return meta_; }

  void save(std::ostream& out) const;
  static PatternModel load(std::istream& in);
  void save(const std::string& path) const;
  static PatternModel load_file(const std::string& path);

 private:
  std::array<double, kPooledSize> pooled_features(
      const std::vector<double>& normalized) const;

  // conv_[k][w], conv_bias_[k]; dense_[c][p], dense_bias_[c]
  std::array<std::array<double, kKernelWidth>, kKernels> conv_{};
  std::array<double, kKernels> conv_bias_{};
  std::array<std::array<double, kPooledSize>, kPatternClassCount> dense_{};
  std::array<double, kPatternClassCount> dense_bias_{};
  PatternTrainingMeta meta_;
};

/// One labeled slice from the closed-form shape generator.
struct ShapeSample {
  std::vector<double> values;
  PatternClass label = PatternClass::Flat;
};

/// Labeled shapes built from closed-form templates plus noise; the stand-in
/// for operator-labeled history. Deterministic under seed.
std::vector<ShapeSample> generate_shape_corpus(int per_class,
                                               std::uint64_t seed);

}  // namespace nicdiag
