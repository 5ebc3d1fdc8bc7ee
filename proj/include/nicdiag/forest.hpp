#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "nicdiag/fusion.hpp"

namespace nicdiag {

/// Per-pair state: culprit with one of seven failure types, collateral
/// victim, or normal.
enum class StateLabel : int {
  F1 = 0,  // wrong packet (CRC errors)
  F2 = 1,  // outbound pause storm
  F3 = 2,  // switch port performance restricted
  F4 = 3,  // transmit timeout
  F5 = 4,  // pause parameter mismatch on the link
  F6 = 5,  // switch-side pause handling disabled
  F7 = 6,  // node-side pause handling disabled
  Victim = 7,
  Normal = 8,
};

inline constexpr int kStateCount = 9;
inline constexpr int kFailureTypeCount = 7;

const char* to_string(StateLabel s);
StateLabel state_label_from_string(const std::string& s);
std::string failure_type_name(int type_index);  // "F1".."F7"

using StateProbabilityRow = std::array<double, kStateCount>;

/// Per-pair class probabilities, indexed by pair id.
struct StateProbabilityMatrix {
  std::vector<StateProbabilityRow> rows;
};

struct ForestParams {
  int n_trees = 100;
  int min_leaf = 2;
};

/// Random forest over 0/1 anomaly bits: bootstrap per tree, Gini splits
/// over sqrt(M) candidate features, grown to purity or the leaf minimum.
class ForestModel {
 public:
  ForestModel() = default;

  /// Requires >= 2 classes and uniform dimensions. Reproducible under
  /// seed; per-tree generators are seeded with seed + tree index.
  static ForestModel train(const std::vector<std::vector<std::uint8_t>>& x,
                           const std::vector<StateLabel>& y, std::uint64_t seed,
                           ForestParams params = {});

  /// Mean of per-tree leaf class frequencies; sums to 1.
  StateProbabilityRow predict_row(const std::vector<std::uint8_t>& x) const;

  double oob_accuracy() const { return oob_accuracy_; }
  std::size_t dimension() const { return dimension_; }
  std::uint64_t seed() const { return seed_; }
  std::size_t tree_count() const { return trees_.size(); }

  void save(std::ostream& out) const;
  static ForestModel load(std::istream& in);
  void save(const std::string& path) const;
  static ForestModel load_file(const std::string& path);

 private:
  struct Node {
    int feature = -1;  // -1 marks a leaf
    int left = -1;     // child for bit 0
    int right = -1;    // child for bit 1
    std::array<double, kStateCount> counts{};
  };
  struct Tree {
    std::vector<Node> nodes;
  };

  static void grow(Tree& tree, int node_index,
                   const std::vector<std::vector<std::uint8_t>>& x,
                   const std::vector<int>& y, std::vector<std::size_t>& rows,
                   int min_leaf, std::mt19937_64& rng);

  std::vector<Tree> trees_;
  std::size_t dimension_ = 0;
  std::uint64_t seed_ = 0;
  double oob_accuracy_ = 0.0;
};

/// One probability row per pair, ordered by pair id.
StateProbabilityMatrix predict_states(const ForestModel& model,
                                      const std::vector<AnomalyVector>& vectors);

}  // namespace nicdiag
