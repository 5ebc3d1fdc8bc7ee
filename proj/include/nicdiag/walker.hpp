#pragma once

#include <cstdint>
#include <vector>

#include "nicdiag/forest.hpp"

namespace nicdiag {

/// Row-stochastic transition matrix over NIC pairs. Every pair neighbors
/// every other pair (any two compute nodes may communicate), so B_i is the
/// full set minus i.
struct TransitionMatrix {
  std::size_t n = 0;
  std::vector<double> q;  // row-major n*n

  double at(std::size_t i, std::size_t j) const { return q[i * n + j]; }
  std::vector<double> row(std::size_t i) const {
    return {q.begin() + i * n, q.begin() + (i + 1) * n};
  }
};

/// Sum of the seven failure-type probabilities of one row.
double culprit_mass(const StateProbabilityRow& row);

/// Walk matrix from the state probabilities: the self-loop carries the
/// culprit mass, victim mass flows toward high-culprit neighbors (or
/// uniformly when no neighbor carries any), normal mass spreads uniformly.
/// Rows are normalized to sum 1.
TransitionMatrix build_transition_matrix(const StateProbabilityMatrix& s);

struct WalkConfig {
  int num_results = 5;            // ranked (pair, type) entries to emit
  long steps_per_iteration = 0;   // 0 -> 100 * N
  std::uint64_t seed = 0;

  void validate() const;
};

struct RankedCause {
  int pair_id = 0;
  int failure_type = 0;  // 0..6 -> F1..F7
  long visit_count = 0;
};

struct DiagnosisResult {
  std::vector<RankedCause> ranked;
  std::vector<std::vector<long>> visit_counts;  // per iteration
};

/// Probability-weighted walk: per iteration, take STEPS moves, pick the
/// most-visited pair (ties toward the smaller id) and its strongest
/// failure type, then shift that type's mass to the victim state and
/// rebuild the matrix. The walker keeps its position across iterations.
DiagnosisResult random_walk(StateProbabilityMatrix s, const WalkConfig& config);

/// Visit counts of a plain walk over a fixed matrix; exposed for
/// convergence checks against the stationary distribution.
std::vector<long> walk_visit_counts(const TransitionMatrix& q, long steps,
                                    int start, std::mt19937_64& rng);

}  // namespace nicdiag
