#include "nicdiag/walker.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace nicdiag {

double culprit_mass(const StateProbabilityRow& row) {
  double pf = 0.0;
  for (int k = 0; k < kFailureTypeCount; ++k) pf += row[k];
  return pf;
}

TransitionMatrix build_transition_matrix(const StateProbabilityMatrix& s) {
  const std::size_t n = s.rows.size();
  if (n == 0) throw ConfigError("cannot build a transition matrix for 0 pairs");

  std::vector<double> pf(n);
  for (std::size_t i = 0; i < n; ++i) pf[i] = culprit_mass(s.rows[i]);

  TransitionMatrix t;
  t.n = n;
  t.q.assign(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double victim = s.rows[i][static_cast<int>(StateLabel::Victim)];
    const double normal = s.rows[i][static_cast<int>(StateLabel::Normal)];
    double neighbor_pf = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) neighbor_pf += pf[j];
    }
    const double b = static_cast<double>(n - 1);

    t.q[i * n + i] = pf[i];
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      double w = normal / b;
      if (neighbor_pf > 0.0) {
        w += victim * pf[j] / neighbor_pf;
      } else {
        w += victim / b;  // no culprit mass anywhere: spread evenly
      }
      t.q[i * n + j] = w;
    }

    double row_sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) row_sum += t.q[i * n + j];
    if (row_sum <= 0.0) {
      // Single pair with zero culprit mass: nowhere to go but itself.
      for (std::size_t j = 0; j < n; ++j) t.q[i * n + j] = 1.0 / n;
    } else {
      for (std::size_t j = 0; j < n; ++j) t.q[i * n + j] /= row_sum;
    }
  }
  return t;
}

void WalkConfig::validate() const {
  if (num_results < 1) throw ConfigError("num_results must be >= 1");
  if (steps_per_iteration < 0) throw ConfigError("steps must be >= 0");
}

std::vector<long> walk_visit_counts(const TransitionMatrix& q, long steps,
                                    int start, std::mt19937_64& rng) {
  std::vector<long> counts(q.n, 0);
  std::size_t v = static_cast<std::size_t>(start);
  std::vector<double> row(q.n);
  for (long s = 0; s < steps; ++s) {
    for (std::size_t j = 0; j < q.n; ++j) row[j] = q.at(v, j);
    v = sample_discrete(rng, row);
    counts[v]++;
  }
  return counts;
}

DiagnosisResult random_walk(StateProbabilityMatrix s, const WalkConfig& config) {
  config.validate();
  const std::size_t n = s.rows.size();
  if (n == 0) throw ConfigError("cannot walk over 0 pairs");

  const long steps = config.steps_per_iteration > 0
                         ? config.steps_per_iteration
                         : 100 * static_cast<long>(n);
  std::mt19937_64 rng(config.seed);
  std::size_t v = uniform_index(rng, n);
  TransitionMatrix q = build_transition_matrix(s);

  DiagnosisResult result;
  std::set<std::pair<int, int>> emitted;
  std::vector<double> row(n);

  for (int iteration = 0; iteration < config.num_results; ++iteration) {
    std::vector<long> counts(n, 0);
    for (long step = 0; step < steps; ++step) {
      for (std::size_t j = 0; j < n; ++j) row[j] = q.at(v, j);
      v = sample_discrete(rng, row);
      counts[v]++;
    }
    result.visit_counts.push_back(counts);

    // Pairs in visit order (ties toward the smaller id); usually the
    // most-visited pair still has an unemitted type and wins directly.
    std::vector<std::size_t> by_visits(n);
    for (std::size_t i = 0; i < n; ++i) by_visits[i] = i;
    std::stable_sort(by_visits.begin(), by_visits.end(),
                     [&](std::size_t a, std::size_t b) {
                       return counts[a] > counts[b];
                     });

    int node = -1, fault = -1;
    for (std::size_t candidate : by_visits) {
      double best = -1.0;
      int best_type = -1;
      for (int k = 0; k < kFailureTypeCount; ++k) {
        if (emitted.count({static_cast<int>(candidate), k})) continue;
        if (s.rows[candidate][k] > best) {
          best = s.rows[candidate][k];
          best_type = k;
        }
      }
      if (best_type >= 0) {
        node = static_cast<int>(candidate);
        fault = best_type;
        break;
      }
    }
    if (node < 0) break;  // all (pair, type) combinations exhausted

    result.ranked.push_back({node, fault, counts[node]});
    emitted.insert({node, fault});

    s.rows[node][static_cast<int>(StateLabel::Victim)] += s.rows[node][fault];
    s.rows[node][fault] = 0.0;
    q = build_transition_matrix(s);
  }
  return result;
}

}  // namespace nicdiag
