#include "nicdiag/forest.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

namespace nicdiag {

const char* to_string(StateLabel s) {
  switch (s) {
    case StateLabel::F1: return "F1";
    case StateLabel::F2: return "F2";
    case StateLabel::F3: return "F3";
    case StateLabel::F4: return "F4";
    case StateLabel::F5: return "F5";
    case StateLabel::F6: return "F6";
    case StateLabel::F7: return "F7";
    case StateLabel::Victim: return "Victim";
    case StateLabel::Normal: return "Normal";
  }
  return "Normal";
}

StateLabel state_label_from_string(const std::string& s) {
  for (int i = 0; i < kStateCount; ++i) {
    if (s == to_string(static_cast<StateLabel>(i))) {
      return static_cast<StateLabel>(i);
    }
  }
  throw ParseError("unknown state label: '" + s + "'");
}

std::string failure_type_name(int type_index) {
  if (type_index < 0 || type_index >= kFailureTypeCount) {
    throw ConfigError("failure type index out of range: " +
                      std::to_string(type_index));
  }
  return "F" + std::to_string(type_index + 1);
}

namespace {

double gini(const std::array<double, kStateCount>& counts, double total) {
  if (total <= 0.0) return 0.0;
  double g = 1.0;
  for (double c : counts) {
    const double p = c / total;
    g -= p * p;
  }
  return g;
}

}  // namespace

void ForestModel::grow(Tree& tree, int node_index,
                       const std::vector<std::vector<std::uint8_t>>& x,
                       const std::vector<int>& y,
                       std::vector<std::size_t>& rows, int min_leaf,
                       std::mt19937_64& rng) {
  std::array<double, kStateCount> counts{};
  for (std::size_t r : rows) counts[y[r]] += 1.0;
  tree.nodes[node_index].counts = counts;

  const double total = static_cast<double>(rows.size());
  const double node_gini = gini(counts, total);
  const bool pure = node_gini <= 0.0;
  if (pure || rows.size() < 2 * static_cast<std::size_t>(min_leaf)) {
    return;  // leaf; counts already stored
  }

  const std::size_t dim = x.front().size();
  const std::size_t mtry = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::sqrt(static_cast<double>(dim))));

  // Partial Fisher-Yates over feature indices.
  std::vector<std::size_t> features(dim);
  std::iota(features.begin(), features.end(), 0);
  for (std::size_t i = 0; i < mtry; ++i) {
    const std::size_t j = i + uniform_index(rng, dim - i);
    std::swap(features[i], features[j]);
  }
  std::sort(features.begin(), features.begin() + mtry);  // tie-break order

  int best_feature = -1;
  double best_impurity = node_gini;
  for (std::size_t fi = 0; fi < mtry; ++fi) {
    const std::size_t f = features[fi];
    std::array<double, kStateCount> left{}, right{};
    double n_left = 0.0, n_right = 0.0;
    for (std::size_t r : rows) {
      if (x[r][f] == 0) {
        left[y[r]] += 1.0;
        n_left += 1.0;
      } else {
        right[y[r]] += 1.0;
        n_right += 1.0;
      }
    }
    if (n_left < min_leaf || n_right < min_leaf) continue;
    const double impurity =
        (n_left * gini(left, n_left) + n_right * gini(right, n_right)) / total;
    if (impurity < best_impurity - 1e-12) {
      best_impurity = impurity;
      best_feature = static_cast<int>(f);
    }
  }
  if (best_feature < 0) return;  // no valid improving split

  std::vector<std::size_t> left_rows, right_rows;
  for (std::size_t r : rows) {
    (x[r][best_feature] == 0 ? left_rows : right_rows).push_back(r);
  }
  rows.clear();
  rows.shrink_to_fit();

  tree.nodes[node_index].feature = best_feature;
  tree.nodes[node_index].left = static_cast<int>(tree.nodes.size());
  tree.nodes.emplace_back();
  tree.nodes[node_index].right = static_cast<int>(tree.nodes.size());
  tree.nodes.emplace_back();
  grow(tree, tree.nodes[node_index].left, x, y, left_rows, min_leaf, rng);
  grow(tree, tree.nodes[node_index].right, x, y, right_rows, min_leaf, rng);
}

ForestModel ForestModel::train(const std::vector<std::vector<std::uint8_t>>& x,
                               const std::vector<StateLabel>& y,
                               std::uint64_t seed, ForestParams params) {
  if (x.empty() || x.size() != y.size()) {
    throw TrainingError("forest training needs matching non-empty x/y");
  }
  const std::size_t dim = x.front().size();
  if (dim == 0) throw TrainingError("forest features have zero dimension");
  for (const auto& row : x) {
    if (row.size() != dim) {
      throw TrainingError("forest training rows have mixed dimensions");
    }
  }
  std::set<int> classes;
  std::vector<int> labels(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    labels[i] = static_cast<int>(y[i]);
    classes.insert(labels[i]);
  }
  if (classes.size() < 2) {
    throw TrainingError("forest training needs at least 2 classes, got " +
                        std::to_string(classes.size()));
  }

  ForestModel model;
  model.dimension_ = dim;
  model.seed_ = seed;
  model.trees_.resize(params.n_trees);

  // votes[i] accumulates out-of-bag leaf frequencies for sample i.
  std::vector<std::array<double, kStateCount>> oob_votes(
      x.size(), std::array<double, kStateCount>{});
  std::vector<int> oob_count(x.size(), 0);

  for (int t = 0; t < params.n_trees; ++t) {
    std::mt19937_64 rng(seed + static_cast<std::uint64_t>(t));
    std::vector<std::size_t> rows;
    rows.reserve(x.size());
    std::vector<bool> inbag(x.size(), false);
    for (std::size_t i = 0; i < x.size(); ++i) {
      const std::size_t pick = uniform_index(rng, x.size());
      rows.push_back(pick);
      inbag[pick] = true;
    }
    Tree& tree = model.trees_[t];
    tree.nodes.emplace_back();
    grow(tree, 0, x, labels, rows, params.min_leaf, rng);

    for (std::size_t i = 0; i < x.size(); ++i) {
      if (inbag[i]) continue;
      int node = 0;
      while (tree.nodes[node].feature >= 0) {
        node = x[i][tree.nodes[node].feature] == 0 ? tree.nodes[node].left
                                                   : tree.nodes[node].right;
      }
      double total = 0.0;
      for (double c : tree.nodes[node].counts) total += c;
      for (int c = 0; c < kStateCount; ++c) {
        oob_votes[i][c] += tree.nodes[node].counts[c] / total;
      }
      oob_count[i]++;
    }
  }

  std::size_t evaluated = 0, correct = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (oob_count[i] == 0) continue;
    ++evaluated;
    int best = 0;
    for (int c = 1; c < kStateCount; ++c) {
      if (oob_votes[i][c] > oob_votes[i][best]) best = c;
    }
    if (best == labels[i]) ++correct;
  }
  model.oob_accuracy_ =
      evaluated == 0 ? 0.0 : static_cast<double>(correct) / evaluated;
  return model;
}

StateProbabilityRow ForestModel::predict_row(
    const std::vector<std::uint8_t>& x) const {
  if (x.size() != dimension_) {
    throw ConfigError("prediction dimension " + std::to_string(x.size()) +
                      " does not match training dimension " +
                      std::to_string(dimension_));
  }
  StateProbabilityRow row{};
  for (const Tree& tree : trees_) {
    int node = 0;
    while (tree.nodes[node].feature >= 0) {
      node = x[tree.nodes[node].feature] == 0 ? tree.nodes[node].left
                                              : tree.nodes[node].right;
    }
    double total = 0.0;
    for (double c : tree.nodes[node].counts) total += c;
    for (int c = 0; c < kStateCount; ++c) {
      row[c] += tree.nodes[node].counts[c] / total;
    }
  }
  for (double& v : row) v /= static_cast<double>(trees_.size());
  return row;
}

StateProbabilityMatrix predict_states(const ForestModel& model,
                                      const std::vector<AnomalyVector>& vectors) {
  std::vector<const AnomalyVector*> ordered;
  ordered.reserve(vectors.size());
  for (const AnomalyVector& v : vectors) ordered.push_back(&v);
  std::sort(ordered.begin(), ordered.end(),
            [](const AnomalyVector* a, const AnomalyVector* b) {
              return a->pair_id < b->pair_id;
            });
  StateProbabilityMatrix s;
  s.rows.reserve(ordered.size());
  for (const AnomalyVector* v : ordered) {
    s.rows.push_back(model.predict_row(v->bits));
  }
  return s;
}

void ForestModel::save(std::ostream& out) const {
  out << "nicdiag-forest v1\n";
  out << "trees " << trees_.size() << " dimension " << dimension_ << " seed "
      << seed_ << " oob " << format_double(oob_accuracy_) << "\n";
  for (std::size_t t = 0; t < trees_.size(); ++t) {
    out << "tree " << t << " nodes " << trees_[t].nodes.size() << "\n";
    for (const Node& n : trees_[t].nodes) {
      out << n.feature << ' ' << n.left << ' ' << n.right;
      for (double c : n.counts) out << ' ' << format_double(c);
      out << "\n";
    }
  }
}

ForestModel ForestModel::load(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "nicdiag-forest v1") {
    throw ParseError("bad forest header");
  }
  ForestModel model;
  if (!std::getline(in, line)) throw ParseError("truncated forest");
  {
    const auto t = split_tokens(line);
    if (t.size() != 8 || t[0] != "trees") throw ParseError("bad forest size line");
    model.trees_.resize(std::stoul(t[1]));
    model.dimension_ = std::stoul(t[3]);
    model.seed_ = std::stoull(t[5]);
    model.oob_accuracy_ = parse_double(t[7]);
  }
  for (std::size_t t = 0; t < model.trees_.size(); ++t) {
    if (!std::getline(in, line)) throw ParseError("truncated forest");
    const auto h = split_tokens(line);
    if (h.size() != 4 || h[0] != "tree") throw ParseError("bad tree header");
    const std::size_t n_nodes = std::stoul(h[3]);
    model.trees_[t].nodes.resize(n_nodes);
    for (std::size_t i = 0; i < n_nodes; ++i) {
      if (!std::getline(in, line)) throw ParseError("truncated tree");
      const auto f = split_tokens(line);
      if (f.size() != 3 + kStateCount) throw ParseError("bad tree node line");
      Node& n = model.trees_[t].nodes[i];
      n.feature = std::stoi(f[0]);
      n.left = std::stoi(f[1]);
      n.right = std::stoi(f[2]);
      for (int c = 0; c < kStateCount; ++c) {
        n.counts[c] = parse_double(f[3 + c]);
      }
    }
  }
  return model;
}

void ForestModel::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write forest: " + path);
  save(out);
}

ForestModel ForestModel::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open forest: " + path);
  return load(in);
}

}  // namespace nicdiag
