#include "nicdiag/fusion.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <sstream>

namespace nicdiag {

FeatureSchema FeatureSchema::build(std::vector<std::string> compute_metrics,
                                   std::vector<std::string> switch_metrics,
                                   int n_log_clusters, FeatureFlags flags) {
  FeatureSchema schema;
  std::sort(compute_metrics.begin(), compute_metrics.end());
  std::sort(switch_metrics.begin(), switch_metrics.end());
  schema.compute_metrics_ = std::move(compute_metrics);
  schema.switch_metrics_ = std::move(switch_metrics);
  schema.n_log_clusters_ = n_log_clusters;
  schema.flags_ = flags;
  schema.rebuild_slots();
  return schema;
}

void FeatureSchema::rebuild_slots() {
  slots_.clear();
  const bool patterns = flags_.metrics && flags_.patterns;
  const bool levels = flags_.metrics && flags_.levels;
  for (EndpointSide side : {EndpointSide::Compute, EndpointSide::Switch}) {
    const auto& metrics =
        side == EndpointSide::Compute ? compute_metrics_ : switch_metrics_;
    for (const std::string& m : metrics) {
      if (patterns) slots_.push_back({SlotKind::Pattern, side, m, -1});
      if (levels) slots_.push_back({SlotKind::Level, side, m, -1});
    }
  }
  if (flags_.logs) {
    for (int c = 0; c < n_log_clusters_; ++c) {
      slots_.push_back({SlotKind::LogCluster, EndpointSide::Compute, "", c});
    }
  }
}

bool FeatureSchema::operator==(const FeatureSchema& other) const {
  return compute_metrics_ == other.compute_metrics_ &&
         switch_metrics_ == other.switch_metrics_ &&
         n_log_clusters_ == other.n_log_clusters_ &&
         flags_.patterns == other.flags_.patterns &&
         flags_.levels == other.flags_.levels &&
         flags_.metrics == other.flags_.metrics &&
         flags_.logs == other.flags_.logs;
}

void FeatureSchema::save(std::ostream& out) const {
  out << "nicdiag-feature-schema v1\n";
  out << "flags patterns=" << (flags_.patterns ? 1 : 0)
      << " levels=" << (flags_.levels ? 1 : 0)
      << " metrics=" << (flags_.metrics ? 1 : 0)
      << " logs=" << (flags_.logs ? 1 : 0) << "\n";
  out << "compute_metrics " << compute_metrics_.size();
  for (const std::string& m : compute_metrics_) out << ' ' << m;
  out << "\n";
  out << "switch_metrics " << switch_metrics_.size();
  for (const std::string& m : switch_metrics_) out << ' ' << m;
  out << "\n";
  out << "log_clusters " << n_log_clusters_ << "\n";
}

FeatureSchema FeatureSchema::load(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "nicdiag-feature-schema v1") {
    throw ParseError("bad feature schema header");
  }
  FeatureSchema schema;
  if (!std::getline(in, line)) throw ParseError("truncated schema");
  {
    const auto t = split_tokens(line);
    if (t.size() != 5 || t[0] != "flags") throw ParseError("bad schema flags");
    auto flag = [](const std::string& s) {
      return s.substr(s.find('=') + 1) == "1";
    };
    schema.flags_.patterns = flag(t[1]);
    schema.flags_.levels = flag(t[2]);
    schema.flags_.metrics = flag(t[3]);
    schema.flags_.logs = flag(t[4]);
  }
  for (int side = 0; side < 2; ++side) {
    if (!std::getline(in, line)) throw ParseError("truncated schema");
    const auto t = split_tokens(line);
    if (t.size() < 2) throw ParseError("bad schema metric list");
    const std::size_t n = std::stoul(t[1]);
    if (t.size() != 2 + n) throw ParseError("bad schema metric count");
    auto& target = side == 0 ? schema.compute_metrics_ : schema.switch_metrics_;
    target.assign(t.begin() + 2, t.end());
  }
  if (!std::getline(in, line)) throw ParseError("truncated schema");
  {
    const auto t = split_tokens(line);
    if (t.size() != 2 || t[0] != "log_clusters") {
      throw ParseError("bad schema log cluster line");
    }
    schema.n_log_clusters_ = std::stoi(t[1]);
  }
  schema.rebuild_slots();
  return schema;
}

void FeatureSchema::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write schema: " + path);
  save(out);
}

FeatureSchema FeatureSchema::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open schema: " + path);
  return load(in);
}

double similarity(const NicPairFeatureVector& a, const NicPairFeatureVector& b) {
  if (a.symbols.size() != b.symbols.size()) {
    throw ConfigError("similarity requires equal feature dimensions: " +
                      std::to_string(a.symbols.size()) + " vs " +
                      std::to_string(b.symbols.size()));
  }
  if (a.symbols.empty()) {
    throw ConfigError("similarity is undefined for zero-dimension vectors");
  }
  std::size_t matches = 0;
  for (std::size_t i = 0; i < a.symbols.size(); ++i) {
    if (a.symbols[i] == b.symbols[i]) ++matches;
  }
  return static_cast<double>(matches) / static_cast<double>(a.symbols.size());
}

void NormalSampleLibrary::save(std::ostream& out) const {
  out << "nicdiag-normal-library v1\n";
  const std::size_t dim = samples.empty() ? 0 : samples.front().symbols.size();
  out << "dimension " << dim << " samples " << samples.size() << "\n";
  for (const NicPairFeatureVector& v : samples) {
    out << v.pair_id << ' ' << v.window_id;
    for (Symbol s : v.symbols) out << ' ' << static_cast<int>(s);
    out << "\n";
  }
}

NormalSampleLibrary NormalSampleLibrary::load(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "nicdiag-normal-library v1") {
    throw ParseError("bad library header");
  }
  if (!std::getline(in, line)) throw ParseError("truncated library");
  const auto t = split_tokens(line);
  if (t.size() != 4 || t[0] != "dimension") throw ParseError("bad library size line");
  const std::size_t dim = std::stoul(t[1]);
  const std::size_t count = std::stoul(t[3]);

  NormalSampleLibrary lib;
  for (std::size_t i = 0; i < count; ++i) {
    if (!std::getline(in, line)) throw ParseError("truncated library");
    const auto f = split_tokens(line);
    if (f.size() != 2 + dim) throw ParseError("bad library row");
    NicPairFeatureVector v;
    v.pair_id = std::stoi(f[0]);
    v.window_id = f[1];
    v.symbols.reserve(dim);
    for (std::size_t j = 0; j < dim; ++j) {
      v.symbols.push_back(static_cast<Symbol>(std::stoi(f[2 + j])));
    }
    lib.samples.push_back(std::move(v));
  }
  return lib;
}

void NormalSampleLibrary::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write library: " + path);
  save(out);
}

NormalSampleLibrary NormalSampleLibrary::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open library: " + path);
  return load(in);
}

AnomalyVector compress(const NicPairFeatureVector& v,
                       const NormalSampleLibrary& library) {
  if (library.samples.empty()) {
    throw ConfigError(
        "normal sample library is empty; populate it with failure-free "
        "feature vectors before compressing");
  }
  std::size_t best = 0;
  double best_sim = -1.0;
  for (std::size_t i = 0; i < library.samples.size(); ++i) {
    const double s = similarity(v, library.samples[i]);
    if (s > best_sim) {  // ties keep the smallest index
      best_sim = s;
      best = i;
    }
  }
  const NicPairFeatureVector& ref = library.samples[best];
  AnomalyVector out;
  out.pair_id = v.pair_id;
  out.bits.resize(v.symbols.size());
  for (std::size_t i = 0; i < v.symbols.size(); ++i) {
    out.bits[i] = v.symbols[i] != ref.symbols[i] ? 1 : 0;
  }
  return out;
}

namespace {

double slice_mean(const SeriesSlice& s) {
  if (s.diffs.empty()) return 0.0;
  return std::accumulate(s.diffs.begin(), s.diffs.end(), 0.0) / s.diffs.size();
}

const SeriesSlice* find_slice(const PairSlice& ps, EndpointSide side,
                              const std::string& metric) {
  const auto& m = side == EndpointSide::Compute ? ps.compute : ps.switch_side;
  auto it = m.find(metric);
  return it == m.end() ? nullptr : &it->second;
}

}  // namespace

std::map<int, NicPairFeatureVector> featurize_window(
    const Window& window, const FeatureSchema& schema,
    const PatternModel* pattern_model, const LogFeatureModel* log_model,
    const std::string& window_id) {
  bool needs_pattern = false, needs_level = false, needs_logs = false;
  for (const SlotDef& slot : schema.slots()) {
    needs_pattern |= slot.kind == SlotKind::Pattern;
    needs_level |= slot.kind == SlotKind::Level;
    needs_logs |= slot.kind == SlotKind::LogCluster;
  }
  if (needs_pattern && pattern_model == nullptr) {
    throw ConfigError("schema has pattern slots but no pattern model given");
  }
  if (needs_logs && log_model == nullptr) {
    throw ConfigError("schema has log slots but no log model given");
  }
  if (log_model != nullptr &&
      static_cast<int>(log_model->clusters.cluster_count()) <
          schema.log_cluster_count()) {
    throw ConfigError("log model clusters do not cover the schema's slots");
  }

  // Level symbols compare the same metric across devices, so compute all
  // cross-device means first.
  std::map<std::pair<int, std::string>, std::map<std::string, LevelSymbol>>
      levels;  // (side, metric) -> device key -> symbol
  if (needs_level) {
    for (EndpointSide side : {EndpointSide::Compute, EndpointSide::Switch}) {
      const auto& metrics = side == EndpointSide::Compute
                                ? schema.compute_metrics()
                                : schema.switch_metrics();
      for (const std::string& metric : metrics) {
        std::map<std::string, double> means;
        for (const auto& [pair_id, ps] : window.pairs) {
          const SeriesSlice* s = find_slice(ps, side, metric);
          if (s != nullptr && !s->empty()) {
            means[std::to_string(pair_id)] = slice_mean(*s);
          }
        }
        levels[{static_cast<int>(side), metric}] = level_symbols(means);
      }
    }
  }

  std::map<int, NicPairFeatureVector> out;
  for (const auto& [pair_id, ps] : window.pairs) {
    NicPairFeatureVector v;
    v.pair_id = pair_id;
    v.window_id = window_id;
    v.symbols.reserve(schema.dimension());

    std::vector<double> log_counts;
    if (needs_logs) log_counts = log_model->count_clusters(ps.logs);

    for (const SlotDef& slot : schema.slots()) {
      switch (slot.kind) {
        case SlotKind::Pattern: {
          const SeriesSlice* s = find_slice(ps, slot.side, slot.metric);
          if (s == nullptr || s->empty()) {
            v.symbols.push_back(kAbsentSymbol);
          } else {
            v.symbols.push_back(
                static_cast<Symbol>(pattern_model->classify(s->diffs)));
          }
          break;
        }
        case SlotKind::Level: {
          const SeriesSlice* s = find_slice(ps, slot.side, slot.metric);
          if (s == nullptr || s->empty()) {
            v.symbols.push_back(kAbsentSymbol);
          } else {
            const auto& sym_map =
                levels[{static_cast<int>(slot.side), slot.metric}];
            auto it = sym_map.find(std::to_string(pair_id));
            v.symbols.push_back(it == sym_map.end()
                                    ? kAbsentSymbol
                                    : static_cast<Symbol>(it->second));
          }
          break;
        }
        case SlotKind::LogCluster: {
          const bool anomalous =
              quantize_counts(log_model->clusters, log_counts)[slot.cluster_id];
          v.symbols.push_back(anomalous ? 1 : 0);
          break;
        }
      }
    }
    out.emplace(pair_id, std::move(v));
  }
  return out;
}

NicPairFeatureVector build_feature_vector(int pair_id, const Window& window,
                                          const FeatureSchema& schema,
                                          const PatternModel* pattern_model,
                                          const LogFeatureModel* log_model,
                                          const std::string& window_id) {
  auto all = featurize_window(window, schema, pattern_model, log_model, window_id);
  auto it = all.find(pair_id);
  if (it == all.end()) {
    throw ConfigError("pair " + std::to_string(pair_id) + " not in window");
  }
  return std::move(it->second);
}

}  // namespace nicdiag
