#include "nicdiag/logfeat.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace nicdiag {

std::string LogTemplate::text() const {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out += ' ';
    out += tokens[i];
  }
  return out;
}

namespace {

bool has_digit(const std::string& token) {
  return std::any_of(token.begin(), token.end(),
                     [](unsigned char c) { return std::isdigit(c); });
}

// Tree-level key: parameter-looking tokens share the wildcard branch.
std::string level_key(const std::string& token) {
  return has_digit(token) ? kWildcard : token;
}

}  // namespace

struct DrainParser::Node {
  std::map<std::string, std::unique_ptr<Node>> children;
  std::vector<int> groups;  // template ids stored at this descent depth
};

DrainParser::DrainParser(DrainParams params)
    : params_(params), root_(std::make_unique<Node>()) {
  if (params_.depth < 3) throw ConfigError("drain depth must be >= 3");
}

DrainParser::~DrainParser() = default;
DrainParser::DrainParser(DrainParser&&) noexcept = default;
DrainParser& DrainParser::operator=(DrainParser&&) noexcept = default;

DrainParser::DrainParser(const DrainParser& other)
    : DrainParser(from_templates(other.templates_, other.params_)) {}

DrainParser& DrainParser::operator=(const DrainParser& other) {
  if (this != &other) *this = from_templates(other.templates_, other.params_);
  return *this;
}

namespace {

// Match ratio of a record against a group template. A wildcard in the
// template subsumes any token, which keeps re-parsing a template set a
// fixed point of the parser.
double match_ratio(const std::vector<std::string>& tmpl,
                   const std::vector<std::string>& tokens) {
  std::size_t matches = 0;
  for (std::size_t i = 0; i < tmpl.size(); ++i) {
    if (tmpl[i] == kWildcard || tmpl[i] == tokens[i]) ++matches;
  }
  return static_cast<double>(matches) / static_cast<double>(tmpl.size());
}

}  // namespace

int DrainParser::find_group(const std::vector<std::string>& tokens,
                            bool allow_create, bool update) const {
  auto* self = const_cast<DrainParser*>(this);
  Node* node = self->root_.get();

  std::vector<std::string> keys;
  keys.push_back(std::to_string(tokens.size()));
  const std::size_t token_levels =
      std::min<std::size_t>(params_.depth - 2, tokens.size());
  for (std::size_t i = 0; i < token_levels; ++i) {
    keys.push_back(level_key(tokens[i]));
  }

  for (const std::string& key : keys) {
    auto it = node->children.find(key);
    if (it == node->children.end()) {
      if (!allow_create) return -1;
      it = node->children.emplace(key, std::make_unique<Node>()).first;
    }
    node = it->second.get();
  }

  int best_id = -1;
  double best_ratio = -1.0;
  for (int id : node->groups) {
    const double r = match_ratio(templates_[id].tokens, tokens);
    if (r > best_ratio) {
      best_ratio = r;
      best_id = id;
    }
  }
  if (best_id >= 0 && best_ratio >= params_.sim_threshold) {
    if (update) {
      LogTemplate& t = self->templates_[best_id];
      for (std::size_t i = 0; i < t.tokens.size(); ++i) {
        if (t.tokens[i] != kWildcard && t.tokens[i] != tokens[i]) {
          t.tokens[i] = kWildcard;
        }
      }
      t.example_count++;
    }
    return best_id;
  }

  if (!allow_create) return -1;
  LogTemplate t;
  t.id = static_cast<int>(templates_.size());
  t.tokens = tokens;
  t.example_count = 1;
  self->templates_.push_back(std::move(t));
  node->groups.push_back(self->templates_.back().id);
  return self->templates_.back().id;
}

int DrainParser::add(const std::string& message) {
  const std::vector<std::string> tokens = split_tokens(message);
  if (tokens.empty()) throw ValidationError("cannot parse an empty message");
  return find_group(tokens, /*allow_create=*/true, /*update=*/true);
}

int DrainParser::match(const std::string& message) const {
  const std::vector<std::string> tokens = split_tokens(message);
  if (tokens.empty()) return -1;
  return find_group(tokens, /*allow_create=*/false, /*update=*/false);
}

DrainParser DrainParser::from_templates(
    const std::vector<LogTemplate>& templates, DrainParams params) {
  DrainParser parser(params);
  for (std::size_t i = 0; i < templates.size(); ++i) {
    if (templates[i].id != static_cast<int>(i)) {
      throw ConfigError("template ids must be dense and ordered");
    }
  }
  parser.templates_ = templates;
  for (const LogTemplate& t : parser.templates_) {
    Node* node = parser.root_.get();
    std::vector<std::string> keys;
    keys.push_back(std::to_string(t.tokens.size()));
    const std::size_t token_levels =
        std::min<std::size_t>(params.depth - 2, t.tokens.size());
    for (std::size_t i = 0; i < token_levels; ++i) {
      keys.push_back(level_key(t.tokens[i]));
    }
    for (const std::string& key : keys) {
      auto it = node->children.find(key);
      if (it == node->children.end()) {
        it = node->children.emplace(key, std::make_unique<Node>()).first;
      }
      node = it->second.get();
    }
    node->groups.push_back(t.id);
  }
  return parser;
}

std::pair<std::vector<LogTemplate>, std::vector<int>> parse_templates(
    const std::vector<LogRecord>& records, DrainParams params) {
  DrainParser parser(params);
  std::vector<int> assignment;
  assignment.reserve(records.size());
  for (const LogRecord& r : records) {
    assignment.push_back(parser.add(r.message));
  }
  return {parser.templates(), std::move(assignment)};
}

std::vector<TemplateVector> vectorize_templates(
    const std::vector<LogTemplate>& templates) {
  if (templates.empty()) {
    throw ValidationError("cannot vectorize an empty template set");
  }
  std::map<std::string, int> df;
  for (const LogTemplate& t : templates) {
    std::map<std::string, bool> seen;
    for (const std::string& tok : t.tokens) {
      if (tok == kWildcard) continue;
      if (!seen[tok]) {
        seen[tok] = true;
        df[tok]++;
      }
    }
  }
  const double n = static_cast<double>(templates.size());

  std::vector<TemplateVector> out;
  out.reserve(templates.size());
  for (const LogTemplate& t : templates) {
    TemplateVector v;
    v.template_id = t.id;
    std::map<std::string, int> tf;
    for (const std::string& tok : t.tokens) {
      if (tok != kWildcard) tf[tok]++;
    }
    if (tf.empty()) {
      throw ValidationError("template " + std::to_string(t.id) +
                            " consists only of wildcards");
    }
    for (const auto& [tok, count] : tf) {
      const double idf = std::log(n / df[tok]) + 1.0;
      v.weights[tok] = count * idf;
    }
    out.push_back(std::move(v));
  }
  return out;
}

double cosine_similarity(const TemplateVector& a, const TemplateVector& b) {
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (const auto& [tok, w] : a.weights) {
    na += w * w;
    auto it = b.weights.find(tok);
    if (it != b.weights.end()) dot += w * it->second;
  }
  for (const auto& [tok, w] : b.weights) nb += w * w;
  if (na <= 0.0 || nb <= 0.0) return 0.0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

int LogClusterModel::cluster_of(int template_id) const {
  for (std::size_t c = 0; c < clusters.size(); ++c) {
    if (std::binary_search(clusters[c].begin(), clusters[c].end(), template_id)) {
      return static_cast<int>(c);
    }
  }
  return -1;
}

LogClusterModel cluster_templates(const std::vector<TemplateVector>& vectors,
                                  double distance_threshold) {
  if (vectors.empty()) {
    throw ValidationError("cannot cluster an empty vector set");
  }

  // Work in template-id order so the outcome is independent of input order.
  std::vector<const TemplateVector*> ordered;
  ordered.reserve(vectors.size());
  for (const TemplateVector& v : vectors) ordered.push_back(&v);
  std::sort(ordered.begin(), ordered.end(),
            [](const TemplateVector* a, const TemplateVector* b) {
              return a->template_id < b->template_id;
            });

  const std::size_t n = ordered.size();
  std::map<int, std::size_t> index_of;
  for (std::size_t i = 0; i < n; ++i) index_of[ordered[i]->template_id] = i;

  std::vector<std::vector<double>> dist(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = 1.0 - cosine_similarity(*ordered[i], *ordered[j]);
      dist[i][j] = dist[j][i] = d;
    }
  }

  std::vector<std::vector<int>> clusters;  // member template ids, sorted
  for (std::size_t i = 0; i < n; ++i) clusters.push_back({ordered[i]->template_id});

  LogClusterModel model;
  while (clusters.size() > 1) {
    double best = 1e300;
    std::size_t best_a = 0, best_b = 0;
    std::pair<int, int> best_key{0, 0};
    for (std::size_t a = 0; a < clusters.size(); ++a) {
      for (std::size_t b = a + 1; b < clusters.size(); ++b) {
        double sum = 0.0;
        for (int ta : clusters[a]) {
          for (int tb : clusters[b]) {
            sum += dist[index_of[ta]][index_of[tb]];
          }
        }
        const double avg =
            sum / (static_cast<double>(clusters[a].size()) * clusters[b].size());
        const std::pair<int, int> key{
            std::min(clusters[a].front(), clusters[b].front()),
            std::max(clusters[a].back(), clusters[b].back())};
        if (avg < best - 1e-12 ||
            (std::abs(avg - best) <= 1e-12 && key < best_key)) {
          best = avg;
          best_a = a;
          best_b = b;
          best_key = key;
        }
      }
    }
    if (best > distance_threshold) break;

    model.linkage.push_back(
        {clusters[best_a].front(), clusters[best_b].front(), best});
    std::vector<int> merged = clusters[best_a];
    merged.insert(merged.end(), clusters[best_b].begin(), clusters[best_b].end());
    std::sort(merged.begin(), merged.end());
    clusters.erase(clusters.begin() + best_b);
    clusters[best_a] = std::move(merged);
  }

  std::sort(clusters.begin(), clusters.end(),
            [](const std::vector<int>& a, const std::vector<int>& b) {
              return a.front() < b.front();
            });
  model.clusters = std::move(clusters);
  model.mu.assign(model.clusters.size(), 0.0);
  model.sigma.assign(model.clusters.size(), 0.0);
  return model;
}

void fit_normal_counts(LogClusterModel& model,
                       const std::vector<std::vector<double>>& normal_windows) {
  if (normal_windows.size() < 2) {
    throw TrainingError("fitting normal counts needs at least 2 windows, got " +
                        std::to_string(normal_windows.size()));
  }
  const std::size_t c_count = model.clusters.size();
  for (const auto& w : normal_windows) {
    if (w.size() != c_count) {
      throw ConfigError("normal window count row has wrong cluster dimension");
    }
  }
  model.mu.assign(c_count, 0.0);
  model.sigma.assign(c_count, 0.0);
  const double n = static_cast<double>(normal_windows.size());
  for (std::size_t c = 0; c < c_count; ++c) {
    double mean = 0.0;
    for (const auto& w : normal_windows) mean += w[c];
    mean /= n;
    double var = 0.0;
    for (const auto& w : normal_windows) var += (w[c] - mean) * (w[c] - mean);
    var /= n;  // population variance: normal sets are small
    model.mu[c] = mean;
    model.sigma[c] = std::sqrt(var);
  }
  model.fitted = true;
}

std::vector<int> quantize_counts(const LogClusterModel& model,
                                 const std::vector<double>& window_counts) {
  if (!model.fitted) {
    throw ConfigError("log cluster model has no fitted normal statistics");
  }
  if (window_counts.size() != model.clusters.size()) {
    throw ConfigError("window count row has wrong cluster dimension");
  }
  std::vector<int> bits(window_counts.size(), 0);
  for (std::size_t c = 0; c < window_counts.size(); ++c) {
    if (window_counts[c] > model.mu[c] + 3.0 * model.sigma[c]) bits[c] = 1;
  }
  return bits;
}

std::vector<double> LogFeatureModel::count_clusters(
    const std::vector<LogRecord>& records) const {
  std::vector<double> counts(clusters.cluster_count(), 0.0);
  for (const LogRecord& r : records) {
    const int tid = parser.match(r.message);
    if (tid < 0) continue;
    const int c = clusters.cluster_of(tid);
    if (c >= 0) counts[c] += 1.0;
  }
  return counts;
}

void LogFeatureModel::save(std::ostream& out) const {
  out << "nicdiag-log-model v1\n";
  out << "drain depth " << parser.params().depth << " threshold "
      << format_double(parser.params().sim_threshold) << "\n";
  const auto& templates = parser.templates();
  out << "templates " << templates.size() << "\n";
  for (const LogTemplate& t : templates) {
    out << t.id << ' ' << t.example_count << ' ' << t.tokens.size();
    for (const std::string& tok : t.tokens) out << ' ' << tok;
    out << "\n";
  }
  out << "clusters " << clusters.clusters.size() << "\n";
  for (std::size_t c = 0; c < clusters.clusters.size(); ++c) {
    out << c << ' ' << clusters.clusters[c].size();
    for (int id : clusters.clusters[c]) out << ' ' << id;
    out << "\n";
  }
  out << "linkage " << clusters.linkage.size() << "\n";
  for (const MergeRecord& m : clusters.linkage) {
    out << m.left_rep << ' ' << m.right_rep << ' ' << format_double(m.distance)
        << "\n";
  }
  out << "stats " << (clusters.fitted ? 1 : 0) << "\n";
  for (std::size_t c = 0; c < clusters.clusters.size(); ++c) {
    out << c << ' ' << format_double(clusters.mu[c]) << ' '
        << format_double(clusters.sigma[c]) << "\n";
  }
}

LogFeatureModel LogFeatureModel::load(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "nicdiag-log-model v1") {
    throw ParseError("bad log model header");
  }
  DrainParams params;
  {
    if (!std::getline(in, line)) throw ParseError("truncated log model");
    const auto t = split_tokens(line);
    if (t.size() != 5 || t[0] != "drain") throw ParseError("bad drain line");
    params.depth = std::stoi(t[2]);
    params.sim_threshold = parse_double(t[4]);
  }
  std::vector<LogTemplate> templates;
  {
    if (!std::getline(in, line)) throw ParseError("truncated log model");
    const auto t = split_tokens(line);
    if (t.size() != 2 || t[0] != "templates") throw ParseError("bad templates line");
    const int n = std::stoi(t[1]);
    for (int i = 0; i < n; ++i) {
      if (!std::getline(in, line)) throw ParseError("truncated template list");
      const auto f = split_tokens(line);
      if (f.size() < 3) throw ParseError("bad template line");
      LogTemplate tmpl;
      tmpl.id = std::stoi(f[0]);
      tmpl.example_count = std::stoi(f[1]);
      const std::size_t k = std::stoul(f[2]);
      if (f.size() != 3 + k) throw ParseError("bad template token count");
      tmpl.tokens.assign(f.begin() + 3, f.end());
      templates.push_back(std::move(tmpl));
    }
  }

  LogFeatureModel model{DrainParser::from_templates(templates, params), {}};
  {
    if (!std::getline(in, line)) throw ParseError("truncated log model");
    const auto t = split_tokens(line);
    if (t.size() != 2 || t[0] != "clusters") throw ParseError("bad clusters line");
    const int n = std::stoi(t[1]);
    model.clusters.clusters.resize(n);
    for (int i = 0; i < n; ++i) {
      if (!std::getline(in, line)) throw ParseError("truncated cluster list");
      const auto f = split_tokens(line);
      if (f.size() < 2) throw ParseError("bad cluster line");
      const int cid = std::stoi(f[0]);
      const std::size_t k = std::stoul(f[1]);
      if (f.size() != 2 + k) throw ParseError("bad cluster member count");
      for (std::size_t j = 0; j < k; ++j) {
        model.clusters.clusters[cid].push_back(std::stoi(f[2 + j]));
      }
    }
  }
  {
    if (!std::getline(in, line)) throw ParseError("truncated log model");
    const auto t = split_tokens(line);
    if (t.size() != 2 || t[0] != "linkage") throw ParseError("bad linkage line");
    const int n = std::stoi(t[1]);
    for (int i = 0; i < n; ++i) {
      if (!std::getline(in, line)) throw ParseError("truncated linkage list");
      const auto f = split_tokens(line);
      if (f.size() != 3) throw ParseError("bad linkage line");
      model.clusters.linkage.push_back(
          {std::stoi(f[0]), std::stoi(f[1]), parse_double(f[2])});
    }
  }
  {
    if (!std::getline(in, line)) throw ParseError("truncated log model");
    const auto t = split_tokens(line);
    if (t.size() != 2 || t[0] != "stats") throw ParseError("bad stats line");
    model.clusters.fitted = std::stoi(t[1]) != 0;
    model.clusters.mu.assign(model.clusters.clusters.size(), 0.0);
    model.clusters.sigma.assign(model.clusters.clusters.size(), 0.0);
    for (std::size_t c = 0; c < model.clusters.clusters.size(); ++c) {
      if (!std::getline(in, line)) throw ParseError("truncated stats list");
      const auto f = split_tokens(line);
      if (f.size() != 3) throw ParseError("bad stats line");
      const int cid = std::stoi(f[0]);
      model.clusters.mu[cid] = parse_double(f[1]);
      model.clusters.sigma[cid] = parse_double(f[2]);
    }
  }
  return model;
}

void LogFeatureModel::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write log model: " + path);
  save(out);
}

LogFeatureModel LogFeatureModel::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open log model: " + path);
  return load(in);
}

}  // namespace nicdiag
