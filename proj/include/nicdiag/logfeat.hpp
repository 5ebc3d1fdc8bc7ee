#pragma once

#include <iosfwd>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "nicdiag/telemetry.hpp"

namespace nicdiag {

inline constexpr const char* kWildcard = "<*>";

struct LogTemplate {
  int id = 0;
  std::vector<std::string> tokens;  // kWildcard marks parameter positions
  int example_count = 0;

  std::string text() const;
};

struct DrainParams {
  int depth = 4;              // tree depth incl. root and leaf levels
  double sim_threshold = 0.4; // token-match ratio needed to join a group
};

/// Fixed-depth-tree log template miner. Groups are keyed first by token
/// count, then by leading tokens (digit-bearing tokens take the wildcard
/// branch); within a leaf a record joins the best group whose match ratio
/// clears the threshold, and mismatching positions become wildcards.
class DrainParser {
 public:
  explicit DrainParser(DrainParams params = {});
  DrainParser(const DrainParser& other);
  DrainParser& operator=(const DrainParser& other);
  DrainParser(DrainParser&&) noexcept;
  DrainParser& operator=(DrainParser&&) noexcept;
  ~DrainParser();

  /// Learns from one message; returns the template id it joined or created.
  int add(const std::string& message);

  /// Match-only lookup: returns the best template id, or -1 if nothing
  /// clears the threshold. Never mutates the tree.
  int match(const std::string& message) const;

  const std::vector<LogTemplate>& templates() const { return templates_; }
  const DrainParams& params() const { return params_; }

  /// Rebuilds a parser whose groups are exactly the given templates.
  static DrainParser from_templates(const std::vector<LogTemplate>& templates,
                                    DrainParams params = {});

 private:
  struct Node;
  int find_group(const std::vector<std::string>& tokens, bool allow_create,
                 bool update) const;

  DrainParams params_;
  std::unique_ptr<Node> root_;
  std::vector<LogTemplate> templates_;
};

/// Mines templates from records; also returns each record's template id.
std::pair<std::vector<LogTemplate>, std::vector<int>> parse_templates(
    const std::vector<LogRecord>& records, DrainParams params = {});

/// Sparse token-weight vector for one template (TF-IDF over the template
/// corpus, wildcard excluded).
struct TemplateVector {
  int template_id = 0;
  std::map<std::string, double> weights;
};

std::vector<TemplateVector> vectorize_templates(
    const std::vector<LogTemplate>& templates);

double cosine_similarity(const TemplateVector& a, const TemplateVector& b);

struct MergeRecord {
  int left_rep = 0;   // smallest template id in the left cluster
  int right_rep = 0;  // smallest template id in the right cluster
  double distance = 0.0;
};

/// Agglomerative grouping of template vectors plus per-cluster count
/// statistics under normal operation.
class LogClusterModel {
 public:
  std::vector<std::vector<int>> clusters;  // cluster id -> sorted template ids
  std::vector<MergeRecord> linkage;
  std::vector<double> mu;     // per-cluster normal mean count
  std::vector<double> sigma;  // per-cluster normal population stddev
  bool fitted = false;

  int cluster_of(int template_id) const;  // -1 when unknown
  std::size_t cluster_count() const { return clusters.size(); }
};

/// Average-linkage agglomeration over cosine distance; merging stops once
/// the smallest inter-cluster distance exceeds the threshold.
LogClusterModel cluster_templates(const std::vector<TemplateVector>& vectors,
                                  double distance_threshold = 0.5);

/// Records per-cluster mean/stddev of counts over failure-free windows.
/// Needs at least two windows; rows are indexed by cluster id.
void fit_normal_counts(LogClusterModel& model,
                       const std::vector<std::vector<double>>& normal_windows);

/// 0/1 symbol per cluster: 1 iff count > mu + 3*sigma.
std::vector<int> quantize_counts(const LogClusterModel& model,
                                 const std::vector<double>& window_counts);

/// Trained log feature extractor: template miner plus cluster model.
struct LogFeatureModel {
  DrainParser parser;
  LogClusterModel clusters;

  /// Per-cluster record counts for a batch of in-window records.
  std::vector<double> count_clusters(const std::vector<LogRecord>& records) const;

  void save(std::ostream& out) const;
  static LogFeatureModel load(std::istream& in);
  void save(const std::string& path) const;
  static LogFeatureModel load_file(const std::string& path);
};

}  // namespace nicdiag
