#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "nicdiag/topology.hpp"

namespace nicdiag {

enum class EndpointSide { Compute, Switch };

const char* to_string(EndpointSide side);
EndpointSide endpoint_side_from_string(const std::string& s);

/// Identifies one side of a NIC pair: the NIC on a compute node, or the
/// port on a switch.
struct EndpointKey {
  EndpointSide side = EndpointSide::Compute;
  std::string owner;  // node id or switch id
  std::string port;   // nic id or switch port id

  auto operator<=>(const EndpointKey&) const = default;
};

/// Cumulative counter samples for one (endpoint, metric).
struct MetricSeries {
  EndpointKey owner;
  std::string metric;
  std::vector<std::int64_t> timestamps;  // strictly increasing, seconds
  std::vector<std::int64_t> values;      // non-negative cumulative counts
};

class MetricStore {
 public:
  /// Appends one sample, keeping per-series timestamp order validated.
  void add_sample(const EndpointKey& owner, const std::string& metric,
                  std::int64_t timestamp, std::int64_t value);

  const MetricSeries* find(const EndpointKey& owner,
                           const std::string& metric) const;
  const std::map<std::pair<EndpointKey, std::string>, MetricSeries>& all() const {
    return series_;
  }

  /// Replaces one series' values in place; timestamps stay untouched.
  void replace_values(const EndpointKey& owner, const std::string& metric,
                      std::vector<std::int64_t> values);

  /// Sorted distinct metric names seen on the given side.
  std::vector<std::string> metric_names(EndpointSide side) const;

 private:
  std::map<std::pair<EndpointKey, std::string>, MetricSeries> series_;
};

enum class LogLevel { Info, Warn, Error };

const char* to_string(LogLevel level);
LogLevel log_level_from_string(const std::string& s);

struct LogRecord {
  std::int64_t timestamp = 0;
  std::string node;
  LogLevel level = LogLevel::Info;
  std::string message;
};

/// CSV with header timestamp,owner_kind,owner_id,nic_or_port,metric,value.
/// Owners must resolve against the topology; per-series timestamps must be
/// strictly increasing; values must be non-negative.
MetricStore load_metrics(const std::string& path, const Topology& topology);
void save_metrics(const MetricStore& store, const std::string& path);

/// Tab-separated lines: timestamp, node, level, message.
std::vector<LogRecord> load_logs(const std::string& path);
void save_logs(const std::vector<LogRecord>& logs, const std::string& path);

/// Counter deltas for one (endpoint, metric) restricted to a window.
struct SeriesSlice {
  std::vector<double> diffs;   // value[i] - value[i-1] inside the window
  bool reset_flagged = false;  // a raw decrease was clamped to 0

  bool empty() const { return diffs.empty(); }
};

struct PairSlice {
  std::map<std::string, SeriesSlice> compute;      // metric -> slice
  std::map<std::string, SeriesSlice> switch_side;  // metric -> slice
  std::vector<LogRecord> logs;                     // compute node's records
};

struct Window {
  std::int64_t start = 0;
  std::int64_t length = 3600;
  std::map<int, PairSlice> pairs;  // pair id -> slices
};

/// Restricts every series and the compute-node logs to [start, start+length)
/// and differences the counters. Series with fewer than two in-window
/// samples come back empty.
Window slice_windows(const MetricStore& metrics,
                     const std::vector<LogRecord>& logs,
                     const std::vector<NicPair>& pairs, std::int64_t start,
                     std::int64_t length);

}  // namespace nicdiag
