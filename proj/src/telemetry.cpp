#include "nicdiag/telemetry.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace nicdiag {

const char* to_string(EndpointSide side) {
  return side == EndpointSide::Compute ? "compute" : "switch";
}

EndpointSide endpoint_side_from_string(const std::string& s) {
  if (s == "compute") return EndpointSide::Compute;
  if (s == "switch") return EndpointSide::Switch;
  throw ParseError("unknown owner_kind: '" + s + "'");
}

const char* to_string(LogLevel level) {
  switch (level) {
    case LogLevel::Info: return "INFO";
    case LogLevel::Warn: return "WARN";
    case LogLevel::Error: return "ERROR";
  }
  return "INFO";
}

LogLevel log_level_from_string(const std::string& s) {
  if (s == "INFO") return LogLevel::Info;
  if (s == "WARN") return LogLevel::Warn;
  if (s == "ERROR") return LogLevel::Error;
  throw ParseError("unknown log level: '" + s + "'");
}

void MetricStore::add_sample(const EndpointKey& owner, const std::string& metric,
                             std::int64_t timestamp, std::int64_t value) {
  if (value < 0) {
    throw ValidationError("negative counter value for metric " + metric);
  }
  MetricSeries& s = series_[{owner, metric}];
  if (s.timestamps.empty()) {
    s.owner = owner;
    s.metric = metric;
  } else if (timestamp <= s.timestamps.back()) {
    throw ValidationError("non-monotone timestamps for (" + owner.owner + ", " +
                          owner.port + ", " + metric + ") at t=" +
                          std::to_string(timestamp));
  }
  s.timestamps.push_back(timestamp);
  s.values.push_back(value);
}

const MetricSeries* MetricStore::find(const EndpointKey& owner,
                                      const std::string& metric) const {
  auto it = series_.find({owner, metric});
  return it == series_.end() ? nullptr : &it->second;
}

void MetricStore::replace_values(const EndpointKey& owner,
                                 const std::string& metric,
                                 std::vector<std::int64_t> values) {
  auto it = series_.find({owner, metric});
  if (it == series_.end()) {
    throw ValidationError("no such series to replace: " + metric);
  }
  if (values.size() != it->second.timestamps.size()) {
    throw ValidationError("replacement series has wrong length for " + metric);
  }
  for (std::int64_t v : values) {
    if (v < 0) throw ValidationError("negative counter value for " + metric);
  }
  it->second.values = std::move(values);
}

std::vector<std::string> MetricStore::metric_names(EndpointSide side) const {
  std::set<std::string> names;
  for (const auto& [key, s] : series_) {
    if (key.first.side == side) names.insert(key.second);
  }
  return {names.begin(), names.end()};
}

namespace {

std::int64_t parse_int(const std::string& s, const std::string& context) {
  try {
    std::size_t pos = 0;
    std::int64_t v = std::stoll(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ParseError(context + ": not an integer: '" + s + "'");
  }
}

}  // namespace

MetricStore load_metrics(const std::string& path, const Topology& topology) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open metrics file: " + path);

  std::set<std::pair<std::string, std::string>> compute_nics;
  std::set<std::pair<std::string, std::string>> switch_ports;
  for (const TopologyEntry& e : topology.entries) {
    compute_nics.insert({e.node, e.nic});
    switch_ports.insert({e.link, e.link_port});
  }

  MetricStore store;
  std::set<std::string> unknown_owners;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (lineno == 1 && line.rfind("timestamp,", 0) == 0) continue;
    const std::vector<std::string> f = split_on(line, ',');
    const std::string context = path + ":" + std::to_string(lineno);
    if (f.size() != 6) {
      throw ParseError(context + ": expected 6 fields, got " +
                       std::to_string(f.size()));
    }
    EndpointKey owner;
    owner.side = endpoint_side_from_string(f[1]);
    owner.owner = f[2];
    owner.port = f[3];
    const bool known =
        owner.side == EndpointSide::Compute
            ? compute_nics.count({owner.owner, owner.port}) > 0
            : switch_ports.count({owner.owner, owner.port}) > 0;
    if (!known) {
      unknown_owners.insert(f[1] + ":" + f[2] + ":" + f[3]);
      continue;
    }
    store.add_sample(owner, f[4], parse_int(f[0], context),
                     parse_int(f[5], context));
  }
  if (!unknown_owners.empty()) {
    std::string msg = "metrics file " + path + ": unknown owners:";
    for (const std::string& o : unknown_owners) msg += " " + o;
    throw ValidationError(msg);
  }
  return store;
}

void save_metrics(const MetricStore& store, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write metrics file: " + path);
  out << "timestamp,owner_kind,owner_id,nic_or_port,metric,value\n";
  for (const auto& [key, s] : store.all()) {
    for (std::size_t i = 0; i < s.timestamps.size(); ++i) {
      out << s.timestamps[i] << ',' << to_string(s.owner.side) << ','
          << s.owner.owner << ',' << s.owner.port << ',' << s.metric << ','
          << s.values[i] << '\n';
    }
  }
}

std::vector<LogRecord> load_logs(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open logs file: " + path);
  std::vector<LogRecord> logs;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const std::vector<std::string> f = split_on(line, '\t');
    const std::string context = path + ":" + std::to_string(lineno);
    if (f.size() != 4) {
      throw ParseError(context + ": expected 4 tab-separated fields");
    }
    LogRecord r;
    r.timestamp = parse_int(f[0], context);
    r.node = f[1];
    r.level = log_level_from_string(f[2]);
    r.message = f[3];
    if (r.message.empty()) throw ParseError(context + ": empty message");
    logs.push_back(std::move(r));
  }
  return logs;
}

void save_logs(const std::vector<LogRecord>& logs, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write logs file: " + path);
  for (const LogRecord& r : logs) {
    out << r.timestamp << '\t' << r.node << '\t' << to_string(r.level) << '\t'
        << r.message << '\n';
  }
}

namespace {

SeriesSlice slice_series(const MetricSeries& s, std::int64_t start,
                         std::int64_t end) {
  auto lo = std::lower_bound(s.timestamps.begin(), s.timestamps.end(), start);
  auto hi = std::lower_bound(s.timestamps.begin(), s.timestamps.end(), end);
  const std::size_t first = lo - s.timestamps.begin();
  const std::size_t count = hi - lo;

  SeriesSlice slice;
  if (count < 2) return slice;  // too few samples to difference
  slice.diffs.reserve(count - 1);
  for (std::size_t i = first + 1; i < first + count; ++i) {
    const std::int64_t d = s.values[i] - s.values[i - 1];
    if (d < 0) {
      // Counter reset/wrap: a negative delta is never real traffic.
      slice.diffs.push_back(0.0);
      slice.reset_flagged = true;
    } else {
      slice.diffs.push_back(static_cast<double>(d));
    }
  }
  return slice;
}

}  // namespace

Window slice_windows(const MetricStore& metrics,
                     const std::vector<LogRecord>& logs,
                     const std::vector<NicPair>& pairs, std::int64_t start,
                     std::int64_t length) {
  if (length <= 0) throw ConfigError("window length must be positive");
  const std::int64_t end = start + length;

  Window window;
  window.start = start;
  window.length = length;
  for (const NicPair& p : pairs) {
    PairSlice ps;
    const EndpointKey compute{EndpointSide::Compute, p.compute_node,
                              p.compute_nic};
    const EndpointKey sw{EndpointSide::Switch, p.switch_name, p.switch_port};
    for (const auto& [key, s] : metrics.all()) {
      if (key.first == compute) {
        ps.compute[key.second] = slice_series(s, start, end);
      } else if (key.first == sw) {
        ps.switch_side[key.second] = slice_series(s, start, end);
      }
    }
    for (const LogRecord& r : logs) {
      if (r.node == p.compute_node && r.timestamp >= start && r.timestamp < end) {
        ps.logs.push_back(r);
      }
    }
    window.pairs.emplace(p.id, std::move(ps));
  }
  return window;
}

}  // namespace nicdiag
