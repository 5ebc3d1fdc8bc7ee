#include "nicdiag/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace nicdiag {

namespace fs = std::filesystem;

const std::vector<WorkloadProfile>& builtin_profiles() {
  static const std::vector<WorkloadProfile> profiles = {
      {"wrf", 600.0, 40000.0, 80000.0, 3000.0, true},
      {"grapes", 900.0, 60000.0, 100000.0, 5000.0, true},
      {"qe", 400.0, 25000.0, 60000.0, 2500.0, true},
      {"gromacs", 450.0, 50000.0, 120000.0, 8000.0, true},
      {"lammps", 1200.0, 15000.0, 40000.0, 2000.0, false},
      {"openfoam", 720.0, 35000.0, 90000.0, 4000.0, true},
  };
  return profiles;
}

const WorkloadProfile& profile_by_name(const std::string& name) {
  for (const WorkloadProfile& p : builtin_profiles()) {
    if (p.name == name) return p;
  }
  throw ConfigError("unknown workload profile: '" + name + "'");
}

std::vector<std::string> simulated_compute_metrics() {
  auto names = simulated_switch_metrics();
  names.push_back("rx_out_of_buffer");  // NIC-driver counter, no switch analogue
  std::sort(names.begin(), names.end());
  return names;
}

std::vector<std::string> simulated_switch_metrics() {
  return {"rx_bytes_phy",     "rx_crc_errors_phy", "rx_discards_phy",
          "rx_packets_phy",   "rx_prio_discards",  "rx_prio_pause",
          "tx_bytes_phy",     "tx_discards_phy",   "tx_packets_phy",
          "tx_prio_discards", "tx_prio_pause"};
}

double nominal_rate_per_min(const WorkloadProfile& profile,
                            const std::string& metric) {
  if (metric == "tx_packets_phy" || metric == "rx_packets_phy") {
    return profile.baseline_rate + 0.5 * profile.burst_amplitude;
  }
  if (metric == "tx_bytes_phy" || metric == "rx_bytes_phy") {
    return 1000.0 * (profile.baseline_rate + 0.5 * profile.burst_amplitude);
  }
  if (metric == "tx_prio_pause" || metric == "rx_prio_pause") return 60.0;
  if (metric == "tx_discards_phy" || metric == "rx_discards_phy") return 20.0;
  if (metric == "tx_prio_discards" || metric == "rx_prio_discards") return 15.0;
  if (metric == "rx_crc_errors_phy") return 10.0;
  if (metric == "rx_out_of_buffer") return 20.0;
  throw ConfigError("no nominal rate for metric: " + metric);
}

double device_rate_factor(int pair_id) {
  // Persistent per-device rate personality: real NICs never run at
  // identical rates, and stable cross-device ordering keeps the boxplot
  // level symbols quiet under normal operation. Pair 0 is exactly 1.0.
  const double phi = 0.61803398874989485;
  return 1.0 + 0.3 * std::fmod(static_cast<double>(pair_id) * phi, 1.0);
}

Topology generate_cluster(int n_compute, int n_switch, std::uint64_t seed) {
  (void)seed;  // layout is fully determined; seed kept for interface parity
  if (n_compute < 1 || n_switch < 1) {
    throw ConfigError("cluster needs at least one compute node and one switch");
  }
  int width = 1;
  for (int v = n_compute; v >= 10; v /= 10) ++width;

  Topology t;
  std::vector<int> next_port(n_switch, 1);
  for (int i = 0; i < n_compute; ++i) {
    const int sw = i % n_switch;
    std::string index = std::to_string(i + 1);
    index.insert(index.begin(), width - index.size(), '0');
    TopologyEntry e;
    e.node = "server" + index;
    e.nic = "NIC1";
    e.link = "switch" + std::to_string(sw + 1);
    e.link_port = "100GE/" + std::to_string(next_port[sw]++);
    t.entries.push_back(std::move(e));
  }
  t.validate();
  return t;
}

namespace {

struct MinuteRates {
  double base = 0.0;   // constant part
  double noise = 0.0;  // gaussian std
  bool bursty = false; // add the profile's square-wave bursts
};

MinuteRates rates_for(const WorkloadProfile& profile, const std::string& metric,
                      bool active, double personality) {
  const double scale = personality * (active ? 1.0 : 0.25);
  const double noise_scale = active ? 1.0 : 0.5;
  if (metric == "tx_packets_phy" || metric == "rx_packets_phy") {
    return {profile.baseline_rate * scale, profile.noise_std * noise_scale,
            active};
  }
  if (metric == "tx_prio_pause" || metric == "rx_prio_pause") {
    return {60.0 * personality, 4.0, false};
  }
  if (metric == "tx_discards_phy" || metric == "rx_discards_phy") {
    return {20.0 * personality, 2.0, false};
  }
  if (metric == "tx_prio_discards" || metric == "rx_prio_discards") {
    return {15.0 * personality, 2.0, false};
  }
  if (metric == "rx_crc_errors_phy") return {10.0 * personality, 1.5, false};
  if (metric == "rx_out_of_buffer") return {20.0 * personality, 2.0, false};
  throw ConfigError("no rate model for metric: " + metric);
}

std::vector<std::int64_t> cumulative(const std::vector<std::int64_t>& increments) {
  std::vector<std::int64_t> values;
  values.reserve(increments.size() + 1);
  std::int64_t acc = 0;
  values.push_back(acc);
  for (std::int64_t inc : increments) {
    acc += inc;
    values.push_back(acc);
  }
  return values;
}

}  // namespace

TelemetryBundle generate_baseline(const Topology& topology,
                                  const WorkloadProfile& profile,
                                  std::int64_t horizon_s, std::uint64_t seed,
                                  const std::vector<int>& active_pairs) {
  if (horizon_s < 120) {
    throw ConfigError("horizon must cover at least two sampling intervals");
  }
  TelemetryBundle bundle;
  bundle.topology = topology;
  bundle.pairs = derive_nic_pairs(topology);
  bundle.horizon = horizon_s;
  if (active_pairs.empty()) {
    for (const NicPair& p : bundle.pairs) bundle.active_pairs.push_back(p.id);
  } else {
    bundle.active_pairs = active_pairs;
    std::sort(bundle.active_pairs.begin(), bundle.active_pairs.end());
  }

  const std::size_t minutes = static_cast<std::size_t>(horizon_s / 60);

  for (const NicPair& pair : bundle.pairs) {
    const bool active =
        std::binary_search(bundle.active_pairs.begin(),
                           bundle.active_pairs.end(), pair.id);
    for (EndpointSide side : {EndpointSide::Compute, EndpointSide::Switch}) {
      const EndpointKey key =
          side == EndpointSide::Compute
              ? EndpointKey{side, pair.compute_node, pair.compute_nic}
              : EndpointKey{side, pair.switch_name, pair.switch_port};
      const auto metrics = side == EndpointSide::Compute
                               ? simulated_compute_metrics()
                               : simulated_switch_metrics();
      std::mt19937_64 rng(mix_seed(
          seed, 7919ULL * static_cast<std::uint64_t>(pair.id) +
                    (side == EndpointSide::Switch ? 3571ULL : 0ULL)));

      // Packets first: the bytes counters track their packet counterpart.
      std::vector<std::string> generation_order = {"rx_packets_phy",
                                                   "tx_packets_phy"};
      for (const std::string& metric : metrics) {
        if (metric != "rx_packets_phy" && metric != "tx_packets_phy") {
          generation_order.push_back(metric);
        }
      }

      std::map<std::string, std::vector<std::int64_t>> inc_by_metric;
      for (const std::string& metric : generation_order) {
        std::vector<std::int64_t> inc(minutes, 0);
        const bool is_bytes =
            metric == "tx_bytes_phy" || metric == "rx_bytes_phy";
        if (is_bytes) {
          const auto& packets =
              inc_by_metric[metric == "tx_bytes_phy" ? "tx_packets_phy"
                                                     : "rx_packets_phy"];
          for (std::size_t m = 0; m < minutes; ++m) {
            // Bytes track the packet counter with a jittered frame size.
            const double size = 1000.0 + 50.0 * gaussian(rng);
            inc[m] = std::max<std::int64_t>(
                0, std::llround(static_cast<double>(packets[m]) *
                                std::max(200.0, size)));
          }
        } else {
          const MinuteRates r =
              rates_for(profile, metric, active, device_rate_factor(pair.id));
          for (std::size_t m = 0; m < minutes; ++m) {
            double v = r.base + r.noise * gaussian(rng);
            if (r.bursty) {
              const double phase = std::fmod(static_cast<double>(m) * 60.0,
                                             profile.burst_period_s);
              if (phase < profile.burst_period_s / 2.0) {
                v += profile.burst_amplitude * device_rate_factor(pair.id);
              }
            }
            inc[m] = std::max<std::int64_t>(0, std::llround(v));
          }
        }
        const std::vector<std::int64_t> values = cumulative(inc);
        for (std::size_t i = 0; i < values.size(); ++i) {
          bundle.metrics.add_sample(key, metric,
                                    static_cast<std::int64_t>(i) * 60,
                                    values[i]);
        }
        inc_by_metric[metric] = std::move(inc);
      }
    }
  }

  // Routine INFO logs per compute node: fixed cadences with a small drop
  // probability, so per-window counts are stable under normal operation.
  struct InfoTemplate {
    std::int64_t period;
    const char* fmt;  // %a, %b replaced with small integers
  };
  const std::vector<InfoTemplate> info_templates = {
      {300, "job heartbeat step %a completed in %b ms"},
      {450, "collective barrier sync rank %a epoch %b"},
      {600, "nic stats poll cycle %a ok"},
  };
  for (const NicPair& pair : bundle.pairs) {
    std::mt19937_64 rng(mix_seed(seed, 104729ULL + pair.id));
    for (const InfoTemplate& t : info_templates) {
      long step = 0;
      for (std::int64_t ts = 0; ts < horizon_s; ts += t.period, ++step) {
        if (uniform01(rng) < 0.02) continue;  // occasional missed emission
        std::string msg = t.fmt;
        auto substitute = [&](const std::string& tag, long value) {
          const auto pos = msg.find(tag);
          if (pos != std::string::npos) {
            msg.replace(pos, tag.size(), std::to_string(value));
          }
        };
        substitute("%a", step);
        substitute("%b", static_cast<long>(uniform_index(rng, 900) + 50));
        bundle.logs.push_back({ts + static_cast<std::int64_t>(uniform_index(rng, 30)),
                               pair.compute_node, LogLevel::Info, msg});
      }
    }
  }
  std::stable_sort(bundle.logs.begin(), bundle.logs.end(),
                   [](const LogRecord& a, const LogRecord& b) {
                     return a.timestamp < b.timestamp;
                   });
  return bundle;
}

namespace {

void scale_series(MetricStore& store, const EndpointKey& key,
                  const std::string& metric, std::int64_t from, std::int64_t to,
                  double factor) {
  const MetricSeries* found = store.find(key, metric);
  if (found == nullptr) return;

  std::vector<std::int64_t> values = found->values;
  std::vector<std::int64_t> inc(values.size(), 0);
  for (std::size_t i = 1; i < values.size(); ++i) {
    inc[i] = values[i] - values[i - 1];
    // The increment ending at timestamps[i] covers (t[i-1], t[i]].
    if (found->timestamps[i] > from && found->timestamps[i] <= to) {
      inc[i] = std::max<std::int64_t>(
          0, std::llround(static_cast<double>(inc[i]) * factor));
    }
  }
  std::int64_t acc = values[0];
  for (std::size_t i = 1; i < values.size(); ++i) {
    acc += inc[i];
    values[i] = acc;
  }
  store.replace_values(key, metric, std::move(values));
}

void add_failure_logs(TelemetryBundle& bundle, const std::string& node,
                      const char* fmt, std::int64_t onset, std::int64_t until,
                      double intensity, std::int64_t duration,
                      std::mt19937_64& rng) {
  if (intensity <= 1.0) return;
  const double duration_min = static_cast<double>(duration) / 60.0;
  const long count =
      1 + poisson(rng, 0.08 * (intensity - 1.0) * duration_min);
  for (long i = 0; i < count; ++i) {
    const std::int64_t span = std::max<std::int64_t>(1, until - onset);
    const std::int64_t ts =
        onset + (span * i) / count +
        static_cast<std::int64_t>(uniform_index(rng, 50));
    std::string msg = fmt;
    auto substitute = [&](const std::string& tag, long value) {
      const auto pos = msg.find(tag);
      if (pos != std::string::npos) {
        msg.replace(pos, tag.size(), std::to_string(value));
      }
    };
    substitute("%a", static_cast<long>(uniform_index(rng, 32)));
    substitute("%b", static_cast<long>(uniform_index(rng, 5000) + 1));
    bundle.logs.push_back(
        {std::min(ts, until - 1), node, LogLevel::Error, msg});
  }
}

}  // namespace

LabeledSample inject_failure(TelemetryBundle bundle, const InjectionSpec& spec,
                             std::uint64_t seed) {
  if (spec.failure_type < 0 || spec.failure_type >= kFailureTypeCount) {
    throw ConfigError("failure type out of range");
  }
  if (spec.intensity < 1.0) {
    throw ConfigError("intensity must be >= 1");
  }
  if (spec.onset < 0 || spec.onset + spec.duration > bundle.horizon) {
    throw ConfigError("injection interval exceeds the generated horizon");
  }
  const NicPair* culprit = nullptr;
  for (const NicPair& p : bundle.pairs) {
    if (p.id == spec.culprit_pair) culprit = &p;
  }
  if (culprit == nullptr) {
    throw ValidationError("culprit pair " + std::to_string(spec.culprit_pair) +
                          " is not in the topology");
  }
  std::vector<int> job = spec.job_pairs;
  if (job.empty()) job = bundle.active_pairs;
  std::sort(job.begin(), job.end());
  if (!std::binary_search(job.begin(), job.end(), spec.culprit_pair)) {
    throw ValidationError("culprit pair must belong to the job");
  }

  const std::int64_t from = spec.onset;
  const std::int64_t to = spec.onset + spec.duration;
  const double i_factor = spec.intensity;
  const double victim_pause = std::max(1.0, 0.5 * spec.intensity);
  const double traffic_damp = 1.0 / (1.0 + 0.3 * (spec.intensity - 1.0));
  const double tx_dip = std::max(0.5, 1.0 - 0.03 * (spec.intensity - 1.0));

  const EndpointKey c_nic{EndpointSide::Compute, culprit->compute_node,
                          culprit->compute_nic};
  const EndpointKey c_port{EndpointSide::Switch, culprit->switch_name,
                           culprit->switch_port};
  std::mt19937_64 rng(mix_seed(seed, 15485863ULL));

  switch (spec.failure_type) {
    case 0:  // F1: corrupted packets at the culprit NIC
      scale_series(bundle.metrics, c_nic, "rx_crc_errors_phy", from, to, i_factor);
      add_failure_logs(bundle, culprit->compute_node,
                       "CRC Error detected on port %a count %b", from, to,
                       spec.intensity, spec.duration, rng);
      break;
    case 1:  // F2: outbound pause storm from the culprit NIC
      scale_series(bundle.metrics, c_nic, "tx_prio_pause", from, to, i_factor);
      break;
    case 2:  // F3: restricted switch port pressures the whole job
      scale_series(bundle.metrics, c_port, "rx_prio_pause", from, to, i_factor);
      break;
    case 3:  // F4: transmit queue stalls; traffic dips, logs tell the story
      scale_series(bundle.metrics, c_nic, "tx_packets_phy", from, to, tx_dip);
      scale_series(bundle.metrics, c_nic, "tx_bytes_phy", from, to, tx_dip);
      add_failure_logs(bundle, culprit->compute_node,
                       "Tx Timeout on queue %a reset issued", from, to,
                       spec.intensity, spec.duration, rng);
      break;
    case 4:  // F5: pause parameter mismatch hits both ends of the link
      scale_series(bundle.metrics, c_nic, "rx_prio_discards", from, to, i_factor);
      scale_series(bundle.metrics, c_port, "rx_prio_discards", from, to, i_factor);
      break;
    case 5:  // F6: switch-side pause handling disabled
      scale_series(bundle.metrics, c_port, "rx_discards_phy", from, to, i_factor);
      break;
    case 6:  // F7: node-side pause handling disabled
      scale_series(bundle.metrics, c_nic, "tx_discards_phy", from, to, i_factor);
      break;
    default:
      break;
  }

  // Backpressure propagates to the rest of the job at reduced strength.
  for (const NicPair& p : bundle.pairs) {
    if (p.id == spec.culprit_pair) continue;
    if (!std::binary_search(job.begin(), job.end(), p.id)) continue;
    const EndpointKey v_nic{EndpointSide::Compute, p.compute_node, p.compute_nic};
    scale_series(bundle.metrics, v_nic, "rx_prio_pause", from, to, victim_pause);
    if (spec.failure_type == 2) {
      const EndpointKey v_port{EndpointSide::Switch, p.switch_name, p.switch_port};
      for (const char* m : {"tx_packets_phy", "rx_packets_phy", "tx_bytes_phy",
                            "rx_bytes_phy"}) {
        scale_series(bundle.metrics, v_nic, m, from, to, traffic_damp);
        scale_series(bundle.metrics, v_port, m, from, to, traffic_damp);
      }
    }
  }

  std::stable_sort(bundle.logs.begin(), bundle.logs.end(),
                   [](const LogRecord& a, const LogRecord& b) {
                     return a.timestamp < b.timestamp;
                   });

  LabeledSample sample;
  sample.failure_type = spec.failure_type;
  sample.culprit_pair = spec.culprit_pair;
  sample.window_length = bundle.horizon;
  sample.labels.assign(bundle.pairs.size(), StateLabel::Normal);
  for (int id : job) {
    sample.labels[id] = StateLabel::Victim;
  }
  sample.labels[spec.culprit_pair] = static_cast<StateLabel>(spec.failure_type);
  sample.telemetry = std::move(bundle);
  return sample;
}

std::vector<LabeledSample> generate_corpus(
    const Topology& topology, const WorkloadProfile& profile,
    const std::array<int, kFailureTypeCount>& counts_per_type, int normal_count,
    std::int64_t window_length, std::uint64_t seed) {
  if (normal_count < 0) throw ConfigError("normal sample count must be >= 0");
  for (int c : counts_per_type) {
    if (c < 0) throw ConfigError("per-type sample counts must be >= 0");
  }
  const std::vector<NicPair> pairs = derive_nic_pairs(topology);
  if (pairs.empty()) throw ConfigError("topology has no NIC pairs");

  std::array<int, kFailureTypeCount> counts = counts_per_type;
  if (!profile.supports_f5_f7) {
    counts[4] = 0;  // F5
    counts[6] = 0;  // F7
  }

  std::vector<LabeledSample> samples;
  std::size_t index = 0;
  auto next_sample = [&](int failure_type) {
    std::mt19937_64 rng(mix_seed(seed, index));

    // Job membership: most of the cluster participates.
    std::vector<int> ids;
    for (const NicPair& p : pairs) ids.push_back(p.id);
    for (std::size_t i = ids.size(); i > 1; --i) {
      std::swap(ids[i - 1], ids[uniform_index(rng, i)]);
    }
    const std::size_t job_size = std::max<std::size_t>(
        2, static_cast<std::size_t>(std::llround(0.75 * ids.size())));
    std::vector<int> job(ids.begin(),
                         ids.begin() + std::min(job_size, ids.size()));
    std::sort(job.begin(), job.end());

    TelemetryBundle bundle = generate_baseline(
        topology, profile, window_length, mix_seed(seed, 500000 + index), job);

    LabeledSample sample;
    if (failure_type < 0) {
      sample.failure_type = -1;
      sample.culprit_pair = -1;
      sample.labels.assign(pairs.size(), StateLabel::Normal);
      sample.telemetry = std::move(bundle);
      sample.window_length = window_length;
    } else {
      InjectionSpec spec;
      spec.failure_type = failure_type;
      spec.culprit_pair = job[uniform_index(rng, job.size())];
      const std::int64_t total_min = window_length / 60;
      const std::int64_t onset_min =
          5 + static_cast<std::int64_t>(uniform_index(
                  rng, static_cast<std::size_t>(std::max<std::int64_t>(
                           1, total_min / 3))));
      // Leave a baseline tail so the fault reads as a shape, not a scale.
      const std::int64_t max_dur = total_min - onset_min - 6;
      const std::int64_t dur_min =
          std::max<std::int64_t>(15, max_dur / 3) +
          static_cast<std::int64_t>(uniform_index(
              rng, static_cast<std::size_t>(
                       std::max<std::int64_t>(1, max_dur - max_dur / 3))));
      spec.onset = onset_min * 60;
      spec.duration = std::max<std::int64_t>(
                          10, std::min(dur_min, max_dur)) * 60;
      spec.intensity = 6.0 + 6.0 * uniform01(rng);
      spec.job_pairs = job;
      sample = inject_failure(std::move(bundle), spec,
                              mix_seed(seed, 900000 + index));
      sample.window_length = window_length;
    }
    char id[16];
    std::snprintf(id, sizeof(id), "s%04zu", index);
    sample.id = id;
    sample.profile = profile.name;
    sample.window_start = 0;
    samples.push_back(std::move(sample));
    ++index;
  };

  for (int type = 0; type < kFailureTypeCount; ++type) {
    for (int i = 0; i < counts[type]; ++i) next_sample(type);
  }
  for (int i = 0; i < normal_count; ++i) next_sample(-1);
  return samples;
}

void write_corpus(const std::string& dir, const Topology& topology,
                  const std::vector<LabeledSample>& samples) {
  fs::create_directories(fs::path(dir) / "samples");
  save_topology(topology, (fs::path(dir) / "topology.json").string());

  std::ofstream manifest(fs::path(dir) / "samples.csv");
  if (!manifest) throw ParseError("cannot write corpus manifest");
  manifest << "sample_id,profile,window_start,window_length\n";
  std::ofstream labels(fs::path(dir) / "labels.csv");
  if (!labels) throw ParseError("cannot write corpus labels");
  labels << "sample_id,pair_id,label,failure_type\n";

  for (const LabeledSample& s : samples) {
    manifest << s.id << ',' << s.profile << ',' << s.window_start << ','
             << s.window_length << "\n";
    for (std::size_t pair_id = 0; pair_id < s.labels.size(); ++pair_id) {
      const StateLabel label = s.labels[pair_id];
      std::string kind = "normal";
      std::string type;
      if (label == StateLabel::Victim) {
        kind = "victim";
      } else if (label != StateLabel::Normal) {
        kind = "culprit";
        type = failure_type_name(static_cast<int>(label));
      }
      labels << s.id << ',' << pair_id << ',' << kind << ',' << type << "\n";
    }
    const fs::path sample_dir = fs::path(dir) / "samples" / s.id;
    fs::create_directories(sample_dir);
    save_metrics(s.telemetry.metrics, (sample_dir / "metrics.csv").string());
    save_logs(s.telemetry.logs, (sample_dir / "logs.tsv").string());
  }
}

Corpus read_corpus(const std::string& dir) {
  Corpus corpus;
  corpus.dir = dir;
  corpus.topology = load_topology((fs::path(dir) / "topology.json").string());
  corpus.pairs = derive_nic_pairs(corpus.topology);

  std::map<std::string, CorpusSampleRef> by_id;
  std::vector<std::string> order;
  {
    std::ifstream in(fs::path(dir) / "samples.csv");
    if (!in) throw ParseError("cannot open corpus manifest in " + dir);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (line.empty() || lineno == 1) continue;
      const auto f = split_on(line, ',');
      if (f.size() != 4) throw ParseError("bad manifest row: " + line);
      CorpusSampleRef ref;
      ref.id = f[0];
      ref.profile = f[1];
      ref.window_start = std::stoll(f[2]);
      ref.window_length = std::stoll(f[3]);
      ref.metrics_path = (fs::path(dir) / "samples" / ref.id / "metrics.csv").string();
      ref.logs_path = (fs::path(dir) / "samples" / ref.id / "logs.tsv").string();
      order.push_back(ref.id);
      by_id.emplace(ref.id, std::move(ref));
    }
  }
  {
    std::ifstream in(fs::path(dir) / "labels.csv");
    if (!in) throw ParseError("cannot open corpus labels in " + dir);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (line.empty() || lineno == 1) continue;
      const auto f = split_on(line, ',');
      if (f.size() != 4) throw ParseError("bad labels row: " + line);
      auto it = by_id.find(f[0]);
      if (it == by_id.end()) {
        throw ValidationError("labels.csv mentions unknown sample " + f[0]);
      }
      const int pair_id = std::stoi(f[1]);
      StateLabel label = StateLabel::Normal;
      if (f[2] == "victim") {
        label = StateLabel::Victim;
      } else if (f[2] == "culprit") {
        label = state_label_from_string(f[3]);
        it->second.failure_type = static_cast<int>(label);
        it->second.culprit_pair = pair_id;
      } else if (f[2] != "normal") {
        throw ParseError("unknown label kind: " + f[2]);
      }
      it->second.labels[pair_id] = label;
    }
  }
  for (const std::string& id : order) {
    corpus.samples.push_back(std::move(by_id[id]));
  }
  return corpus;
}

}  // namespace nicdiag
