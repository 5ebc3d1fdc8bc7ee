#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "nicdiag/telemetry.hpp"

using namespace nicdiag;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("nicdiag_telem_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

Topology small_topology() {
  Topology t;
  t.entries.push_back({"server1", "NIC1", "switch1", "100GE/1"});
  t.entries.push_back({"server2", "NIC1", "switch1", "100GE/2"});
  return t;
}

}  // namespace

TEST_CASE("two rows of one series load as one series of length 2") {
  TempDir tmp;
  const auto file = tmp.path / "metrics.csv";
  std::ofstream(file)
      << "timestamp,owner_kind,owner_id,nic_or_port,metric,value\n"
         "60,compute,server1,NIC1,rx_packets_phy,100\n"
         "120,compute,server1,NIC1,rx_packets_phy,140\n";
  const MetricStore store = load_metrics(file.string(), small_topology());
  const EndpointKey key{EndpointSide::Compute, "server1", "NIC1"};
  const MetricSeries* s = store.find(key, "rx_packets_phy");
  REQUIRE(s != nullptr);
  CHECK(s->timestamps == std::vector<std::int64_t>{60, 120});
  CHECK(s->values == std::vector<std::int64_t>{100, 140});
}

TEST_CASE("unknown owners are a validation error naming them") {
  TempDir tmp;
  const auto file = tmp.path / "metrics.csv";
  std::ofstream(file)
      << "timestamp,owner_kind,owner_id,nic_or_port,metric,value\n"
         "60,compute,ghost,NIC1,rx_packets_phy,1\n";
  try {
    load_metrics(file.string(), small_topology());
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("ghost") != std::string::npos);
  }
}

TEST_CASE("non-monotone timestamps are rejected") {
  TempDir tmp;
  const auto file = tmp.path / "metrics.csv";
  std::ofstream(file)
      << "timestamp,owner_kind,owner_id,nic_or_port,metric,value\n"
         "120,compute,server1,NIC1,rx_packets_phy,140\n"
         "60,compute,server1,NIC1,rx_packets_phy,100\n";
  CHECK_THROWS_AS(load_metrics(file.string(), small_topology()),
                  ValidationError);
}

TEST_CASE("176 metrics per endpoint are accepted") {
  MetricStore store;
  const EndpointKey key{EndpointSide::Compute, "server1", "NIC1"};
  for (int m = 0; m < 176; ++m) {
    store.add_sample(key, "metric_" + std::to_string(m), 60, 1);
    store.add_sample(key, "metric_" + std::to_string(m), 120, 2);
  }
  CHECK(store.metric_names(EndpointSide::Compute).size() == 176);
}

TEST_CASE("logs load as tab-separated records") {
  TempDir tmp;
  const auto file = tmp.path / "logs.tsv";
  std::ofstream(file) << "60\tserver1\tERROR\tCRC Error detected on port 3\n"
                         "90\tserver2\tINFO\tjob heartbeat step 1\n";
  const auto logs = load_logs(file.string());
  REQUIRE(logs.size() == 2);
  CHECK(logs[0].level == LogLevel::Error);
  CHECK(logs[0].message == "CRC Error detected on port 3");
  CHECK(logs[1].node == "server2");
}

TEST_CASE("window slicing differences counters inside the window") {
  const Topology t = small_topology();
  const auto pairs = derive_nic_pairs(t);
  MetricStore store;
  const EndpointKey key{EndpointSide::Compute, "server1", "NIC1"};
  const std::vector<std::int64_t> values{10, 14, 14, 30};
  for (std::size_t i = 0; i < values.size(); ++i) {
    store.add_sample(key, "m", static_cast<std::int64_t>(i) * 60, values[i]);
  }
  const Window w = slice_windows(store, {}, pairs, 0, 3600);
  const SeriesSlice& slice = w.pairs.at(0).compute.at("m");
  CHECK(slice.diffs == std::vector<double>{4.0, 0.0, 16.0});
  CHECK_FALSE(slice.reset_flagged);
}

TEST_CASE("one-per-minute series in a one-hour window gives 59 diffs") {
  const Topology t = small_topology();
  const auto pairs = derive_nic_pairs(t);
  MetricStore store;
  const EndpointKey key{EndpointSide::Compute, "server1", "NIC1"};
  for (int i = 0; i <= 60; ++i) {
    store.add_sample(key, "m", static_cast<std::int64_t>(i) * 60, i);
  }
  const Window w = slice_windows(store, {}, pairs, 0, 3600);
  // Samples at t = 0..3540 fall inside [0, 3600): 60 raw samples.
  CHECK(w.pairs.at(0).compute.at("m").diffs.size() == 59);
}

TEST_CASE("window before all data leaves slices empty") {
  const Topology t = small_topology();
  const auto pairs = derive_nic_pairs(t);
  MetricStore store;
  const EndpointKey key{EndpointSide::Compute, "server1", "NIC1"};
  store.add_sample(key, "m", 7200, 10);
  store.add_sample(key, "m", 7260, 12);
  const Window w = slice_windows(store, {}, pairs, 0, 3600);
  CHECK(w.pairs.at(0).compute.at("m").empty());
}

TEST_CASE("counter resets clamp to zero and flag the slice") {
  const Topology t = small_topology();
  const auto pairs = derive_nic_pairs(t);
  MetricStore store;
  const EndpointKey key{EndpointSide::Compute, "server1", "NIC1"};
  const std::vector<std::int64_t> values{100, 150, 20, 40};
  for (std::size_t i = 0; i < values.size(); ++i) {
    store.add_sample(key, "m", static_cast<std::int64_t>(i) * 60, values[i]);
  }
  const Window w = slice_windows(store, {}, pairs, 0, 3600);
  const SeriesSlice& slice = w.pairs.at(0).compute.at("m");
  CHECK(slice.diffs == std::vector<double>{50.0, 0.0, 20.0});
  CHECK(slice.reset_flagged);
}

TEST_CASE("differencing a non-decreasing counter is non-negative") {
  std::mt19937_64 rng(7);
  const Topology t = small_topology();
  const auto pairs = derive_nic_pairs(t);
  for (int trial = 0; trial < 50; ++trial) {
    MetricStore store;
    const EndpointKey key{EndpointSide::Compute, "server1", "NIC1"};
    std::int64_t acc = 0;
    for (int i = 0; i < 30; ++i) {
      acc += static_cast<std::int64_t>(uniform_index(rng, 100));
      store.add_sample(key, "m", static_cast<std::int64_t>(i) * 60, acc);
    }
    const Window w = slice_windows(store, {}, pairs, 0, 1800);
    for (double d : w.pairs.at(0).compute.at("m").diffs) CHECK(d >= 0.0);
  }
}

TEST_CASE("logs attach to the pair's compute node within the window") {
  const Topology t = small_topology();
  const auto pairs = derive_nic_pairs(t);
  std::vector<LogRecord> logs = {
      {100, "server1", LogLevel::Info, "inside"},
      {4000, "server1", LogLevel::Info, "outside"},
      {200, "server2", LogLevel::Info, "other node"},
  };
  const Window w = slice_windows({}, logs, pairs, 0, 3600);
  REQUIRE(w.pairs.at(0).logs.size() == 1);
  CHECK(w.pairs.at(0).logs[0].message == "inside");
  REQUIRE(w.pairs.at(1).logs.size() == 1);
  CHECK(w.pairs.at(1).logs[0].message == "other node");
}

TEST_CASE("window slicing is pure") {
  const Topology t = small_topology();
  const auto pairs = derive_nic_pairs(t);
  MetricStore store;
  const EndpointKey key{EndpointSide::Compute, "server1", "NIC1"};
  for (int i = 0; i < 10; ++i) {
    store.add_sample(key, "m", static_cast<std::int64_t>(i) * 60, i * i);
  }
  const Window a = slice_windows(store, {}, pairs, 0, 600);
  const Window b = slice_windows(store, {}, pairs, 0, 600);
  CHECK(a.pairs.at(0).compute.at("m").diffs ==
        b.pairs.at(0).compute.at("m").diffs);
}

TEST_CASE("metrics save/load round trip") {
  TempDir tmp;
  MetricStore store;
  const EndpointKey c{EndpointSide::Compute, "server1", "NIC1"};
  const EndpointKey s{EndpointSide::Switch, "switch1", "100GE/2"};
  store.add_sample(c, "m1", 60, 5);
  store.add_sample(c, "m1", 120, 9);
  store.add_sample(s, "m2", 60, 1);
  const auto file = tmp.path / "metrics.csv";
  save_metrics(store, file.string());
  const MetricStore loaded = load_metrics(file.string(), small_topology());
  REQUIRE(loaded.find(c, "m1") != nullptr);
  CHECK(loaded.find(c, "m1")->values == std::vector<std::int64_t>{5, 9});
  REQUIRE(loaded.find(s, "m2") != nullptr);
}
