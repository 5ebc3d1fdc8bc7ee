#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "nicdiag/topology.hpp"

using namespace nicdiag;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("nicdiag_topo_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("single-entry topology loads and yields one pair") {
  TempDir tmp;
  const auto file = tmp.path / "topology.json";
  std::ofstream(file) << R"([{"node": "server1", "nic": "NIC1",
                             "link": "switch1", "link_port": "100GE/18"}])";
  const Topology t = load_topology(file.string());
  REQUIRE(t.entries.size() == 1);
  CHECK(t.entries[0].node == "server1");
  CHECK(t.entries[0].link_port == "100GE/18");

  const auto pairs = derive_nic_pairs(t);
  REQUIRE(pairs.size() == 1);
  CHECK(pairs[0].id == 0);
  CHECK(pairs[0].compute_node == "server1");
  CHECK(pairs[0].switch_name == "switch1");
}

TEST_CASE("empty topology yields zero pairs") {
  TempDir tmp;
  const auto file = tmp.path / "topology.json";
  std::ofstream(file) << "[]";
  const Topology t = load_topology(file.string());
  CHECK(t.entries.empty());
  CHECK(derive_nic_pairs(t).empty());
}

TEST_CASE("duplicate switch port is rejected") {
  Topology t;
  t.entries.push_back({"server1", "NIC1", "switch1", "100GE/1"});
  t.entries.push_back({"server2", "NIC1", "switch1", "100GE/1"});
  CHECK_THROWS_AS(t.validate(), ValidationError);
}

TEST_CASE("duplicate compute NIC is rejected") {
  Topology t;
  t.entries.push_back({"server1", "NIC1", "switch1", "100GE/1"});
  t.entries.push_back({"server1", "NIC1", "switch1", "100GE/2"});
  CHECK_THROWS_AS(t.validate(), ValidationError);
}

TEST_CASE("malformed records are parse errors") {
  TempDir tmp;
  const auto file = tmp.path / "topology.json";

  SUBCASE("not an array") {
    std::ofstream(file) << R"({"node": "x"})";
    CHECK_THROWS_AS(load_topology(file.string()), ParseError);
  }
  SUBCASE("missing field") {
    std::ofstream(file) << R"([{"node": "server1", "nic": "NIC1"}])";
    CHECK_THROWS_AS(load_topology(file.string()), ParseError);
  }
  SUBCASE("wrong field type") {
    std::ofstream(file)
        << R"([{"node": 3, "nic": "a", "link": "b", "link_port": "c"}])";
    CHECK_THROWS_AS(load_topology(file.string()), ParseError);
  }
}

TEST_CASE("pairs are ordered by (node, nic) with dense ids") {
  // 16 entries inserted in scrambled order.
  Topology t;
  for (int i = 16; i >= 1; --i) {
    char node[16], port[16];
    std::snprintf(node, sizeof(node), "server%02d", i);
    std::snprintf(port, sizeof(port), "100GE/%d", i);
    t.entries.push_back({node, "NIC1", "switch1", port});
  }
  const auto pairs = derive_nic_pairs(t);
  REQUIRE(pairs.size() == 16);
  for (int i = 0; i < 16; ++i) {
    char expected[16];
    std::snprintf(expected, sizeof(expected), "server%02d", i + 1);
    CHECK(pairs[i].id == i);
    CHECK(pairs[i].compute_node == expected);
  }
}

TEST_CASE("save/load round trip preserves derived pairs") {
  TempDir tmp;
  Topology t;
  t.entries.push_back({"server2", "NIC1", "switch1", "100GE/2"});
  t.entries.push_back({"server1", "NIC2", "switch1", "100GE/1"});
  t.entries.push_back({"server1", "NIC1", "switch2", "100GE/1"});

  const auto file = tmp.path / "topology.json";
  save_topology(t, file.string());
  const Topology loaded = load_topology(file.string());
  CHECK(derive_nic_pairs(loaded) == derive_nic_pairs(t));
}
