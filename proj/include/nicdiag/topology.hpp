#pragma once

#include <string>
#include <vector>

#include "nicdiag/common.hpp"

namespace nicdiag {

/// One compute-NIC-to-switch-port link, as recorded by operators.
struct TopologyEntry {
  std::string node;       // compute node id, e.g. "server1"
  std::string nic;        // NIC id on that node, e.g. "NIC1"
  std::string link;       // switch id, e.g. "switch1"
  std::string link_port;  // port id on that switch, e.g. "100GE/18"

  bool operator==(const TopologyEntry&) const = default;
};

struct Topology {
  std::vector<TopologyEntry> entries;

  /// Throws ValidationError on duplicate (node, nic) or (link, link_port).
  void validate() const;

  bool operator==(const Topology&) const = default;
};

/// The diagnosis unit: a compute NIC together with the switch port it is
/// cabled to. Ids are dense and ordered by (node, nic).
struct NicPair {
  int id = 0;
  std::string compute_node;
  std::string compute_nic;
  std::string switch_name;
  std::string switch_port;

  bool operator==(const NicPair&) const = default;
};

/// Reads a JSON array of {node, nic, link, link_port} objects.
Topology load_topology(const std::string& path);
void save_topology(const Topology& topology, const std::string& path);

std::vector<NicPair> derive_nic_pairs(const Topology& topology);

}  // namespace nicdiag
