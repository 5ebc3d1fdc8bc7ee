#include "nicdiag/topology.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include <json.hpp>

namespace nicdiag {

void Topology::validate() const {
  std::set<std::pair<std::string, std::string>> nics;
  std::set<std::pair<std::string, std::string>> ports;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const TopologyEntry& e = entries[i];
    if (!nics.insert({e.node, e.nic}).second) {
      throw ValidationError("topology entry " + std::to_string(i) +
                            ": duplicate (node, nic) = (" + e.node + ", " +
                            e.nic + ")");
    }
    if (!ports.insert({e.link, e.link_port}).second) {
      throw ValidationError("topology entry " + std::to_string(i) +
                            ": duplicate (link, link_port) = (" + e.link +
                            ", " + e.link_port + ")");
    }
  }
}

Topology load_topology(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open topology file: " + path);

  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("topology file " + path + ": " + e.what());
  }
  if (!doc.is_array()) {
    throw ParseError("topology file " + path + ": expected a JSON array");
  }

  Topology topology;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const auto& obj = doc[i];
    if (!obj.is_object()) {
      throw ParseError("topology entry " + std::to_string(i) +
                       ": expected an object");
    }
    TopologyEntry entry;
    for (const char* key : {"node", "nic", "link", "link_port"}) {
      if (!obj.contains(key) || !obj[key].is_string()) {
        throw ParseError("topology entry " + std::to_string(i) +
                         ": missing string field '" + std::string(key) + "'");
      }
    }
    entry.node = obj["node"].get<std::string>();
    entry.nic = obj["nic"].get<std::string>();
    entry.link = obj["link"].get<std::string>();
    entry.link_port = obj["link_port"].get<std::string>();
    topology.entries.push_back(std::move(entry));
  }
  topology.validate();
  return topology;
}

void save_topology(const Topology& topology, const std::string& path) {
  nlohmann::json doc = nlohmann::json::array();
  for (const TopologyEntry& e : topology.entries) {
    doc.push_back({{"node", e.node},
                   {"nic", e.nic},
                   {"link", e.link},
                   {"link_port", e.link_port}});
  }
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write topology file: " + path);
  out << doc.dump(2) << "\n";
}

std::vector<NicPair> derive_nic_pairs(const Topology& topology) {
  topology.validate();
  std::vector<const TopologyEntry*> sorted;
  sorted.reserve(topology.entries.size());
  for (const TopologyEntry& e : topology.entries) sorted.push_back(&e);
  std::sort(sorted.begin(), sorted.end(),
            [](const TopologyEntry* a, const TopologyEntry* b) {
              return std::tie(a->node, a->nic) < std::tie(b->node, b->nic);
            });

  std::vector<NicPair> pairs;
  pairs.reserve(sorted.size());
  for (const TopologyEntry* e : sorted) {
    NicPair p;
    p.id = static_cast<int>(pairs.size());
    p.compute_node = e->node;
    p.compute_nic = e->nic;
    p.switch_name = e->link;
    p.switch_port = e->link_port;
    pairs.push_back(std::move(p));
  }
  return pairs;
}

}  // namespace nicdiag
