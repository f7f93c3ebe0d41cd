#include "cropguard/nettree.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <ostream>

#include <fmt/format.h>
#include <fmt/ostream.h>
#include "json.hpp"

#include "cropguard/errors.hpp"

namespace cropguard {

std::string_view to_string(Role role) {
  switch (role) {
    case Role::Coordinator: return "coordinator";
    case Role::Router: return "router";
    case Role::EndDevice: return "end_device";
  }
  return "unknown";
}

Role parse_role(std::string_view text) {
  if (text == "coordinator" || text == "zc") return Role::Coordinator;
  if (text == "router" || text == "zr") return Role::Router;
  if (text == "end_device" || text == "zed") return Role::EndDevice;
  throw ConfigError(fmt::format("unknown node role '{}'", text));
}

Topology parse_topology(std::string_view text) {
  if (text == "tree") return Topology::Tree;
  if (text == "star") return Topology::Star;
  if (text == "mesh") return Topology::Mesh;
  throw ConfigError(fmt::format("unknown topology '{}'", text));
}

void TreeParams::validate() const {
  if (max_children < 1 || max_depth < 1 || max_routers_per_parent < 1) {
    throw InvalidArgument("tree limits must all be >= 1");
  }
}

const SensorNode& NetworkTree::node(NodeId id) const {
  if (!contains(id)) throw NotFound(fmt::format("node {} is not in the tree", id));
  return nodes_[static_cast<std::size_t>(id)];
}

bool NetworkTree::contains(NodeId id) const {
  return id >= 0 && static_cast<std::size_t>(id) < nodes_.size();
}

std::vector<NodeId> NetworkTree::children(NodeId id) const {
  std::vector<NodeId> out;
  for (const auto& n : nodes_) {
    if (n.parent == id) out.push_back(n.id);
  }
  return out;
}

NetworkTree build_tree(Point coordinator, const std::vector<NodeSpec>& specs,
                       const TreeParams& params, const PathLossModel& pathloss,
                       const LinkPolicy& policy) {
  params.validate();
  pathloss.validate();

  std::vector<SensorNode> nodes;
  nodes.reserve(specs.size() + 1);
  nodes.push_back({.id = 0, .role = Role::Coordinator, .position = coordinator, .parent = {}, .depth = 0});
  for (const auto& spec : specs) {
    if (spec.role == Role::Coordinator) {
      throw TopologyError("a network has exactly one coordinator", static_cast<int>(nodes.size()));
    }
    nodes.push_back({.id = static_cast<NodeId>(nodes.size()),
                     .role = spec.role,
                     .position = spec.position,
                     .parent = {},
                     .depth = 0});
  }

  std::vector<NodeId> order(specs.size());
  std::iota(order.begin(), order.end(), 1);
  std::stable_sort(order.begin(), order.end(), [&](NodeId a, NodeId b) {
    const double da = distance(nodes[a].position, coordinator);
    const double db = distance(nodes[b].position, coordinator);
    return da != db ? da < db : a < b;
  });

  std::vector<int> child_count(nodes.size(), 0);
  std::vector<int> router_count(nodes.size(), 0);
  std::vector<NodeId> attached{0};

  for (NodeId id : order) {
    auto& node = nodes[id];
    NodeId best = -1;
    double best_dist = std::numeric_limits<double>::infinity();
    for (NodeId cand : attached) {
      const auto& parent = nodes[cand];
      if (parent.role == Role::EndDevice) continue;
      if (child_count[cand] >= params.max_children) continue;
      if (node.role == Role::Router && router_count[cand] >= params.max_routers_per_parent) continue;
      if (parent.depth + 1 > params.max_depth) continue;
      const double d = distance(node.position, parent.position);
      if (d > pathloss.max_link_range_m) continue;
      // Co-located nodes are trivially linked.
      if (d > 0.0 && !link_viable(rssi_at(d, pathloss), policy)) continue;
      if (d < best_dist || (d == best_dist && cand < best)) {
        best = cand;
        best_dist = d;
      }
    }
    if (best < 0) {
      throw TopologyError(
          fmt::format("node {} ({} at {:.1f},{:.1f}) has no viable parent", id,
                      to_string(node.role), node.position.x, node.position.y),
          id);
    }
    node.parent = best;
    node.depth = nodes[best].depth + 1;
    ++child_count[best];
    if (node.role == Role::Router) ++router_count[best];
    attached.push_back(id);
  }
  return NetworkTree(std::move(nodes));
}

NetworkTree build_network(Topology topology, Point coordinator, const std::vector<NodeSpec>& nodes,
                          const TreeParams& params, const PathLossModel& pathloss,
                          const LinkPolicy& policy) {
  switch (topology) {
    case Topology::Tree:
      return build_tree(coordinator, nodes, params, pathloss, policy);
    case Topology::Star:
      throw TopologyError("star topology is not supported: a single hub does not scale to field-wide sensor counts");
    case Topology::Mesh:
      throw TopologyError("mesh topology is not supported: per-node route computation costs too much power");
  }
  throw TopologyError("unknown topology");
}

std::vector<std::string> validate_tree(const NetworkTree& tree, const TreeParams& params) {
  std::vector<std::string> problems;
  const auto& nodes = tree.nodes();
  if (nodes.empty()) return {"tree has no nodes"};

  const auto coordinators =
      std::count_if(nodes.begin(), nodes.end(), [](const auto& n) { return n.role == Role::Coordinator; });
  if (coordinators != 1) problems.push_back(fmt::format("{} coordinators, expected 1", coordinators));

  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const auto& n = nodes[i];
    if (n.id != static_cast<NodeId>(i)) problems.push_back(fmt::format("node at index {} has id {}", i, n.id));
    if (n.role == Role::Coordinator) {
      if (n.parent) problems.push_back("coordinator has a parent");
      if (n.depth != 0) problems.push_back("coordinator depth is not 0");
      continue;
    }
    if (!n.parent || !tree.contains(*n.parent)) {
      problems.push_back(fmt::format("node {} is detached", n.id));
      continue;
    }
    const auto& parent = tree.node(*n.parent);
    if (parent.role == Role::EndDevice) problems.push_back(fmt::format("end device {} has children", parent.id));
    if (n.depth != parent.depth + 1) problems.push_back(fmt::format("node {} depth inconsistent", n.id));
    if (n.depth > params.max_depth) problems.push_back(fmt::format("node {} exceeds max depth", n.id));
  }
  for (const auto& n : nodes) {
    const auto kids = tree.children(n.id);
    if (static_cast<int>(kids.size()) > params.max_children) {
      problems.push_back(fmt::format("node {} has {} children", n.id, kids.size()));
    }
    const auto routers = std::count_if(kids.begin(), kids.end(), [&](NodeId k) {
      return tree.node(k).role == Role::Router;
    });
    if (routers > params.max_routers_per_parent) {
      problems.push_back(fmt::format("node {} has {} router children", n.id, routers));
    }
  }
  return problems;
}

std::vector<NodeId> route_to_root(const NetworkTree& tree, NodeId source) {
  std::vector<NodeId> path{tree.node(source).id};
  while (const auto parent = tree.node(path.back()).parent) {
    path.push_back(*parent);
    if (path.size() > tree.size()) throw TopologyError("parent chain contains a cycle", source);
  }
  return path;
}

DeliveryReport deliver(const NetworkTree& tree, NodeId source, int payload_bytes,
                       const RadioModels& models, Rng* rng) {
  if (payload_bytes < 1) {
    throw InvalidArgument(fmt::format("payload must be >= 1 byte, got {}", payload_bytes));
  }
  const auto path = route_to_root(tree, source);

  DeliveryReport report;
  report.hops = static_cast<int>(path.size()) - 1;
  report.delivered = true;
  if (report.hops == 0) return report;

  report.min_throughput = std::numeric_limits<int>::max();
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    HopReport hop;
    hop.distance_m = distance(tree.node(path[i]).position, tree.node(path[i + 1]).position);
    if (hop.distance_m <= 0.0) {
      // Co-located pair: treat as the strongest reference reading.
      hop.rssi_dbm = models.pathloss.ref_rssi_dbm;
    } else if (models.stochastic_rssi && rng != nullptr) {
      hop.rssi_dbm = rssi_at(hop.distance_m, models.pathloss, *rng);
    } else {
      hop.rssi_dbm = rssi_at(hop.distance_m, models.pathloss);
    }
    hop.viable = link_viable(hop.rssi_dbm, models.policy);
    report.delivered = report.delivered && hop.viable;
    report.min_throughput = std::min(report.min_throughput, throughput_for(hop.rssi_dbm, models.throughput));
    report.per_hop.push_back(hop);
  }
  report.total_latency = hop_latency_total(payload_bytes, report.hops, models.latency);
  return report;
}

void write_tree_json(std::ostream& out, const NetworkTree& tree) {
  nlohmann::ordered_json nodes = nlohmann::ordered_json::array();
  for (const auto& n : tree.nodes()) {
    nlohmann::ordered_json j;
    j["id"] = n.id;
    j["role"] = std::string(to_string(n.role));
    j["x"] = n.position.x;
    j["y"] = n.position.y;
    j["parent"] = n.parent ? nlohmann::ordered_json(*n.parent) : nlohmann::ordered_json(nullptr);
    j["depth"] = n.depth;
    nodes.push_back(std::move(j));
  }
  out << nlohmann::ordered_json{{"nodes", nodes}}.dump(2) << '\n';
}

void write_tree_csv(std::ostream& out, const NetworkTree& tree) {
  out << "node_id,role,x_m,y_m,parent_id,depth\n";
  for (const auto& n : tree.nodes()) {
    fmt::print(out, "{},{},{:.3f},{:.3f},{},{}\n", n.id, to_string(n.role), n.position.x,
               n.position.y, n.parent.value_or(-1), n.depth);
  }
}

}  // namespace cropguard
