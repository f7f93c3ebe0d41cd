#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cropguard/geometry.hpp"
#include "cropguard/radio.hpp"

namespace cropguard {

enum class Role { Coordinator, Router, EndDevice };

[[nodiscard]] std::string_view to_string(Role role);
/// Accepts "coordinator", "router", "end_device" (also "zc", "zr", "zed").
[[nodiscard]] Role parse_role(std::string_view text);

/// Only Tree builds; Star and Mesh are rejected with a TopologyError.
enum class Topology { Tree, Star, Mesh };

[[nodiscard]] Topology parse_topology(std::string_view text);

using NodeId = int;

/// A positioned radio node. Node ids are dense: the coordinator is 0 and the
/// remaining nodes are numbered in input order. The id also keys the node's
/// battery in the energy ledger.
struct SensorNode {
  NodeId id = 0;
  Role role = Role::EndDevice;
  Point position{};
  std::optional<NodeId> parent;
  int depth = 0;
};

struct NodeSpec {
  Point position{};
  Role role = Role::EndDevice;
};

struct TreeParams {
  int max_children = 4;
  int max_depth = 5;
  int max_routers_per_parent = 2;

  void validate() const;
};

class NetworkTree {
 public:
  NetworkTree() = default;
  explicit NetworkTree(std::vector<SensorNode> nodes) : nodes_(std::move(nodes)) {}

  [[nodiscard]] const std::vector<SensorNode>& nodes() const { return nodes_; }
  [[nodiscard]] std::size_t size() const { return nodes_.size(); }
  /// Throws NotFound for unknown ids.
  [[nodiscard]] const SensorNode& node(NodeId id) const;
  [[nodiscard]] bool contains(NodeId id) const;
  [[nodiscard]] std::vector<NodeId> children(NodeId id) const;
  [[nodiscard]] const SensorNode& coordinator() const { return node(0); }

 private:
  std::vector<SensorNode> nodes_;
};

/// Greedy construction. Nodes are taken in ascending distance to the coordinator
/// (ties by id); each attaches to the nearest already attached Router or
/// Coordinator that has spare capacity, a viable deterministic-RSSI link within
/// range, and keeps the depth within max_depth. Throws TopologyError naming the
/// first node that cannot attach.
[[nodiscard]] NetworkTree build_tree(Point coordinator, const std::vector<NodeSpec>& nodes,
                                     const TreeParams& params, const PathLossModel& pathloss,
                                     const LinkPolicy& policy);

/// Dispatches on topology; anything but Tree throws TopologyError.
[[nodiscard]] NetworkTree build_network(Topology topology, Point coordinator,
                                        const std::vector<NodeSpec>& nodes,
                                        const TreeParams& params, const PathLossModel& pathloss,
                                        const LinkPolicy& policy);

/// Structural violations, empty when the tree is sound.
[[nodiscard]] std::vector<std::string> validate_tree(const NetworkTree& tree,
                                                     const TreeParams& params);

/// Parent chain from `source` to the coordinator, inclusive of both ends.
[[nodiscard]] std::vector<NodeId> route_to_root(const NetworkTree& tree, NodeId source);

struct HopReport {
  double distance_m = 0.0;
  double rssi_dbm = 0.0;
  bool viable = false;
};

struct DeliveryReport {
  bool delivered = false;
  double total_latency = 0.0;
  std::vector<HopReport> per_hop;
  int hops = 0;
  /// Bottleneck rate over the path; 0 when there are no links.
  int min_throughput = 0;
};

/// Evaluates every link on the route to the coordinator. Latency is reported
/// even when a link is not viable. When models.stochastic_rssi is set and an
/// rng is given, link RSSI carries shadowing noise.
[[nodiscard]] DeliveryReport deliver(const NetworkTree& tree, NodeId source, int payload_bytes,
                                     const RadioModels& models, Rng* rng = nullptr);

/// JSON array of {id, role, x, y, parent, depth}.
void write_tree_json(std::ostream& out, const NetworkTree& tree);
/// CSV `node_id,role,x_m,y_m,parent_id,depth` (parent -1 for the root).
void write_tree_csv(std::ostream& out, const NetworkTree& tree);

}  // namespace cropguard
