#pragma once

#include <map>
#include <string>
#include <vector>

#include "dirkit/demands.hpp"
#include "dirkit/prob.hpp"

namespace dirkit {

enum class NodeKind { Source, Sink, Intermediate };

struct NetNode {
  std::string id;
  NodeKind kind = NodeKind::Intermediate;
  int index = 0;  // source index i or sink index j, unused for intermediates
};

struct NetEdge {
  int u = 0, v = 0;
  double weight = 0.0;
};

/// Undirected, connected, nonnegatively weighted graph with typed nodes.
/// Each source index and sink index appears on exactly one node.
class Network {
 public:
  Network(std::vector<NetNode> nodes, std::vector<NetEdge> edges);

  int node_count() const { return static_cast<int>(nodes_.size()); }
  const NetNode& node(int v) const { return nodes_.at(static_cast<std::size_t>(v)); }
  const std::vector<NetNode>& nodes() const { return nodes_; }
  const std::vector<NetEdge>& edges() const { return edges_; }

  int num_sources() const { return num_sources_; }
  int num_sinks() const { return num_sinks_; }
  int source_node(int i) const;
  int sink_node(int j) const;  // 1-based sink index
  int find_node(std::string_view id) const;  // -1 if absent

  /// All-pairs shortest path distances (computed once at construction).
  const std::vector<std::vector<double>>& dist() const { return dist_; }

 private:
  std::vector<NetNode> nodes_;
  std::vector<NetEdge> edges_;
  std::vector<int> source_node_, sink_node_;
  std::vector<std::vector<double>> dist_;
  int num_sources_ = 0, num_sinks_ = 0;
};

/// Exact minimum Steiner tree weight connecting source i's node with every
/// sink in `terminals`, by the Dreyfus-Wagner dynamic program.
double steiner_weight(const Network& net, int root_source, SinkMask terminals);

/// Per-packet cost coefficients d_i(K).
struct EffectiveCostTable {
  std::map<PacketId, double> weight;

  double at(const PacketId& p) const;
};

/// d_i(K) for every source i and nonempty K: K ranges over subsets of the
/// full sink set, or of Pi_i when no_helpers is set.
EffectiveCostTable effective_costs(const Network& net, const DemandMap& demands,
                                   bool no_helpers);

}  // namespace dirkit
