#include "dirkit/network.hpp"

#include <algorithm>
#include <bit>
#include <limits>
#include <queue>

namespace dirkit {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

Network::Network(std::vector<NetNode> nodes, std::vector<NetEdge> edges)
    : nodes_(std::move(nodes)), edges_(std::move(edges)) {
  const int n = node_count();
  if (n == 0) throw ValidationError("Network: no nodes");

  for (const NetNode& node : nodes_) {
    if (node.kind == NodeKind::Source) num_sources_ = std::max(num_sources_, node.index + 1);
    if (node.kind == NodeKind::Sink) num_sinks_ = std::max(num_sinks_, node.index);
  }
  source_node_.assign(static_cast<std::size_t>(num_sources_), -1);
  sink_node_.assign(static_cast<std::size_t>(num_sinks_), -1);
  for (int v = 0; v < n; ++v) {
    const NetNode& node = nodes_[static_cast<std::size_t>(v)];
    if (node.kind == NodeKind::Source) {
      if (node.index < 0) throw ValidationError("Network: negative source index");
      int& slot = source_node_[static_cast<std::size_t>(node.index)];
      if (slot >= 0)
        throw ValidationError("Network: source index " + std::to_string(node.index) +
                              " appears on two nodes");
      slot = v;
    } else if (node.kind == NodeKind::Sink) {
      if (node.index < 1) throw ValidationError("Network: sink indices are 1-based");
      int& slot = sink_node_[static_cast<std::size_t>(node.index - 1)];
      if (slot >= 0)
        throw ValidationError("Network: sink index " + std::to_string(node.index) +
                              " appears on two nodes");
      slot = v;
    }
  }
  for (int i = 0; i < num_sources_; ++i)
    if (source_node_[static_cast<std::size_t>(i)] < 0)
      throw ValidationError("Network: missing node for source " + std::to_string(i));
  for (int j = 1; j <= num_sinks_; ++j)
    if (sink_node_[static_cast<std::size_t>(j - 1)] < 0)
      throw ValidationError("Network: missing node for sink " + std::to_string(j));

  std::vector<std::vector<std::pair<int, double>>> adj(static_cast<std::size_t>(n));
  for (const NetEdge& e : edges_) {
    if (e.u < 0 || e.u >= n || e.v < 0 || e.v >= n)
      throw ValidationError("Network: edge endpoint out of range");
    if (!(e.weight >= 0.0)) throw ValidationError("Network: negative edge weight");
    adj[static_cast<std::size_t>(e.u)].push_back({e.v, e.weight});
    adj[static_cast<std::size_t>(e.v)].push_back({e.u, e.weight});
  }

  // All-pairs Dijkstra; networks are desk-scale.
  dist_.assign(static_cast<std::size_t>(n), std::vector<double>(static_cast<std::size_t>(n), kInf));
  for (int s = 0; s < n; ++s) {
    auto& d = dist_[static_cast<std::size_t>(s)];
    d[static_cast<std::size_t>(s)] = 0.0;
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    heap.push({0.0, s});
    while (!heap.empty()) {
      auto [dv, v] = heap.top();
      heap.pop();
      if (dv > d[static_cast<std::size_t>(v)]) continue;
      for (auto [w, len] : adj[static_cast<std::size_t>(v)]) {
        double cand = dv + len;
        if (cand < d[static_cast<std::size_t>(w)]) {
          d[static_cast<std::size_t>(w)] = cand;
          heap.push({cand, w});
        }
      }
    }
  }
  for (int v = 0; v < n; ++v)
    if (dist_[0][static_cast<std::size_t>(v)] == kInf)
      throw ValidationError("Network: graph is not connected (node '" +
                            nodes_[static_cast<std::size_t>(v)].id + "' unreachable)");
}

int Network::source_node(int i) const {
  if (i < 0 || i >= num_sources_) throw ValidationError("Network: unknown source index");
  return source_node_[static_cast<std::size_t>(i)];
}

int Network::sink_node(int j) const {
  if (j < 1 || j > num_sinks_) throw ValidationError("Network: unknown sink index");
  return sink_node_[static_cast<std::size_t>(j - 1)];
}

int Network::find_node(std::string_view id) const {
  for (int v = 0; v < node_count(); ++v)
    if (nodes_[static_cast<std::size_t>(v)].id == id) return v;
  return -1;
}

double steiner_weight(const Network& net, int root_source, SinkMask terminals) {
  if (terminals == 0) throw ValidationError("steiner_weight: empty terminal set");
  const int root = net.source_node(root_source);
  const auto& dist = net.dist();

  std::vector<int> term_nodes;
  for (int j = 1; (terminals >> (j - 1)) != 0; ++j)
    if (terminals & (SinkMask{1} << (j - 1))) term_nodes.push_back(net.sink_node(j));

  const int t = static_cast<int>(term_nodes.size());
  if (t == 1) return dist[static_cast<std::size_t>(root)][static_cast<std::size_t>(term_nodes[0])];

  const int n = net.node_count();
  const std::size_t full = (std::size_t{1} << t) - 1;

  // dp[S][v]: weight of the cheapest tree spanning terminal subset S plus v.
  std::vector<std::vector<double>> dp(full + 1,
                                      std::vector<double>(static_cast<std::size_t>(n), kInf));
  for (int i = 0; i < t; ++i)
    for (int v = 0; v < n; ++v)
      dp[std::size_t{1} << i][static_cast<std::size_t>(v)] =
          dist[static_cast<std::size_t>(term_nodes[static_cast<std::size_t>(i)])]
              [static_cast<std::size_t>(v)];

  for (std::size_t s = 1; s <= full; ++s) {
    if (std::popcount(s) < 2) continue;
    auto& row = dp[s];
    // Merge two subtrees at v.
    for (std::size_t sub = (s - 1) & s; sub > 0; sub = (sub - 1) & s) {
      if (sub > (s ^ sub)) continue;  // each split once
      const auto& a = dp[sub];
      const auto& b = dp[s ^ sub];
      for (int v = 0; v < n; ++v) {
        double cand = a[static_cast<std::size_t>(v)] + b[static_cast<std::size_t>(v)];
        if (cand < row[static_cast<std::size_t>(v)]) row[static_cast<std::size_t>(v)] = cand;
      }
    }
    // Extend by shortest paths.
    for (int v = 0; v < n; ++v) {
      double best = row[static_cast<std::size_t>(v)];
      for (int u = 0; u < n; ++u) {
        double cand = row[static_cast<std::size_t>(u)] +
                      dist[static_cast<std::size_t>(u)][static_cast<std::size_t>(v)];
        if (cand < best) best = cand;
      }
      row[static_cast<std::size_t>(v)] = best;
    }
  }
  return dp[full][static_cast<std::size_t>(root)];
}

double EffectiveCostTable::at(const PacketId& p) const {
  auto it = weight.find(p);
  if (it == weight.end())
    throw ValidationError("EffectiveCostTable: no entry for " + p.name());
  return it->second;
}

EffectiveCostTable effective_costs(const Network& net, const DemandMap& demands,
                                   bool no_helpers) {
  EffectiveCostTable table;
  const SinkMask all = demands.all_sinks();
  for (int i = 0; i < demands.num_sources; ++i) {
    const SinkMask ambient = no_helpers ? demands.requesting(i) : all;
    for (SinkMask k = ambient; k > 0; k = (k - 1) & ambient)
      table.weight[{i, k}] = steiner_weight(net, i, k);
  }
  return table;
}

}  // namespace dirkit
