#include "mlcd/weighted_graph.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "mlcd/errors.hpp"

namespace mlcd {

WeightedGraph::WeightedGraph(std::size_t num_nodes, std::vector<WeightedEdge> edges)
    : num_nodes_(num_nodes), edges_(std::move(edges)), strength_(num_nodes, 0) {
  for (auto& e : edges_) {
    if (e.u >= num_nodes_ || e.v >= num_nodes_) throw InputError("edge endpoint out of range");
    if (e.u == e.v) throw InputError("self-loop in weighted graph");
    if (e.weight == 0) throw InputError("zero edge weight");
    if (e.u > e.v) std::swap(e.u, e.v);
  }
  std::sort(edges_.begin(), edges_.end(), [](const WeightedEdge& a, const WeightedEdge& b) {
    return a.u != b.u ? a.u < b.u : a.v < b.v;
  });
  for (std::size_t i = 1; i < edges_.size(); ++i) {
    if (edges_[i].u == edges_[i - 1].u && edges_[i].v == edges_[i - 1].v) {
      throw InputError("pair (" + std::to_string(edges_[i].u) + ", " +
                       std::to_string(edges_[i].v) + ") listed twice");
    }
  }

  std::vector<std::size_t> degree(num_nodes_, 0);
  for (const auto& e : edges_) {
    ++degree[e.u];
    ++degree[e.v];
    strength_[e.u] += e.weight;
    strength_[e.v] += e.weight;
    total_weight_ += e.weight;
  }
  offsets_.assign(num_nodes_ + 1, 0);
  for (std::size_t v = 0; v < num_nodes_; ++v) offsets_[v + 1] = offsets_[v] + degree[v];
  adjacency_.resize(2 * edges_.size());
  std::vector<std::size_t> cursor(offsets_.begin(), offsets_.end() - 1);
  // Edges are sorted by (u, v), so each list comes out sorted by neighbor:
  // for node x, neighbors u < x arrive before neighbors v > x, both ascending.
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    const auto& e = edges_[i];
    const auto id = static_cast<EdgeId>(i);
    adjacency_[cursor[e.u]++] = WeightedNeighbor{e.v, e.weight, id};
    adjacency_[cursor[e.v]++] = WeightedNeighbor{e.u, e.weight, id};
  }
  for (std::size_t v = 0; v < num_nodes_; ++v) {
    std::sort(adjacency_.begin() + static_cast<std::ptrdiff_t>(offsets_[v]),
              adjacency_.begin() + static_cast<std::ptrdiff_t>(offsets_[v + 1]),
              [](const WeightedNeighbor& a, const WeightedNeighbor& b) { return a.node < b.node; });
  }
}

std::span<const WeightedNeighbor> WeightedGraph::neighbors(NodeId v) const {
  const auto begin = offsets_.at(v);
  const auto end = offsets_.at(v + 1);
  return std::span<const WeightedNeighbor>(adjacency_).subspan(begin, end - begin);
}

std::optional<EdgeId> WeightedGraph::edge_index(NodeId u, NodeId v) const {
  if (u >= num_nodes_ || v >= num_nodes_) return std::nullopt;
  const auto adj = neighbors(u);
  const auto it = std::lower_bound(adj.begin(), adj.end(), v,
                                   [](const WeightedNeighbor& n, NodeId x) { return n.node < x; });
  if (it == adj.end() || it->node != v) return std::nullopt;
  return it->edge;
}

std::vector<std::uint32_t> connected_components(const WeightedGraph& g) {
  constexpr auto kUnset = static_cast<std::uint32_t>(-1);
  std::vector<std::uint32_t> label(g.num_nodes(), kUnset);
  std::vector<NodeId> stack;
  std::uint32_t next = 0;
  for (NodeId s = 0; s < g.num_nodes(); ++s) {
    if (label[s] != kUnset) continue;
    label[s] = next;
    stack.push_back(s);
    while (!stack.empty()) {
      const NodeId x = stack.back();
      stack.pop_back();
      for (const auto& nb : g.neighbors(x)) {
        if (label[nb.node] == kUnset) {
          label[nb.node] = next;
          stack.push_back(nb.node);
        }
      }
    }
    ++next;
  }
  return label;
}

}  // namespace mlcd
