#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "mlcd/graph.hpp"

namespace mlcd {

struct WeightedEdge {
  NodeId u;
  NodeId v;
  std::uint64_t weight;
  friend bool operator==(const WeightedEdge&, const WeightedEdge&) = default;
};

struct WeightedNeighbor {
  NodeId node;
  std::uint64_t weight;
  EdgeId edge;
};

/// Undirected positive-integer-weighted graph over nodes 0..n-1.
///
/// Carries the co-association graph and the flattened view of a consensus
/// community. Edges are stored once, canonically oriented and sorted.
class WeightedGraph {
 public:
  WeightedGraph() = default;

  /// Throws InputError on self-loops, zero weights, out-of-range endpoints or
  /// a pair listed twice.
  WeightedGraph(std::size_t num_nodes, std::vector<WeightedEdge> edges);

  std::size_t num_nodes() const noexcept { return num_nodes_; }
  std::size_t num_edges() const noexcept { return edges_.size(); }
  std::span<const WeightedEdge> edges() const noexcept { return edges_; }
  std::span<const WeightedNeighbor> neighbors(NodeId v) const;

  std::uint64_t strength(NodeId v) const { return strength_.at(v); }
  std::size_t degree(NodeId v) const { return neighbors(v).size(); }
  std::uint64_t total_weight() const noexcept { return total_weight_; }

  std::optional<EdgeId> edge_index(NodeId u, NodeId v) const;

 private:
  std::size_t num_nodes_ = 0;
  std::vector<WeightedEdge> edges_;
  std::vector<std::size_t> offsets_{0};
  std::vector<WeightedNeighbor> adjacency_;
  std::vector<std::uint64_t> strength_;
  std::uint64_t total_weight_ = 0;
};

/// Component label per node, labels dense from 0 in order of smallest member.
std::vector<std::uint32_t> connected_components(const WeightedGraph& g);

}  // namespace mlcd
