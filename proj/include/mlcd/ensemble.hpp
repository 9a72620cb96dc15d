#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "mlcd/execution.hpp"
#include "mlcd/graph.hpp"
#include "mlcd/weighted_graph.hpp"

namespace mlcd {

using CommunityId = std::uint32_t;
inline constexpr CommunityId kUncovered = static_cast<CommunityId>(-1);

/// Non-overlapping partition of the nodes it covers.
///
/// Labels are normalized on construction: community ids are dense from 0 and
/// assigned in order of each community's smallest node, so two structures
/// compare equal exactly when they are the same partition up to relabeling.
class CommunityStructure {
 public:
  CommunityStructure() = default;

  /// labels[v] is v's community or kUncovered.
  explicit CommunityStructure(std::span<const CommunityId> labels);

  std::size_t universe_size() const noexcept { return labels_.size(); }
  std::size_t num_communities() const noexcept { return num_communities_; }
  std::size_t num_covered() const noexcept;

  bool covers(NodeId v) const { return labels_.at(v) != kUncovered; }
  CommunityId community_of(NodeId v) const { return labels_.at(v); }
  std::span<const CommunityId> labels() const noexcept { return labels_; }

  /// Members of every community, each list ascending.
  std::vector<std::vector<NodeId>> communities() const;

  friend bool operator==(const CommunityStructure&, const CommunityStructure&) = default;

 private:
  std::vector<CommunityId> labels_;
  std::size_t num_communities_ = 0;
};

/// One community structure per layer, index-aligned with the graph's layers.
struct Ensemble {
  std::vector<CommunityStructure> structures;

  std::size_t size() const noexcept { return structures.size(); }
  const CommunityStructure& operator[](LayerId l) const { return structures.at(l); }
  friend bool operator==(const Ensemble&, const Ensemble&) = default;
};

/// Newman modularity of a full partition of a weighted graph; 0 for a graph
/// without edges.
double weighted_modularity(const WeightedGraph& g, const CommunityStructure& partition);

/// Deterministic Louvain modularity optimizer (local moving plus
/// aggregation). Seed 0 sweeps nodes in ascending id order; any other seed
/// sweeps in a fixed pseudo-random permutation derived from it. Candidate
/// communities tie toward the lowest id and a node only leaves its community
/// for a strictly better one.
CommunityStructure partition_weighted_graph(const WeightedGraph& g, std::uint64_t seed = 0);

/// Partitions every layer (viewed as a unit-weight graph over its present
/// nodes) independently. Layers are processed concurrently on the parallel
/// path; the result does not depend on the path.
Ensemble build_ensemble(const MultilayerGraph& g, std::uint64_t seed = 0,
                        Exec exec = Exec::parallel);

/// Throws MismatchError unless e has one structure per layer covering
/// exactly that layer's nodes.
void check_aligned(const MultilayerGraph& g, const Ensemble& e);

/// Parses "layerId nodeId communityId" lines against g.
Ensemble read_ensemble(std::istream& in, const MultilayerGraph& g);
Ensemble load_ensemble(const std::filesystem::path& path, const MultilayerGraph& g);
void write_ensemble(std::ostream& out, const MultilayerGraph& g, const Ensemble& e);

}  // namespace mlcd
