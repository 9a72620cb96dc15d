#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace mlcd {

using NodeId = std::uint32_t;
using LayerId = std::uint32_t;
using EdgeId = std::uint32_t;

inline constexpr NodeId kNoNode = static_cast<NodeId>(-1);

/// Undirected edge with canonical orientation u < v.
struct Edge {
  NodeId u;
  NodeId v;
  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

struct Neighbor {
  NodeId node;
  EdgeId edge;  // index into the owning layer's edge list
};

/// Orders ids numerically when both are plain digit strings, otherwise
/// lexicographically; numeric ids sort before the rest.
bool natural_less(std::string_view a, std::string_view b);

/// Undirected multiplex graph over a shared entity set.
///
/// Entities are interned in natural id order, layers keep their order of
/// first appearance. Inter-layer coupling is implicit (same entity, different
/// layer) and never stored. Immutable once built.
class MultilayerGraph {
 public:
  class Builder;

  MultilayerGraph() = default;

  std::size_t num_entities() const noexcept { return entity_names_.size(); }
  std::size_t num_layers() const noexcept { return layer_names_.size(); }
  std::size_t total_edges() const noexcept;

  const std::string& entity_name(NodeId v) const { return entity_names_.at(v); }
  const std::string& layer_name(LayerId l) const { return layer_names_.at(l); }
  std::span<const std::string> entity_names() const noexcept { return entity_names_; }
  std::span<const std::string> layer_names() const noexcept { return layer_names_; }

  std::optional<NodeId> find_entity(std::string_view name) const;
  std::optional<LayerId> find_layer(std::string_view name) const;

  /// Edges of one layer in canonical (u, v) order.
  std::span<const Edge> edges(LayerId l) const { return layers_.at(l).edges; }

  /// Neighbors of v within layer l, sorted by neighbor id.
  std::span<const Neighbor> neighbors(LayerId l, NodeId v) const;

  /// Entities present in layer l (endpoints of its edges), ascending.
  std::span<const NodeId> layer_nodes(LayerId l) const { return layers_.at(l).nodes; }

  bool present(LayerId l, NodeId v) const;
  std::size_t degree(LayerId l, NodeId v) const { return neighbors(l, v).size(); }

  /// Index of edge {u, v} in layer l, if the layer contains it.
  std::optional<EdgeId> edge_index(LayerId l, NodeId u, NodeId v) const;

  friend bool operator==(const MultilayerGraph&, const MultilayerGraph&);

 private:
  struct Layer {
    std::vector<Edge> edges;
    std::vector<std::size_t> offsets;  // CSR, size num_entities + 1
    std::vector<Neighbor> adjacency;
    std::vector<NodeId> nodes;
  };

  std::vector<std::string> entity_names_;
  std::vector<std::string> layer_names_;
  std::unordered_map<std::string, NodeId> entity_index_;
  std::unordered_map<std::string, LayerId> layer_index_;
  std::vector<Layer> layers_;
};

/// Accumulates named edges and produces a validated MultilayerGraph.
class MultilayerGraph::Builder {
 public:
  /// Adds an undirected edge; duplicates are merged. Throws InputError on a
  /// self-loop.
  void add_edge(std::string_view layer, std::string_view u, std::string_view v);

  /// Declares a layer so that it exists even without edges.
  void add_layer(std::string_view layer);

  /// Declares an entity that may have no edges at all.
  void add_entity(std::string_view entity);

  /// Throws InputError when no layer was declared.
  MultilayerGraph build() &&;

 private:
  std::vector<std::string> layer_order_;
  std::unordered_map<std::string, LayerId> layer_lookup_;
  std::vector<std::string> entities_;
  std::unordered_map<std::string, std::uint32_t> entity_lookup_;
  std::vector<std::vector<std::pair<std::uint32_t, std::uint32_t>>> raw_edges_;

  LayerId intern_layer(std::string_view layer);
  std::uint32_t intern_entity(std::string_view entity);
};

/// Number of layer-l edges incident to the entity; 0 when the entity is not
/// present in that layer. Throws InputError for an unknown layer.
std::size_t layer_degree(const MultilayerGraph& g, std::string_view layer,
                         std::string_view entity);

/// Parses "layerId srcId dstId" lines; '#' starts a comment line.
MultilayerGraph read_multilayer(std::istream& in);
MultilayerGraph load_multilayer(const std::filesystem::path& path);

/// Writes the graph back in the edge-list format accepted by read_multilayer.
void write_multilayer(std::ostream& out, const MultilayerGraph& g);

/// Splits a line into whitespace-separated fields; returns nothing for blank
/// and comment lines.
std::vector<std::string_view> split_fields(std::string_view line);

}  // namespace mlcd
