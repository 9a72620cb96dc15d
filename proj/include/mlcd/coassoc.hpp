#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "mlcd/ensemble.hpp"
#include "mlcd/execution.hpp"
#include "mlcd/graph.hpp"
#include "mlcd/weighted_graph.hpp"

namespace mlcd {

/// One nonzero co-association: the layers in which u and v are linked and
/// share a community. u < v, layers ascending and nonempty.
struct CoassociationEntry {
  NodeId u;
  NodeId v;
  std::vector<LayerId> layers;

  std::size_t count() const noexcept { return layers.size(); }
  friend bool operator==(const CoassociationEntry&, const CoassociationEntry&) = default;
};

/// Sparse symmetric co-association matrix; value(u, v) = |m_uv| / num_layers.
class CoassociationMatrix {
 public:
  CoassociationMatrix() = default;

  /// Entries are sorted by (u, v); throws InputError on an invalid entry.
  CoassociationMatrix(std::size_t num_entities, std::size_t num_layers,
                      std::vector<CoassociationEntry> entries);

  std::size_t num_entities() const noexcept { return num_entities_; }
  std::size_t num_layers() const noexcept { return num_layers_; }
  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }
  std::span<const CoassociationEntry> entries() const noexcept { return entries_; }

  /// Stored entry for the unordered pair, or nullptr.
  const CoassociationEntry* find(NodeId u, NodeId v) const;

  double value(NodeId u, NodeId v) const;
  double value(const CoassociationEntry& e) const {
    return static_cast<double>(e.count()) / static_cast<double>(num_layers_);
  }

  /// Copy keeping the entries for which keep(entry_index) is true.
  template <class Pred>
  CoassociationMatrix retain_if(Pred keep) const {
    std::vector<CoassociationEntry> kept;
    for (std::size_t i = 0; i < entries_.size(); ++i) {
      if (keep(i)) kept.push_back(entries_[i]);
    }
    return CoassociationMatrix(num_entities_, num_layers_, std::move(kept));
  }

  friend bool operator==(const CoassociationMatrix&, const CoassociationMatrix&) = default;

 private:
  std::size_t num_entities_ = 0;
  std::size_t num_layers_ = 1;
  std::vector<CoassociationEntry> entries_;
};

/// Layer-i edges whose endpoints share a community of the layer-i structure
/// contribute layer i to their pair. Throws MismatchError when the ensemble
/// is not aligned with g.
CoassociationMatrix build_coassociation(const MultilayerGraph& g, const Ensemble& e,
                                        Exec exec = Exec::parallel);

/// Weighted view of a co-association matrix: w_uv = |m_uv|. Edge i of graph
/// corresponds to entry i of the matrix.
struct CoassociationGraph {
  WeightedGraph graph;
  std::vector<std::vector<LayerId>> layers;
  std::size_t num_layers = 1;
};

CoassociationGraph build_coassociation_graph(const CoassociationMatrix& m);

/// TSV dump "srcId dstId weight layerList" (layer ids comma-separated).
void write_coassociation(std::ostream& out, const MultilayerGraph& g,
                         const CoassociationGraph& gm);

}  // namespace mlcd
