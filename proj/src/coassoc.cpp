#include "mlcd/coassoc.hpp"

#include <algorithm>
#include <map>
#include <ostream>
#include <string>

#include "mlcd/errors.hpp"

namespace mlcd {

CoassociationMatrix::CoassociationMatrix(std::size_t num_entities, std::size_t num_layers,
                                         std::vector<CoassociationEntry> entries)
    : num_entities_(num_entities), num_layers_(num_layers), entries_(std::move(entries)) {
  if (num_layers_ == 0) throw InputError("co-association matrix needs at least one layer");
  for (auto& e : entries_) {
    if (e.u == e.v) throw InputError("co-association entry on the diagonal");
    if (e.u >= num_entities_ || e.v >= num_entities_) {
      throw InputError("co-association entry out of range");
    }
    if (e.u > e.v) std::swap(e.u, e.v);
    if (e.layers.empty() || e.layers.size() > num_layers_) {
      throw InputError("co-association entry with invalid layer set");
    }
    std::sort(e.layers.begin(), e.layers.end());
    if (std::adjacent_find(e.layers.begin(), e.layers.end()) != e.layers.end() ||
        e.layers.back() >= num_layers_) {
      throw InputError("co-association entry with invalid layer set");
    }
  }
  std::sort(entries_.begin(), entries_.end(), [](const auto& a, const auto& b) {
    return a.u != b.u ? a.u < b.u : a.v < b.v;
  });
  for (std::size_t i = 1; i < entries_.size(); ++i) {
    if (entries_[i].u == entries_[i - 1].u && entries_[i].v == entries_[i - 1].v) {
      throw InputError("co-association pair stored twice");
    }
  }
}

const CoassociationEntry* CoassociationMatrix::find(NodeId u, NodeId v) const {
  if (u > v) std::swap(u, v);
  const auto it = std::lower_bound(entries_.begin(), entries_.end(), std::pair{u, v},
                                   [](const CoassociationEntry& e, const std::pair<NodeId, NodeId>& k) {
                                     return e.u != k.first ? e.u < k.first : e.v < k.second;
                                   });
  if (it == entries_.end() || it->u != u || it->v != v) return nullptr;
  return &*it;
}

double CoassociationMatrix::value(NodeId u, NodeId v) const {
  const auto* e = find(u, v);
  return e == nullptr ? 0.0 : value(*e);
}

namespace {

// Serial reference: ordered map keyed by pair, layers appended in order.
CoassociationMatrix build_serial(const MultilayerGraph& g, const Ensemble& e) {
  std::map<std::pair<NodeId, NodeId>, std::vector<LayerId>> cells;
  for (LayerId l = 0; l < g.num_layers(); ++l) {
    for (const auto& edge : g.edges(l)) {
      if (e[l].community_of(edge.u) == e[l].community_of(edge.v)) {
        cells[{edge.u, edge.v}].push_back(l);
      }
    }
  }
  std::vector<CoassociationEntry> entries;
  entries.reserve(cells.size());
  for (auto& [key, layers] : cells) entries.push_back({key.first, key.second, std::move(layers)});
  return CoassociationMatrix(g.num_entities(), g.num_layers(), std::move(entries));
}

// Layers are scanned concurrently; the merge is a stable sort by pair so each
// layer list stays ascending.
CoassociationMatrix build_parallel(const MultilayerGraph& g, const Ensemble& e) {
  const auto layers = static_cast<std::int64_t>(g.num_layers());
  std::vector<std::vector<Edge>> intra(g.num_layers());
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t li = 0; li < layers; ++li) {
    const auto l = static_cast<LayerId>(li);
    auto& out = intra[l];
    for (const auto& edge : g.edges(l)) {
      if (e[l].community_of(edge.u) == e[l].community_of(edge.v)) out.push_back(edge);
    }
  }
  std::vector<std::pair<Edge, LayerId>> tagged;
  for (LayerId l = 0; l < g.num_layers(); ++l) {
    for (const auto& edge : intra[l]) tagged.emplace_back(edge, l);
  }
  std::stable_sort(tagged.begin(), tagged.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<CoassociationEntry> entries;
  for (const auto& [edge, l] : tagged) {
    if (entries.empty() || entries.back().u != edge.u || entries.back().v != edge.v) {
      entries.push_back({edge.u, edge.v, {}});
    }
    entries.back().layers.push_back(l);
  }
  return CoassociationMatrix(g.num_entities(), g.num_layers(), std::move(entries));
}

}  // namespace

CoassociationMatrix build_coassociation(const MultilayerGraph& g, const Ensemble& e, Exec exec) {
  check_aligned(g, e);
  return exec == Exec::parallel ? build_parallel(g, e) : build_serial(g, e);
}

CoassociationGraph build_coassociation_graph(const CoassociationMatrix& m) {
  std::vector<WeightedEdge> edges;
  CoassociationGraph gm;
  edges.reserve(m.size());
  gm.layers.reserve(m.size());
  for (const auto& entry : m.entries()) {
    edges.push_back({entry.u, entry.v, entry.count()});
    gm.layers.push_back(entry.layers);
  }
  gm.graph = WeightedGraph(m.num_entities(), std::move(edges));
  gm.num_layers = m.num_layers();
  return gm;
}

void write_coassociation(std::ostream& out, const MultilayerGraph& g,
                         const CoassociationGraph& gm) {
  const auto edges = gm.graph.edges();
  for (std::size_t i = 0; i < edges.size(); ++i) {
    out << g.entity_name(edges[i].u) << '\t' << g.entity_name(edges[i].v) << '\t'
        << edges[i].weight << '\t';
    for (std::size_t k = 0; k < gm.layers[i].size(); ++k) {
      if (k > 0) out << ',';
      out << g.layer_name(gm.layers[i][k]);
    }
    out << '\n';
  }
}

}  // namespace mlcd
