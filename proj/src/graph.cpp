#include "mlcd/graph.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>

#include "mlcd/errors.hpp"

namespace mlcd {

namespace {

bool all_digits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) {
    return std::isdigit(c) != 0;
  });
}

std::string_view strip_leading_zeros(std::string_view s) {
  const auto first = s.find_first_not_of('0');
  return first == std::string_view::npos ? s.substr(s.size() - 1) : s.substr(first);
}

}  // namespace

bool natural_less(std::string_view a, std::string_view b) {
  const bool na = all_digits(a);
  const bool nb = all_digits(b);
  if (na != nb) return na;
  if (na) {
    const auto sa = strip_leading_zeros(a);
    const auto sb = strip_leading_zeros(b);
    if (sa.size() != sb.size()) return sa.size() < sb.size();
    if (sa != sb) return sa < sb;
  }
  return a < b;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t pos = 0;
  while (pos < line.size()) {
    while (pos < line.size() && std::isspace(static_cast<unsigned char>(line[pos]))) ++pos;
    if (pos >= line.size()) break;
    if (fields.empty() && line[pos] == '#') return {};
    std::size_t end = pos;
    while (end < line.size() && !std::isspace(static_cast<unsigned char>(line[end]))) ++end;
    fields.push_back(line.substr(pos, end - pos));
    pos = end;
  }
  return fields;
}

// ---------------------------------------------------------------------------
// MultilayerGraph

std::size_t MultilayerGraph::total_edges() const noexcept {
  std::size_t total = 0;
  for (const auto& layer : layers_) total += layer.edges.size();
  return total;
}

std::optional<NodeId> MultilayerGraph::find_entity(std::string_view name) const {
  const auto it = entity_index_.find(std::string(name));
  if (it == entity_index_.end()) return std::nullopt;
  return it->second;
}

std::optional<LayerId> MultilayerGraph::find_layer(std::string_view name) const {
  const auto it = layer_index_.find(std::string(name));
  if (it == layer_index_.end()) return std::nullopt;
  return it->second;
}

std::span<const Neighbor> MultilayerGraph::neighbors(LayerId l, NodeId v) const {
  const auto& layer = layers_.at(l);
  const auto begin = layer.offsets.at(v);
  const auto end = layer.offsets.at(v + 1);
  return std::span<const Neighbor>(layer.adjacency).subspan(begin, end - begin);
}

bool MultilayerGraph::present(LayerId l, NodeId v) const {
  return !neighbors(l, v).empty();
}

std::optional<EdgeId> MultilayerGraph::edge_index(LayerId l, NodeId u, NodeId v) const {
  const auto adj = neighbors(l, u);
  const auto it = std::lower_bound(adj.begin(), adj.end(), v,
                                   [](const Neighbor& n, NodeId x) { return n.node < x; });
  if (it == adj.end() || it->node != v) return std::nullopt;
  return it->edge;
}

bool operator==(const MultilayerGraph& a, const MultilayerGraph& b) {
  if (a.entity_names_ != b.entity_names_ || a.layer_names_ != b.layer_names_) return false;
  for (std::size_t l = 0; l < a.layers_.size(); ++l) {
    if (a.layers_[l].edges != b.layers_[l].edges) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Builder

LayerId MultilayerGraph::Builder::intern_layer(std::string_view layer) {
  const std::string key(layer);
  const auto [it, inserted] =
      layer_lookup_.try_emplace(key, static_cast<LayerId>(layer_order_.size()));
  if (inserted) {
    layer_order_.push_back(key);
    raw_edges_.emplace_back();
  }
  return it->second;
}

std::uint32_t MultilayerGraph::Builder::intern_entity(std::string_view entity) {
  const std::string key(entity);
  const auto [it, inserted] =
      entity_lookup_.try_emplace(key, static_cast<std::uint32_t>(entities_.size()));
  if (inserted) entities_.push_back(key);
  return it->second;
}

void MultilayerGraph::Builder::add_layer(std::string_view layer) { intern_layer(layer); }

void MultilayerGraph::Builder::add_entity(std::string_view entity) { intern_entity(entity); }

void MultilayerGraph::Builder::add_edge(std::string_view layer, std::string_view u,
                                        std::string_view v) {
  if (u == v) throw InputError("self-loop on entity '" + std::string(u) + "'");
  const auto l = intern_layer(layer);
  const auto a = intern_entity(u);
  const auto b = intern_entity(v);
  raw_edges_[l].emplace_back(a, b);
}

MultilayerGraph MultilayerGraph::Builder::build() && {
  if (layer_order_.empty()) throw InputError("multilayer graph has no layers");

  // Entities are renumbered so that dense ids follow natural id order.
  std::vector<std::uint32_t> order(entities_.size());
  std::iota(order.begin(), order.end(), 0u);
  std::sort(order.begin(), order.end(), [&](std::uint32_t x, std::uint32_t y) {
    return natural_less(entities_[x], entities_[y]);
  });
  std::vector<NodeId> rank(entities_.size());
  for (std::size_t i = 0; i < order.size(); ++i) rank[order[i]] = static_cast<NodeId>(i);

  MultilayerGraph g;
  const std::size_t n = entities_.size();
  g.entity_names_.reserve(n);
  for (const auto idx : order) g.entity_names_.push_back(entities_[idx]);
  for (std::size_t i = 0; i < n; ++i) g.entity_index_.emplace(g.entity_names_[i], static_cast<NodeId>(i));
  g.layer_names_ = layer_order_;
  for (std::size_t l = 0; l < layer_order_.size(); ++l) {
    g.layer_index_.emplace(layer_order_[l], static_cast<LayerId>(l));
  }

  g.layers_.resize(layer_order_.size());
  for (std::size_t l = 0; l < layer_order_.size(); ++l) {
    auto& layer = g.layers_[l];
    auto& edges = layer.edges;
    edges.reserve(raw_edges_[l].size());
    for (const auto& [a, b] : raw_edges_[l]) {
      const NodeId x = rank[a];
      const NodeId y = rank[b];
      edges.push_back(x < y ? Edge{x, y} : Edge{y, x});
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

    std::vector<std::size_t> degree(n, 0);
    for (const auto& e : edges) {
      ++degree[e.u];
      ++degree[e.v];
    }
    layer.offsets.assign(n + 1, 0);
    for (std::size_t v = 0; v < n; ++v) layer.offsets[v + 1] = layer.offsets[v] + degree[v];
    layer.adjacency.resize(2 * edges.size());
    std::vector<std::size_t> cursor(layer.offsets.begin(), layer.offsets.end() - 1);
    for (std::size_t e = 0; e < edges.size(); ++e) {
      const auto id = static_cast<EdgeId>(e);
      layer.adjacency[cursor[edges[e].u]++] = Neighbor{edges[e].v, id};
      layer.adjacency[cursor[edges[e].v]++] = Neighbor{edges[e].u, id};
    }
    for (std::size_t v = 0; v < n; ++v) {
      std::sort(layer.adjacency.begin() + static_cast<std::ptrdiff_t>(layer.offsets[v]),
                layer.adjacency.begin() + static_cast<std::ptrdiff_t>(layer.offsets[v + 1]),
                [](const Neighbor& p, const Neighbor& q) { return p.node < q.node; });
      if (degree[v] > 0) layer.nodes.push_back(static_cast<NodeId>(v));
    }
  }
  return g;
}

// ---------------------------------------------------------------------------
// Free functions

std::size_t layer_degree(const MultilayerGraph& g, std::string_view layer,
                         std::string_view entity) {
  const auto l = g.find_layer(layer);
  if (!l) throw InputError("unknown layer '" + std::string(layer) + "'");
  const auto v = g.find_entity(entity);
  if (!v) return 0;
  return g.degree(*l, *v);
}

MultilayerGraph read_multilayer(std::istream& in) {
  MultilayerGraph::Builder builder;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto fields = split_fields(line);
    if (fields.empty()) continue;
    if (fields.size() != 3) {
      throw ParseError(line_no, "expected 'layerId srcId dstId', got " +
                                    std::to_string(fields.size()) + " field(s)");
    }
    if (fields[1] == fields[2]) {
      throw ParseError(line_no, "self-loop on entity '" + std::string(fields[1]) + "'");
    }
    builder.add_edge(fields[0], fields[1], fields[2]);
  }
  if (in.bad()) throw InputError("read failure");
  return std::move(builder).build();
}

MultilayerGraph load_multilayer(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  return read_multilayer(in);
}

void write_multilayer(std::ostream& out, const MultilayerGraph& g) {
  for (LayerId l = 0; l < g.num_layers(); ++l) {
    for (const auto& e : g.edges(l)) {
      out << g.layer_name(l) << ' ' << g.entity_name(e.u) << ' ' << g.entity_name(e.v) << '\n';
    }
  }
}

}  // namespace mlcd
