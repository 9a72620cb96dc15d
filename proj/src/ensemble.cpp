#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <unordered_map>

#include "mlcd/ensemble.hpp"
#include "mlcd/errors.hpp"

namespace mlcd {

namespace {

CommunityStructure partition_layer(const MultilayerGraph& g, LayerId l, std::uint64_t seed) {
  const auto nodes = g.layer_nodes(l);
  std::vector<NodeId> local(g.num_entities(), kNoNode);
  for (std::size_t i = 0; i < nodes.size(); ++i) local[nodes[i]] = static_cast<NodeId>(i);
  std::vector<WeightedEdge> edges;
  edges.reserve(g.edges(l).size());
  for (const auto& e : g.edges(l)) edges.push_back({local[e.u], local[e.v], 1});
  const WeightedGraph view(nodes.size(), std::move(edges));
  const auto parts = partition_weighted_graph(view, seed);

  std::vector<CommunityId> labels(g.num_entities(), kUncovered);
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    labels[nodes[i]] = parts.community_of(static_cast<NodeId>(i));
  }
  return CommunityStructure(labels);
}

}  // namespace

Ensemble build_ensemble(const MultilayerGraph& g, std::uint64_t seed, Exec exec) {
  const auto layers = static_cast<std::int64_t>(g.num_layers());
  Ensemble e;
  e.structures.resize(g.num_layers());
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t l = 0; l < layers; ++l) {
      e.structures[static_cast<std::size_t>(l)] = partition_layer(g, static_cast<LayerId>(l), seed);
    }
  } else {
    for (std::int64_t l = 0; l < layers; ++l) {
      e.structures[static_cast<std::size_t>(l)] = partition_layer(g, static_cast<LayerId>(l), seed);
    }
  }
  return e;
}

void check_aligned(const MultilayerGraph& g, const Ensemble& e) {
  if (e.size() != g.num_layers()) {
    throw MismatchError("ensemble has " + std::to_string(e.size()) + " structure(s) for " +
                        std::to_string(g.num_layers()) + " layer(s)");
  }
  for (LayerId l = 0; l < g.num_layers(); ++l) {
    const auto& s = e[l];
    if (s.universe_size() != g.num_entities()) {
      throw MismatchError("structure for layer '" + g.layer_name(l) + "' has wrong universe size");
    }
    for (NodeId v = 0; v < g.num_entities(); ++v) {
      if (s.covers(v) != g.present(l, v)) {
        throw MismatchError("structure for layer '" + g.layer_name(l) + "' " +
                            (s.covers(v) ? "covers absent" : "misses present") + " entity '" +
                            g.entity_name(v) + "'");
      }
    }
  }
}

Ensemble read_ensemble(std::istream& in, const MultilayerGraph& g) {
  std::vector<std::vector<CommunityId>> labels(g.num_layers(),
                                               std::vector<CommunityId>(g.num_entities(), kUncovered));
  std::vector<std::unordered_map<std::string, CommunityId>> names(g.num_layers());
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto fields = split_fields(line);
    if (fields.empty()) continue;
    if (fields.size() != 3) throw ParseError(line_no, "expected 'layerId nodeId communityId'");
    const auto l = g.find_layer(fields[0]);
    if (!l) throw ParseError(line_no, "unknown layer '" + std::string(fields[0]) + "'");
    const auto v = g.find_entity(fields[1]);
    if (!v) throw ParseError(line_no, "unknown node '" + std::string(fields[1]) + "'");
    auto& table = names[*l];
    const auto [it, inserted] =
        table.try_emplace(std::string(fields[2]), static_cast<CommunityId>(table.size()));
    auto& slot = labels[*l][*v];
    if (slot != kUncovered && slot != it->second) {
      throw ParseError(line_no, "node '" + std::string(fields[1]) +
                                    "' assigned to two communities in layer '" +
                                    std::string(fields[0]) + "'");
    }
    slot = it->second;
  }
  if (in.bad()) throw InputError("read failure");
  Ensemble e;
  for (const auto& layer_labels : labels) e.structures.emplace_back(layer_labels);
  try {
    check_aligned(g, e);
  } catch (const MismatchError& err) {
    throw InputError(std::string("ensemble does not match graph: ") + err.what());
  }
  return e;
}

Ensemble load_ensemble(const std::filesystem::path& path, const MultilayerGraph& g) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  return read_ensemble(in, g);
}

void write_ensemble(std::ostream& out, const MultilayerGraph& g, const Ensemble& e) {
  for (LayerId l = 0; l < e.size(); ++l) {
    for (NodeId v = 0; v < g.num_entities(); ++v) {
      if (e[l].covers(v)) {
        out << g.layer_name(l) << ' ' << g.entity_name(v) << ' ' << e[l].community_of(v) << '\n';
      }
    }
  }
}

}  // namespace mlcd
