#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "mlcd/graph.hpp"
#include "mlcd/weighted_graph.hpp"

#ifndef MLCD_DATA_DIR
#define MLCD_DATA_DIR "data"
#endif

namespace mlcd::test {

inline std::string data_path(const std::string& name) { return std::string(MLCD_DATA_DIR) + "/" + name; }

inline MultilayerGraph parse(const std::string& text) {
  std::istringstream in(text);
  return read_multilayer(in);
}

inline MultilayerGraph toy() { return load_multilayer(data_path("toy.edges")); }

// Single layer, two disjoint triangles.
inline MultilayerGraph two_triangles(const std::string& layer = "L") {
  std::string s;
  for (const auto* e : {"1 2", "1 3", "2 3", "4 5", "4 6", "5 6"}) s += layer + " " + e + "\n";
  return parse(s);
}

inline NodeId id(const MultilayerGraph& g, const std::string& name) { return *g.find_entity(name); }

// Planted-partition multiplex: each layer keeps a random subset of the
// nodes, links same-group pairs with p_in and other pairs with p_out.
struct PlantedConfig {
  std::size_t nodes = 20;
  std::size_t layers = 3;
  std::size_t groups = 3;
  double p_in = 0.6;
  double p_out = 0.05;
  double presence = 0.9;
};

inline MultilayerGraph planted(const PlantedConfig& s, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::vector<std::size_t> group(s.nodes);
  for (std::size_t v = 0; v < s.nodes; ++v) group[v] = v % s.groups;
  std::shuffle(group.begin(), group.end(), rng);
  MultilayerGraph::Builder b;
  std::size_t edges = 0;
  for (std::size_t l = 0; l < s.layers; ++l) {
    const auto layer = "layer" + std::to_string(l);
    b.add_layer(layer);
    std::vector<bool> here(s.nodes);
    for (std::size_t v = 0; v < s.nodes; ++v) here[v] = u01(rng) < s.presence;
    for (std::size_t u = 0; u < s.nodes; ++u) {
      for (std::size_t v = u + 1; v < s.nodes; ++v) {
        if (!here[u] || !here[v]) continue;
        const double p = group[u] == group[v] ? s.p_in : s.p_out;
        if (u01(rng) < p) {
          b.add_edge(layer, std::to_string(u + 1), std::to_string(v + 1));
          ++edges;
        }
      }
    }
  }
  if (edges == 0) b.add_edge("layer0", "1", "2");
  return std::move(b).build();
}

// Random simple weighted graph with total weight at most max_total.
inline WeightedGraph random_weighted(std::size_t n, double density, std::uint64_t max_weight,
                                     std::uint64_t max_total, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::uniform_int_distribution<std::uint64_t> w(1, max_weight);
  std::vector<WeightedEdge> edges;
  std::uint64_t total = 0;
  for (NodeId u = 0; u < n; ++u) {
    for (NodeId v = u + 1; v < n; ++v) {
      if (u01(rng) >= density) continue;
      const auto weight = std::min(w(rng), max_total - total);
      if (weight == 0) continue;
      edges.push_back({u, v, weight});
      total += weight;
    }
  }
  if (edges.empty()) edges.push_back({0, 1, 1});
  return WeightedGraph(n, std::move(edges));
}

}  // namespace mlcd::test
