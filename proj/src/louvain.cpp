#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "mlcd/ensemble.hpp"

namespace mlcd {

namespace {

// One aggregation level. Node weights are doubles but always hold integer
// sums of the original edge weights, so every quantity here is exact.
struct LevelGraph {
  std::size_t n = 0;
  std::vector<std::size_t> offsets;
  std::vector<std::pair<std::uint32_t, double>> adjacency;  // no self-loops
  std::vector<double> internal;  // weight of original edges collapsed into the node
  std::vector<double> degree;    // 2 * internal + external weight
};

LevelGraph from_weighted(const WeightedGraph& g) {
  LevelGraph lg;
  lg.n = g.num_nodes();
  lg.offsets.assign(lg.n + 1, 0);
  lg.internal.assign(lg.n, 0.0);
  lg.degree.assign(lg.n, 0.0);
  for (NodeId v = 0; v < lg.n; ++v) {
    lg.offsets[v + 1] = lg.offsets[v] + g.degree(v);
    for (const auto& nb : g.neighbors(v)) {
      lg.adjacency.emplace_back(nb.node, static_cast<double>(nb.weight));
      lg.degree[v] += static_cast<double>(nb.weight);
    }
  }
  return lg;
}

std::vector<std::uint32_t> sweep_order(std::size_t n, std::uint64_t seed) {
  std::vector<std::uint32_t> order(n);
  std::iota(order.begin(), order.end(), 0u);
  if (seed != 0) {
    std::mt19937_64 rng(seed);
    for (std::size_t i = n; i > 1; --i) {
      const auto j = static_cast<std::size_t>(rng() % i);
      std::swap(order[i - 1], order[j]);
    }
  }
  return order;
}

// Local moving phase. Returns true when at least one node changed community.
bool local_moving(const LevelGraph& lg, double total_weight, std::uint64_t seed,
                  std::vector<std::uint32_t>& community) {
  const double two_m = 2.0 * total_weight;
  std::vector<double> tot(lg.n, 0.0);
  for (std::size_t v = 0; v < lg.n; ++v) tot[community[v]] += lg.degree[v];

  std::vector<double> link(lg.n, 0.0);
  std::vector<std::uint32_t> touched;
  const auto order = sweep_order(lg.n, seed);
  bool any_move = false;
  bool moved = true;
  while (moved) {
    moved = false;
    for (const auto v : order) {
      const auto own = community[v];
      const double k = lg.degree[v];
      for (std::size_t p = lg.offsets[v]; p < lg.offsets[v + 1]; ++p) {
        const auto [u, w] = lg.adjacency[p];
        const auto c = community[u];
        if (link[c] == 0.0) touched.push_back(c);
        link[c] += w;
      }
      tot[own] -= k;
      const double own_gain = link[own] - tot[own] * k / two_m;
      CommunityId best = own;
      double best_gain = own_gain;
      std::sort(touched.begin(), touched.end());
      for (const auto c : touched) {
        if (c == own) continue;
        const double gain = link[c] - tot[c] * k / two_m;
        const double margin = 1e-12 * std::max(1.0, std::abs(best_gain));
        if (gain > best_gain + margin) {
          best = c;
          best_gain = gain;
        }
      }
      tot[best] += k;
      if (best != own) {
        community[v] = best;
        moved = true;
        any_move = true;
      }
      for (const auto c : touched) link[c] = 0.0;
      touched.clear();
    }
  }
  return any_move;
}

// Renumbers communities densely in order of smallest member.
std::size_t renumber(std::vector<std::uint32_t>& community) {
  std::vector<std::uint32_t> remap(community.size(), static_cast<std::uint32_t>(-1));
  std::uint32_t next = 0;
  for (auto& c : community) {
    if (remap[c] == static_cast<std::uint32_t>(-1)) remap[c] = next++;
    c = remap[c];
  }
  return next;
}

LevelGraph aggregate(const LevelGraph& lg, const std::vector<std::uint32_t>& community,
                     std::size_t count) {
  LevelGraph next;
  next.n = count;
  next.internal.assign(count, 0.0);
  next.degree.assign(count, 0.0);
  std::vector<std::vector<std::uint32_t>> members(count);
  for (std::uint32_t v = 0; v < lg.n; ++v) {
    members[community[v]].push_back(v);
    next.internal[community[v]] += lg.internal[v];
    next.degree[community[v]] += lg.degree[v];
  }
  next.offsets.assign(count + 1, 0);
  std::vector<double> link(count, 0.0);
  std::vector<std::uint32_t> touched;
  for (std::uint32_t c = 0; c < count; ++c) {
    for (const auto v : members[c]) {
      for (std::size_t p = lg.offsets[v]; p < lg.offsets[v + 1]; ++p) {
        const auto [u, w] = lg.adjacency[p];
        const auto d = community[u];
        if (d == c) {
          // Each intra edge is seen from both endpoints.
          next.internal[c] += w / 2.0;
          continue;
        }
        if (link[d] == 0.0) touched.push_back(d);
        link[d] += w;
      }
    }
    std::sort(touched.begin(), touched.end());
    for (const auto d : touched) {
      next.adjacency.emplace_back(d, link[d]);
      link[d] = 0.0;
    }
    touched.clear();
    next.offsets[c + 1] = next.adjacency.size();
  }
  return next;
}

}  // namespace

double weighted_modularity(const WeightedGraph& g, const CommunityStructure& partition) {
  const double m = static_cast<double>(g.total_weight());
  if (m == 0.0) return 0.0;
  const std::size_t k = partition.num_communities();
  std::vector<double> in(k, 0.0);
  std::vector<double> tot(k, 0.0);
  for (const auto& e : g.edges()) {
    const auto cu = partition.community_of(e.u);
    const auto cv = partition.community_of(e.v);
    if (cu == cv) in[cu] += static_cast<double>(e.weight);
    tot[cu] += static_cast<double>(e.weight);
    tot[cv] += static_cast<double>(e.weight);
  }
  double q = 0.0;
  for (std::size_t c = 0; c < k; ++c) {
    const double share = tot[c] / (2.0 * m);
    q += in[c] / m - share * share;
  }
  return q;
}

CommunityStructure partition_weighted_graph(const WeightedGraph& g, std::uint64_t seed) {
  const std::size_t n = g.num_nodes();
  std::vector<CommunityId> membership(n);
  std::iota(membership.begin(), membership.end(), 0u);
  const double total = static_cast<double>(g.total_weight());
  if (n == 0 || total == 0.0) return CommunityStructure(membership);

  LevelGraph level = from_weighted(g);
  std::uint64_t level_seed = seed;
  while (true) {
    std::vector<std::uint32_t> community(level.n);
    std::iota(community.begin(), community.end(), 0u);
    if (!local_moving(level, total, level_seed, community)) break;
    const auto count = renumber(community);
    for (auto& c : membership) c = community[c];
    if (count == level.n) break;
    level = aggregate(level, community, count);
    if (level_seed != 0) level_seed = level_seed * 6364136223846793005ULL + 1442695040888963407ULL;
  }
  return CommunityStructure(membership);
}

}  // namespace mlcd
