#pragma once

#include <numeric>
#include <set>
#include <vector>

#include "mlcd/ensemble.hpp"

namespace mlcd::test {

// Union-find components over n nodes; returns sets of members.
inline std::set<std::set<NodeId>> components(std::size_t n,
                                             const std::vector<std::pair<NodeId, NodeId>>& edges) {
  std::vector<NodeId> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](NodeId x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const auto& [u, v] : edges) parent[find(u)] = find(v);
  std::vector<std::set<NodeId>> by_root(n);
  for (NodeId v = 0; v < n; ++v) by_root[find(v)].insert(v);
  std::set<std::set<NodeId>> out;
  for (auto& s : by_root) {
    if (!s.empty()) out.insert(std::move(s));
  }
  return out;
}

inline std::set<std::set<NodeId>> groups(const CommunityStructure& c) {
  std::set<std::set<NodeId>> out;
  for (const auto& members : c.communities()) out.insert({members.begin(), members.end()});
  return out;
}

}  // namespace mlcd::test
