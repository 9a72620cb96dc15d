#include <algorithm>
#include <map>
#include <string>

#include "mlcd/consensus.hpp"
#include "mlcd/errors.hpp"

namespace mlcd {

namespace {

// Runs `change` against the state, captures it as a candidate, and undoes it.
template <class Change>
Candidate evaluate(ConsensusState& state, Change&& change) {
  const auto start = state.mark();
  const auto before = state.totals();
  change();
  Candidate cand;
  cand.ops = state.ops_since(start);
  cand.gain = state.gain_since(before);
  cand.q = state.modularity();
  state.rollback(start);
  return cand;
}

Candidate no_change(const ConsensusState& state) {
  Candidate cand;
  cand.q = state.modularity();
  return cand;
}

}  // namespace

ConsensusState cc_emcd(const MultilayerGraph& g, const CoassociationMatrix& filtered) {
  if (filtered.num_entities() != g.num_entities() || filtered.num_layers() != g.num_layers()) {
    throw MismatchError("co-association matrix was not built from this graph");
  }
  const auto gm = build_coassociation_graph(filtered);
  const auto components = connected_components(gm.graph);
  RetainedEdges retained(g.num_layers());
  for (LayerId l = 0; l < g.num_layers(); ++l) retained[l].assign(g.edges(l).size(), false);
  for (const auto& entry : filtered.entries()) {
    for (const auto l : entry.layers) {
      const auto e = g.edge_index(l, entry.u, entry.v);
      if (!e) {
        throw MismatchError("co-association entry (" + g.entity_name(entry.u) + ", " +
                            g.entity_name(entry.v) + ") has no edge in layer '" +
                            g.layer_name(l) + "'");
      }
      retained[l][*e] = true;
    }
  }
  return ConsensusState(g, components, std::move(retained));
}

Candidate update_community(ConsensusState& state, CommunityId c, LayerId l) {
  const auto& g = state.graph();
  return evaluate(state, [&] {
    for (const auto u : state.members(c)) {
      for (const auto& nb : g.neighbors(l, u)) {
        if (nb.node > u && state.community_of(nb.node) == c) state.add_edge(l, nb.edge);
      }
    }
  });
}

Candidate update_community_structure(ConsensusState& state, CommunityId cj, CommunityId ch,
                                     LayerId l) {
  const auto& g = state.graph();
  auto add = evaluate(state, [&] {
    for (const auto u : state.members(cj)) {
      for (const auto& nb : g.neighbors(l, u)) {
        if (state.community_of(nb.node) == ch) state.add_edge(l, nb.edge);
      }
    }
  });
  auto remove = evaluate(state, [&] {
    for (const auto u : state.members(cj)) {
      for (const auto& nb : g.neighbors(l, u)) {
        if (state.community_of(nb.node) == ch) state.remove_edge(l, nb.edge);
      }
    }
  });
  if (add.empty() && remove.empty()) return no_change(state);
  if (remove.empty()) return add;
  if (add.empty()) return remove;
  return add.gain > remove.gain ? add : remove;
}

Candidate relocate_nodes(ConsensusState& state, CommunityId cj, CommunityId ch) {
  const auto& g = state.graph();
  return evaluate(state, [&] {
    while (true) {
      const auto members = std::vector<NodeId>(state.members(cj).begin(), state.members(cj).end());
      if (members.empty()) break;
      std::vector<std::pair<std::int64_t, NodeId>> queue;
      queue.reserve(members.size());
      for (const auto v : members) {
        std::int64_t priority = 0;
        for (LayerId l = 0; l < g.num_layers(); ++l) {
          for (const auto& nb : g.neighbors(l, v)) {
            const auto c = state.community_of(nb.node);
            if (c == ch) ++priority;
            else if (c == cj) --priority;
          }
        }
        queue.emplace_back(-priority, v);
      }
      std::sort(queue.begin(), queue.end());

      bool kept = false;
      for (const auto& [neg_priority, v] : queue) {
        const auto start = state.mark();
        const auto before = state.totals();
        const double q_before = state.modularity();
        state.move_node(v, ch);
        if (state.gain_since(before) > 0.0L && state.modularity() > q_before) {
          kept = true;
          break;
        }
        state.rollback(start);
      }
      if (!kept) break;
    }
  });
}

Candidate partition_community(ConsensusState& state, CommunityId c, std::uint64_t seed) {
  const auto members = std::vector<NodeId>(state.members(c).begin(), state.members(c).end());
  if (members.size() < 2) return no_change(state);
  const auto& g = state.graph();

  std::vector<NodeId> local(g.num_entities(), kNoNode);
  for (std::size_t i = 0; i < members.size(); ++i) local[members[i]] = static_cast<NodeId>(i);
  std::map<std::pair<NodeId, NodeId>, std::uint64_t> layers_linked;
  for (const auto u : members) {
    for (LayerId l = 0; l < g.num_layers(); ++l) {
      for (const auto& nb : g.neighbors(l, u)) {
        if (nb.node > u && local[nb.node] != kNoNode && state.retained(l, nb.edge)) {
          ++layers_linked[{local[u], local[nb.node]}];
        }
      }
    }
  }
  std::vector<WeightedEdge> edges;
  edges.reserve(layers_linked.size());
  for (const auto& [pair, w] : layers_linked) edges.push_back({pair.first, pair.second, w});
  const auto parts = partition_weighted_graph(WeightedGraph(members.size(), std::move(edges)), seed);
  if (parts.num_communities() < 2) return no_change(state);

  return evaluate(state, [&] {
    // Open each slot right before filling it: an empty slot is reusable.
    const auto groups = parts.communities();
    for (std::size_t k = 1; k < groups.size(); ++k) {
      const auto target = state.open_community();
      for (const auto i : groups[k]) state.move_node(members[i], target);
    }
  });
}

}  // namespace mlcd
