#include <algorithm>
#include <string>

#include "mlcd/consensus.hpp"
#include "mlcd/errors.hpp"

namespace mlcd {

ConsensusState::ConsensusState(const MultilayerGraph& g, std::span<const CommunityId> membership,
                               RetainedEdges retained)
    : graph_(&g), membership_(membership.begin(), membership.end()), retained_(std::move(retained)) {
  if (membership_.size() != g.num_entities()) {
    throw MismatchError("membership does not cover the graph's entities");
  }
  if (retained_.size() != g.num_layers()) throw MismatchError("retained edges do not match layers");
  for (LayerId l = 0; l < g.num_layers(); ++l) {
    if (retained_[l].size() != g.edges(l).size()) {
      throw MismatchError("retained edges do not match layer '" + g.layer_name(l) + "'");
    }
  }
  CommunityId slots = 0;
  for (const auto c : membership_) {
    if (c == kUncovered) throw MismatchError("membership must cover every entity");
    slots = std::max(slots, c + 1);
  }
  members_.assign(slots, {});
  for (NodeId v = 0; v < membership_.size(); ++v) members_[membership_[v]].push_back(v);
  rebuild();
}

void ConsensusState::rebuild() {
  const auto& g = *graph_;
  const std::size_t layers = g.num_layers();
  retained_degree_.assign(layers, std::vector<std::uint64_t>(g.num_entities(), 0));
  stats_.assign(members_.size(), std::vector<LayerStats>(layers));
  totals_.intra.assign(layers, 0);
  totals_.square.assign(layers, 0);
  for (LayerId l = 0; l < layers; ++l) {
    const auto edges = g.edges(l);
    for (EdgeId e = 0; e < edges.size(); ++e) {
      if (!retained_[l][e]) continue;
      const auto [u, v] = edges[e];
      ++retained_degree_[l][u];
      ++retained_degree_[l][v];
      stats_[membership_[u]][l].degree += 1;
      stats_[membership_[v]][l].degree += 1;
      if (membership_[u] == membership_[v]) {
        stats_[membership_[u]][l].intra += 1;
        totals_.intra[l] += 1;
      }
    }
    for (const auto& per_layer : stats_) {
      totals_.square[l] += per_layer[l].degree * per_layer[l].degree;
    }
  }
}

bool ConsensusState::cache_consistent() const {
  ConsensusState fresh(*graph_, membership_, retained_);
  // Slots may have trailing empties that the fresh copy does not create.
  if (fresh.retained_degree_ != retained_degree_ || fresh.totals_.intra != totals_.intra ||
      fresh.totals_.square != totals_.square) {
    return false;
  }
  for (std::size_t c = 0; c < stats_.size(); ++c) {
    const bool in_fresh = c < fresh.stats_.size();
    for (LayerId l = 0; l < graph_->num_layers(); ++l) {
      const LayerStats expect = in_fresh ? fresh.stats_[c][l] : LayerStats{};
      if (!(stats_[c][l] == expect)) return false;
    }
    const auto& expect_members = in_fresh ? fresh.members_[c] : std::vector<NodeId>{};
    if (members_[c] != expect_members) return false;
  }
  return true;
}

std::vector<CommunityId> ConsensusState::communities() const {
  std::vector<CommunityId> out;
  for (CommunityId c = 0; c < members_.size(); ++c) {
    if (!members_[c].empty()) out.push_back(c);
  }
  return out;
}

std::size_t ConsensusState::num_communities() const {
  return static_cast<std::size_t>(std::count_if(members_.begin(), members_.end(),
                                                [](const auto& m) { return !m.empty(); }));
}

std::vector<CommunityId> ConsensusState::neighbors(CommunityId c) const {
  std::vector<CommunityId> out;
  const auto& g = *graph_;
  for (const auto u : members_.at(c)) {
    for (LayerId l = 0; l < g.num_layers(); ++l) {
      for (const auto& nb : g.neighbors(l, u)) {
        const auto d = membership_[nb.node];
        if (d != c) out.push_back(d);
      }
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::size_t ConsensusState::num_retained() const {
  std::size_t total = 0;
  for (const auto& layer : retained_) total += static_cast<std::size_t>(std::count(layer.begin(), layer.end(), true));
  return total;
}

double ConsensusState::modularity() const {
  const auto& g = *graph_;
  const std::size_t layers = g.num_layers();
  double q = 0.0;
  for (LayerId l = 0; l < layers; ++l) {
    const double m = static_cast<double>(g.edges(l).size());
    if (m == 0.0) continue;
    q += static_cast<double>(totals_.intra[l]) / m -
         static_cast<double>(totals_.square[l]) / (4.0 * m * m);
  }
  return q / static_cast<double>(layers);
}

long double ConsensusState::gain_since(const Totals& before) const {
  const auto& g = *graph_;
  long double gain = 0.0L;
  for (LayerId l = 0; l < g.num_layers(); ++l) {
    const auto m = static_cast<long double>(g.edges(l).size());
    if (m == 0.0L) continue;
    const auto d_intra = static_cast<long double>(static_cast<std::int64_t>(totals_.intra[l] - before.intra[l]));
    const auto d_square =
        static_cast<long double>(static_cast<std::int64_t>(totals_.square[l] - before.square[l]));
    gain += (4.0L * m * d_intra - d_square) / (4.0L * m * m);
  }
  return gain / static_cast<long double>(g.num_layers());
}

void ConsensusState::bump_degree(LayerId l, CommunityId c, std::int64_t delta) {
  auto& d = stats_[c][l].degree;
  const std::uint64_t old_sq = d * d;
  d = static_cast<std::uint64_t>(static_cast<std::int64_t>(d) + delta);
  totals_.square[l] = totals_.square[l] - old_sq + d * d;
}

void ConsensusState::bump_intra(LayerId l, CommunityId c, std::int64_t delta) {
  stats_[c][l].intra = static_cast<std::uint64_t>(static_cast<std::int64_t>(stats_[c][l].intra) + delta);
  totals_.intra[l] = static_cast<std::uint64_t>(static_cast<std::int64_t>(totals_.intra[l]) + delta);
}

void ConsensusState::set_edge(LayerId l, EdgeId e, bool on) {
  const auto [u, v] = graph_->edges(l)[e];
  const std::int64_t delta = on ? 1 : -1;
  retained_[l][e] = on;
  retained_degree_[l][u] = static_cast<std::uint64_t>(static_cast<std::int64_t>(retained_degree_[l][u]) + delta);
  retained_degree_[l][v] = static_cast<std::uint64_t>(static_cast<std::int64_t>(retained_degree_[l][v]) + delta);
  const auto cu = membership_[u];
  const auto cv = membership_[v];
  bump_degree(l, cu, delta);
  bump_degree(l, cv, delta);
  if (cu == cv) bump_intra(l, cu, delta);
}

void ConsensusState::add_edge(LayerId l, EdgeId e) {
  if (retained_.at(l).at(e)) return;
  set_edge(l, e, true);
  journal_.push_back({StateOp::Kind::add_edge, l, e});
}

void ConsensusState::remove_edge(LayerId l, EdgeId e) {
  if (!retained_.at(l).at(e)) return;
  set_edge(l, e, false);
  journal_.push_back({StateOp::Kind::remove_edge, l, e});
}

void ConsensusState::relabel(NodeId v, CommunityId to) {
  const auto& g = *graph_;
  const auto from = membership_[v];
  for (LayerId l = 0; l < g.num_layers(); ++l) {
    std::int64_t toward_from = 0;
    std::int64_t toward_to = 0;
    for (const auto& nb : g.neighbors(l, v)) {
      if (!retained_[l][nb.edge]) continue;
      const auto c = membership_[nb.node];
      if (c == from) ++toward_from;
      if (c == to) ++toward_to;
    }
    const auto rd = static_cast<std::int64_t>(retained_degree_[l][v]);
    if (toward_from != 0) bump_intra(l, from, -toward_from);
    if (toward_to != 0) bump_intra(l, to, toward_to);
    if (rd != 0) {
      bump_degree(l, from, -rd);
      bump_degree(l, to, rd);
    }
  }
  auto& src = members_[from];
  src.erase(std::lower_bound(src.begin(), src.end(), v));
  auto& dst = members_[to];
  dst.insert(std::lower_bound(dst.begin(), dst.end(), v), v);
  membership_[v] = to;
}

void ConsensusState::move_node(NodeId v, CommunityId to) {
  const auto from = membership_.at(v);
  if (to >= members_.size()) throw Error("move to unknown community " + std::to_string(to));
  if (from == to) return;
  relabel(v, to);
  StateOp op{StateOp::Kind::move_node};
  op.node = v;
  op.from = from;
  op.to = to;
  journal_.push_back(op);
}

CommunityId ConsensusState::open_slot(bool& appended) {
  for (CommunityId c = 0; c < members_.size(); ++c) {
    if (members_[c].empty()) {
      appended = false;
      return c;
    }
  }
  appended = true;
  members_.emplace_back();
  stats_.emplace_back(graph_->num_layers());
  return static_cast<CommunityId>(members_.size() - 1);
}

CommunityId ConsensusState::open_community() {
  StateOp op{StateOp::Kind::open_community};
  op.to = open_slot(op.appended);
  journal_.push_back(op);
  return op.to;
}

void ConsensusState::rollback(std::size_t mark) {
  while (journal_.size() > mark) {
    const StateOp op = journal_.back();
    journal_.pop_back();
    switch (op.kind) {
      case StateOp::Kind::add_edge: set_edge(op.layer, op.edge, false); break;
      case StateOp::Kind::remove_edge: set_edge(op.layer, op.edge, true); break;
      case StateOp::Kind::move_node: relabel(op.node, op.from); break;
      case StateOp::Kind::open_community:
        if (op.appended) {
          members_.pop_back();
          stats_.pop_back();
        }
        break;
    }
  }
}

std::vector<StateOp> ConsensusState::ops_since(std::size_t mark) const {
  return {journal_.begin() + static_cast<std::ptrdiff_t>(mark), journal_.end()};
}

void ConsensusState::apply(std::span<const StateOp> ops) {
  for (const auto& op : ops) {
    switch (op.kind) {
      case StateOp::Kind::add_edge: add_edge(op.layer, op.edge); break;
      case StateOp::Kind::remove_edge: remove_edge(op.layer, op.edge); break;
      case StateOp::Kind::move_node: move_node(op.node, op.to); break;
      case StateOp::Kind::open_community: {
        const auto c = open_community();
        if (c != op.to) throw Error("replayed community id differs from the recorded one");
        break;
      }
    }
  }
}

bool operator==(const ConsensusState& a, const ConsensusState& b) {
  return a.graph_ == b.graph_ && a.membership_ == b.membership_ && a.members_ == b.members_ &&
         a.retained_ == b.retained_ && a.retained_degree_ == b.retained_degree_ &&
         a.stats_ == b.stats_ && a.totals_.intra == b.totals_.intra &&
         a.totals_.square == b.totals_.square;
}

}  // namespace mlcd
