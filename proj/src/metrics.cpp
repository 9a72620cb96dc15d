#include "mlcd/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <map>
#include <ostream>
#include <queue>

#include "mlcd/errors.hpp"

namespace mlcd {

double multilayer_modularity(const MultilayerGraph& g, std::span<const CommunityId> membership,
                             const RetainedEdges& retained) {
  if (membership.size() != g.num_entities() || retained.size() != g.num_layers()) {
    throw MismatchError("membership or retained edges do not match the graph");
  }
  if (g.num_layers() == 0) return 0.0;
  double total = 0.0;
  for (LayerId l = 0; l < g.num_layers(); ++l) {
    const auto edges = g.edges(l);
    if (edges.empty()) continue;
    if (retained[l].size() != edges.size()) throw MismatchError("retained edges do not match layer");
    std::map<CommunityId, double> intra;
    std::map<CommunityId, double> degree;
    for (EdgeId e = 0; e < edges.size(); ++e) {
      if (!retained[l][e]) continue;
      const auto cu = membership[edges[e].u];
      const auto cv = membership[edges[e].v];
      degree[cu] += 1.0;
      degree[cv] += 1.0;
      if (cu == cv) intra[cu] += 1.0;
    }
    const double m = static_cast<double>(edges.size());
    double layer = 0.0;
    for (const auto& [c, e] : intra) layer += e / m;
    for (const auto& [c, d] : degree) layer -= (d / (2.0 * m)) * (d / (2.0 * m));
    total += layer;
  }
  return total / static_cast<double>(g.num_layers());
}

double multilayer_modularity(const MultilayerGraph& g, const ConsensusState& state) {
  return multilayer_modularity(g, state.membership(), state.retained_edges());
}

namespace {

constexpr std::size_t kUnreached = static_cast<std::size_t>(-1);

void bfs(const MultilayerGraph& g, LayerId l, NodeId source, std::vector<std::size_t>& dist,
         std::vector<NodeId>& order) {
  order.clear();
  dist[source] = 0;
  order.push_back(source);
  for (std::size_t head = 0; head < order.size(); ++head) {
    const auto u = order[head];
    for (const auto& nb : g.neighbors(l, u)) {
      if (dist[nb.node] == kUnreached) {
        dist[nb.node] = dist[u] + 1;
        order.push_back(nb.node);
      }
    }
  }
}

std::size_t layer_diameter(const MultilayerGraph& g, LayerId l) {
  std::vector<std::size_t> dist(g.num_entities(), kUnreached);
  std::vector<NodeId> order;
  std::vector<char> seen(g.num_entities(), 0);
  std::vector<NodeId> largest;
  for (const auto v : g.layer_nodes(l)) {
    if (seen[v]) continue;
    bfs(g, l, v, dist, order);
    for (const auto u : order) {
      seen[u] = 1;
      dist[u] = kUnreached;
    }
    if (order.size() > largest.size()) largest = order;
  }
  std::size_t diameter = 0;
  for (const auto v : largest) {
    bfs(g, l, v, dist, order);
    for (const auto u : order) {
      diameter = std::max(diameter, dist[u]);
      dist[u] = kUnreached;
    }
  }
  return diameter;
}

// Silhouette of one entity; all state is local so sources run independently.
double node_silhouette(const MultilayerGraph& g, std::span<const CommunityId> membership,
                       std::span<const std::size_t> community_size,
                       std::span<const std::size_t> diameters, NodeId v) {
  const auto own = membership[v];
  if (community_size[own] <= 1) return 0.0;
  const auto n = g.num_entities();
  std::vector<double> dist_sum(n, 0.0);
  std::vector<std::uint32_t> shared(n, 0);
  std::vector<std::size_t> dist(n, kUnreached);
  std::vector<NodeId> order;
  for (LayerId l = 0; l < g.num_layers(); ++l) {
    if (!g.present(l, v)) continue;
    bfs(g, l, v, dist, order);
    const double diam = static_cast<double>(std::max<std::size_t>(diameters[l], 1));
    for (const auto u : g.layer_nodes(l)) {
      ++shared[u];
      dist_sum[u] += dist[u] == kUnreached
                         ? 1.0
                         : std::min(1.0, static_cast<double>(dist[u]) / diam);
    }
    for (const auto u : order) dist[u] = kUnreached;
  }
  std::vector<double> per_community(community_size.size(), 0.0);
  for (NodeId u = 0; u < n; ++u) {
    if (u == v) continue;
    per_community[membership[u]] += shared[u] == 0 ? 1.0 : dist_sum[u] / shared[u];
  }
  const double a = per_community[own] / static_cast<double>(community_size[own] - 1);
  double b = INFINITY;
  for (CommunityId c = 0; c < community_size.size(); ++c) {
    if (c == own || community_size[c] == 0) continue;
    b = std::min(b, per_community[c] / static_cast<double>(community_size[c]));
  }
  const double scale = std::max(a, b);
  return scale > 0.0 ? (b - a) / scale : 0.0;
}

double entropy(std::span<const std::size_t> counts, double n) {
  double h = 0.0;
  for (const auto c : counts) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / n;
    h -= p * std::log(p);
  }
  return h;
}

}  // namespace

std::vector<std::size_t> layer_diameters(const MultilayerGraph& g, Exec exec) {
  std::vector<std::size_t> out(g.num_layers(), 0);
  const auto layers = static_cast<std::int64_t>(g.num_layers());
#pragma omp parallel for schedule(dynamic) if (exec == Exec::parallel)
  for (std::int64_t l = 0; l < layers; ++l) {
    out[static_cast<std::size_t>(l)] = layer_diameter(g, static_cast<LayerId>(l));
  }
  return out;
}

double multilayer_silhouette(const MultilayerGraph& g, std::span<const CommunityId> membership,
                             Exec exec) {
  if (membership.size() != g.num_entities()) {
    throw MismatchError("membership does not match the graph");
  }
  const auto n = g.num_entities();
  if (n == 0) return 0.0;
  CommunityId slots = 0;
  for (const auto c : membership) {
    if (c == kUncovered) throw MismatchError("membership must cover every entity");
    slots = std::max(slots, c + 1);
  }
  std::vector<std::size_t> size(slots, 0);
  for (const auto c : membership) ++size[c];
  if (std::count_if(size.begin(), size.end(), [](auto s) { return s > 0; }) < 2) return 0.0;

  const auto diameters = layer_diameters(g, exec);
  std::vector<double> score(n, 0.0);
  const auto count = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(dynamic) if (exec == Exec::parallel)
  for (std::int64_t v = 0; v < count; ++v) {
    score[static_cast<std::size_t>(v)] =
        node_silhouette(g, membership, size, diameters, static_cast<NodeId>(v));
  }
  // Fixed summation order keeps both paths bit-identical.
  double total = 0.0;
  for (const auto s : score) total += s;
  return std::clamp(total / static_cast<double>(n), -1.0, 1.0);
}

double multilayer_silhouette(const MultilayerGraph& g, const ConsensusState& state, Exec exec) {
  return multilayer_silhouette(g, state.membership(), exec);
}

double nmi(const CommunityStructure& a, const CommunityStructure& b) {
  if (a.universe_size() != b.universe_size()) throw MismatchError("partitions differ in size");
  std::map<std::pair<CommunityId, CommunityId>, std::size_t> joint;
  std::vector<std::size_t> ca(a.num_communities(), 0);
  std::vector<std::size_t> cb(b.num_communities(), 0);
  std::size_t n = 0;
  for (NodeId v = 0; v < a.universe_size(); ++v) {
    if (a.covers(v) != b.covers(v)) throw MismatchError("partitions cover different nodes");
    if (!a.covers(v)) continue;
    ++n;
    ++ca[a.community_of(v)];
    ++cb[b.community_of(v)];
    ++joint[{a.community_of(v), b.community_of(v)}];
  }
  if (n == 0 || a == b) return 1.0;
  const double nn = static_cast<double>(n);
  const double ha = entropy(ca, nn);
  const double hb = entropy(cb, nn);
  if (ha <= 0.0 || hb <= 0.0) return a == b ? 1.0 : 0.0;
  double mi = 0.0;
  for (const auto& [key, c] : joint) {
    const double pab = static_cast<double>(c) / nn;
    const double pa = static_cast<double>(ca[key.first]) / nn;
    const double pb = static_cast<double>(cb[key.second]) / nn;
    mi += pab * std::log(pab / (pa * pb));
  }
  return std::clamp(mi / std::sqrt(ha * hb), 0.0, 1.0);
}

double ensemble_avg_nmi(const Ensemble& e, const CommunityStructure& c) {
  if (e.size() == 0) return 0.0;
  double total = 0.0;
  for (const auto& layer : e.structures) {
    if (layer.universe_size() != c.universe_size()) {
      throw MismatchError("ensemble and consensus differ in node count");
    }
    std::vector<CommunityId> restricted(c.universe_size(), kUncovered);
    for (NodeId v = 0; v < c.universe_size(); ++v) {
      if (!layer.covers(v)) continue;
      if (!c.covers(v)) throw MismatchError("consensus does not cover every ensemble node");
      restricted[v] = c.community_of(v);
    }
    total += nmi(layer, CommunityStructure(restricted));
  }
  return total / static_cast<double>(e.size());
}

MetricReport evaluate(const MultilayerGraph& g, const ConsensusState& state, Exec exec) {
  MetricReport report;
  report.modularity = multilayer_modularity(g, state);
  report.silhouette = multilayer_silhouette(g, state, exec);
  for (const auto& members : state.structure().communities()) report.sizes.push_back(members.size());
  std::sort(report.sizes.begin(), report.sizes.end(), std::greater<>());
  report.num_communities = report.sizes.size();
  return report;
}

void write_report_tsv(std::ostream& out, const MetricReport& report) {
  const auto old_precision = out.precision(17);
  if (report.lower_bound_modularity) {
    out << "modularity_lower_bound\t" << *report.lower_bound_modularity << '\n';
  }
  out << "modularity\t" << report.modularity << '\n';
  out << "silhouette\t" << report.silhouette << '\n';
  out << "communities\t" << report.num_communities << '\n';
  out << "sizes\t";
  for (std::size_t i = 0; i < report.sizes.size(); ++i) out << (i ? "," : "") << report.sizes[i];
  out << '\n';
  if (report.nmi) out << "nmi\t" << *report.nmi << '\n';
  if (report.ensemble_nmi) out << "ensemble_nmi\t" << *report.ensemble_nmi << '\n';
  out.precision(old_precision);
}

void write_report_text(std::ostream& out, const MetricReport& report) {
  const auto flags = out.flags();
  const auto old_precision = out.precision(6);
  out << std::fixed;
  if (report.lower_bound_modularity) {
    out << "Q(lower bound)  " << *report.lower_bound_modularity << '\n';
    out << "Q(final)        " << report.modularity << '\n';
  } else {
    out << "modularity      " << report.modularity << '\n';
  }
  out << "silhouette      " << report.silhouette << '\n';
  out << "communities     " << report.num_communities << '\n';
  out << "largest sizes   ";
  const auto shown = std::min<std::size_t>(report.sizes.size(), 10);
  for (std::size_t i = 0; i < shown; ++i) out << (i ? " " : "") << report.sizes[i];
  if (report.sizes.size() > shown) out << " ...";
  out << '\n';
  if (report.nmi) out << "NMI             " << *report.nmi << '\n';
  if (report.ensemble_nmi) out << "ensemble NMI    " << *report.ensemble_nmi << '\n';
  out.precision(old_precision);
  out.flags(flags);
}

}  // namespace mlcd
