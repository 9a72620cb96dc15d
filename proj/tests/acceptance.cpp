// Acceptance suite: one PASS/FAIL line per criterion.
//
//   mlcd_acceptance        run every criterion
//   mlcd_acceptance N      run criterion N only

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <iomanip>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "mlcd/coassoc.hpp"
#include "mlcd/consensus.hpp"
#include "mlcd/ensemble.hpp"
#include "mlcd/errors.hpp"
#include "mlcd/filters.hpp"
#include "mlcd/metrics.hpp"
#include "support/components.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace mlcd;
using namespace mlcd::test;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::set<NodeId> ids(const MultilayerGraph& g, std::initializer_list<const char*> names) {
  std::set<NodeId> out;
  for (const auto* n : names) out.insert(id(g, n));
  return out;
}

// Random suite shared by criteria 2, 3, 6 and 7.
struct Instance {
  MultilayerGraph graph;
  Ensemble ensemble;
  double theta;
};

const std::vector<Instance>& random_suite() {
  static const std::vector<Instance> suite = [] {
    std::vector<Instance> out;
    std::mt19937_64 rng(2017);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    for (std::uint64_t i = 0; i < 100; ++i) {
      PlantedConfig s;
      s.nodes = 10 + rng() % 21;
      s.layers = 2 + rng() % 4;
      s.groups = 2 + rng() % 3;
      s.p_in = 0.3 + 0.5 * u01(rng);
      s.p_out = 0.02 + 0.13 * u01(rng);
      s.presence = 0.7 + 0.3 * u01(rng);
      auto g = planted(s, rng());
      auto e = build_ensemble(g, i);
      const double theta = 0.25 * static_cast<double>(1 + i % 3);
      out.push_back({std::move(g), std::move(e), theta});
    }
    return out;
  }();
  return suite;
}

FilterConfig config_for(FilterModel model, const Instance& inst) {
  FilterConfig cfg;
  if (model == FilterModel::threshold) cfg.theta = inst.theta;
  return cfg;
}

constexpr FilterModel kModels[] = {FilterModel::threshold, FilterModel::mlf, FilterModel::gloss,
                                   FilterModel::ecm};

// Criterion 2 and 3 share one sweep; the results are cached.
struct OptimizerSweep {
  std::size_t runs = 0;
  std::size_t commits = 0;
  std::size_t monotone_violations = 0;
  std::size_t bound_violations = 0;
  std::size_t coherence_violations = 0;
  std::size_t failures = 0;
  double worst_coherence = 0.0;
  double seconds = 0.0;
  std::vector<double> silhouettes;
  std::string first_problem;
};

const OptimizerSweep& optimizer_sweep() {
  static const OptimizerSweep sweep = [] {
    OptimizerSweep s;
    const auto& suite = random_suite();
    const auto t0 = Clock::now();
    for (std::size_t i = 0; i < suite.size(); ++i) {
      const auto& inst = suite[i];
      for (const auto model : kModels) {
        ++s.runs;
        double last = 0.0;
        bool first = true;
        OptimizerOptions opts;
        opts.on_commit = [&](const ConsensusState& st, const CommitRecord& rec) {
          ++s.commits;
          const bool ordered = rec.q_after > rec.q_before && (first || rec.q_before == last);
          if (!ordered) {
            ++s.monotone_violations;
            if (s.first_problem.empty()) s.first_problem = "non-increasing commit";
          }
          first = false;
          last = rec.q_after;
          const double oracle = modularity_pairs(st.graph(), st.membership(), st.retained_edges());
          const double gap = std::abs(st.modularity() - oracle);
          s.worst_coherence = std::max(s.worst_coherence, gap);
          if (gap > 1e-12) ++s.coherence_violations;
        };
        try {
          const auto r = m_emcd_star(inst.graph, inst.ensemble, model, config_for(model, inst), opts);
          if (!first && r.report.log.front().q_before != r.lower_bound.modularity()) {
            ++s.monotone_violations;
          }
          if (!(r.consensus.modularity() >= r.lower_bound.modularity())) ++s.bound_violations;
          s.silhouettes.push_back(multilayer_silhouette(inst.graph, r.consensus));
        } catch (const std::exception& e) {
          ++s.failures;
          if (s.first_problem.empty()) {
            s.first_problem = "instance " + std::to_string(i) + " " +
                              std::string(to_string(model)) + ": " + e.what();
          }
        }
      }
    }
    s.seconds = seconds_since(t0);
    return s;
  }();
  return sweep;
}

Outcome criterion1() {
  const auto t0 = Clock::now();
  const auto g = toy();
  const auto m = build_coassociation(g, build_ensemble(g));
  auto groups_at = [&](double theta) {
    return groups(cc_emcd(g, filter_threshold(m, theta)).structure());
  };
  const std::set<std::set<NodeId>> all_kept{ids(g, {"1", "2", "3", "4", "5", "6", "7", "8"}),
                                            ids(g, {"9", "10", "11"})};
  const std::set<std::set<NodeId>> middle{ids(g, {"1", "2", "3", "4"}),
                                          ids(g, {"5", "6", "7", "8"}), ids(g, {"9"}),
                                          ids(g, {"10"}), ids(g, {"11"})};
  const std::set<std::set<NodeId>> high{ids(g, {"1", "2", "3"}), ids(g, {"5", "7"}), ids(g, {"4"}),
                                        ids(g, {"6"}), ids(g, {"8"}), ids(g, {"9"}),
                                        ids(g, {"10"}), ids(g, {"11"})};
  const std::set<std::set<NodeId>> wanted{ids(g, {"1", "2", "3", "4"}),
                                          ids(g, {"5", "6", "7", "8"}),
                                          ids(g, {"9", "10", "11"})};
  Outcome o;
  std::size_t regimes_wrong = 0;
  std::size_t pathology_hits = 0;
  const int steps = 3000;
  for (int k = 0; k <= steps; ++k) {
    const double theta = static_cast<double>(k) / steps;
    const auto got = groups_at(theta);
    const auto& expected = theta <= 1.0 / 3.0 ? all_kept : theta <= 2.0 / 3.0 ? middle : high;
    if (got != expected) ++regimes_wrong;
    if (got == wanted) ++pathology_hits;
  }
  if (filter_threshold(m, 0.2).size() != m.size()) ++regimes_wrong;
  const double secs = seconds_since(t0);
  o.pass = regimes_wrong == 0 && pathology_hits == 0 && secs < 1.0;
  std::ostringstream d;
  d << steps + 1 << " theta values, " << regimes_wrong << " regime mismatches, " << pathology_hits
    << " reach {1..4},{5..8},{9,10,11}, " << std::fixed << std::setprecision(3) << secs << " s";
  o.detail = d.str();
  return o;
}

Outcome criterion2() {
  const auto& s = optimizer_sweep();
  Outcome o;
  o.pass = s.monotone_violations == 0 && s.bound_violations == 0 && s.failures == 0 &&
           s.seconds < 60.0 && s.runs >= 400;
  std::ostringstream d;
  d << s.runs << " runs, " << s.commits << " commits, " << s.monotone_violations
    << " ordering violations, " << s.bound_violations << " below lower bound, " << s.failures
    << " failures, " << std::fixed << std::setprecision(2) << s.seconds << " s";
  if (!s.first_problem.empty()) d << " (" << s.first_problem << ")";
  o.detail = d.str();
  return o;
}

Outcome criterion3() {
  const auto& s = optimizer_sweep();
  Outcome o;
  o.pass = s.coherence_violations == 0 && s.failures == 0 && s.commits > 0;
  std::ostringstream d;
  d << s.commits << " commits checked, worst |Q - oracle| = " << std::scientific
    << std::setprecision(2) << s.worst_coherence;
  o.detail = d.str();
  return o;
}

CoassociationGraph as_coassociation(const WeightedGraph& w) {
  std::vector<CoassociationEntry> entries;
  std::uint64_t top = 1;
  for (const auto& e : w.edges()) top = std::max(top, e.weight);
  for (const auto& e : w.edges()) {
    std::vector<LayerId> layers;
    for (LayerId l = 0; l < e.weight; ++l) layers.push_back(l);
    entries.push_back({e.u, e.v, std::move(layers)});
  }
  return build_coassociation_graph(CoassociationMatrix(w.num_nodes(), top, std::move(entries)));
}

Outcome criterion4() {
  std::size_t edges = 0;
  double worst = 0.0;
  std::mt19937_64 rng(4);
  for (int i = 0; i < 50; ++i) {
    const auto n = 4 + rng() % 12;
    const auto w = random_weighted(n, 0.2 + 0.5 * (rng() % 100) / 100.0, 1 + rng() % 4,
                                   5 + rng() % 26, rng());
    const auto gm = as_coassociation(w);
    const auto sig = mlf_pvalues(gm);
    const auto oracle = mlf_oracle(w);
    for (std::size_t k = 0; k < oracle.size(); ++k) {
      worst = std::max(worst, std::abs(sig.pvalues[k] - oracle[k]));
      ++edges;
    }
  }
  Outcome o;
  o.pass = worst <= 1e-10;
  std::ostringstream d;
  d << "50 graphs, " << edges << " edges, worst |gamma - oracle| = " << std::scientific
    << std::setprecision(2) << worst;
  o.detail = d.str();
  return o;
}

Outcome criterion5() {
  double worst_rel = 0.0;
  double worst_tail = 0.0;
  std::size_t failures = 0;
  std::mt19937_64 rng(5);
  for (int i = 0; i < 20; ++i) {
    const auto n = 5 + rng() % 36;
    const auto w = random_weighted(n, 0.1 + 0.4 * (rng() % 100) / 100.0, 1 + rng() % 6, 100000,
                                   rng());
    EcmParameters p;
    try {
      p = ecm_fit(w);
    } catch (const SolverError&) {
      ++failures;
      continue;
    }
    std::vector<double> x(n), y(n), k(n, 0.0), s(n, 0.0);
    for (NodeId v = 0; v < n; ++v) {
      x[v] = p.x(v);
      y[v] = p.y(v);
    }
    for (const auto& e : w.edges()) {
      k[e.u] += 1;
      k[e.v] += 1;
      s[e.u] += static_cast<double>(e.weight);
      s[e.v] += static_cast<double>(e.weight);
    }
    const auto m = ecm_moments(x, y);
    for (NodeId v = 0; v < n; ++v) {
      if (k[v] == 0) continue;
      worst_rel = std::max(worst_rel, std::abs(m.degree[v] - k[v]) / k[v]);
      worst_rel = std::max(worst_rel, std::abs(m.strength[v] - s[v]) / s[v]);
    }
    for (const auto& e : w.edges()) {
      const double xx = x[e.u] * x[e.v];
      const double yy = y[e.u] * y[e.v];
      if (!std::isfinite(xx)) continue;
      for (std::uint64_t t = 1; t <= e.weight + 2; ++t) {
        worst_tail = std::max(worst_tail, std::abs(p.tail(e.u, e.v, t) - ecm_tail_series(xx, yy, t)));
      }
    }
  }
  Outcome o;
  o.pass = failures == 0 && worst_rel <= 1e-6 && worst_tail <= 1e-10;
  std::ostringstream d;
  d << "20 graphs, " << failures << " fit failures, worst relative constraint error "
    << std::scientific << std::setprecision(2) << worst_rel << ", worst tail error " << worst_tail;
  o.detail = d.str();
  return o;
}

Outcome criterion6() {
  std::size_t instances = 0;
  std::size_t ordered = 0;
  std::size_t errors = 0;
  auto check = [&](const MultilayerGraph& g, const Ensemble& e) {
    const auto m = build_coassociation(g, e);
    if (m.empty()) return;
    ++instances;
    try {
      const auto removed = [&](FilterModel model) {
        return m.size() - filter_coassociation(m, model, {}).filtered.size();
      };
      const auto gloss = removed(FilterModel::gloss);
      if (gloss >= removed(FilterModel::mlf) && gloss >= removed(FilterModel::ecm)) ++ordered;
    } catch (const std::exception&) {
      ++errors;
    }
  };
  const auto g = toy();
  check(g, build_ensemble(g));
  for (const auto& inst : random_suite()) check(inst.graph, inst.ensemble);
  const double share = instances ? static_cast<double>(ordered) / static_cast<double>(instances) : 0.0;
  Outcome o;
  o.pass = errors == 0 && share >= 0.9;
  std::ostringstream d;
  d << "GloSS prunes at least as much in " << ordered << "/" << instances << " instances ("
    << std::fixed << std::setprecision(1) << 100.0 * share << "%), " << errors << " errors";
  o.detail = d.str();
  return o;
}

Outcome criterion7() {
  Outcome o;
  std::ostringstream d;
  const auto g = two_triangles();
  RetainedEdges all(1, std::vector<bool>(g.edges(0).size(), true));
  const double q = multilayer_modularity(g, std::vector<CommunityId>{0, 0, 0, 1, 1, 1}, all);
  const bool q_ok = std::abs(q - 0.5) <= 1e-12;

  std::mt19937_64 rng(7);
  double worst_identity = 0.0;
  double worst_symmetry = 0.0;
  for (int t = 0; t < 200; ++t) {
    const auto n = 2 + rng() % 40;
    std::vector<CommunityId> a(n), b(n);
    for (auto& v : a) v = static_cast<CommunityId>(rng() % (1 + rng() % 6));
    for (auto& v : b) v = static_cast<CommunityId>(rng() % (1 + rng() % 6));
    const CommunityStructure ca(a), cb(b);
    worst_identity = std::max(worst_identity, std::abs(nmi(ca, ca) - 1.0));
    worst_symmetry = std::max(worst_symmetry, std::abs(nmi(ca, cb) - nmi(cb, ca)));
  }
  const auto& sweep = optimizer_sweep();
  std::size_t out_of_range = 0;
  for (const auto s : sweep.silhouettes) out_of_range += !(s >= -1.0 && s <= 1.0);
  o.pass = q_ok && worst_identity == 0.0 && worst_symmetry <= 1e-12 && out_of_range == 0 &&
           !sweep.silhouettes.empty();
  d << "two-triangle Q = " << std::setprecision(15) << q << ", NMI identity error "
    << worst_identity << ", symmetry error " << std::scientific << std::setprecision(2)
    << worst_symmetry << ", silhouette outside [-1,1] in " << out_of_range << "/"
    << sweep.silhouettes.size() << " runs";
  o.detail = d.str();
  return o;
}

Outcome criterion8() {
  const auto g = load_multilayer(data_path("aucs.edges"));
  Outcome o;
  std::ostringstream d;
  bool counts = g.num_entities() == 61 && g.total_edges() == 620 && g.num_layers() == 5;
  d << g.num_entities() << " entities, " << g.total_edges() << " edges, " << g.num_layers()
    << " layers;";
  double q_final[3] = {0, 0, 0};
  bool fast = true;
  const FilterModel models[] = {FilterModel::mlf, FilterModel::ecm, FilterModel::gloss};
  for (int k = 0; k < 3; ++k) {
    const auto t0 = Clock::now();
    const auto e = build_ensemble(g);
    const auto r = m_emcd_star(g, e, models[k], {});
    const auto report = evaluate(g, r.consensus);
    const double secs = seconds_since(t0);
    q_final[k] = report.modularity;
    fast = fast && secs < 10.0;
    d << ' ' << to_string(models[k]) << " Q=" << std::fixed << std::setprecision(4)
      << report.modularity << " (" << std::setprecision(3) << secs << " s)";
  }
  o.pass = counts && fast && q_final[0] > q_final[2] && q_final[1] > q_final[2];
  o.detail = d.str();
  return o;
}

const std::vector<std::pair<std::string, std::function<Outcome()>>>& criteria() {
  static const std::vector<std::pair<std::string, std::function<Outcome()>>> list{
      {"toy fixture threshold regimes", criterion1},
      {"modularity monotonicity", criterion2},
      {"incremental-vs-oracle coherence", criterion3},
      {"MLF oracle equivalence", criterion4},
      {"ECM constraint satisfaction", criterion5},
      {"filter pruning order", criterion6},
      {"metric sanity", criterion7},
      {"AUCS end-to-end", criterion8},
  };
  return list;
}

}  // namespace

int main(int argc, char** argv) {
  const auto& list = criteria();
  std::size_t first = 1;
  std::size_t last = list.size();
  if (argc > 1) {
    first = last = std::strtoul(argv[1], nullptr, 10);
    if (first < 1 || first > list.size()) {
      std::cerr << "criterion must be in 1.." << list.size() << '\n';
      return 2;
    }
  }
  int failed = 0;
  for (auto i = first; i <= last; ++i) {
    Outcome o;
    try {
      o = list[i - 1].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::cout << (o.pass ? "[PASS] " : "[FAIL] ") << i << ". " << list[i - 1].first << ": "
              << o.detail << std::endl;
    failed += !o.pass;
  }
  return failed == 0 ? 0 : 1;
}
