#include <istream>
#include <ostream>
#include <string>
#include <unordered_map>

#include "mlcd/consensus.hpp"
#include "mlcd/errors.hpp"

namespace mlcd {

std::string_view to_string(Stage stage) {
  switch (stage) {
    case Stage::intra: return "intra";
    case Stage::inter: return "inter";
    case Stage::relocate: return "relocate";
    case Stage::partition: return "partition";
  }
  return "unknown";
}

namespace {

class Optimizer {
 public:
  Optimizer(ConsensusState& state, const OptimizerOptions& options)
      : state_(state), options_(options) {}

  OptimizerReport run() {
    state_.clear_journal();
    const auto& g = state_.graph();
    bool progress = true;
    while (progress && (options_.max_passes == 0 || report_.passes < options_.max_passes)) {
      progress = false;
      ++report_.passes;
      for (LayerId l = 0; l < g.num_layers(); ++l) {
        if (sweep_layer(l)) progress = true;
      }
    }
    return std::move(report_);
  }

 private:
  ConsensusState& state_;
  const OptimizerOptions& options_;
  OptimizerReport report_;

  bool commit(const Candidate& cand, LayerId l, Stage stage, CommunityId c,
              std::optional<CommunityId> neighbor) {
    const double q_before = state_.modularity();
    if (!cand.improves(q_before)) return false;
    state_.apply(cand.ops);
    state_.clear_journal();
    CommitRecord rec{report_.passes, l, stage, c, neighbor, q_before, state_.modularity(), cand.gain};
    report_.log.push_back(rec);
    if (options_.on_commit) options_.on_commit(state_, rec);
    return true;
  }

  bool sweep_layer(LayerId l) {
    bool committed = false;
    const auto live = state_.communities();
    if (live.empty()) return false;

    // Intra-community refinement: best community, lowest id on ties.
    CommunityId best = live.front();
    Candidate best_cand;
    bool have = false;
    for (const auto c : live) {
      auto cand = update_community(state_, c, l);
      if (!have || cand.gain > best_cand.gain) {
        best = c;
        best_cand = std::move(cand);
        have = true;
      }
    }
    committed |= commit(best_cand, l, Stage::intra, best, std::nullopt);

    // Inter-community refinement or relocation against each neighbor.
    const auto neighbors = state_.neighbors(best);
    Candidate top;
    Stage top_stage = Stage::inter;
    std::optional<CommunityId> top_neighbor;
    for (const auto h : neighbors) {
      auto inter = update_community_structure(state_, best, h, l);
      auto moved = relocate_nodes(state_, best, h);
      const bool relocation_wins = moved.gain >= inter.gain;
      auto& pick = relocation_wins ? moved : inter;
      if (!top_neighbor || pick.gain > top.gain) {
        top = std::move(pick);
        top_stage = relocation_wins ? Stage::relocate : Stage::inter;
        top_neighbor = h;
      }
    }
    if (top_neighbor && commit(top, l, top_stage, best, top_neighbor)) {
      committed = true;
      const auto h = *top_neighbor;
      if (top_stage == Stage::relocate) {
        committed |= commit(update_community_structure(state_, best, h, l), l, Stage::inter, best, h);
      } else {
        committed |= commit(relocate_nodes(state_, best, h), l, Stage::relocate, best, h);
      }
    }

    // Partitioning of the selected community.
    committed |= commit(partition_community(state_, best, options_.seed), l, Stage::partition, best,
                        std::nullopt);
    return committed;
  }
};

}  // namespace

OptimizerReport optimize_consensus(ConsensusState& state, const OptimizerOptions& options) {
  return Optimizer(state, options).run();
}

ConsensusResult m_emcd_star(const MultilayerGraph& g, const Ensemble& e, FilterModel model,
                            const FilterConfig& config, const OptimizerOptions& options, Exec exec,
                            const EcmOptions& ecm_options) {
  const auto m = build_coassociation(g, e, exec);
  ConsensusResult result;
  result.filter = filter_coassociation(m, model, config, exec, ecm_options);
  result.lower_bound = cc_emcd(g, result.filter.filtered);
  result.consensus = result.lower_bound;
  result.report = optimize_consensus(result.consensus, options);
  return result;
}

// ---------------------------------------------------------------------------
// File formats

void write_communities(std::ostream& out, const MultilayerGraph& g, const CommunityStructure& c) {
  for (NodeId v = 0; v < g.num_entities(); ++v) {
    if (c.covers(v)) out << g.entity_name(v) << ' ' << c.community_of(v) << '\n';
  }
}

CommunityStructure read_communities(std::istream& in, const MultilayerGraph& g) {
  std::vector<CommunityId> labels(g.num_entities(), kUncovered);
  std::unordered_map<std::string, CommunityId> names;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto fields = split_fields(line);
    if (fields.empty()) continue;
    if (fields.size() != 2) throw ParseError(line_no, "expected 'nodeId communityId'");
    const auto v = g.find_entity(fields[0]);
    if (!v) throw MismatchError("line " + std::to_string(line_no) + ": node '" +
                                std::string(fields[0]) + "' is not in the graph");
    const auto [it, inserted] =
        names.try_emplace(std::string(fields[1]), static_cast<CommunityId>(names.size()));
    if (labels[*v] != kUncovered && labels[*v] != it->second) {
      throw ParseError(line_no, "node '" + std::string(fields[0]) + "' assigned twice");
    }
    labels[*v] = it->second;
  }
  if (in.bad()) throw InputError("read failure");
  for (NodeId v = 0; v < g.num_entities(); ++v) {
    if (labels[v] == kUncovered) {
      throw MismatchError("node '" + g.entity_name(v) + "' has no community");
    }
  }
  return CommunityStructure(labels);
}

void write_retained(std::ostream& out, const ConsensusState& state) {
  const auto& g = state.graph();
  for (LayerId l = 0; l < g.num_layers(); ++l) {
    const auto edges = g.edges(l);
    for (EdgeId e = 0; e < edges.size(); ++e) {
      if (state.retained(l, e)) {
        out << g.layer_name(l) << ' ' << g.entity_name(edges[e].u) << ' '
            << g.entity_name(edges[e].v) << '\n';
      }
    }
  }
}

RetainedEdges read_retained(std::istream& in, const MultilayerGraph& g) {
  RetainedEdges retained(g.num_layers());
  for (LayerId l = 0; l < g.num_layers(); ++l) retained[l].assign(g.edges(l).size(), false);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto fields = split_fields(line);
    if (fields.empty()) continue;
    if (fields.size() != 3) throw ParseError(line_no, "expected 'layerId srcId dstId'");
    const auto l = g.find_layer(fields[0]);
    const auto u = g.find_entity(fields[1]);
    const auto v = g.find_entity(fields[2]);
    const auto e = (l && u && v) ? g.edge_index(*l, *u, *v) : std::nullopt;
    if (!e) throw ParseError(line_no, "retained edge is not an edge of the graph");
    retained[*l][*e] = true;
  }
  if (in.bad()) throw InputError("read failure");
  return retained;
}

RetainedEdges intra_community_edges(const MultilayerGraph& g, const CommunityStructure& c) {
  RetainedEdges retained(g.num_layers());
  for (LayerId l = 0; l < g.num_layers(); ++l) {
    const auto edges = g.edges(l);
    retained[l].resize(edges.size());
    for (EdgeId e = 0; e < edges.size(); ++e) {
      retained[l][e] = c.community_of(edges[e].u) == c.community_of(edges[e].v);
    }
  }
  return retained;
}

void write_commit_log(std::ostream& out, const MultilayerGraph& g, const OptimizerReport& report) {
  const auto old_precision = out.precision(17);
  out << "# pass\tlayer\tstage\tcommunities\tdelta_q\tq\n";
  for (const auto& rec : report.log) {
    out << rec.pass << '\t' << g.layer_name(rec.layer) << '\t' << to_string(rec.stage) << '\t'
        << rec.community;
    if (rec.neighbor) out << ',' << *rec.neighbor;
    out << '\t' << static_cast<double>(rec.gain) << '\t' << rec.q_after << '\n';
  }
  out.precision(old_precision);
}

}  // namespace mlcd
