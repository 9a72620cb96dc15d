#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "mlcd/coassoc.hpp"
#include "mlcd/ensemble.hpp"
#include "mlcd/filters.hpp"
#include "mlcd/graph.hpp"

namespace mlcd {

/// Per-layer flags over the layer's edge list: retained[l][e] is true when
/// edge e of layer l belongs to the consensus.
using RetainedEdges = std::vector<std::vector<bool>>;

/// Primitive mutation of a consensus state; candidates are lists of these.
struct StateOp {
  enum class Kind : std::uint8_t { add_edge, remove_edge, move_node, open_community };
  Kind kind;
  LayerId layer = 0;
  EdgeId edge = 0;
  NodeId node = kNoNode;
  CommunityId from = kUncovered;
  CommunityId to = kUncovered;
  bool appended = false;  // open_community grew the slot table

  friend bool operator==(const StateOp&, const StateOp&) = default;
};

/// Consensus membership plus the retained multilayer edges, with cached
/// per-layer per-community statistics.
///
/// Modularity is
///   Q = (1/L) sum_i sum_C [ e_i(C) / |E_i| - (d_i(C) / (2 |E_i|))^2 ]
/// where e_i(C) counts retained layer-i edges inside C, d_i(C) sums the
/// retained layer-i degrees of C's members, and layers without edges add 0.
/// Every cached quantity is an integer, so Q is a pure function of the
/// state and any two routes to the same state report the same Q.
///
/// Mutations are journaled; mark()/rollback() evaluate a change and undo it,
/// leaving the state identical to what it was.
class ConsensusState {
 public:
  ConsensusState() = default;

  /// membership must cover every entity; retained must match g's layers.
  ConsensusState(const MultilayerGraph& g, std::span<const CommunityId> membership,
                 RetainedEdges retained);

  const MultilayerGraph& graph() const { return *graph_; }

  CommunityId community_of(NodeId v) const { return membership_.at(v); }
  std::span<const CommunityId> membership() const noexcept { return membership_; }
  std::span<const NodeId> members(CommunityId c) const { return members_.at(c); }
  std::size_t community_slots() const noexcept { return members_.size(); }

  /// Ids of the non-empty communities, ascending.
  std::vector<CommunityId> communities() const;
  std::size_t num_communities() const;

  /// Communities other than c that share at least one original edge (any
  /// layer) with c, ascending.
  std::vector<CommunityId> neighbors(CommunityId c) const;

  bool retained(LayerId l, EdgeId e) const { return retained_.at(l).at(e); }
  const RetainedEdges& retained_edges() const noexcept { return retained_; }
  std::size_t num_retained() const;
  std::uint64_t retained_degree(LayerId l, NodeId v) const { return retained_degree_.at(l).at(v); }

  std::uint64_t intra_edges(LayerId l, CommunityId c) const { return stats_.at(c).at(l).intra; }
  std::uint64_t degree_sum(LayerId l, CommunityId c) const { return stats_.at(c).at(l).degree; }

  double modularity() const;

  /// Normalized partition of the entities.
  CommunityStructure structure() const { return CommunityStructure(membership_); }

  /// True when the caches equal a from-scratch recomputation.
  bool cache_consistent() const;

  // Mutation primitives (journaled).
  void add_edge(LayerId l, EdgeId e);
  void remove_edge(LayerId l, EdgeId e);
  void move_node(NodeId v, CommunityId to);
  CommunityId open_community();

  std::size_t mark() const noexcept { return journal_.size(); }
  void rollback(std::size_t mark);
  std::vector<StateOp> ops_since(std::size_t mark) const;
  void apply(std::span<const StateOp> ops);
  void clear_journal() noexcept { journal_.clear(); }

  /// Per-layer integer totals used for exact modularity differences.
  struct Totals {
    std::vector<std::uint64_t> intra;   // sum_C e_i(C)
    std::vector<std::uint64_t> square;  // sum_C d_i(C)^2
  };
  const Totals& totals() const noexcept { return totals_; }

  /// Q(this) - Q(before), summed layer by layer from integer differences.
  long double gain_since(const Totals& before) const;

  /// Compares membership, retained edges and caches (not the journal).
  friend bool operator==(const ConsensusState& a, const ConsensusState& b);

 private:
  struct LayerStats {
    std::uint64_t intra = 0;
    std::uint64_t degree = 0;
    friend bool operator==(const LayerStats&, const LayerStats&) = default;
  };

  const MultilayerGraph* graph_ = nullptr;
  std::vector<CommunityId> membership_;
  std::vector<std::vector<NodeId>> members_;
  RetainedEdges retained_;
  std::vector<std::vector<std::uint64_t>> retained_degree_;
  std::vector<std::vector<LayerStats>> stats_;  // [community][layer]
  Totals totals_;
  std::vector<StateOp> journal_;

  void rebuild();
  void bump_degree(LayerId l, CommunityId c, std::int64_t delta);
  void bump_intra(LayerId l, CommunityId c, std::int64_t delta);
  void set_edge(LayerId l, EdgeId e, bool on);
  void relabel(NodeId v, CommunityId to);
  CommunityId open_slot(bool& appended);
};

/// A change proposed by one of the optimizer's operations, not yet applied.
struct Candidate {
  std::vector<StateOp> ops;
  long double gain = 0.0L;  // exact-as-possible Q' - Q
  double q = 0.0;           // Q' after applying ops

  bool empty() const noexcept { return ops.empty(); }
  /// Strict improvement over a state whose modularity is q_now.
  bool improves(double q_now) const { return !ops.empty() && gain > 0.0L && q > q_now; }
};

/// Topological-lower-bound consensus: communities are the connected
/// components of the filtered co-association graph, retained edges are the
/// layer edges that support each surviving entry. Throws MismatchError when
/// the matrix references edges absent from g.
ConsensusState cc_emcd(const MultilayerGraph& g, const CoassociationMatrix& filtered);

/// Adds every unretained layer-l edge inside c.
Candidate update_community(ConsensusState& state, CommunityId c, LayerId l);

/// Better of: add all unretained layer-l edges between cj and ch, or remove
/// all retained ones. Ties go to removal.
Candidate update_community_structure(ConsensusState& state, CommunityId cj, CommunityId ch,
                                     LayerId l);

/// Greedy relocation of nodes from cj to ch, highest priority first
/// (original edges towards ch minus original edges towards cj, over all
/// layers; ties by lower node id), keeping a move only when it strictly
/// increases Q and rebuilding the order after every kept move.
Candidate relocate_nodes(ConsensusState& state, CommunityId cj, CommunityId ch);

/// Splits c with the weighted partitioner run on its flattened retained
/// edges (weight = number of layers with a retained edge). The part holding
/// c's smallest node keeps id c.
Candidate partition_community(ConsensusState& state, CommunityId c, std::uint64_t seed = 0);

enum class Stage : std::uint8_t { intra, inter, relocate, partition };
std::string_view to_string(Stage stage);

struct CommitRecord {
  std::size_t pass = 0;
  LayerId layer = 0;
  Stage stage = Stage::intra;
  CommunityId community = kUncovered;
  std::optional<CommunityId> neighbor;
  double q_before = 0.0;
  double q_after = 0.0;
  long double gain = 0.0L;
};

struct OptimizerOptions {
  std::uint64_t seed = 0;
  std::size_t max_passes = 0;  // 0: until a full pass commits nothing
  std::function<void(const ConsensusState&, const CommitRecord&)> on_commit;
};

struct OptimizerReport {
  std::vector<CommitRecord> log;
  std::size_t passes = 0;
};

/// Three-stage modularity optimization (intra refinement, inter refinement
/// or relocation against each neighbor, partitioning) swept over layers in
/// input order until a full pass commits nothing.
OptimizerReport optimize_consensus(ConsensusState& state, const OptimizerOptions& options = {});

struct ConsensusResult {
  FilterResult filter;
  ConsensusState lower_bound;
  ConsensusState consensus;
  OptimizerReport report;
};

/// Full pipeline: co-association, filtering, lower bound, optimization.
ConsensusResult m_emcd_star(const MultilayerGraph& g, const Ensemble& e, FilterModel model,
                            const FilterConfig& config, const OptimizerOptions& options = {},
                            Exec exec = Exec::parallel, const EcmOptions& ecm_options = {});

/// "nodeId communityId" lines, communities numbered by smallest member.
void write_communities(std::ostream& out, const MultilayerGraph& g, const CommunityStructure& c);

/// Reads a community file; every entity of g must appear exactly once.
/// Throws ParseError on malformed lines and MismatchError on node-set
/// differences.
CommunityStructure read_communities(std::istream& in, const MultilayerGraph& g);

/// "layerId srcId dstId" for every retained edge.
void write_retained(std::ostream& out, const ConsensusState& state);

/// Reads retained edges; each must be an edge of g.
RetainedEdges read_retained(std::istream& in, const MultilayerGraph& g);

/// Retains exactly the original edges whose endpoints share a community.
RetainedEdges intra_community_edges(const MultilayerGraph& g, const CommunityStructure& c);

/// One line per commit: "pass layer stage communities delta_q q".
void write_commit_log(std::ostream& out, const MultilayerGraph& g, const OptimizerReport& report);

}  // namespace mlcd
