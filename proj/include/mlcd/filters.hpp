#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string_view>
#include <vector>

#include "mlcd/coassoc.hpp"
#include "mlcd/execution.hpp"

namespace mlcd {

enum class FilterModel { threshold, mlf, ecm, gloss };

std::string_view to_string(FilterModel model);

/// Accepts "threshold", "mlf", "ecm" and "gloss"; throws InputError otherwise.
FilterModel parse_filter_model(std::string_view name);

struct FilterConfig {
  double alpha = 0.05;
  std::optional<double> theta;  // threshold model only

  /// Throws InputError unless 0 < alpha < 1, theta is given exactly for the
  /// threshold model, and 0 <= theta <= 1.
  void validate(FilterModel model) const;
};

/// Per-edge p-values of a co-association graph under one null model. An
/// edge is dropped when its p-value is >= alpha.
struct EdgeSignificance {
  FilterModel model = FilterModel::mlf;
  std::vector<double> pvalues;  // index-aligned with the graph's edges

  bool keep(std::size_t edge, double alpha) const { return pvalues.at(edge) < alpha; }
};

/// P(X >= k) for X ~ Binomial(trials, p).
///
/// Sums the shorter tail in log space with ratio recurrences, so the cost is
/// proportional to the tail's effective width rather than to `trials`.
double binomial_survival(std::uint64_t trials, double p, std::uint64_t k);

/// Keeps the entries with |m_uv| / num_layers >= theta.
CoassociationMatrix filter_threshold(const CoassociationMatrix& m, double theta);

/// Marginal likelihood filter: the total weight T is placed unit by unit on
/// pairs with probability s_u s_v / (2 T^2), so an edge's null weight is
/// Binomial(T, s_u s_v / (2 T^2)). Throws InputError on an empty graph.
EdgeSignificance mlf_pvalues(const CoassociationGraph& gm, Exec exec = Exec::parallel);

/// Global significance filter: fixed topology, weights drawn from the
/// empirical weight distribution; p-value = fraction of edges with weight
/// >= the observed one.
EdgeSignificance gloss_pvalues(const CoassociationGraph& gm, Exec exec = Exec::parallel);

enum class EcmSolver { automatic, newton, coordinate };

struct EcmOptions {
  double tol = 1e-8;
  std::size_t max_iter = 100000;
  EcmSolver solver = EcmSolver::automatic;
};

/// Fitted multipliers of the enhanced configuration model.
///
/// Stored in log form (x = exp(log_x), y = exp(log_y)) because fits on
/// sparse nodes push x towards infinity and y towards 0. Nodes without
/// edges are inactive and report x = y = 0.
struct EcmParameters {
  std::vector<double> log_x;
  std::vector<double> log_y;
  std::vector<bool> active;
  double residual = 0.0;  // max |expected - observed| over degrees and strengths
  std::size_t iterations = 0;

  std::size_t size() const noexcept { return log_x.size(); }
  double x(NodeId i) const;
  double y(NodeId i) const;

  /// P(w_ij >= 1) and mean weight E[w_ij] under the fitted model.
  double link_probability(NodeId i, NodeId j) const;
  double expected_weight(NodeId i, NodeId j) const;

  /// P(w_ij >= w); 1 for w = 0.
  double tail(NodeId i, NodeId j, std::uint64_t w) const;
};

/// Solves <k_i> = k_i and <s_i> = s_i for every node with edges. Throws
/// InputError for a graph without edges and SolverError (carrying the
/// residual) when tol is not reached within max_iter iterations.
EcmParameters ecm_fit(const WeightedGraph& g, const EcmOptions& options = {});

/// Expected degree and strength of every node under the fitted parameters.
struct EcmExpectation {
  std::vector<double> degree;
  std::vector<double> strength;
};
EcmExpectation ecm_expectation(const EcmParameters& params);

EdgeSignificance ecm_pvalues(const CoassociationGraph& gm, const EcmParameters& params,
                             Exec exec = Exec::parallel);

/// Drops every entry whose edge has p-value >= alpha. Throws MismatchError
/// when sig does not cover exactly the edges of gm, or gm is not the graph
/// of m.
CoassociationMatrix apply_filter(const CoassociationMatrix& m, const CoassociationGraph& gm,
                                 const EdgeSignificance& sig, double alpha);

/// Outcome of pruning a co-association matrix with one model.
struct FilterResult {
  CoassociationMatrix filtered;
  std::optional<EdgeSignificance> significance;  // absent for the threshold model
  std::optional<EcmParameters> ecm;
};

/// Runs the chosen model end to end on m. Model filters on a matrix without
/// entries return it unchanged.
FilterResult filter_coassociation(const CoassociationMatrix& m, FilterModel model,
                                  const FilterConfig& config, Exec exec = Exec::parallel,
                                  const EcmOptions& ecm_options = {});

/// TSV report "srcId dstId weight pvalue verdict". For the threshold model
/// the pvalue column is "NA" and the verdict follows theta.
void write_significance(std::ostream& out, const MultilayerGraph& g, const CoassociationGraph& gm,
                        const FilterResult& result, FilterModel model, const FilterConfig& config);

}  // namespace mlcd
