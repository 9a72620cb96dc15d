#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "mlcd/consensus.hpp"
#include "mlcd/ensemble.hpp"
#include "mlcd/execution.hpp"
#include "mlcd/graph.hpp"

namespace mlcd {

/// Multilayer modularity recomputed from scratch in floating point:
///   Q = (1/L) sum_i sum_C [ e_i(C) / |E_i| - (d_i(C) / (2 |E_i|))^2 ]
/// with retained-edge numerators and original-layer denominators.
double multilayer_modularity(const MultilayerGraph& g, std::span<const CommunityId> membership,
                             const RetainedEdges& retained);
double multilayer_modularity(const MultilayerGraph& g, const ConsensusState& state);

/// Per-layer normalizer: diameter of the layer's largest connected
/// component (ties toward the component with the smallest node).
std::vector<std::size_t> layer_diameters(const MultilayerGraph& g, Exec exec = Exec::parallel);

/// Mean silhouette over all entities under the multilayer hop distance
///   d(u,v) = mean over layers holding both u and v of min(1, sp_i(u,v) / diam_i),
/// unreachable pairs contributing 1 and pairs sharing no layer at distance 1.
/// Singletons score 0; a single community scores 0.
double multilayer_silhouette(const MultilayerGraph& g, std::span<const CommunityId> membership,
                             Exec exec = Exec::parallel);
double multilayer_silhouette(const MultilayerGraph& g, const ConsensusState& state,
                             Exec exec = Exec::parallel);

/// Normalized mutual information with sqrt(H(a) H(b)) normalization. When
/// either entropy is zero the result is 1 for equal partitions, else 0.
/// Throws MismatchError unless both cover the same nodes.
double nmi(const CommunityStructure& a, const CommunityStructure& b);

/// Mean over layers of nmi(layer structure, c restricted to that layer's
/// nodes). c must cover every node the ensemble covers.
double ensemble_avg_nmi(const Ensemble& e, const CommunityStructure& c);

struct MetricReport {
  double modularity = 0.0;
  double silhouette = 0.0;
  std::size_t num_communities = 0;
  std::vector<std::size_t> sizes;  // descending
  std::optional<double> lower_bound_modularity;
  std::optional<double> nmi;
  std::optional<double> ensemble_nmi;
};

MetricReport evaluate(const MultilayerGraph& g, const ConsensusState& state,
                      Exec exec = Exec::parallel);

/// "metric<TAB>value" lines.
void write_report_tsv(std::ostream& out, const MetricReport& report);
void write_report_text(std::ostream& out, const MetricReport& report);

}  // namespace mlcd
