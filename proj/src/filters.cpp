#include "mlcd/filters.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <string>

#include "mlcd/errors.hpp"

namespace mlcd {

std::string_view to_string(FilterModel model) {
  switch (model) {
    case FilterModel::threshold: return "threshold";
    case FilterModel::mlf: return "mlf";
    case FilterModel::ecm: return "ecm";
    case FilterModel::gloss: return "gloss";
  }
  return "unknown";
}

FilterModel parse_filter_model(std::string_view name) {
  if (name == "threshold") return FilterModel::threshold;
  if (name == "mlf") return FilterModel::mlf;
  if (name == "ecm") return FilterModel::ecm;
  if (name == "gloss") return FilterModel::gloss;
  throw InputError("unknown filter model '" + std::string(name) +
                   "' (expected threshold, mlf, ecm or gloss)");
}

void FilterConfig::validate(FilterModel model) const {
  if (!(alpha > 0.0 && alpha < 1.0)) throw InputError("alpha must lie in (0, 1)");
  if (model == FilterModel::threshold) {
    if (!theta) throw InputError("the threshold model requires theta");
    if (!(*theta >= 0.0 && *theta <= 1.0)) throw InputError("theta must lie in [0, 1]");
  } else if (theta) {
    throw InputError("theta is only valid with the threshold model");
  }
}

double binomial_survival(std::uint64_t trials, double p, std::uint64_t k) {
  if (k == 0) return 1.0;
  if (k > trials) return 0.0;
  if (p <= 0.0) return 0.0;
  if (p >= 1.0) return 1.0;

  const double n = static_cast<double>(trials);
  const double log_p = std::log(p);
  const double log_q = std::log1p(-p);
  const double odds = p / (1.0 - p);
  const auto log_pmf = [&](double j) {
    return std::lgamma(n + 1.0) - std::lgamma(j + 1.0) - std::lgamma(n - j + 1.0) + j * log_p +
           (n - j) * log_q;
  };

  if (static_cast<double>(k) > n * p) {
    // Upper tail is the short side; terms decrease from j = k onwards.
    double j = static_cast<double>(k);
    double term = std::exp(log_pmf(j));
    double sum = 0.0;
    while (term > 0.0) {
      sum += term;
      if (j >= n || term < sum * 1e-17) break;
      term *= (n - j) / (j + 1.0) * odds;
      j += 1.0;
    }
    return std::min(1.0, sum);
  }

  // Complement of the lower tail P(X <= k - 1); terms decrease towards 0.
  double j = static_cast<double>(k - 1);
  double term = std::exp(log_pmf(j));
  double cdf = 0.0;
  while (term > 0.0) {
    cdf += term;
    if (j <= 0.0 || term < cdf * 1e-17) break;
    term *= j / (n - j + 1.0) / odds;
    j -= 1.0;
  }
  return std::clamp(1.0 - cdf, 0.0, 1.0);
}

CoassociationMatrix filter_threshold(const CoassociationMatrix& m, double theta) {
  // Co-association values are ratios of small integers; the slack absorbs
  // the rounding of a theta written as a decimal such as 1/3.
  constexpr double kSlack = 1e-12;
  return m.retain_if([&](std::size_t i) { return m.value(m.entries()[i]) >= theta - kSlack; });
}

EdgeSignificance mlf_pvalues(const CoassociationGraph& gm, Exec exec) {
  const auto& g = gm.graph;
  const std::uint64_t total = g.total_weight();
  if (total == 0) throw InputError("marginal likelihood filter needs a graph with edges");
  const double t = static_cast<double>(total);
  const auto edges = g.edges();
  EdgeSignificance sig{FilterModel::mlf, std::vector<double>(edges.size(), 1.0)};
  const auto count = static_cast<std::int64_t>(edges.size());
  const auto kernel = [&](std::int64_t i) {
    const auto& e = edges[static_cast<std::size_t>(i)];
    const double p = static_cast<double>(g.strength(e.u)) * static_cast<double>(g.strength(e.v)) /
                     (2.0 * t * t);
    sig.pvalues[static_cast<std::size_t>(i)] = binomial_survival(total, p, e.weight);
  };
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < count; ++i) kernel(i);
  } else {
    for (std::int64_t i = 0; i < count; ++i) kernel(i);
  }
  return sig;
}

EdgeSignificance gloss_pvalues(const CoassociationGraph& gm, Exec exec) {
  const auto edges = gm.graph.edges();
  EdgeSignificance sig{FilterModel::gloss, std::vector<double>(edges.size(), 1.0)};
  if (edges.empty()) return sig;
  std::uint64_t max_weight = 0;
  for (const auto& e : edges) max_weight = std::max(max_weight, e.weight);
  std::vector<std::uint64_t> at_least(max_weight + 2, 0);
  for (const auto& e : edges) ++at_least[e.weight];
  for (std::uint64_t w = max_weight; w > 0; --w) at_least[w - 1] += at_least[w];
  const double m = static_cast<double>(edges.size());
  const auto count = static_cast<std::int64_t>(edges.size());
  const auto kernel = [&](std::int64_t i) {
    const auto w = edges[static_cast<std::size_t>(i)].weight;
    sig.pvalues[static_cast<std::size_t>(i)] = static_cast<double>(at_least[w]) / m;
  };
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < count; ++i) kernel(i);
  } else {
    for (std::int64_t i = 0; i < count; ++i) kernel(i);
  }
  return sig;
}

CoassociationMatrix apply_filter(const CoassociationMatrix& m, const CoassociationGraph& gm,
                                 const EdgeSignificance& sig, double alpha) {
  const auto edges = gm.graph.edges();
  if (sig.pvalues.size() != edges.size()) {
    throw MismatchError("significance covers " + std::to_string(sig.pvalues.size()) +
                        " edge(s) but the co-association graph has " +
                        std::to_string(edges.size()));
  }
  if (m.size() != edges.size()) {
    throw MismatchError("co-association graph does not match the matrix");
  }
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const auto& entry = m.entries()[i];
    if (entry.u != edges[i].u || entry.v != edges[i].v || entry.count() != edges[i].weight) {
      throw MismatchError("co-association graph does not match the matrix");
    }
  }
  return m.retain_if([&](std::size_t i) { return sig.keep(i, alpha); });
}

FilterResult filter_coassociation(const CoassociationMatrix& m, FilterModel model,
                                  const FilterConfig& config, Exec exec,
                                  const EcmOptions& ecm_options) {
  config.validate(model);
  FilterResult result;
  if (model == FilterModel::threshold) {
    result.filtered = filter_threshold(m, *config.theta);
    return result;
  }
  const auto gm = build_coassociation_graph(m);
  if (m.empty()) {
    result.filtered = m;
    result.significance = EdgeSignificance{model, {}};
    return result;
  }
  switch (model) {
    case FilterModel::mlf: result.significance = mlf_pvalues(gm, exec); break;
    case FilterModel::gloss: result.significance = gloss_pvalues(gm, exec); break;
    case FilterModel::ecm:
      result.ecm = ecm_fit(gm.graph, ecm_options);
      result.significance = ecm_pvalues(gm, *result.ecm, exec);
      break;
    case FilterModel::threshold: break;
  }
  result.filtered = apply_filter(m, gm, *result.significance, config.alpha);
  return result;
}

void write_significance(std::ostream& out, const MultilayerGraph& g, const CoassociationGraph& gm,
                        const FilterResult& result, FilterModel model, const FilterConfig& config) {
  const auto edges = gm.graph.edges();
  const auto old_precision = out.precision(17);
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const auto& e = edges[i];
    out << g.entity_name(e.u) << '\t' << g.entity_name(e.v) << '\t' << e.weight << '\t';
    bool keep = false;
    if (model == FilterModel::threshold) {
      keep = result.filtered.find(e.u, e.v) != nullptr;
      out << "NA";
    } else {
      keep = result.significance->keep(i, config.alpha);
      out << result.significance->pvalues[i];
    }
    out << '\t' << (keep ? "keep" : "drop") << '\n';
  }
  out.precision(old_precision);
}

}  // namespace mlcd
