// Enhanced configuration model fit.
//
// The fit minimizes the convex negative log-likelihood of the observed graph
// in the natural parameters a_i = ln x_i and b_i = -ln y_i:
//
//   F(a, b) = sum_i (b_i s_i - a_i k_i) + sum_{i<j} softplus(t_ij),
//   t_ij    = a_i + a_j - B_ij - ln(1 - exp(-B_ij)),  B_ij = b_i + b_j > 0,
//
// whose gradient is (<k_i> - k_i, s_i - <s_i>). softplus(t_ij) is the log
// partition function of the pair's weight distribution and sigmoid(t_ij) is
// the probability that the pair is linked.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "mlcd/errors.hpp"
#include "mlcd/filters.hpp"

namespace mlcd {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double softplus(double t) { return t > 0.0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t)); }

double sigmoid(double t) {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

struct PairTerms {
  double t;       // logit of the link probability
  double p;       // link probability
  double ratio;   // q / (1 - q) with q = y_i y_j
};

PairTerms pair_terms(double ai, double aj, double bi, double bj) {
  const double big_b = bi + bj;
  const double log_one_minus_q = std::log(-std::expm1(-big_b));
  const double t = ai + aj - big_b - log_one_minus_q;
  return {t, sigmoid(t), 1.0 / std::expm1(big_b)};
}

struct Problem {
  std::vector<NodeId> nodes;  // active node ids
  std::vector<double> degree;
  std::vector<double> strength;
  std::size_t n() const { return nodes.size(); }
};

struct Evaluation {
  double objective = kInf;
  Eigen::VectorXd gradient;  // (a block, b block)
  double residual = kInf;
};

bool feasible(const Eigen::VectorXd& theta, std::size_t n) {
  if (n < 2) return true;
  // The tightest pair constraint involves the two smallest b values.
  double lo1 = kInf;
  double lo2 = kInf;
  for (std::size_t i = 0; i < n; ++i) {
    const double b = theta[static_cast<Eigen::Index>(n + i)];
    if (b < lo1) {
      lo2 = lo1;
      lo1 = b;
    } else if (b < lo2) {
      lo2 = b;
    }
  }
  return lo1 + lo2 > 0.0;
}

Evaluation evaluate(const Problem& pr, const Eigen::VectorXd& theta, Eigen::MatrixXd* hessian) {
  const std::size_t n = pr.n();
  const auto N = static_cast<Eigen::Index>(n);
  Evaluation ev;
  if (!feasible(theta, n)) return ev;
  ev.gradient = Eigen::VectorXd::Zero(2 * N);
  if (hessian != nullptr) hessian->setZero(2 * N, 2 * N);
  double obj = 0.0;
  for (Eigen::Index i = 0; i < N; ++i) {
    obj += theta[N + i] * pr.strength[static_cast<std::size_t>(i)] -
           theta[i] * pr.degree[static_cast<std::size_t>(i)];
  }
  for (Eigen::Index i = 0; i < N; ++i) {
    for (Eigen::Index j = i + 1; j < N; ++j) {
      const auto pt = pair_terms(theta[i], theta[j], theta[N + i], theta[N + j]);
      obj += softplus(pt.t);
      const double c = 1.0 + pt.ratio;
      ev.gradient[i] += pt.p;
      ev.gradient[j] += pt.p;
      ev.gradient[N + i] -= pt.p * c;
      ev.gradient[N + j] -= pt.p * c;
      if (hessian != nullptr) {
        auto& h = *hessian;
        const double w = pt.p * (1.0 - pt.p);
        const double bb = w * c * c + pt.p * pt.ratio * c;
        h(i, i) += w;
        h(j, j) += w;
        h(i, j) += w;
        h(j, i) += w;
        for (const auto ax : {i, j}) {
          for (const auto bx : {N + i, N + j}) {
            h(ax, bx) -= w * c;
            h(bx, ax) -= w * c;
          }
        }
        h(N + i, N + i) += bb;
        h(N + j, N + j) += bb;
        h(N + i, N + j) += bb;
        h(N + j, N + i) += bb;
      }
    }
  }
  for (Eigen::Index i = 0; i < N; ++i) {
    ev.gradient[i] -= pr.degree[static_cast<std::size_t>(i)];
    ev.gradient[N + i] += pr.strength[static_cast<std::size_t>(i)];
  }
  ev.objective = obj;
  ev.residual = ev.gradient.cwiseAbs().maxCoeff();
  return ev;
}

Eigen::VectorXd initial_point(const Problem& pr) {
  const std::size_t n = pr.n();
  const auto N = static_cast<Eigen::Index>(n);
  double two_e = 0.0;
  for (const double k : pr.degree) two_e += k;
  Eigen::VectorXd theta(2 * N);
  for (Eigen::Index i = 0; i < N; ++i) {
    const auto idx = static_cast<std::size_t>(i);
    // Mean weight 1/(1 - y^2) matching the node's strength-to-degree ratio.
    const double mean_weight = std::max(pr.strength[idx] / pr.degree[idx], 1.0 + 1e-3);
    const double b = -0.5 * std::log1p(-1.0 / mean_weight);
    theta[N + i] = b;
    theta[i] = b + std::log(pr.degree[idx] / std::sqrt(two_e));
  }
  return theta;
}

bool accept(const Evaluation& cur, const Evaluation& next, double slope, double step) {
  if (!std::isfinite(next.objective)) return false;
  if (next.objective <= cur.objective + 1e-4 * step * slope) return true;
  // Close to the optimum F changes below its rounding noise; fall back to
  // the residual there.
  const double noise = 1e-12 * (1.0 + std::abs(cur.objective));
  return next.objective <= cur.objective + noise && next.residual < cur.residual;
}

void newton(const Problem& pr, Eigen::VectorXd& theta, const EcmOptions& opt, double& residual,
            std::size_t& iterations) {
  const auto dim = static_cast<Eigen::Index>(2 * pr.n());
  Eigen::MatrixXd h;
  Evaluation cur = evaluate(pr, theta, &h);
  for (iterations = 0; iterations < opt.max_iter && cur.residual > opt.tol; ++iterations) {
    Eigen::VectorXd dir;
    double mu = 1e-12 * (1.0 + h.diagonal().cwiseAbs().maxCoeff());
    for (int attempt = 0; attempt < 30; ++attempt, mu *= 10.0) {
      Eigen::MatrixXd reg = h;
      reg.diagonal().array() += mu;
      Eigen::LDLT<Eigen::MatrixXd> ldlt(reg);
      if (ldlt.info() != Eigen::Success) continue;
      dir = ldlt.solve(-cur.gradient);
      if (dir.allFinite() && dir.dot(cur.gradient) < 0.0) break;
      dir.resize(0);
    }
    if (dir.size() != dim) dir = -cur.gradient;
    const double longest = dir.cwiseAbs().maxCoeff();
    if (longest > 10.0) dir *= 10.0 / longest;
    const double slope = dir.dot(cur.gradient);

    bool moved = false;
    for (double step = 1.0; step > 1e-14; step *= 0.5) {
      const Eigen::VectorXd trial = theta + step * dir;
      Evaluation next = evaluate(pr, trial, nullptr);
      if (accept(cur, next, slope, step)) {
        theta = trial;
        cur = evaluate(pr, theta, &h);
        moved = true;
        break;
      }
    }
    if (!moved) break;
  }
  residual = cur.residual;
}

// Gauss-Seidel sweeps of safeguarded 2x2 Newton steps on (a_i, b_i).
void coordinate(const Problem& pr, Eigen::VectorXd& theta, const EcmOptions& opt, double& residual,
                std::size_t& iterations) {
  const std::size_t n = pr.n();
  const auto N = static_cast<Eigen::Index>(n);

  struct Local {
    double objective = kInf;
    double ga = 0, gb = 0, haa = 0, hab = 0, hbb = 0;
  };
  const auto local = [&](Eigen::Index i, double a, double b, bool second_order) {
    Local out;
    for (Eigen::Index j = 0; j < N; ++j) {
      if (j == i) continue;
      if (b + theta[N + j] <= 0.0) return Local{};
    }
    double obj = b * pr.strength[static_cast<std::size_t>(i)] - a * pr.degree[static_cast<std::size_t>(i)];
    for (Eigen::Index j = 0; j < N; ++j) {
      if (j == i) continue;
      const auto pt = pair_terms(a, theta[j], b, theta[N + j]);
      obj += softplus(pt.t);
      const double c = 1.0 + pt.ratio;
      out.ga += pt.p;
      out.gb -= pt.p * c;
      if (second_order) {
        const double w = pt.p * (1.0 - pt.p);
        out.haa += w;
        out.hab -= w * c;
        out.hbb += w * c * c + pt.p * pt.ratio * c;
      }
    }
    out.ga -= pr.degree[static_cast<std::size_t>(i)];
    out.gb += pr.strength[static_cast<std::size_t>(i)];
    out.objective = obj;
    return out;
  };

  Evaluation global = evaluate(pr, theta, nullptr);
  for (iterations = 0; iterations < opt.max_iter && global.residual > opt.tol; ++iterations) {
    for (Eigen::Index i = 0; i < N; ++i) {
      const double a = theta[i];
      const double b = theta[N + i];
      const Local cur = local(i, a, b, true);
      if (std::max(std::abs(cur.ga), std::abs(cur.gb)) <= 0.1 * opt.tol) continue;
      const double det = cur.haa * cur.hbb - cur.hab * cur.hab;
      double da = -cur.ga;
      double db = -cur.gb;
      if (det > 1e-300 && cur.haa > 0.0) {
        da = -(cur.hbb * cur.ga - cur.hab * cur.gb) / det;
        db = -(cur.haa * cur.gb - cur.hab * cur.ga) / det;
      }
      const double longest = std::max(std::abs(da), std::abs(db));
      if (longest > 5.0) {
        da *= 5.0 / longest;
        db *= 5.0 / longest;
      }
      const double slope = da * cur.ga + db * cur.gb;
      const double cur_res = std::max(std::abs(cur.ga), std::abs(cur.gb));
      for (double step = 1.0; step > 1e-14; step *= 0.5) {
        const Local next = local(i, a + step * da, b + step * db, false);
        if (!std::isfinite(next.objective)) continue;
        const double next_res = std::max(std::abs(next.ga), std::abs(next.gb));
        const double noise = 1e-12 * (1.0 + std::abs(cur.objective));
        if (next.objective <= cur.objective + 1e-4 * step * slope ||
            (next.objective <= cur.objective + noise && next_res < cur_res)) {
          theta[i] = a + step * da;
          theta[N + i] = b + step * db;
          break;
        }
      }
    }
    global = evaluate(pr, theta, nullptr);
  }
  residual = global.residual;
}

}  // namespace

double EcmParameters::x(NodeId i) const { return active.at(i) ? std::exp(log_x[i]) : 0.0; }

double EcmParameters::y(NodeId i) const { return active.at(i) ? std::exp(log_y[i]) : 0.0; }

double EcmParameters::link_probability(NodeId i, NodeId j) const {
  if (i == j || !active.at(i) || !active.at(j)) return 0.0;
  return pair_terms(log_x[i], log_x[j], -log_y[i], -log_y[j]).p;
}

double EcmParameters::expected_weight(NodeId i, NodeId j) const {
  if (i == j || !active.at(i) || !active.at(j)) return 0.0;
  const auto pt = pair_terms(log_x[i], log_x[j], -log_y[i], -log_y[j]);
  return pt.p * (1.0 + pt.ratio);
}

double EcmParameters::tail(NodeId i, NodeId j, std::uint64_t w) const {
  if (w == 0) return 1.0;
  const double p = link_probability(i, j);
  if (p == 0.0) return 0.0;
  // Geometric tail: P(w_ij >= w) = p * (y_i y_j)^(w - 1).
  return p * std::exp(static_cast<double>(w - 1) * (log_y[i] + log_y[j]));
}

EcmParameters ecm_fit(const WeightedGraph& g, const EcmOptions& options) {
  if (g.num_edges() == 0) throw InputError("ECM fit needs a graph with edges");
  Problem pr;
  EcmParameters params;
  params.log_x.assign(g.num_nodes(), -kInf);
  params.log_y.assign(g.num_nodes(), -kInf);
  params.active.assign(g.num_nodes(), false);
  for (NodeId v = 0; v < g.num_nodes(); ++v) {
    if (g.degree(v) == 0) continue;
    pr.nodes.push_back(v);
    pr.degree.push_back(static_cast<double>(g.degree(v)));
    pr.strength.push_back(static_cast<double>(g.strength(v)));
    params.active[v] = true;
  }

  Eigen::VectorXd theta = initial_point(pr);
  const bool use_newton = options.solver == EcmSolver::newton ||
                          (options.solver == EcmSolver::automatic && pr.n() <= 400);
  double residual = kInf;
  std::size_t iterations = 0;
  if (use_newton) {
    newton(pr, theta, options, residual, iterations);
  } else {
    coordinate(pr, theta, options, residual, iterations);
  }

  const auto N = static_cast<Eigen::Index>(pr.n());
  for (Eigen::Index i = 0; i < N; ++i) {
    const NodeId v = pr.nodes[static_cast<std::size_t>(i)];
    params.log_x[v] = theta[i];
    params.log_y[v] = -theta[N + i];
  }
  params.residual = residual;
  params.iterations = iterations;
  if (!(residual <= options.tol)) {
    throw SolverError("ECM fit did not converge: max constraint residual " +
                          std::to_string(residual) + " after " + std::to_string(iterations) +
                          " iteration(s)",
                      residual, iterations);
  }
  return params;
}

EcmExpectation ecm_expectation(const EcmParameters& params) {
  const std::size_t n = params.size();
  EcmExpectation out{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)};
  for (NodeId i = 0; i < n; ++i) {
    for (NodeId j = i + 1; j < n; ++j) {
      const double p = params.link_probability(i, j);
      const double w = params.expected_weight(i, j);
      out.degree[i] += p;
      out.degree[j] += p;
      out.strength[i] += w;
      out.strength[j] += w;
    }
  }
  return out;
}

EdgeSignificance ecm_pvalues(const CoassociationGraph& gm, const EcmParameters& params, Exec exec) {
  const auto edges = gm.graph.edges();
  if (params.size() != gm.graph.num_nodes()) {
    throw MismatchError("ECM parameters were fitted on a different graph");
  }
  EdgeSignificance sig{FilterModel::ecm, std::vector<double>(edges.size(), 1.0)};
  const auto count = static_cast<std::int64_t>(edges.size());
  const auto kernel = [&](std::int64_t i) {
    const auto& e = edges[static_cast<std::size_t>(i)];
    sig.pvalues[static_cast<std::size_t>(i)] = std::clamp(params.tail(e.u, e.v, e.weight), 0.0, 1.0);
  };
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < count; ++i) kernel(i);
  } else {
    for (std::int64_t i = 0; i < count; ++i) kernel(i);
  }
  return sig;
}

}  // namespace mlcd
