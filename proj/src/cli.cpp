#include "mlcd/cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>

#include "mlcd/coassoc.hpp"
#include "mlcd/consensus.hpp"
#include "mlcd/ensemble.hpp"
#include "mlcd/errors.hpp"
#include "mlcd/filters.hpp"
#include "mlcd/graph.hpp"
#include "mlcd/metrics.hpp"

namespace mlcd {

namespace {

namespace fs = std::filesystem;

struct RunConfig {
  std::string input;
  std::string ensemble;
  std::string model = "mlf";
  double alpha = 0.05;
  std::optional<double> theta;
  std::uint64_t seed = 0;
  std::string out;
  std::string consensus;
  std::string retained;
  std::string reference;
  bool serial = false;
  bool verbose = false;
  double ecm_tol = 1e-8;
  std::size_t ecm_max_iter = 100000;

  Exec exec() const { return serial ? Exec::serial : Exec::parallel; }
};

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  return in;
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write '" + path.string() + "'");
  return out;
}

MultilayerGraph load_graph(const std::string& path) {
  if (!fs::exists(path)) throw InputError("input file '" + path + "' does not exist");
  return load_multilayer(path);
}

// A reference with three fields per line is an ensemble, otherwise a
// community file.
bool looks_like_ensemble(const std::string& path) {
  auto in = open_input(path);
  std::string line;
  while (std::getline(in, line)) {
    const auto fields = split_fields(line);
    if (!fields.empty()) return fields.size() == 3;
  }
  return false;
}

int cmd_ensemble(const RunConfig& cfg, std::ostream& out) {
  const auto g = load_graph(cfg.input);
  const auto e = build_ensemble(g, cfg.seed, cfg.exec());
  if (cfg.out.empty()) {
    write_ensemble(out, g, e);
  } else {
    auto file = open_output(cfg.out);
    write_ensemble(file, g, e);
  }
  return kExitOk;
}

int cmd_detect(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const auto model = parse_filter_model(cfg.model);
  FilterConfig filter{cfg.alpha, cfg.theta};
  filter.validate(model);
  const auto g = load_graph(cfg.input);
  const auto e = cfg.ensemble.empty() ? build_ensemble(g, cfg.seed, cfg.exec())
                                      : load_ensemble(cfg.ensemble, g);

  OptimizerOptions options;
  options.seed = cfg.seed;
  if (cfg.verbose) {
    options.on_commit = [&err, &g](const ConsensusState&, const CommitRecord& rec) {
      err << "commit pass=" << rec.pass << " layer=" << g.layer_name(rec.layer)
          << " stage=" << to_string(rec.stage) << " q=" << std::setprecision(12) << rec.q_after
          << '\n';
    };
  }
  EcmOptions ecm{cfg.ecm_tol, cfg.ecm_max_iter, EcmSolver::automatic};
  const auto result = m_emcd_star(g, e, model, filter, options, cfg.exec(), ecm);

  const fs::path dir = cfg.out.empty() ? fs::path(".") : fs::path(cfg.out);
  fs::create_directories(dir);
  {
    auto f = open_output(dir / "communities.txt");
    write_communities(f, g, result.consensus.structure());
  }
  {
    auto f = open_output(dir / "retained_edges.txt");
    write_retained(f, result.consensus);
  }
  {
    auto f = open_output(dir / "commits.log");
    write_commit_log(f, g, result.report);
  }
  const auto m = build_coassociation(g, e, cfg.exec());
  const auto gm = build_coassociation_graph(m);
  {
    auto f = open_output(dir / "coassociation.tsv");
    write_coassociation(f, g, gm);
  }
  {
    auto f = open_output(dir / "significance.tsv");
    write_significance(f, g, gm, result.filter, model, filter);
  }

  auto report = evaluate(g, result.consensus, cfg.exec());
  report.lower_bound_modularity = result.lower_bound.modularity();
  report.ensemble_nmi = ensemble_avg_nmi(e, result.consensus.structure());
  {
    auto f = open_output(dir / "metrics.tsv");
    write_report_tsv(f, report);
  }
  {
    auto f = open_output(dir / "metrics.txt");
    write_report_text(f, report);
  }
  out << "model           " << to_string(model) << '\n';
  if (result.filter.ecm) {
    out << "ECM residual    " << std::scientific << std::setprecision(3)
        << result.filter.ecm->residual << std::defaultfloat << " after "
        << result.filter.ecm->iterations << " iterations\n";
  }
  out << "retained pairs  " << result.filter.filtered.size() << " of " << m.size() << '\n';
  out << "commits         " << result.report.log.size() << " in " << result.report.passes
      << " passes\n";
  write_report_text(out, report);
  return kExitOk;
}

int cmd_eval(const RunConfig& cfg, std::ostream& out) {
  const auto g = load_graph(cfg.input);
  auto consensus_in = open_input(cfg.consensus);
  const auto c = read_communities(consensus_in, g);
  RetainedEdges retained;
  if (cfg.retained.empty()) {
    retained = intra_community_edges(g, c);
  } else {
    auto in = open_input(cfg.retained);
    retained = read_retained(in, g);
  }
  const ConsensusState state(g, c.labels(), std::move(retained));
  auto report = evaluate(g, state, cfg.exec());
  if (!cfg.reference.empty()) {
    if (looks_like_ensemble(cfg.reference)) {
      const auto e = load_ensemble(cfg.reference, g);
      report.ensemble_nmi = ensemble_avg_nmi(e, c);
    } else {
      auto in = open_input(cfg.reference);
      report.nmi = nmi(read_communities(in, g), c);
    }
  }
  if (cfg.out.empty()) {
    write_report_text(out, report);
  } else {
    auto f = open_output(cfg.out);
    write_report_tsv(f, report);
    write_report_text(out, report);
  }
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"Consensus community detection in multilayer networks"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "mlcd 1.0.0");

  auto common = [&cfg](CLI::App* sub) {
    sub->add_option("-i,--input", cfg.input, "Multilayer edge list (layerId srcId dstId)")
        ->required();
    sub->add_option("--seed", cfg.seed, "Seed for the community detectors")
        ->capture_default_str();
    sub->add_flag("--serial", cfg.serial, "Run every kernel on the serial path");
    sub->add_flag("-v,--verbose", cfg.verbose, "Print progress to stderr");
  };

  auto* ens = app.add_subcommand("ensemble", "Detect one community structure per layer");
  common(ens);
  ens->add_option("-o,--out", cfg.out, "Ensemble file (default: stdout)");

  auto* det = app.add_subcommand("detect", "Compute the consensus community structure");
  common(det);
  det->add_option("-e,--ensemble", cfg.ensemble, "Ensemble file (default: detect internally)");
  det->add_option("-m,--model", cfg.model, "Filter: threshold, mlf, gloss or ecm")
      ->capture_default_str();
  det->add_option("-a,--alpha", cfg.alpha, "Significance level")->capture_default_str();
  det->add_option("-t,--theta", cfg.theta, "Threshold in [0,1] (threshold model only)");
  det->add_option("-o,--out", cfg.out, "Output directory")->default_str(".");
  det->add_option("--ecm-tol", cfg.ecm_tol, "ECM convergence tolerance")->capture_default_str();
  det->add_option("--ecm-max-iter", cfg.ecm_max_iter, "ECM iteration budget")
      ->capture_default_str();

  auto* ev = app.add_subcommand("eval", "Report metrics of a consensus solution");
  common(ev);
  ev->add_option("-c,--consensus", cfg.consensus, "Community file (nodeId communityId)")
      ->required();
  ev->add_option("-r,--retained", cfg.retained,
                 "Retained edges (default: every intra-community edge)");
  ev->add_option("--reference", cfg.reference, "Reference community file or ensemble file");
  ev->add_option("-o,--out", cfg.out, "Write the report as TSV to this file");

  std::vector<std::string> argv(args.rbegin(), args.rend());
  if (!argv.empty()) argv.pop_back();
  try {
    app.parse(argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << app.version() << '\n';
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  }

  try {
    if (*ens) return cmd_ensemble(cfg, out);
    if (*det) return cmd_detect(cfg, out, err);
    return cmd_eval(cfg, out);
  } catch (const SolverError& e) {
    err << "error: " << e.what() << " (residual " << std::scientific << e.residual()
        << " after " << e.iterations() << " iterations)\n";
    return kExitSolver;
  } catch (const MismatchError& e) {
    err << "error: " << e.what() << '\n';
    return kExitMismatch;
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::ios_base::failure& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  }
}

}  // namespace mlcd
