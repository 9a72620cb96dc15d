#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "mlcd/cli.hpp"
#include "support/fixtures.hpp"

using namespace mlcd;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "mlcd");
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("mlcd_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  return {std::istreambuf_iterator<char>(in), {}};
}

void put(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

double read_metric(const fs::path& tsv, const std::string& key) {
  std::ifstream in(tsv);
  std::string k;
  std::string v;
  while (in >> k >> v) {
    if (k == key) return std::stod(v);
  }
  return std::nan("");
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("ensemble of AUCS has one block per layer and is reproducible") {
  const auto dir = scratch("ensemble");
  const auto input = mlcd::test::data_path("aucs.edges");
  REQUIRE(run({"ensemble", "-i", input, "-o", (dir / "a.txt").string()}).code == 0);
  REQUIRE(run({"ensemble", "-i", input, "-o", (dir / "b.txt").string(), "--serial"}).code == 0);
  const auto a = slurp(dir / "a.txt");
  CHECK(a == slurp(dir / "b.txt"));
  std::set<std::string> layers;
  std::istringstream in(a);
  std::string l, n, c;
  while (in >> l >> n >> c) layers.insert(l);
  CHECK(layers.size() == 5);
}

TEST_CASE("missing input exits with 2") {
  const auto r = run({"ensemble", "-i", "/nonexistent/graph.edges"});
  CHECK(r.code == 2);
  CHECK(r.err.find("does not exist") != std::string::npos);
  CHECK(run({"detect"}).code == 2);
  CHECK(run({"bogus"}).code == 2);
}

TEST_CASE("malformed input exits with 2") {
  const auto dir = scratch("bad");
  put(dir / "g.edges", "A 1 2\nA 3 3\n");
  const auto r = run({"detect", "-i", (dir / "g.edges").string(), "-o", dir.string()});
  CHECK(r.code == 2);
  CHECK(r.err.find("line 2") != std::string::npos);
}

TEST_CASE("theta only with the threshold model") {
  const auto input = mlcd::test::data_path("toy.edges");
  CHECK(run({"detect", "-i", input, "--model", "mlf", "--theta", "0.5"}).code == 2);
  CHECK(run({"detect", "-i", input, "--model", "threshold"}).code == 2);
  CHECK(run({"detect", "-i", input, "--model", "nope"}).code == 2);
}

TEST_CASE("detect on the toy fixture with threshold 0.5") {
  const auto dir = scratch("detect");
  const auto r = run({"detect", "-i", mlcd::test::data_path("toy.edges"), "--model", "threshold",
                      "--theta", "0.5", "-o", dir.string()});
  REQUIRE(r.code == 0);
  std::map<std::string, std::set<std::string>> groups;
  std::ifstream in(dir / "communities.txt");
  std::string node, c;
  while (in >> node >> c) groups[c].insert(node);
  std::set<std::set<std::string>> got;
  for (auto& [k, v] : groups) got.insert(v);
  const std::set<std::set<std::string>> expected{
      {"1", "2", "3", "4"}, {"5", "6", "7", "8"}, {"9"}, {"10"}, {"11"}};
  CHECK(got == expected);
  for (const auto* f : {"retained_edges.txt", "commits.log", "metrics.tsv", "metrics.txt",
                        "significance.tsv", "coassociation.tsv"}) {
    CHECK(fs::exists(dir / f));
  }
  CHECK(r.out.find("Q(final)") != std::string::npos);
}

TEST_CASE("model runs report lower bound and final modularity") {
  for (const auto* model : {"mlf", "ecm", "gloss"}) {
    const auto dir = scratch(std::string("model_") + model);
    const auto r = run({"detect", "-i", mlcd::test::data_path("aucs.edges"), "--model", model,
                        "-o", dir.string()});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("Q(lower bound)") != std::string::npos);
    const double lb = read_metric(dir / "metrics.tsv", "modularity_lower_bound");
    const double fin = read_metric(dir / "metrics.tsv", "modularity");
    CHECK(fin >= lb);
  }
}

TEST_CASE("ECM non-convergence exits with 3") {
  const auto r = run({"detect", "-i", mlcd::test::data_path("aucs.edges"), "--model", "ecm",
                      "--ecm-max-iter", "1", "--ecm-tol", "1e-15", "-o",
                      scratch("ecm_fail").string()});
  CHECK(r.code == 3);
  CHECK(r.err.find("residual") != std::string::npos);
}

TEST_CASE("detect with an external ensemble is byte-identical to the internal one") {
  const auto dir = scratch("external");
  const auto input = mlcd::test::data_path("aucs.edges");
  REQUIRE(run({"ensemble", "-i", input, "-o", (dir / "e.txt").string()}).code == 0);
  REQUIRE(run({"detect", "-i", input, "-o", (dir / "a").string()}).code == 0);
  REQUIRE(run({"detect", "-i", input, "-e", (dir / "e.txt").string(), "-o", (dir / "b").string()})
              .code == 0);
  CHECK(slurp(dir / "a" / "communities.txt") == slurp(dir / "b" / "communities.txt"));
  CHECK(slurp(dir / "a" / "commits.log") == slurp(dir / "b" / "commits.log"));
}

TEST_CASE("eval") {
  const auto dir = scratch("eval");
  const auto input = mlcd::test::data_path("toy.edges");
  REQUIRE(run({"detect", "-i", input, "-o", dir.string(), "--model", "threshold", "--theta", "0.3"})
              .code == 0);
  const auto comm = (dir / "communities.txt").string();
  const auto self = run({"eval", "-i", input, "-c", comm, "-r", (dir / "retained_edges.txt").string(),
                         "--reference", comm, "-o", (dir / "eval.tsv").string()});
  REQUIRE(self.code == 0);
  CHECK(read_metric(dir / "eval.tsv", "nmi") == 1.0);
  CHECK(read_metric(dir / "eval.tsv", "modularity") ==
        doctest::Approx(read_metric(dir / "metrics.tsv", "modularity")).epsilon(1e-15));

  REQUIRE(run({"ensemble", "-i", input, "-o", (dir / "ens.txt").string()}).code == 0);
  const auto ens = run({"eval", "-i", input, "-c", comm, "--reference", (dir / "ens.txt").string()});
  REQUIRE(ens.code == 0);
  CHECK(ens.out.find("ensemble NMI") != std::string::npos);

  put(dir / "single.txt", "1 a\n2 b\n3 c\n4 d\n5 e\n6 f\n7 g\n8 h\n9 i\n10 j\n11 k\n");
  REQUIRE(run({"eval", "-i", input, "-c", (dir / "single.txt").string(), "-o",
               (dir / "single.tsv").string()})
              .code == 0);
  CHECK(read_metric(dir / "single.tsv", "modularity") == 0.0);

  put(dir / "short.txt", "1 0\n2 0\n");
  CHECK(run({"eval", "-i", input, "-c", (dir / "short.txt").string()}).code == 4);
}

TEST_CASE("eval on two cliques") {
  const auto dir = scratch("cliques");
  put(dir / "g.edges", "L 1 2\nL 1 3\nL 2 3\nL 4 5\nL 4 6\nL 5 6\n");
  put(dir / "c.txt", "1 0\n2 0\n3 0\n4 1\n5 1\n6 1\n");
  REQUIRE(run({"eval", "-i", (dir / "g.edges").string(), "-c", (dir / "c.txt").string(), "-o",
               (dir / "m.tsv").string()})
              .code == 0);
  CHECK(read_metric(dir / "m.tsv", "modularity") == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("help and version") {
  CHECK(run({"--help"}).code == 0);
  CHECK(run({"--version"}).out.find("mlcd") != std::string::npos);
}

}
