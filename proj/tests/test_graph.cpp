#include <doctest.h>

#include <numeric>
#include <sstream>

#include "mlcd/errors.hpp"
#include "mlcd/graph.hpp"
#include "support/fixtures.hpp"

using namespace mlcd;
using mlcd::test::parse;

TEST_SUITE("graph") {

TEST_CASE("three-line file") {
  const auto g = parse("A 1 2\nA 2 3\nB 1 2\n");
  CHECK(g.num_layers() == 2);
  CHECK(g.num_entities() == 3);
  CHECK(g.edges(0).size() == 2);
  CHECK(g.edges(1).size() == 1);
  CHECK(g.layer_name(0) == "A");
  CHECK(g.total_edges() == 3);
}

TEST_CASE("comments, blank lines and duplicates") {
  const auto g = parse("# header\n\nA 2 1\nA 1 2\n  # indented comment\nA 1 2\n");
  CHECK(g.total_edges() == 1);
  CHECK(g.edges(0)[0] == Edge{0, 1});
}

TEST_CASE("self-loop is rejected with its line number") {
  try {
    parse("A 1 2\nA 1 1\n");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
}

TEST_CASE("wrong field count") {
  CHECK_THROWS_AS(parse("A 1 2\nA 1\n"), ParseError);
  CHECK_THROWS_AS(parse("A 1 2 3\n"), ParseError);
}

TEST_CASE("empty input has no layer") { CHECK_THROWS_AS(parse("# nothing\n"), InputError); }

TEST_CASE("missing file") { CHECK_THROWS_AS(load_multilayer("/nonexistent/file.edges"), InputError); }

TEST_CASE("natural entity order, layer order of first appearance") {
  const auto g = parse("Z 10 9\nA 2 x\nZ 9 b\n");
  CHECK(g.entity_name(0) == "2");
  CHECK(g.entity_name(1) == "9");
  CHECK(g.entity_name(2) == "10");
  CHECK(g.layer_name(0) == "Z");
  CHECK(g.layer_name(1) == "A");
  CHECK(natural_less("9", "10"));
  CHECK_FALSE(natural_less("10", "9"));
  CHECK(natural_less("10", "a"));
}

TEST_CASE("layer_degree") {
  const auto path = parse("A 1 2\nA 2 3\nB 4 5\n");
  CHECK(layer_degree(path, "A", "2") == 2);
  CHECK(layer_degree(path, "A", "1") == 1);
  CHECK(layer_degree(path, "A", "4") == 0);
  CHECK(layer_degree(path, "B", "1") == 0);
  CHECK_THROWS_AS(layer_degree(path, "C", "1"), InputError);

  const auto tri = parse("A 1 2\nA 2 3\nA 1 3\n");
  for (const auto* v : {"1", "2", "3"}) CHECK(layer_degree(tri, "A", v) == 2);
}

TEST_CASE("degree sums to twice the layer size") {
  const auto g = mlcd::test::planted({25, 4, 3, 0.5, 0.1, 0.8}, 7);
  for (LayerId l = 0; l < g.num_layers(); ++l) {
    std::size_t sum = 0;
    for (NodeId v = 0; v < g.num_entities(); ++v) sum += g.degree(l, v);
    CHECK(sum == 2 * g.edges(l).size());
  }
}

TEST_CASE("presence and edge index") {
  const auto g = parse("A 1 2\nB 2 3\n");
  const auto n1 = *g.find_entity("1");
  const auto n3 = *g.find_entity("3");
  CHECK(g.present(0, n1));
  CHECK_FALSE(g.present(0, n3));
  CHECK(g.edge_index(1, n3, *g.find_entity("2")) == EdgeId{0});
  CHECK_FALSE(g.edge_index(0, n1, n3));
  CHECK(g.layer_nodes(1).size() == 2);
}

TEST_CASE("serialization round trip") {
  const auto g = mlcd::test::planted({18, 3, 2, 0.5, 0.1, 0.9}, 3);
  std::stringstream s;
  write_multilayer(s, g);
  const auto h = read_multilayer(s);
  CHECK(g == h);
}

TEST_CASE("AUCS dataset counts") {
  const auto g = load_multilayer(mlcd::test::data_path("aucs.edges"));
  CHECK(g.num_entities() == 61);
  CHECK(g.total_edges() == 620);
  CHECK(g.num_layers() == 5);
}

TEST_CASE("builder rejects self-loops and keeps declared entities") {
  MultilayerGraph::Builder b;
  CHECK_THROWS_AS(b.add_edge("A", "1", "1"), InputError);
  b.add_edge("A", "1", "2");
  b.add_entity("7");
  const auto g = std::move(b).build();
  CHECK(g.num_entities() == 3);
  CHECK(g.degree(0, *g.find_entity("7")) == 0);
}

}
