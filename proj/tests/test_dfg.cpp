#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "drs/dfg.hpp"
#include "drs/parser.hpp"

using namespace drs;
using dfg::DataFlowGraph;

namespace {

DataFlowGraph graph_of(const std::string& src) {
  static const lang::Vocab v = lang::Vocab::robolang();
  const auto tp = lang::tokenize(v, src);
  const auto r = lang::parse(v, tp);
  REQUIRE(r.ok());
  return dfg::extract_dfg(*r.ast);
}

}  // namespace

TEST_CASE("single def-use chain") {
  const DataFlowGraph g = graph_of("x = 3 ; go_to ( kitchen ) ; say ( x ) ;");
  CHECK(g.nodes == std::set<std::pair<std::string, std::int32_t>>{{"x", 0}});
  REQUIRE(g.edges.size() == 1);
  CHECK(g.edges[0].var == "x");
  CHECK(g.edges[0].def_ordinal == 0);
  CHECK(g.edges[0].use_stmt == 2);
}

TEST_CASE("program with no variables yields an empty graph") {
  const DataFlowGraph g = graph_of("go_to ( kitchen ) ; pick ( cup ) ;");
  CHECK(g.empty());
}

TEST_CASE("redefinition bumps the ordinal and rebinds reads") {
  const DataFlowGraph g = graph_of("x = 1 ; x = 2 ; say ( x ) ;");
  CHECK(g.nodes == std::set<std::pair<std::string, std::int32_t>>{{"x", 0}, {"x", 1}});
  REQUIRE(g.edges.size() == 1);
  CHECK(g.edges[0].def_ordinal == 1);
}

TEST_CASE("undefined reads produce UNDEF edges") {
  const DataFlowGraph g = graph_of("say ( x ) ;");
  REQUIRE(g.edges.size() == 1);
  CHECK(g.edges[0].def_ordinal == -1);
  CHECK(g.nodes.empty());
}

TEST_CASE("conditional branches join conservatively") {
  const DataFlowGraph g = graph_of(
      "if 1 > 0 { x = 1 ; } else { x = 2 ; } say ( x ) ;");
  CHECK(g.nodes.size() == 2);
  // both arms' definitions reach the read
  std::set<std::int32_t> defs;
  for (const auto& e : g.edges) {
    if (e.var == "x") defs.insert(e.def_ordinal);
  }
  CHECK(defs == std::set<std::int32_t>{0, 1});
}

TEST_CASE("if without else keeps the fall-through definition") {
  const DataFlowGraph g = graph_of("x = 1 ; if 1 > 0 { x = 2 ; } say ( x ) ;");
  std::set<std::int32_t> defs;
  for (const auto& e : g.edges) defs.insert(e.def_ordinal);
  CHECK(defs == std::set<std::int32_t>{0, 1});
}

TEST_CASE("dfg_match basics") {
  const DataFlowGraph a = graph_of("x = 3 ; say ( x ) ;");
  CHECK(dfg::dfg_match(a, a) == doctest::Approx(1.0));

  const DataFlowGraph empty = graph_of("go_to ( hall ) ;");
  CHECK(dfg::dfg_match(empty, empty) == doctest::Approx(1.0));  // both empty
  CHECK(dfg::dfg_match(empty, a) == doctest::Approx(0.0));
}

TEST_CASE("partial overlap F1") {
  // reference: three edges
  const DataFlowGraph ref =
      graph_of("x = 1 ; y = 2 ; say ( x ) ; say ( y ) ; say ( x ) ;");
  REQUIRE(ref.edges.size() == 3);
  // candidate shares 2 edges (x@2, y@3) and adds 1 spurious (z read at 4)
  const DataFlowGraph cand =
      graph_of("x = 1 ; y = 2 ; say ( x ) ; say ( y ) ; say ( z ) ;");
  REQUIRE(cand.edges.size() == 3);
  CHECK(dfg::dfg_match(cand, ref) == doctest::Approx(2.0 * 2 / 6));
}

TEST_CASE("symmetry and renaming invariance") {
  const DataFlowGraph a = graph_of("x = 1 ; y = x + 1 ; say ( y ) ;");
  const DataFlowGraph b = graph_of("x = 2 ; say ( x ) ;");
  CHECK(dfg::dfg_match(a, b) == doctest::Approx(dfg::dfg_match(b, a)));

  const DataFlowGraph renamed = graph_of("z = 1 ; n = z + 1 ; say ( n ) ;");
  CHECK(dfg::dfg_match(a, renamed) == doctest::Approx(1.0));
  CHECK(dfg::dfg_match(renamed, b) == doctest::Approx(dfg::dfg_match(a, b)));
}

TEST_CASE("edge list rendering is line oriented and sorted") {
  const DataFlowGraph g = graph_of("x = 1 ; say ( x ) ; say ( y ) ;");
  const std::string lines = dfg::to_edge_list(g);
  CHECK(lines == "x#0 -> stmt1\ny#UNDEF -> stmt2\n");
}
