#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "drs/lint.hpp"
#include "drs/parser.hpp"

using namespace drs;
using drs::lang::TokenizedProgram;

namespace {

struct Linted {
  TokenizedProgram tp;
  std::vector<lint::Diagnostic> diags;
};

Linted run_lint(const std::string& src, lint::LintOptions opts = {}) {
  static const lang::Vocab v = lang::Vocab::robolang();
  Linted out;
  out.tp = lang::tokenize(v, src);
  const lang::ParseResult r = lang::parse(v, out.tp);
  REQUIRE(r.ok());
  out.diags = lint::lint(*r.ast, out.tp, opts);
  return out;
}

}  // namespace

TEST_CASE("L001 unused variable spans the assignment") {
  const Linted l = run_lint("x = 3 ; go_to ( kitchen ) ;");
  REQUIRE(l.diags.size() == 1);
  CHECK(l.diags[0].rule_id == "L001");
  CHECK(l.diags[0].token_span.begin == 0);
  CHECK(l.diags[0].token_span.end == 4);
  CHECK(l.diags[0].score_delta == doctest::Approx(-0.2));
}

TEST_CASE("clean minimal program produces no diagnostics") {
  const Linted l = run_lint("go_to ( kitchen ) ;");
  CHECK(l.diags.empty());
}

TEST_CASE("L002 use of undefined variable") {
  const Linted l = run_lint("say ( x ) ;");
  REQUIRE(l.diags.size() == 1);
  CHECK(l.diags[0].rule_id == "L002");
  CHECK(l.diags[0].severity == lint::Severity::Logic);
}

TEST_CASE("L003 unreachable after an always-failing repeat") {
  const Linted l = run_lint("repeat 3 { assert 0 == 1 ; } go_to ( kitchen ) ;");
  REQUIRE(l.diags.size() == 1);
  CHECK(l.diags[0].rule_id == "L003");
  // spans the statement after the repeat
  CHECK(l.diags[0].token_span.begin == 9);
}

TEST_CASE("L004 pick outside the declared object universe") {
  lint::LintOptions opts;
  opts.object_universe = std::set<std::string>{"cup"};
  const Linted l = run_lint("pick ( plate ) ;", opts);
  REQUIRE(l.diags.size() == 1);
  CHECK(l.diags[0].rule_id == "L004");
  CHECK(l.diags[0].severity == lint::Severity::Safety);
  CHECK(l.diags[0].token_span.begin == 0);
  CHECK(l.diags[0].token_span.end == 5);

  const Linted ok = run_lint("pick ( cup ) ;", opts);
  CHECK(ok.diags.empty());
}

TEST_CASE("L005 duplicate consecutive identical statement") {
  const Linted l = run_lint("go_to ( kitchen ) ; go_to ( kitchen ) ;");
  REQUIRE(l.diags.size() == 1);
  CHECK(l.diags[0].rule_id == "L005");
  CHECK(l.diags[0].token_span.begin == 5);
}

TEST_CASE("L006 self comparison") {
  const Linted l = run_lint("x = 1 ; assert x == x ;");
  REQUIRE(l.diags.size() == 1);
  CHECK(l.diags[0].rule_id == "L006");
}

TEST_CASE("diagnostics are ordered by span start and deterministic") {
  const std::string src = "say ( y ) ; x = 1 ; assert x == x ;";
  const Linted a = run_lint(src);
  const Linted b = run_lint(src);
  REQUIRE(a.diags.size() == 2);
  CHECK(a.diags[0].rule_id == "L002");
  CHECK(a.diags[1].rule_id == "L006");
  REQUIRE(b.diags.size() == a.diags.size());
  for (std::size_t i = 0; i < a.diags.size(); ++i) {
    CHECK(a.diags[i].rule_id == b.diags[i].rule_id);
    CHECK(a.diags[i].token_span.begin == b.diags[i].token_span.begin);
  }
}

TEST_CASE("every diagnostic penalizes and spans program tokens") {
  const Linted l = run_lint("say ( y ) ; x = 1 ; x = 1 ; assert x == x ;");
  CHECK(!l.diags.empty());
  for (const auto& d : l.diags) {
    CHECK(d.score_delta < 0.0);
    CHECK(d.token_span.begin < d.token_span.end);
    CHECK(d.token_span.end <= static_cast<std::int32_t>(l.tp.size()));
  }
}

TEST_CASE("lint_score aggregation") {
  using lint::Diagnostic;
  auto d = [](double delta) {
    return Diagnostic{"LXXX", lint::Severity::Style, {0, 1}, delta, ""};
  };
  CHECK(lint::lint_score({}) == 0.0);
  CHECK(lint::lint_score({d(-0.2), d(-0.5)}) == doctest::Approx(-0.7));
  CHECK(lint::lint_score({d(-0.5), d(-0.5), d(-0.5)}) == doctest::Approx(-1.0));
}

TEST_CASE("rule table lists the six rules") {
  CHECK(lint::rule_table().size() == 6);
  const std::string table = lint::render_rule_table();
  CHECK(table.find("L001") != std::string::npos);
  CHECK(table.find("L006") != std::string::npos);
}
