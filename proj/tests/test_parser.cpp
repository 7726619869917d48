#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "drs/parser.hpp"
#include "test_util.hpp"

using namespace drs::lang;

namespace {
struct Fixture {
  Vocab v = Vocab::robolang();
  Grammar g{v};
};
}  // namespace

TEST_CASE("two statement program with token ranges") {
  Fixture f;
  const TokenizedProgram tp = tokenize(f.v, "x = 3 ; go_to ( kitchen ) ;");
  const ParseResult r = parse(f.v, tp);
  REQUIRE(r.ok());
  REQUIRE(r.ast->statements.size() == 2);
  const Stmt& s0 = r.ast->statements[0];
  CHECK(s0.kind == Stmt::Kind::Assign);
  CHECK(s0.var == "x");
  CHECK(s0.range.begin == 0);
  CHECK(s0.range.end == 4);
  const Stmt& s1 = r.ast->statements[1];
  CHECK(s1.kind == Stmt::Kind::Call);
  CHECK(s1.api == CallApi::GoTo);
  CHECK(s1.word_arg == "kitchen");
  CHECK(s1.range.begin == 4);
  CHECK(s1.range.end == 9);
  CHECK(r.ast->range.begin == 0);
  CHECK(r.ast->range.end == 9);
}

TEST_CASE("empty token sequence is a parse error at 0") {
  Fixture f;
  const ParseResult r = parse(f.v, tokenize(f.v, ""));
  CHECK_FALSE(r.ok());
  CHECK(r.error_index == 0);
}

TEST_CASE("grammatical prefix missing the final token fails at length") {
  Fixture f;
  const TokenizedProgram tp = tokenize(f.v, "go_to ( kitchen )");
  const ParseResult r = parse(f.v, tp);
  CHECK_FALSE(r.ok());
  CHECK(r.error_index == 4);
}

TEST_CASE("parse error index matches the first violation") {
  Fixture f;
  const TokenizedProgram tp = tokenize(f.v, "go_to ( kitchen ) ; ) ;");
  const ParseResult r = parse(f.v, tp);
  CHECK_FALSE(r.ok());
  CHECK(r.error_index == 5);
}

TEST_CASE("if else and repeat structures") {
  Fixture f;
  const TokenizedProgram tp = tokenize(
      f.v,
      "if x > 1 { say ( \"ok\" ) ; } else { say ( \"busy\" ) ; } repeat 3 { pick ( cup ) ; }");
  const ParseResult r = parse(f.v, tp);
  REQUIRE(r.ok());
  REQUIRE(r.ast->statements.size() == 2);
  const Stmt& iff = r.ast->statements[0];
  CHECK(iff.kind == Stmt::Kind::If);
  CHECK(iff.cond->op == CmpOp::Gt);
  REQUIRE(iff.then_body.size() == 1);
  REQUIRE(iff.else_body.size() == 1);
  CHECK(iff.then_body[0].say_arg->kind == Expr::Kind::StrLit);
  CHECK(iff.then_body[0].say_arg->text == "ok");
  const Stmt& rep = r.ast->statements[1];
  CHECK(rep.kind == Stmt::Kind::Repeat);
  CHECK(rep.repeat_count == 3);
  REQUIRE(rep.body.size() == 1);
  CHECK(rep.body[0].api == CallApi::Pick);
}

TEST_CASE("operator precedence: * binds tighter than +") {
  Fixture f;
  const TokenizedProgram tp = tokenize(f.v, "x = 1 + 2 * 3 ;");
  const ParseResult r = parse(f.v, tp);
  REQUIRE(r.ok());
  const Expr& e = *r.ast->statements[0].value;
  REQUIRE(e.kind == Expr::Kind::Bin);
  CHECK(e.op == BinOp::Add);
  CHECK(e.lhs->int_value == 1);
  REQUIRE(e.rhs->kind == Expr::Kind::Bin);
  CHECK(e.rhs->op == BinOp::Mul);
}

TEST_CASE("fenced responses parse their code region with absolute spans") {
  Fixture f;
  const TokenizedProgram tp = tokenize(f.v, "code : ``` pick ( cup ) ; ``` <eos>");
  const ParseResult r = parse(f.v, tp);
  REQUIRE(r.ok());
  REQUIRE(r.ast->statements.size() == 1);
  CHECK(r.ast->statements[0].range.begin == 3);
  CHECK(r.ast->statements[0].range.end == 8);
}

TEST_CASE("fenced response with a truncated program blames the closing fence") {
  Fixture f;
  const TokenizedProgram tp = tokenize(f.v, "``` pick ( cup ) ``` <eos>");
  const ParseResult r = parse(f.v, tp);
  CHECK_FALSE(r.ok());
  CHECK(r.error_index == 5);  // index of the closing fence
}

TEST_CASE("random generated programs always parse") {
  Fixture f;
  std::mt19937_64 rng(3);
  for (int iter = 0; iter < 500; ++iter) {
    const auto ids = drs::test::random_program_ids(f.g, rng);
    if (ids.empty()) continue;
    const ParseResult r = parse(f.v, from_ids(f.v, ids));
    CHECK(r.ok());
  }
}

TEST_CASE("constrained-decoding safety: masked walks terminated by EOS parse") {
  // any sequence sampled under legal_next_mask and closed by EOS parses
  Fixture f;
  std::mt19937_64 rng(4);
  for (int iter = 0; iter < 300; ++iter) {
    GrammarState st = f.g.initial();
    std::vector<TokenId> ids;
    while (true) {
      const auto mask = f.g.legal_next_mask(st);
      std::vector<TokenId> cands;
      for (std::size_t tok = 0; tok < mask.size(); ++tok) {
        if (!mask[tok]) continue;
        if (static_cast<TokenId>(tok) == f.v.eos()) continue;
        GrammarState ns = f.g.advance(st, static_cast<TokenId>(tok));
        if (f.g.min_completion_tokens(ns) + ids.size() + 1 <= 40) {
          cands.push_back(static_cast<TokenId>(tok));
        }
      }
      const bool stop_ok = f.g.complete(st) && !ids.empty();
      if (cands.empty() || (stop_ok && rng() % 4 == 0)) {
        REQUIRE(stop_ok);
        break;
      }
      const TokenId pick = cands[rng() % cands.size()];
      ids.push_back(pick);
      st = f.g.advance(st, pick);
    }
    CHECK(parse(f.v, from_ids(f.v, ids)).ok());
  }
}
