#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "drs/grammar.hpp"
#include "drs/parser.hpp"
#include "test_util.hpp"

using namespace drs::lang;

namespace {

struct Fixture {
  Vocab v = Vocab::robolang();
  Grammar g{v};
};

// Viability oracle via the recursive-descent parser: a token prefix is
// viable iff it parses, or fails exactly at its end (more input could fix it).
bool viable_by_reparse(const Fixture& f, const std::vector<TokenId>& prefix) {
  TokenizedProgram tp = from_ids(f.v, prefix);
  if (tp.size() == 0) return true;
  const ParseResult r = parse(f.v, tp);
  return r.ok() || r.error_index == static_cast<std::int32_t>(prefix.size());
}

}  // namespace

TEST_CASE("advance examples") {
  Fixture f;
  GrammarState s0 = f.g.initial();
  GrammarState s1 = f.g.advance(s0, f.v.id("go_to"));
  CHECK(s1.accepting());
  CHECK_FALSE(f.g.complete(s1));

  GrammarState dead = f.g.advance(s0, f.v.id(")"));
  CHECK_FALSE(dead.accepting());
  // dead states absorb
  GrammarState dead2 = f.g.advance(dead, f.v.id("go_to"));
  CHECK_FALSE(dead2.accepting());
}

TEST_CASE("complete implies accepting and enables EOS") {
  Fixture f;
  GrammarState s = f.g.initial();
  for (const char* tok : {"go_to", "(", "kitchen", ")", ";"}) {
    s = f.g.advance(s, f.v.id(tok));
    CHECK(s.accepting());
  }
  CHECK(f.g.complete(s));
  const auto mask = f.g.legal_next_mask(s);
  CHECK(mask[static_cast<std::size_t>(f.v.eos())] == 1);
  // a second statement may follow
  CHECK(mask[static_cast<std::size_t>(f.v.id("pick"))] == 1);
}

TEST_CASE("initial mask admits exactly statement-initial tokens") {
  Fixture f;
  const auto mask = f.g.legal_next_mask(f.g.initial());
  for (std::size_t tok = 0; tok < f.v.size(); ++tok) {
    const TokenClass c = f.v.token_class(static_cast<TokenId>(tok));
    const bool stmt_initial =
        c == TokenClass::KwGoTo || c == TokenClass::KwPick || c == TokenClass::KwPlace ||
        c == TokenClass::KwSay || c == TokenClass::KwAssert || c == TokenClass::KwIf ||
        c == TokenClass::KwRepeat || c == TokenClass::Var;
    CHECK(mask[tok] == (stmt_initial ? 1 : 0));
  }
}

TEST_CASE("dead state has an all-false mask") {
  Fixture f;
  GrammarState dead = f.g.advance(f.g.initial(), f.v.id("}"));
  REQUIRE_FALSE(dead.accepting());
  const auto mask = f.g.legal_next_mask(dead);
  for (std::uint8_t m : mask) CHECK(m == 0);
}

TEST_CASE("random legal prefixes stay accepting and match the reparse oracle") {
  Fixture f;
  std::mt19937_64 rng(42);
  for (int iter = 0; iter < 200; ++iter) {
    const auto ids = drs::test::random_program_ids(f.g, rng, 24);
    GrammarState s = f.g.initial();
    std::vector<TokenId> prefix;
    for (TokenId id : ids) {
      s = f.g.advance(s, id);
      prefix.push_back(id);
      CHECK(s.accepting());
      CHECK(viable_by_reparse(f, prefix));
    }
  }
}

TEST_CASE("mask/advance coherence on random reachable states") {
  Fixture f;
  std::mt19937_64 rng(1);
  for (int iter = 0; iter < 300; ++iter) {
    const GrammarState s = drs::test::random_reachable_state(f.g, rng);
    const auto mask = f.g.legal_next_mask(s);
    for (std::size_t tok = 0; tok < f.v.size(); ++tok) {
      if (static_cast<TokenId>(tok) == f.v.eos()) {
        CHECK(mask[tok] == (f.g.complete(s) ? 1 : 0));
      } else {
        const GrammarState ns = f.g.advance(s, static_cast<TokenId>(tok));
        CHECK(mask[tok] == (ns.accepting() ? 1 : 0));
      }
    }
  }
}

TEST_CASE("syntax scores: grammatical program is all zeros") {
  Fixture f;
  const TokenizedProgram tp =
      tokenize(f.v, "x = 3 ; go_to ( kitchen ) ; say ( x ) ;");
  const auto scores = syntax_scores(f.g, tp);
  REQUIRE(scores.size() == tp.size());
  for (double s : scores) CHECK(s == 0.0);
}

TEST_CASE("syntax scores: single blame at the first violation") {
  Fixture f;
  // misplaced ')' at index 7
  const TokenizedProgram tp =
      tokenize(f.v, "go_to ( kitchen ) ; say ( ) \"done\" ;");
  const auto scores = syntax_scores(f.g, tp);
  REQUIRE(scores.size() == 10);
  for (std::size_t i = 0; i < scores.size(); ++i) {
    CHECK(scores[i] == (i == 7 ? -1.0 : 0.0));
  }
}

TEST_CASE("syntax scores: empty program gives an empty vector") {
  Fixture f;
  const auto scores = syntax_scores(f.g, tokenize(f.v, ""));
  CHECK(scores.empty());
}

TEST_CASE("syntax scores on fenced responses are confined to the code region") {
  Fixture f;
  const TokenizedProgram tp = tokenize(f.v, "``` go_to go_to ``` <eos>");
  const auto scores = syntax_scores(f.g, tp);
  REQUIRE(scores.size() == 5);
  CHECK(scores[0] == 0.0);
  CHECK(scores[1] == 0.0);
  CHECK(scores[2] == -1.0);  // second go_to kills the prefix
  CHECK(scores[3] == 0.0);
  CHECK(scores[4] == 0.0);
}

TEST_CASE("blame consistency between parse and syntax scores") {
  Fixture f;
  std::mt19937_64 rng(77);
  int checked = 0;
  for (int iter = 0; iter < 400; ++iter) {
    auto ids = drs::test::random_program_ids(f.g, rng, 30);
    if (ids.empty()) continue;
    // corrupt one token
    const std::size_t at = rng() % ids.size();
    ids[at] = static_cast<TokenId>(rng() % f.v.size());
    const TokenizedProgram tp = from_ids(f.v, ids);
    const ParseResult r = parse(f.v, tp);
    const auto scores = syntax_scores(f.g, tp);
    std::int32_t blame = -1;
    int blame_count = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
      if (scores[i] != 0.0) {
        blame = static_cast<std::int32_t>(i);
        ++blame_count;
      }
    }
    if (r.ok()) {
      CHECK(blame_count == 0);
    } else if (r.error_index < static_cast<std::int32_t>(ids.size())) {
      CHECK(blame_count == 1);
      CHECK(blame == r.error_index);
    } else {
      // grammatical prefix that merely stopped early: no in-stream blame
      CHECK(blame_count == 0);
    }
    ++checked;
  }
  CHECK(checked > 300);
}

TEST_CASE("min completion tokens honours the shortest closing path") {
  Fixture f;
  CHECK(f.g.min_completion_tokens(f.g.initial()) == 4);  // e.g. x = 3 ;
  GrammarState s = f.g.initial();
  s = f.g.advance(s, f.v.id("repeat"));
  s = f.g.advance(s, f.v.id("3"));
  s = f.g.advance(s, f.v.id("{"));
  CHECK(f.g.min_completion_tokens(s) == 5);  // shortest stmt + '}'
  GrammarState dead = f.g.advance(f.g.initial(), f.v.id(";"));
  CHECK(f.g.min_completion_tokens(dead) == Grammar::kUnreachable);
}

TEST_CASE("response automaton closes within budget and scores in-code only") {
  Fixture f;
  ResponseState rs(f.g);
  // pre-fence junk is unscored
  CHECK(rs.consume(f.v.id("task")) == 0.0);
  CHECK(rs.consume(f.v.fence()) == 0.0);
  CHECK(rs.consume(f.v.id("go_to")) == 0.0);
  CHECK(rs.consume(f.v.id("go_to")) == -1.0);  // violation inside the fence
  CHECK(rs.consume(f.v.id("go_to")) == 0.0);   // absorbed
}

TEST_CASE("constrained mask leaves only closable tokens near the budget") {
  Fixture f;
  ResponseState rs(f.g);
  rs.consume(f.v.fence());
  // inside an empty program with 7 tokens left: any 4-token statement plus
  // fence and eos fits, but 'if'/'repeat' openings may not
  const auto mask = rs.constrained_mask(7);
  CHECK(mask[static_cast<std::size_t>(f.v.id("x"))] == 1);
  CHECK(mask[static_cast<std::size_t>(f.v.id("if"))] == 0);   // needs >= 8 more
  CHECK(mask[static_cast<std::size_t>(f.v.id("go_to"))] == 1);
  CHECK(mask[static_cast<std::size_t>(f.v.fence())] == 0);    // program not complete
}
