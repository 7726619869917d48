#ifndef DRS_GRAMMAR_HPP_
#define DRS_GRAMMAR_HPP_

#include <cstdint>
#include <limits>
#include <vector>

#include "drs/tokenizer.hpp"
#include "drs/vocab.hpp"

namespace drs::lang {

// Incremental LL(1) recognizer for RoboLang (grammar in docs/grammar.md).
//
// A GrammarState is the pushdown stack of a predictive parse after consuming
// a token prefix. advance() consumes one token; illegal tokens move to an
// absorbing dead state rather than failing. legal_next_mask() is computed
// from FIRST sets of the stack's sentential form — a different route than
// advancing each candidate token, which the tests use as the oracle.

struct GrammarState {
  std::vector<std::uint8_t> stack;  // grammar symbols, top at back
  bool dead = false;

  bool accepting() const { return !dead; }
};

class Grammar {
 public:
  explicit Grammar(const Vocab& vocab);

  GrammarState initial() const;
  GrammarState advance(const GrammarState& s, TokenId tok) const;
  // True iff the consumed prefix is itself a complete program.
  bool complete(const GrammarState& s) const;
  // mask[v] == advance(s, v).accepting() for every v; mask[eos] == complete(s).
  std::vector<std::uint8_t> legal_next_mask(const GrammarState& s) const;
  // Minimum number of further tokens needed to reach a complete program.
  // Returns SIZE_MAX for dead states.
  std::size_t min_completion_tokens(const GrammarState& s) const;

  const Vocab& vocab() const { return *vocab_; }

  static constexpr std::size_t kUnreachable = std::numeric_limits<std::size_t>::max();

 private:
  friend struct GrammarTables;
  const Vocab* vocab_;
  std::vector<std::uint8_t> term_of_token_;  // TokenId -> terminal (kNoTerm if none)
};

// Per-token syntax scores over a tokenized text (the R_sync channel):
// 0 while the prefix stays viable, -1 at the first token that kills it,
// 0 afterwards (single-blame, dead state absorbs). Fenced inputs are scored
// only inside the code region against the program grammar; unfenced inputs
// are scored whole as a bare program. Non-code tokens always score 0.
std::vector<double> syntax_scores(const Grammar& grammar, const TokenizedProgram& prog);

// Wrapper automaton for whole responses: FENCE program FENCE EOS.
// Drives constrained decoding and incremental syntax scoring during
// generation. Outside the code region any token is allowed (and scores 0);
// grammar legality only constrains the fenced program when masking is on.
class ResponseState {
 public:
  explicit ResponseState(const Grammar& grammar);

  // Consume one sampled token; returns this token's syntax score (0 or -1).
  double consume(TokenId tok);
  // Legal-next mask for constrained decoding, restricted so that the
  // response can still close (program + fence + EOS) within budget_left
  // further tokens. EOS bit set once the closing fence has been consumed.
  std::vector<std::uint8_t> constrained_mask(std::size_t budget_left) const;
  bool finished() const { return phase_ == Phase::Done; }

 private:
  enum class Phase { BeforeFence, InCode, AfterCode, Done };
  const Grammar* grammar_;
  Phase phase_ = Phase::BeforeFence;
  GrammarState code_state_;
  bool code_dead_blamed_ = false;
};

}  // namespace drs::lang

#endif  // DRS_GRAMMAR_HPP_
