#include "drs/grammar.hpp"

#include <array>
#include <bitset>
#include <stdexcept>

namespace drs::lang {

namespace {

enum Term : std::uint8_t {
  T_GO_TO, T_PICK, T_PLACE, T_SAY, T_ASSERT, T_IF, T_ELSE, T_REPEAT,
  T_LPAREN, T_RPAREN, T_LBRACE, T_RBRACE, T_SEMI, T_ASSIGN, T_CMP,
  T_PLUS, T_MINUS, T_STAR, T_INT_ZERO, T_INT_POS, T_ROOM, T_OBJ, T_VAR, T_STR,
  kNumTerms
};

enum Nt : std::uint8_t {
  N_Program = kNumTerms, N_StmtTail, N_Stmt, N_Else, N_Arg, N_Cond,
  N_Expr, N_ExprTail, N_Factor,
  kSymEnd
};

constexpr int kNumNts = static_cast<int>(kSymEnd) - static_cast<int>(kNumTerms);
constexpr std::uint8_t kNoTerm = 0xFF;

inline bool is_term(std::uint8_t sym) { return sym < kNumTerms; }
inline int nt_index(std::uint8_t sym) { return sym - kNumTerms; }

std::uint8_t term_of_class(TokenClass c) {
  switch (c) {
    case TokenClass::KwGoTo: return T_GO_TO;
    case TokenClass::KwPick: return T_PICK;
    case TokenClass::KwPlace: return T_PLACE;
    case TokenClass::KwSay: return T_SAY;
    case TokenClass::KwAssert: return T_ASSERT;
    case TokenClass::KwIf: return T_IF;
    case TokenClass::KwElse: return T_ELSE;
    case TokenClass::KwRepeat: return T_REPEAT;
    case TokenClass::LParen: return T_LPAREN;
    case TokenClass::RParen: return T_RPAREN;
    case TokenClass::LBrace: return T_LBRACE;
    case TokenClass::RBrace: return T_RBRACE;
    case TokenClass::Semi: return T_SEMI;
    case TokenClass::Assign: return T_ASSIGN;
    case TokenClass::CmpEq:
    case TokenClass::CmpNe:
    case TokenClass::CmpLt:
    case TokenClass::CmpGt:
    case TokenClass::CmpLe:
    case TokenClass::CmpGe: return T_CMP;
    case TokenClass::Plus: return T_PLUS;
    case TokenClass::Minus: return T_MINUS;
    case TokenClass::Star: return T_STAR;
    case TokenClass::IntZero: return T_INT_ZERO;
    case TokenClass::IntPos: return T_INT_POS;
    case TokenClass::Room: return T_ROOM;
    case TokenClass::Object: return T_OBJ;
    case TokenClass::Var: return T_VAR;
    case TokenClass::Str: return T_STR;
    default: return kNoTerm;  // specials and prompt words
  }
}

struct Production {
  std::uint8_t lhs;
  std::vector<std::uint8_t> rhs;
};

struct Tables {
  std::vector<Production> prods;
  std::array<std::bitset<kNumTerms>, kNumNts> first{};
  std::array<bool, kNumNts> nullable{};
  int predict[kNumNts][kNumTerms];
  std::array<std::size_t, kSymEnd> min_yield{};

  Tables();
  static const Tables& get() {
    static const Tables t;
    return t;
  }
};

Tables::Tables() {
  auto P = [this](std::uint8_t lhs, std::vector<std::uint8_t> rhs) {
    prods.push_back({lhs, std::move(rhs)});
  };
  P(N_Program, {N_Stmt, N_StmtTail});
  P(N_StmtTail, {N_Stmt, N_StmtTail});
  P(N_StmtTail, {});
  P(N_Stmt, {T_GO_TO, T_LPAREN, T_ROOM, T_RPAREN, T_SEMI});
  P(N_Stmt, {T_PICK, T_LPAREN, T_OBJ, T_RPAREN, T_SEMI});
  P(N_Stmt, {T_PLACE, T_LPAREN, T_OBJ, T_RPAREN, T_SEMI});
  P(N_Stmt, {T_SAY, T_LPAREN, N_Arg, T_RPAREN, T_SEMI});
  P(N_Stmt, {T_VAR, T_ASSIGN, N_Expr, T_SEMI});
  P(N_Stmt, {T_ASSERT, N_Cond, T_SEMI});
  P(N_Stmt, {T_IF, N_Cond, T_LBRACE, N_Program, T_RBRACE, N_Else});
  P(N_Stmt, {T_REPEAT, T_INT_POS, T_LBRACE, N_Program, T_RBRACE});
  P(N_Else, {T_ELSE, T_LBRACE, N_Program, T_RBRACE});
  P(N_Else, {});
  P(N_Arg, {T_STR});
  P(N_Arg, {N_Expr});
  P(N_Cond, {N_Expr, T_CMP, N_Expr});
  P(N_Expr, {N_Factor, N_ExprTail});
  P(N_ExprTail, {T_PLUS, N_Factor, N_ExprTail});
  P(N_ExprTail, {T_MINUS, N_Factor, N_ExprTail});
  P(N_ExprTail, {T_STAR, N_Factor, N_ExprTail});
  P(N_ExprTail, {});
  P(N_Factor, {T_INT_ZERO});
  P(N_Factor, {T_INT_POS});
  P(N_Factor, {T_VAR});

  // Nullable and FIRST fixpoints.
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& p : prods) {
      const int A = nt_index(p.lhs);
      bool all_null = true;
      for (std::uint8_t sym : p.rhs) {
        if (is_term(sym)) {
          if (!first[A].test(sym)) {
            first[A].set(sym);
            changed = true;
          }
          all_null = false;
          break;
        }
        const int B = nt_index(sym);
        const auto before = first[A];
        first[A] |= first[B];
        if (first[A] != before) changed = true;
        if (!nullable[B]) {
          all_null = false;
          break;
        }
      }
      if (all_null && !nullable[A]) {
        nullable[A] = true;
        changed = true;
      }
    }
  }

  // FOLLOW fixpoint (no end-marker: end-of-input legality is complete()).
  std::array<std::bitset<kNumTerms>, kNumNts> follow{};
  changed = true;
  while (changed) {
    changed = false;
    for (const auto& p : prods) {
      const int A = nt_index(p.lhs);
      for (std::size_t i = 0; i < p.rhs.size(); ++i) {
        if (is_term(p.rhs[i])) continue;
        const int B = nt_index(p.rhs[i]);
        auto before = follow[B];
        bool tail_nullable = true;
        for (std::size_t j = i + 1; j < p.rhs.size() && tail_nullable; ++j) {
          if (is_term(p.rhs[j])) {
            follow[B].set(p.rhs[j]);
            tail_nullable = false;
          } else {
            follow[B] |= first[nt_index(p.rhs[j])];
            tail_nullable = nullable[nt_index(p.rhs[j])];
          }
        }
        if (tail_nullable) follow[B] |= follow[A];
        if (follow[B] != before) changed = true;
      }
    }
  }

  // Predict table; the grammar must be LL(1).
  for (auto& row : predict) {
    for (int& cell : row) cell = -1;
  }
  for (std::size_t pi = 0; pi < prods.size(); ++pi) {
    const auto& p = prods[pi];
    const int A = nt_index(p.lhs);
    std::bitset<kNumTerms> sel;
    bool all_null = true;
    for (std::uint8_t sym : p.rhs) {
      if (is_term(sym)) {
        sel.set(sym);
        all_null = false;
        break;
      }
      sel |= first[nt_index(sym)];
      if (!nullable[nt_index(sym)]) {
        all_null = false;
        break;
      }
    }
    if (all_null) sel |= follow[A];
    for (int t = 0; t < kNumTerms; ++t) {
      if (!sel.test(static_cast<std::size_t>(t))) continue;
      if (predict[A][t] != -1) throw std::logic_error("RoboLang grammar is not LL(1)");
      predict[A][t] = static_cast<int>(pi);
    }
  }

  // Shortest terminal yield per symbol.
  for (int t = 0; t < kNumTerms; ++t) min_yield[static_cast<std::size_t>(t)] = 1;
  for (int n = kNumTerms; n < kSymEnd; ++n) min_yield[static_cast<std::size_t>(n)] = Grammar::kUnreachable;
  changed = true;
  while (changed) {
    changed = false;
    for (const auto& p : prods) {
      std::size_t total = 0;
      bool known = true;
      for (std::uint8_t sym : p.rhs) {
        if (min_yield[sym] == Grammar::kUnreachable) {
          known = false;
          break;
        }
        total += min_yield[sym];
      }
      if (known && total < min_yield[p.lhs]) {
        min_yield[p.lhs] = total;
        changed = true;
      }
    }
  }
}

}  // namespace

Grammar::Grammar(const Vocab& vocab) : vocab_(&vocab) {
  Tables::get();  // force table construction (validates LL(1))
  term_of_token_.resize(vocab.size());
  for (std::size_t v = 0; v < vocab.size(); ++v) {
    term_of_token_[v] = term_of_class(vocab.token_class(static_cast<TokenId>(v)));
  }
}

GrammarState Grammar::initial() const {
  GrammarState s;
  s.stack.push_back(N_Program);
  return s;
}

GrammarState Grammar::advance(const GrammarState& s, TokenId tok) const {
  if (s.dead) return s;
  GrammarState out = s;
  const std::uint8_t t =
      (tok >= 0 && static_cast<std::size_t>(tok) < term_of_token_.size())
          ? term_of_token_[static_cast<std::size_t>(tok)]
          : kNoTerm;
  if (t == kNoTerm) {
    out.dead = true;
    return out;
  }
  const Tables& tab = Tables::get();
  while (true) {
    if (out.stack.empty()) {
      out.dead = true;
      return out;
    }
    const std::uint8_t top = out.stack.back();
    if (is_term(top)) {
      if (top == t) {
        out.stack.pop_back();
        return out;
      }
      out.dead = true;
      return out;
    }
    const int pi = tab.predict[nt_index(top)][t];
    if (pi < 0) {
      out.dead = true;
      return out;
    }
    out.stack.pop_back();
    const auto& rhs = tab.prods[static_cast<std::size_t>(pi)].rhs;
    for (auto it = rhs.rbegin(); it != rhs.rend(); ++it) out.stack.push_back(*it);
  }
}

bool Grammar::complete(const GrammarState& s) const {
  if (s.dead) return false;
  const Tables& tab = Tables::get();
  for (std::uint8_t sym : s.stack) {
    if (is_term(sym) || !tab.nullable[nt_index(sym)]) return false;
  }
  return true;
}

std::vector<std::uint8_t> Grammar::legal_next_mask(const GrammarState& s) const {
  std::vector<std::uint8_t> mask(vocab_->size(), 0);
  if (s.dead) return mask;
  const Tables& tab = Tables::get();
  std::bitset<kNumTerms> legal;
  bool all_nullable = true;
  for (auto it = s.stack.rbegin(); it != s.stack.rend(); ++it) {
    const std::uint8_t sym = *it;
    if (is_term(sym)) {
      legal.set(sym);
      all_nullable = false;
      break;
    }
    legal |= tab.first[nt_index(sym)];
    if (!tab.nullable[nt_index(sym)]) {
      all_nullable = false;
      break;
    }
  }
  for (std::size_t v = 0; v < mask.size(); ++v) {
    const std::uint8_t t = term_of_token_[v];
    if (t != kNoTerm && legal.test(t)) mask[v] = 1;
  }
  mask[static_cast<std::size_t>(vocab_->eos())] = all_nullable ? 1 : 0;
  return mask;
}

std::size_t Grammar::min_completion_tokens(const GrammarState& s) const {
  if (s.dead) return kUnreachable;
  const Tables& tab = Tables::get();
  std::size_t total = 0;
  for (std::uint8_t sym : s.stack) total += tab.min_yield[sym];
  return total;
}

std::vector<double> syntax_scores(const Grammar& grammar, const TokenizedProgram& prog) {
  std::vector<double> scores(prog.size(), 0.0);
  std::size_t begin = 0, end = prog.size();
  if (auto region = prog.code_region()) {
    begin = static_cast<std::size_t>(region->first);
    end = static_cast<std::size_t>(region->second);
  }
  GrammarState st = grammar.initial();
  for (std::size_t i = begin; i < end; ++i) {
    if (st.dead) break;  // single blame; dead state absorbs
    GrammarState next = grammar.advance(st, prog.ids[i]);
    if (next.dead) scores[i] = -1.0;
    st = next;
  }
  return scores;
}

ResponseState::ResponseState(const Grammar& grammar) : grammar_(&grammar) {}

double ResponseState::consume(TokenId tok) {
  const Vocab& v = grammar_->vocab();
  switch (phase_) {
    case Phase::BeforeFence:
      if (tok == v.fence()) {
        phase_ = Phase::InCode;
        code_state_ = grammar_->initial();
        code_dead_blamed_ = false;
      }
      return 0.0;
    case Phase::InCode: {
      if (tok == v.fence()) {
        phase_ = Phase::AfterCode;
        return 0.0;
      }
      if (code_state_.dead) return 0.0;
      GrammarState next = grammar_->advance(code_state_, tok);
      double score = 0.0;
      if (next.dead && !code_dead_blamed_) {
        score = -1.0;
        code_dead_blamed_ = true;
      }
      code_state_ = next;
      return score;
    }
    case Phase::AfterCode:
      if (tok == v.eos()) phase_ = Phase::Done;
      return 0.0;
    case Phase::Done:
      return 0.0;
  }
  return 0.0;
}

std::vector<std::uint8_t> ResponseState::constrained_mask(std::size_t budget_left) const {
  const Vocab& v = grammar_->vocab();
  std::vector<std::uint8_t> mask(v.size(), 0);
  switch (phase_) {
    case Phase::BeforeFence: {
      // fence + shortest program + fence + eos must fit.
      const std::size_t need =
          1 + grammar_->min_completion_tokens(grammar_->initial()) + 2;
      if (budget_left >= need) mask[static_cast<std::size_t>(v.fence())] = 1;
      return mask;
    }
    case Phase::InCode: {
      if (grammar_->complete(code_state_) && budget_left >= 2) {
        mask[static_cast<std::size_t>(v.fence())] = 1;
      }
      std::vector<std::uint8_t> legal = grammar_->legal_next_mask(code_state_);
      for (std::size_t tok = 0; tok < legal.size(); ++tok) {
        if (!legal[tok] || static_cast<TokenId>(tok) == v.eos()) continue;
        GrammarState next = grammar_->advance(code_state_, static_cast<TokenId>(tok));
        const std::size_t rest = grammar_->min_completion_tokens(next);
        if (rest != Grammar::kUnreachable && 1 + rest + 2 <= budget_left) {
          mask[tok] = 1;
        }
      }
      return mask;
    }
    case Phase::AfterCode:
      if (budget_left >= 1) mask[static_cast<std::size_t>(v.eos())] = 1;
      return mask;
    case Phase::Done:
      return mask;
  }
  return mask;
}

}  // namespace drs::lang
