#ifndef DRS_TESTS_TEST_UTIL_HPP_
#define DRS_TESTS_TEST_UTIL_HPP_

#include <random>
#include <string>
#include <vector>

#include "drs/grammar.hpp"
#include "drs/tokenizer.hpp"
#include "drs/vocab.hpp"

namespace drs::test {

// Random sentence of the program grammar via legal-mask walks with
// budget-aware closing. Returns canonical (space-joined) source text.
inline std::vector<lang::TokenId> random_program_ids(const lang::Grammar& g,
                                                     std::mt19937_64& rng,
                                                     std::size_t budget = 40) {
  const lang::Vocab& v = g.vocab();
  std::vector<lang::TokenId> out;
  lang::GrammarState st = g.initial();
  std::size_t remaining = budget;
  while (true) {
    const bool can_stop = g.complete(st);
    if (can_stop && remaining < 8 && out.size() >= 4) break;
    if (can_stop && (rng() % 100) < 20 && !out.empty()) break;
    const auto mask = g.legal_next_mask(st);
    std::vector<lang::TokenId> cands;
    for (std::size_t tok = 0; tok < mask.size(); ++tok) {
      if (!mask[tok] || static_cast<lang::TokenId>(tok) == v.eos()) continue;
      lang::GrammarState ns = g.advance(st, static_cast<lang::TokenId>(tok));
      if (g.min_completion_tokens(ns) + 1 <= remaining) {
        cands.push_back(static_cast<lang::TokenId>(tok));
      }
    }
    if (cands.empty()) break;
    const lang::TokenId pick = cands[rng() % cands.size()];
    out.push_back(pick);
    st = g.advance(st, pick);
    --remaining;
  }
  return out;
}

inline std::string random_program(const lang::Grammar& g, std::mt19937_64& rng,
                                  std::size_t budget = 40) {
  return lang::detokenize(g.vocab(), random_program_ids(g, rng, budget));
}

// Random reachable parser state: a random prefix of a random legal walk.
inline lang::GrammarState random_reachable_state(const lang::Grammar& g,
                                                 std::mt19937_64& rng) {
  const auto ids = random_program_ids(g, rng, 36);
  const std::size_t cut = ids.empty() ? 0 : rng() % (ids.size() + 1);
  lang::GrammarState st = g.initial();
  for (std::size_t i = 0; i < cut; ++i) st = g.advance(st, ids[i]);
  return st;
}

}  // namespace drs::test

#endif  // DRS_TESTS_TEST_UTIL_HPP_
