#ifndef DRS_TOKENIZER_HPP_
#define DRS_TOKENIZER_HPP_

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "drs/vocab.hpp"

namespace drs::lang {

// Raised when the maximal-munch scan hits text no vocabulary surface covers.
struct UnknownTokenError : std::runtime_error {
  explicit UnknownTokenError(std::size_t pos)
      : std::runtime_error("unknown token at byte " + std::to_string(pos)),
        position(pos) {}
  std::size_t position;
};

// A tokenized text: ids, their byte spans in the source, and a per-token
// code mask (true strictly between the first pair of fence tokens).
struct TokenizedProgram {
  std::vector<TokenId> ids;
  std::vector<std::pair<std::int32_t, std::int32_t>> char_spans;  // half-open
  std::vector<std::uint8_t> code_mask;

  std::size_t size() const { return ids.size(); }
  bool any_code() const;
  // Half-open token-index range of the code region; nullopt when unfenced.
  std::optional<std::pair<std::int32_t, std::int32_t>> code_region() const;
};

// Maximal-munch scan; whitespace separates tokens and is never part of one.
// Throws UnknownTokenError on unrecognized text.
TokenizedProgram tokenize(const Vocab& vocab, const std::string& source);

// Canonical rendering: surfaces joined by single spaces.
std::string detokenize(const Vocab& vocab, const std::vector<TokenId>& ids);

// Builds the TokenizedProgram for an id sequence via its canonical rendering
// (used for sampled responses, which exist as ids before they exist as text).
TokenizedProgram from_ids(const Vocab& vocab, const std::vector<TokenId>& ids);

}  // namespace drs::lang

#endif  // DRS_TOKENIZER_HPP_
