#ifndef DRS_VOCAB_HPP_
#define DRS_VOCAB_HPP_

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace drs::lang {

using TokenId = std::int32_t;

// Lexical class of a vocabulary entry. Rooms/objects/variables/strings are
// closed word pools; the grammar maps classes onto its terminals.
enum class TokenClass : std::uint8_t {
  Special,    // <bos> <eos> <pad> and the code fence
  KwGoTo, KwPick, KwPlace, KwSay, KwAssert, KwIf, KwElse, KwRepeat,
  LParen, RParen, LBrace, RBrace, Semi, Assign,
  CmpEq, CmpNe, CmpLt, CmpGt, CmpLe, CmpGe,
  Plus, Minus, Star,
  IntZero, IntPos,
  Room, Object, Var, Str,
  Word,       // prompt-only natural-language words
};

// The RoboLang vocabulary: an ordered list of surface strings with a
// bijective string <-> id mapping. Serialized one token per line, line
// number == id (docs/corpus.md).
class Vocab {
 public:
  static Vocab robolang();

  TokenId id(std::string_view surface) const;          // -1 if absent
  const std::string& surface(TokenId t) const { return tokens_.at(static_cast<std::size_t>(t)); }
  TokenClass token_class(TokenId t) const { return classes_.at(static_cast<std::size_t>(t)); }
  std::size_t size() const { return tokens_.size(); }

  TokenId bos() const { return bos_; }
  TokenId eos() const { return eos_; }
  TokenId pad() const { return pad_; }
  TokenId fence() const { return fence_; }
  bool is_special(TokenId t) const { return token_class(t) == TokenClass::Special; }

  // FNV-1a over all surfaces; embedded in checkpoints to detect mismatches.
  std::uint64_t hash() const;

  void save(const std::string& path) const;
  static Vocab load(const std::string& path);

  const std::vector<std::string>& tokens() const { return tokens_; }

 private:
  Vocab() = default;
  void index();

  std::vector<std::string> tokens_;
  std::vector<TokenClass> classes_;
  std::unordered_map<std::string, TokenId> by_surface_;
  TokenId bos_ = -1, eos_ = -1, pad_ = -1, fence_ = -1;
};

// Fixed word pools (closed language, no runtime extension).
const std::vector<std::string>& room_pool();
const std::vector<std::string>& object_pool();
const std::vector<std::string>& var_pool();
const std::vector<std::string>& string_pool();  // quoted surfaces

}  // namespace drs::lang

#endif  // DRS_VOCAB_HPP_
