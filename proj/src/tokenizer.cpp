#include "drs/tokenizer.hpp"

#include <cctype>

namespace drs::lang {

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }

void compute_code_mask(const Vocab& vocab, TokenizedProgram& tp) {
  tp.code_mask.assign(tp.ids.size(), 0);
  std::int32_t open = -1, close = -1;
  for (std::size_t i = 0; i < tp.ids.size(); ++i) {
    if (tp.ids[i] != vocab.fence()) continue;
    if (open < 0) {
      open = static_cast<std::int32_t>(i);
    } else {
      close = static_cast<std::int32_t>(i);
      break;
    }
  }
  if (open >= 0 && close >= 0) {
    for (std::int32_t i = open + 1; i < close; ++i) tp.code_mask[static_cast<std::size_t>(i)] = 1;
  }
}

}  // namespace

bool TokenizedProgram::any_code() const {
  for (std::uint8_t m : code_mask) {
    if (m) return true;
  }
  return false;
}

std::optional<std::pair<std::int32_t, std::int32_t>> TokenizedProgram::code_region() const {
  std::int32_t begin = -1, end = -1;
  for (std::size_t i = 0; i < code_mask.size(); ++i) {
    if (!code_mask[i]) continue;
    if (begin < 0) begin = static_cast<std::int32_t>(i);
    end = static_cast<std::int32_t>(i) + 1;
  }
  if (begin < 0) return std::nullopt;
  return std::make_pair(begin, end);
}

TokenizedProgram tokenize(const Vocab& vocab, const std::string& source) {
  TokenizedProgram tp;
  std::size_t pos = 0;
  const std::size_t n = source.size();
  while (pos < n) {
    if (is_space(source[pos])) {
      ++pos;
      continue;
    }
    // Longest vocabulary surface matching at pos wins.
    std::size_t best_len = 0;
    TokenId best = -1;
    const auto& toks = vocab.tokens();
    for (std::size_t t = 0; t < toks.size(); ++t) {
      const std::string& s = toks[t];
      if (s.size() <= best_len || s.size() > n - pos) continue;
      if (source.compare(pos, s.size(), s) == 0) {
        best_len = s.size();
        best = static_cast<TokenId>(t);
      }
    }
    if (best < 0) throw UnknownTokenError(pos);
    tp.ids.push_back(best);
    tp.char_spans.emplace_back(static_cast<std::int32_t>(pos),
                               static_cast<std::int32_t>(pos + best_len));
    pos += best_len;
  }
  compute_code_mask(vocab, tp);
  return tp;
}

std::string detokenize(const Vocab& vocab, const std::vector<TokenId>& ids) {
  std::string out;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (i > 0) out += ' ';
    out += vocab.surface(ids[i]);
  }
  return out;
}

TokenizedProgram from_ids(const Vocab& vocab, const std::vector<TokenId>& ids) {
  TokenizedProgram tp;
  tp.ids = ids;
  std::int32_t pos = 0;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (i > 0) ++pos;  // single separating space
    const auto len = static_cast<std::int32_t>(vocab.surface(ids[i]).size());
    tp.char_spans.emplace_back(pos, pos + len);
    pos += len;
  }
  compute_code_mask(vocab, tp);
  return tp;
}

}  // namespace drs::lang
