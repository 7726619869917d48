#ifndef DRS_PARSER_HPP_
#define DRS_PARSER_HPP_

#include <optional>

#include "drs/ast.hpp"
#include "drs/tokenizer.hpp"
#include "drs/vocab.hpp"

namespace drs::lang {

// Parse failure is a classification, not an exception: error_index is the
// token index of first failure, matching syntax_scores' blame index (and
// equal to the region end when the program is a grammatical prefix that
// simply stops early).
struct ParseResult {
  std::optional<Ast> ast;
  std::int32_t error_index = -1;

  bool ok() const { return ast.has_value(); }
};

// Parses the code region when the input is fenced, otherwise the whole
// token stream as a bare program. Token ranges are absolute indices into
// `prog`. An empty program is a ParseError at index 0 (or region start).
ParseResult parse(const Vocab& vocab, const TokenizedProgram& prog);

}  // namespace drs::lang

#endif  // DRS_PARSER_HPP_
