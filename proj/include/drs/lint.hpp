#ifndef DRS_LINT_HPP_
#define DRS_LINT_HPP_

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "drs/ast.hpp"
#include "drs/tokenizer.hpp"

namespace drs::lint {

enum class Severity : std::uint8_t { Style, Logic, Safety };

// A span-addressed finding with a signed score contribution.
struct Diagnostic {
  std::string rule_id;             // e.g. "L001"
  Severity severity = Severity::Style;
  lang::TokenRange token_span;     // half-open, non-empty, within bounds
  double score_delta = 0.0;        // < 0, diagnostics only penalize
  std::string message;
};

struct LintOptions {
  // Declared object universe of the task's world (L004). When absent the
  // global object pool is used.
  std::optional<std::set<std::string>> object_universe;
};

// Fixed rule set:
//   L001 unused variable               style  -0.2
//   L002 use of undefined variable     logic  -0.5
//   L003 unreachable after always-failing repeat   logic  -0.5
//   L004 pick of undeclared object     safety -0.5
//   L005 duplicate consecutive statement           style  -0.2
//   L006 variable compared with itself logic  -0.3
// Deterministic output, ordered by span start.
std::vector<Diagnostic> lint(const lang::Ast& ast, const lang::TokenizedProgram& prog,
                             const LintOptions& opts = {});

// Sum of score deltas clamped to [-1, 0].
double lint_score(const std::vector<Diagnostic>& diags);

struct RuleInfo {
  const char* id;
  const char* severity;
  double weight;
  const char* description;
};
const std::vector<RuleInfo>& rule_table();
// Fixed-width text table for `lint --rules`.
std::string render_rule_table();

}  // namespace drs::lint

#endif  // DRS_LINT_HPP_
