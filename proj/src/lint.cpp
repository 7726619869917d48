#include "drs/lint.hpp"

#include <algorithm>
#include <cstdio>

#include "drs/dfg.hpp"
#include "drs/vocab.hpp"

namespace drs::lint {

namespace {

using lang::Expr;
using lang::Stmt;

constexpr double kUnusedVar = -0.2;
constexpr double kUndefinedVar = -0.5;
constexpr double kUnreachable = -0.5;
constexpr double kUnknownPick = -0.5;
constexpr double kDuplicateStmt = -0.2;
constexpr double kSelfCompare = -0.3;

bool const_eval(const Expr& e, std::int64_t& out) {
  switch (e.kind) {
    case Expr::Kind::IntLit:
      out = e.int_value;
      return true;
    case Expr::Kind::Bin: {
      std::int64_t a = 0, b = 0;
      if (!const_eval(*e.lhs, a) || !const_eval(*e.rhs, b)) return false;
      switch (e.op) {
        case lang::BinOp::Add: out = a + b; break;
        case lang::BinOp::Sub: out = a - b; break;
        case lang::BinOp::Mul: out = a * b; break;
      }
      return true;
    }
    default:
      return false;
  }
}

bool const_false(const lang::Cond& c) {
  std::int64_t a = 0, b = 0;
  if (!const_eval(c.lhs, a) || !const_eval(c.rhs, b)) return false;
  switch (c.op) {
    case lang::CmpOp::Eq: return !(a == b);
    case lang::CmpOp::Ne: return !(a != b);
    case lang::CmpOp::Lt: return !(a < b);
    case lang::CmpOp::Gt: return !(a > b);
    case lang::CmpOp::Le: return !(a <= b);
    case lang::CmpOp::Ge: return !(a >= b);
  }
  return false;
}

struct Linter {
  const lang::TokenizedProgram& prog;
  const std::set<std::string>& objects;
  std::vector<Diagnostic> diags;

  void add(const char* id, Severity sev, lang::TokenRange span, double delta,
           std::string msg) {
    diags.push_back({id, sev, span, delta, std::move(msg)});
  }

  bool same_tokens(lang::TokenRange a, lang::TokenRange b) const {
    if (a.end - a.begin != b.end - b.begin) return false;
    for (std::int32_t i = 0; i < a.end - a.begin; ++i) {
      if (prog.ids[static_cast<std::size_t>(a.begin + i)] !=
          prog.ids[static_cast<std::size_t>(b.begin + i)]) {
        return false;
      }
    }
    return true;
  }

  void check_cond(const lang::Cond& c) {
    if (c.lhs.kind == Expr::Kind::Var && c.rhs.kind == Expr::Kind::Var &&
        c.lhs.text == c.rhs.text) {
      add("L006", Severity::Logic, c.range, kSelfCompare,
          "comparison of `" + c.lhs.text + "` with itself");
    }
  }

  void walk(const std::vector<Stmt>& stmts) {
    for (std::size_t i = 0; i < stmts.size(); ++i) {
      const Stmt& st = stmts[i];
      if (i > 0 && same_tokens(stmts[i - 1].range, st.range)) {
        add("L005", Severity::Style, st.range, kDuplicateStmt,
            "duplicate of the preceding statement");
      }
      switch (st.kind) {
        case Stmt::Kind::Call:
          if (st.api == lang::CallApi::Pick && objects.count(st.word_arg) == 0) {
            add("L004", Severity::Safety, st.range, kUnknownPick,
                "pick of `" + st.word_arg + "` which is not in the object universe");
          }
          break;
        case Stmt::Kind::Assert:
          check_cond(*st.cond);
          break;
        case Stmt::Kind::If:
          check_cond(*st.cond);
          walk(st.then_body);
          walk(st.else_body);
          break;
        case Stmt::Kind::Repeat: {
          bool always_fails = false;
          for (const Stmt& inner : st.body) {
            if (inner.kind == Stmt::Kind::Assert && const_false(*inner.cond)) {
              always_fails = true;
              break;
            }
          }
          if (always_fails && i + 1 < stmts.size()) {
            add("L003", Severity::Logic, stmts[i + 1].range, kUnreachable,
                "unreachable: the preceding repeat always fails its assert");
          }
          walk(st.body);
          break;
        }
        case Stmt::Kind::Assign:
          break;
      }
    }
  }
};

}  // namespace

std::vector<Diagnostic> lint(const lang::Ast& ast, const lang::TokenizedProgram& prog,
                             const LintOptions& opts) {
  std::set<std::string> universe;
  if (opts.object_universe) {
    universe = *opts.object_universe;
  } else {
    for (const auto& o : lang::object_pool()) universe.insert(o);
  }

  Linter linter{prog, universe, {}};
  linter.walk(ast.statements);

  const dfg::DfgAnalysis dfa = dfg::analyze_dfg(ast);

  // L001: defined but never read anywhere; blame the first definition.
  std::set<std::string> read_vars;
  for (const auto& e : dfa.graph.edges) read_vars.insert(e.var);
  std::set<std::string> flagged;
  for (const auto& [var, ordinal] : dfa.graph.nodes) {
    if (read_vars.count(var) || !flagged.insert(var).second) continue;
    linter.add("L001", Severity::Style, dfa.def_spans.at({var, 0}), kUnusedVar,
               "variable `" + var + "` is never read");
  }

  // L002: reads with no reaching definition, one finding per (var, stmt).
  std::set<std::pair<std::string, std::int32_t>> undef_seen;
  for (const auto& e : dfa.graph.edges) {
    if (e.def_ordinal != -1 || !undef_seen.insert({e.var, e.use_stmt}).second) continue;
    linter.add("L002", Severity::Logic,
               dfa.stmt_spans[static_cast<std::size_t>(e.use_stmt)], kUndefinedVar,
               "use of undefined variable `" + e.var + "`");
  }

  std::stable_sort(linter.diags.begin(), linter.diags.end(),
                   [](const Diagnostic& a, const Diagnostic& b) {
                     if (a.token_span.begin != b.token_span.begin) {
                       return a.token_span.begin < b.token_span.begin;
                     }
                     return a.rule_id < b.rule_id;
                   });
  return std::move(linter.diags);
}

double lint_score(const std::vector<Diagnostic>& diags) {
  double sum = 0.0;
  for (const Diagnostic& d : diags) sum += d.score_delta;
  return std::clamp(sum, -1.0, 0.0);
}

const std::vector<RuleInfo>& rule_table() {
  static const std::vector<RuleInfo> kRules = {
      {"L001", "style", kUnusedVar, "unused variable"},
      {"L002", "logic", kUndefinedVar, "use of undefined variable"},
      {"L003", "logic", kUnreachable, "unreachable statement after a repeat that always fails its assert"},
      {"L004", "safety", kUnknownPick, "pick of an object outside the declared object universe"},
      {"L005", "style", kDuplicateStmt, "duplicate consecutive identical statement"},
      {"L006", "logic", kSelfCompare, "comparison of a variable with itself"},
  };
  return kRules;
}

std::string render_rule_table() {
  std::string out = "rule   severity  weight  description\n";
  char line[160];
  for (const RuleInfo& r : rule_table()) {
    std::snprintf(line, sizeof line, "%-6s %-9s %+.1f    %s\n", r.id, r.severity,
                  r.weight, r.description);
    out += line;
  }
  return out;
}

}  // namespace drs::lint
