#include "drs/dfg.hpp"

#include <algorithm>
#include <tuple>

namespace drs::dfg {

namespace {

using lang::Expr;
using lang::Stmt;

// Reaching definitions per variable. Straight-line reads bind to the latest
// definition; conditional branches are joined conservatively (both arms
// reach), so a set is kept rather than a single ordinal.
using Reaching = std::map<std::string, std::set<std::int32_t>>;

struct Walker {
  DfgAnalysis out;
  Reaching reaching;
  std::map<std::string, std::int32_t> def_count;
  std::int32_t next_rank = 0;

  void touch(const std::string& var) {
    if (out.graph.var_rank.emplace(var, next_rank).second) ++next_rank;
  }

  void read(const Expr& e, std::int32_t use_stmt) {
    switch (e.kind) {
      case Expr::Kind::Var: {
        touch(e.text);
        auto it = reaching.find(e.text);
        if (it == reaching.end() || it->second.empty()) {
          out.graph.edges.push_back({e.text, -1, use_stmt});
        } else {
          for (std::int32_t d : it->second) {
            out.graph.edges.push_back({e.text, d, use_stmt});
          }
        }
        break;
      }
      case Expr::Kind::Bin:
        read(*e.lhs, use_stmt);
        read(*e.rhs, use_stmt);
        break;
      default:
        break;
    }
  }

  void read(const lang::Cond& c, std::int32_t use_stmt) {
    read(c.lhs, use_stmt);
    read(c.rhs, use_stmt);
  }

  void define(const std::string& var, lang::TokenRange span) {
    touch(var);
    const std::int32_t ord = def_count[var]++;
    out.graph.nodes.emplace(var, ord);
    out.def_spans[{var, ord}] = span;
    reaching[var] = {ord};
  }

  void walk(const std::vector<Stmt>& stmts) {
    for (const Stmt& st : stmts) {
      const auto ordinal = static_cast<std::int32_t>(out.stmt_spans.size());
      out.stmt_spans.push_back(st.range);
      switch (st.kind) {
        case Stmt::Kind::Assign:
          read(*st.value, ordinal);
          define(st.var, st.range);
          break;
        case Stmt::Kind::Call:
          if (st.say_arg) read(*st.say_arg, ordinal);
          break;
        case Stmt::Kind::Assert:
          read(*st.cond, ordinal);
          break;
        case Stmt::Kind::If: {
          read(*st.cond, ordinal);
          const Reaching before = reaching;
          walk(st.then_body);
          Reaching after_then = std::move(reaching);
          reaching = before;
          if (!st.else_body.empty()) walk(st.else_body);
          // Join: definitions from either path reach the merge point.
          for (auto& [var, defs] : after_then) {
            reaching[var].insert(defs.begin(), defs.end());
          }
          break;
        }
        case Stmt::Kind::Repeat:
          walk(st.body);  // bodies analyzed once, no loop-carried refinement
          break;
      }
    }
  }
};

}  // namespace

DfgAnalysis analyze_dfg(const lang::Ast& ast) {
  Walker w;
  w.walk(ast.statements);
  return std::move(w.out);
}

DataFlowGraph extract_dfg(const lang::Ast& ast) { return analyze_dfg(ast).graph; }

double dfg_match(const DataFlowGraph& candidate, const DataFlowGraph& reference) {
  auto canesize = [](const DataFlowGraph& g) {
    std::vector<std::tuple<std::int32_t, std::int32_t, std::int32_t>> canon;
    canon.reserve(g.edges.size());
    for (const Edge& e : g.edges) {
      canon.emplace_back(g.var_rank.at(e.var), e.def_ordinal, e.use_stmt);
    }
    std::sort(canon.begin(), canon.end());
    return canon;
  };
  const auto c = canesize(candidate);
  const auto r = canesize(reference);
  if (c.empty() && r.empty()) return 1.0;
  std::size_t overlap = 0, i = 0, j = 0;
  while (i < c.size() && j < r.size()) {
    if (c[i] == r[j]) {
      ++overlap;
      ++i;
      ++j;
    } else if (c[i] < r[j]) {
      ++i;
    } else {
      ++j;
    }
  }
  return 2.0 * static_cast<double>(overlap) /
         static_cast<double>(c.size() + r.size());
}

std::string to_edge_list(const DataFlowGraph& g) {
  std::vector<Edge> sorted = g.edges;
  std::sort(sorted.begin(), sorted.end());
  std::string out;
  for (const Edge& e : sorted) {
    out += e.var;
    out += '#';
    out += e.def_ordinal < 0 ? "UNDEF" : std::to_string(e.def_ordinal);
    out += " -> stmt";
    out += std::to_string(e.use_stmt);
    out += '\n';
  }
  return out;
}

}  // namespace drs::dfg
