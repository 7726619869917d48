#ifndef DRS_DFG_HPP_
#define DRS_DFG_HPP_

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "drs/ast.hpp"

namespace drs::dfg {

// A def site: SSA-like (variable, definition ordinal) with ordinals counted
// per variable in program order. def_ordinal -1 is the distinguished UNDEF
// node for reads with no reaching definition.
struct Edge {
  std::string var;
  std::int32_t def_ordinal = 0;   // -1 == UNDEF
  std::int32_t use_stmt = 0;      // statement ordinal (pre-order)

  auto operator<=>(const Edge&) const = default;
};

struct DataFlowGraph {
  std::set<std::pair<std::string, std::int32_t>> nodes;
  std::vector<Edge> edges;
  // Variable -> discovery rank (order of first def-or-use during extraction);
  // the anonymization key for dfg_match.
  std::map<std::string, std::int32_t> var_rank;

  bool empty() const { return nodes.empty() && edges.empty(); }
};

// Extraction byproducts the linter reuses: statement spans by ordinal and
// def-site spans.
struct DfgAnalysis {
  DataFlowGraph graph;
  std::vector<lang::TokenRange> stmt_spans;  // indexed by statement ordinal
  std::map<std::pair<std::string, std::int32_t>, lang::TokenRange> def_spans;
};

DfgAnalysis analyze_dfg(const lang::Ast& ast);
DataFlowGraph extract_dfg(const lang::Ast& ast);

// F1 over anonymized edge multisets (variables replaced by discovery rank).
// Both graphs empty -> 1.0. Symmetric and invariant under consistent
// variable renaming.
double dfg_match(const DataFlowGraph& candidate, const DataFlowGraph& reference);

// Line-oriented debug rendering: one "var#def -> stmt<ordinal>" per line.
std::string to_edge_list(const DataFlowGraph& g);

}  // namespace drs::dfg

#endif  // DRS_DFG_HPP_
