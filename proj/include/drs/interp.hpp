#ifndef DRS_INTERP_HPP_
#define DRS_INTERP_HPP_

#include <optional>
#include <string>
#include <utility>

#include "drs/ast.hpp"
#include "drs/grammar.hpp"
#include "drs/parser.hpp"
#include "drs/world.hpp"

namespace drs::sim {

struct Fault {
  lang::TokenRange span;
  std::string detail;
};

// Deterministic interpretation result. At most one of the fault slots is
// set; the first fault aborts execution.
struct ExecResult {
  WorldState world;
  std::optional<Fault> sim_fault;     // physical infeasibility / step budget
  std::optional<Fault> lang_fault;    // DSL runtime error (undefined variable)
  std::optional<Fault> assert_fail;   // failing in-program assert
  std::int64_t steps = 0;
};

constexpr std::int64_t kStepBudget = 1024;

ExecResult execute(const lang::Ast& ast, const WorldState& world,
                   std::int64_t step_budget = kStepBudget);

// Table-2 style outcome taxonomy. ParseError generalizes to parse/runtime
// errors of the DSL.
struct SimOutcome {
  enum class Kind : std::uint8_t { ParseError, SimulationError, CompletionError, Success };
  Kind kind = Kind::ParseError;
  std::optional<lang::TokenRange> fail_span;  // present iff SimulationError
  std::string detail;
};

const char* outcome_name(SimOutcome::Kind k);

// Full pipeline record for one program against one task.
struct TaskRun {
  SimOutcome outcome;
  bool assertions_pass = false;  // meaningful when outcome is Success
  WorldState final_world;
};

TaskRun run_task(const lang::Vocab& vocab, const lang::TokenizedProgram& prog,
                 const TaskSpec& task);

SimOutcome classify(const lang::Vocab& vocab, const lang::TokenizedProgram& prog,
                    const TaskSpec& task);
// Tokenizes `source` first; unknown tokens classify as ParseError.
SimOutcome classify(const lang::Vocab& vocab, const std::string& source,
                    const TaskSpec& task);

// 1 iff Success and every assertion holds; binary, no partial credit.
double unit_test_reward(const lang::Vocab& vocab, const lang::TokenizedProgram& prog,
                        const TaskSpec& task);

// Monotone scalarization of the outcome ladder; magnitudes config-overridable.
struct SimRewardLadder {
  double success = 1.0;
  double completion_error = 0.0;
  double simulation_error = -0.5;
  double parse_error = -1.0;
};

std::pair<double, std::optional<lang::TokenRange>> sim_reward(
    const SimOutcome& outcome, const SimRewardLadder& ladder = {});

}  // namespace drs::sim

#endif  // DRS_INTERP_HPP_
