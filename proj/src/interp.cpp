#include "drs/interp.hpp"

#include <algorithm>

#include "drs/tokenizer.hpp"

namespace drs::sim {

namespace {

using lang::Expr;
using lang::Stmt;

constexpr std::int64_t kIntCap = 1000000000;  // DSL integers saturate here

std::int64_t saturate(std::int64_t v) { return std::clamp(v, -kIntCap, kIntCap); }

struct Abort {};

struct Interp {
  WorldState world;
  ExecResult* out;
  std::int64_t budget;
  std::map<std::string, std::int64_t> vars;
  std::vector<lang::TokenRange> repeat_stack;

  void sim_fault(lang::TokenRange span, std::string detail) {
    out->sim_fault = Fault{span, std::move(detail)};
    throw Abort{};
  }
  void lang_fault(lang::TokenRange span, std::string detail) {
    out->lang_fault = Fault{span, std::move(detail)};
    throw Abort{};
  }

  std::int64_t eval(const Expr& e) {
    switch (e.kind) {
      case Expr::Kind::IntLit:
        return e.int_value;
      case Expr::Kind::Var: {
        auto it = vars.find(e.text);
        if (it == vars.end()) {
          lang_fault(e.range, "undefined variable `" + e.text + "`");
        }
        return it->second;
      }
      case Expr::Kind::Bin: {
        const std::int64_t a = eval(*e.lhs);
        const std::int64_t b = eval(*e.rhs);
        switch (e.op) {
          case lang::BinOp::Add: return saturate(a + b);
          case lang::BinOp::Sub: return saturate(a - b);
          case lang::BinOp::Mul: return saturate(a * b);
        }
        return 0;
      }
      case Expr::Kind::StrLit:
        return 0;  // strings only appear as say() arguments
    }
    return 0;
  }

  bool eval(const lang::Cond& c) {
    const std::int64_t a = eval(c.lhs);
    const std::int64_t b = eval(c.rhs);
    switch (c.op) {
      case lang::CmpOp::Eq: return a == b;
      case lang::CmpOp::Ne: return a != b;
      case lang::CmpOp::Lt: return a < b;
      case lang::CmpOp::Gt: return a > b;
      case lang::CmpOp::Le: return a <= b;
      case lang::CmpOp::Ge: return a >= b;
    }
    return false;
  }

  void charge(const Stmt& st) {
    if (++out->steps <= budget) return;
    const lang::TokenRange span =
        repeat_stack.empty() ? st.range : repeat_stack.back();
    sim_fault(span, "step budget exceeded");
  }

  void exec(const Stmt& st) {
    charge(st);
    switch (st.kind) {
      case Stmt::Kind::Call:
        exec_call(st);
        break;
      case Stmt::Kind::Assign:
        vars[st.var] = eval(*st.value);
        break;
      case Stmt::Kind::Assert:
        if (!eval(*st.cond)) {
          out->assert_fail = Fault{st.range, "assertion failed"};
          throw Abort{};
        }
        break;
      case Stmt::Kind::If:
        if (eval(*st.cond)) {
          exec_all(st.then_body);
        } else {
          exec_all(st.else_body);
        }
        break;
      case Stmt::Kind::Repeat:
        repeat_stack.push_back(st.range);
        for (std::int64_t i = 0; i < st.repeat_count; ++i) exec_all(st.body);
        repeat_stack.pop_back();
        break;
    }
  }

  void exec_call(const Stmt& st) {
    switch (st.api) {
      case lang::CallApi::GoTo: {
        if (world.rooms.count(st.word_arg) == 0) {
          sim_fault(st.range, "go_to: unknown room `" + st.word_arg + "`");
        }
        if (!world.reachable(world.robot_room, st.word_arg)) {
          sim_fault(st.range, "go_to: `" + st.word_arg + "` is unreachable");
        }
        world.robot_room = st.word_arg;
        break;
      }
      case lang::CallApi::Pick: {
        if (world.holding) {
          sim_fault(st.range, "pick: already holding `" + *world.holding + "`");
        }
        auto it = world.objects.find(st.word_arg);
        if (it == world.objects.end()) {
          sim_fault(st.range, "pick: no such object `" + st.word_arg + "`");
        }
        if (it->second != world.robot_room) {
          sim_fault(st.range, "pick: `" + st.word_arg + "` is not in this room");
        }
        it->second = WorldState::kHeld;
        world.holding = st.word_arg;
        break;
      }
      case lang::CallApi::Place: {
        if (!world.holding || *world.holding != st.word_arg) {
          sim_fault(st.range, "place: not holding `" + st.word_arg + "`");
        }
        world.objects[st.word_arg] = world.robot_room;
        world.holding.reset();
        break;
      }
      case lang::CallApi::Say: {
        const Expr& arg = *st.say_arg;
        if (arg.kind == Expr::Kind::StrLit) {
          world.said.push_back(arg.text);
        } else {
          world.said.push_back(std::to_string(eval(arg)));
        }
        break;
      }
    }
  }

  void exec_all(const std::vector<Stmt>& stmts) {
    for (const Stmt& st : stmts) exec(st);
  }
};

}  // namespace

ExecResult execute(const lang::Ast& ast, const WorldState& world,
                   std::int64_t step_budget) {
  ExecResult res;
  Interp interp{world, &res, step_budget, {}, {}};
  try {
    interp.exec_all(ast.statements);
  } catch (const Abort&) {
  }
  res.world = std::move(interp.world);
  return res;
}

const char* outcome_name(SimOutcome::Kind k) {
  switch (k) {
    case SimOutcome::Kind::ParseError: return "parse_error";
    case SimOutcome::Kind::SimulationError: return "simulation_error";
    case SimOutcome::Kind::CompletionError: return "completion_error";
    case SimOutcome::Kind::Success: return "success";
  }
  return "?";
}

TaskRun run_task(const lang::Vocab& vocab, const lang::TokenizedProgram& prog,
                 const TaskSpec& task) {
  TaskRun run;
  const lang::ParseResult parsed = lang::parse(vocab, prog);
  if (!parsed.ok()) {
    run.outcome = {SimOutcome::Kind::ParseError, std::nullopt,
                   "parse error at token " + std::to_string(parsed.error_index)};
    run.final_world = task.initial_world;
    return run;
  }
  ExecResult exec_res = execute(*parsed.ast, task.initial_world);
  run.final_world = std::move(exec_res.world);
  if (exec_res.lang_fault) {
    run.outcome = {SimOutcome::Kind::ParseError, std::nullopt,
                   exec_res.lang_fault->detail};
    return run;
  }
  if (exec_res.sim_fault) {
    run.outcome = {SimOutcome::Kind::SimulationError, exec_res.sim_fault->span,
                   exec_res.sim_fault->detail};
    return run;
  }
  if (exec_res.assert_fail) {
    run.outcome = {SimOutcome::Kind::CompletionError, std::nullopt,
                   exec_res.assert_fail->detail};
    return run;
  }
  for (const Atom& atom : task.goal) {
    if (!atom.eval(run.final_world)) {
      run.outcome = {SimOutcome::Kind::CompletionError, std::nullopt,
                     "goal not satisfied: " + atom.to_string()};
      return run;
    }
  }
  run.outcome = {SimOutcome::Kind::Success, std::nullopt, ""};
  run.assertions_pass = true;
  for (const Atom& atom : task.assertions) {
    if (!atom.eval(run.final_world)) {
      run.assertions_pass = false;
      break;
    }
  }
  return run;
}

SimOutcome classify(const lang::Vocab& vocab, const lang::TokenizedProgram& prog,
                    const TaskSpec& task) {
  return run_task(vocab, prog, task).outcome;
}

SimOutcome classify(const lang::Vocab& vocab, const std::string& source,
                    const TaskSpec& task) {
  try {
    return classify(vocab, lang::tokenize(vocab, source), task);
  } catch (const lang::UnknownTokenError& e) {
    return {SimOutcome::Kind::ParseError, std::nullopt, e.what()};
  }
}

double unit_test_reward(const lang::Vocab& vocab, const lang::TokenizedProgram& prog,
                        const TaskSpec& task) {
  const TaskRun run = run_task(vocab, prog, task);
  return run.outcome.kind == SimOutcome::Kind::Success && run.assertions_pass ? 1.0
                                                                              : 0.0;
}

std::pair<double, std::optional<lang::TokenRange>> sim_reward(
    const SimOutcome& outcome, const SimRewardLadder& ladder) {
  switch (outcome.kind) {
    case SimOutcome::Kind::Success:
      return {ladder.success, std::nullopt};
    case SimOutcome::Kind::CompletionError:
      return {ladder.completion_error, std::nullopt};
    case SimOutcome::Kind::SimulationError:
      return {ladder.simulation_error, outcome.fail_span};
    case SimOutcome::Kind::ParseError:
      return {ladder.parse_error, std::nullopt};
  }
  return {0.0, std::nullopt};
}

}  // namespace drs::sim
