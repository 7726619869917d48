#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "drs/interp.hpp"
#include "drs/tokenizer.hpp"

using namespace drs;
using sim::Atom;
using sim::SimOutcome;
using sim::TaskSpec;
using sim::WorldState;

namespace {

const lang::Vocab& vocab() {
  static const lang::Vocab v = lang::Vocab::robolang();
  return v;
}

lang::Ast parse_or_die(const std::string& src) {
  const auto tp = lang::tokenize(vocab(), src);
  auto r = lang::parse(vocab(), tp);
  REQUIRE(r.ok());
  return std::move(*r.ast);
}

WorldState two_room_world() {
  WorldState w;
  w.rooms = {"kitchen", "office"};
  w.add_adjacency("kitchen", "office");
  w.objects = {{"cup", "kitchen"}, {"plate", "office"}};
  w.robot_room = "office";
  return w;
}

TaskSpec fetch_task() {
  TaskSpec t;
  t.id = "t0";
  t.prompt = "task : fetch cup to office .";
  t.initial_world = two_room_world();
  t.goal = {Atom::object_at("cup", "office")};
  t.assertions = {Atom::holding_nothing()};
  t.reference_program =
      "go_to ( kitchen ) ; pick ( cup ) ; go_to ( office ) ; place ( cup ) ;";
  return t;
}

}  // namespace

TEST_CASE("pick moves the object into the hand") {
  WorldState w = two_room_world();
  w.robot_room = "kitchen";
  const auto res = sim::execute(parse_or_die("pick ( cup ) ;"), w);
  CHECK_FALSE(res.sim_fault.has_value());
  CHECK(res.world.holding == std::optional<std::string>("cup"));
  CHECK(res.world.objects.at("cup") == WorldState::kHeld);
  CHECK(res.world.invariants_hold());
}

TEST_CASE("pick while holding faults at the statement span") {
  WorldState w = two_room_world();
  w.robot_room = "office";
  const auto res =
      sim::execute(parse_or_die("pick ( plate ) ; go_to ( kitchen ) ; pick ( cup ) ;"), w);
  REQUIRE(res.sim_fault.has_value());
  CHECK(res.sim_fault->span.begin == 10);
  CHECK(res.sim_fault->span.end == 15);
  CHECK(res.sim_fault->detail.find("already holding") != std::string::npos);
}

TEST_CASE("empty program leaves the world unchanged") {
  const WorldState w = two_room_world();
  const auto res = sim::execute(lang::Ast{}, w);
  CHECK_FALSE(res.sim_fault.has_value());
  CHECK(res.world.objects == w.objects);
  CHECK(res.world.robot_room == w.robot_room);
}

TEST_CASE("go_to faults on unknown rooms") {
  const auto res = sim::execute(parse_or_die("go_to ( lounge ) ;"), two_room_world());
  REQUIRE(res.sim_fault.has_value());
  CHECK(res.sim_fault->detail.find("unknown room") != std::string::npos);
}

TEST_CASE("go_to faults on unreachable rooms") {
  WorldState w = two_room_world();
  w.rooms.insert("lab");  // not connected
  const auto res = sim::execute(parse_or_die("go_to ( lab ) ;"), w);
  REQUIRE(res.sim_fault.has_value());
  CHECK(res.sim_fault->detail.find("unreachable") != std::string::npos);
}

TEST_CASE("place requires holding the object") {
  const auto res = sim::execute(parse_or_die("place ( cup ) ;"), two_room_world());
  REQUIRE(res.sim_fault.has_value());
}

TEST_CASE("say appends to the transcript, integers render decimally") {
  const auto res =
      sim::execute(parse_or_die("say ( \"done\" ) ; x = 2 + 3 ; say ( x * 2 ) ;"),
                   two_room_world());
  CHECK(res.world.said == std::vector<std::string>{"done", "10"});
}

TEST_CASE("undefined variable read is a language fault") {
  const auto res = sim::execute(parse_or_die("say ( x ) ;"), two_room_world());
  CHECK(res.lang_fault.has_value());
  CHECK_FALSE(res.sim_fault.has_value());
}

TEST_CASE("failing assert aborts with an assert fault") {
  const auto res =
      sim::execute(parse_or_die("assert 1 == 2 ; go_to ( kitchen ) ;"), two_room_world());
  REQUIRE(res.assert_fail.has_value());
  CHECK(res.world.robot_room == "office");  // never executed the go_to
}

TEST_CASE("step budget exceeded blames the innermost repeat header") {
  // 9*9*9*9 = 6561 > 1024 body steps
  const auto ast = parse_or_die(
      "repeat 9 { repeat 9 { repeat 9 { repeat 9 { say ( \"ok\" ) ; } } } }");
  const auto res = sim::execute(ast, two_room_world());
  REQUIRE(res.sim_fault.has_value());
  CHECK(res.sim_fault->detail == "step budget exceeded");
  CHECK(res.steps > 1024);
}

TEST_CASE("classify: reference program of a task is Success") {
  const TaskSpec t = fetch_task();
  CHECK(sim::classify(vocab(), t.reference_program, t).kind == SimOutcome::Kind::Success);
}

TEST_CASE("classify: syntactically broken text is ParseError") {
  const TaskSpec t = fetch_task();
  CHECK(sim::classify(vocab(), ") ) (", t).kind == SimOutcome::Kind::ParseError);
  CHECK(sim::classify(vocab(), "complete gibberish !!!", t).kind ==
        SimOutcome::Kind::ParseError);
}

TEST_CASE("classify: wrong room then halt is CompletionError") {
  const TaskSpec t = fetch_task();
  const auto out = sim::classify(vocab(), "go_to ( kitchen ) ;", t);
  CHECK(out.kind == SimOutcome::Kind::CompletionError);
  CHECK_FALSE(out.fail_span.has_value());
}

TEST_CASE("classify: infeasible action is SimulationError with a span") {
  const TaskSpec t = fetch_task();
  const auto out = sim::classify(vocab(), "pick ( cup ) ;", t);  // cup is elsewhere
  CHECK(out.kind == SimOutcome::Kind::SimulationError);
  REQUIRE(out.fail_span.has_value());
  CHECK(out.fail_span->begin == 0);
}

TEST_CASE("unit_test_reward is binary and checks assertions") {
  const TaskSpec t = fetch_task();
  const auto tp = lang::tokenize(vocab(), t.reference_program);
  CHECK(sim::unit_test_reward(vocab(), tp, t) == 1.0);

  // parse error -> 0
  CHECK(sim::unit_test_reward(vocab(), lang::tokenize(vocab(), "( ("), t) == 0.0);

  // goal passes but an assertion fails: reach the goal while still holding
  TaskSpec t2 = fetch_task();
  t2.assertions = {Atom::holding("plate")};
  CHECK(sim::unit_test_reward(vocab(), tp, t2) == 0.0);
  CHECK(sim::classify(vocab(), tp, t2).kind == SimOutcome::Kind::Success);
}

TEST_CASE("sim_reward ladder") {
  CHECK(sim::sim_reward({SimOutcome::Kind::Success, std::nullopt, ""}).first == 1.0);
  CHECK(sim::sim_reward({SimOutcome::Kind::CompletionError, std::nullopt, ""}).first ==
        0.0);
  const auto [r, span] = sim::sim_reward(
      {SimOutcome::Kind::SimulationError, lang::TokenRange{10, 14}, ""});
  CHECK(r == -0.5);
  REQUIRE(span.has_value());
  CHECK(span->begin == 10);
  CHECK(span->end == 14);
  CHECK(sim::sim_reward({SimOutcome::Kind::ParseError, std::nullopt, ""}).first == -1.0);
}

TEST_CASE("world invariants preserved under random action sequences") {
  std::mt19937_64 rng(99);
  const std::vector<std::string> rooms = {"kitchen", "office", "hall"};
  const std::vector<std::string> objs = {"cup", "plate", "book"};
  for (int iter = 0; iter < 300; ++iter) {
    WorldState w;
    for (const auto& r : rooms) w.rooms.insert(r);
    w.add_adjacency("kitchen", "office");
    w.add_adjacency("office", "hall");
    for (const auto& o : objs) w.objects[o] = rooms[rng() % rooms.size()];
    w.robot_room = rooms[rng() % rooms.size()];
    REQUIRE(w.invariants_hold());

    std::string src;
    const int n = 1 + static_cast<int>(rng() % 8);
    for (int i = 0; i < n; ++i) {
      switch (rng() % 3) {
        case 0: src += "go_to ( " + rooms[rng() % rooms.size()] + " ) ; "; break;
        case 1: src += "pick ( " + objs[rng() % objs.size()] + " ) ; "; break;
        default: src += "place ( " + objs[rng() % objs.size()] + " ) ; "; break;
      }
    }
    const auto res = sim::execute(parse_or_die(src), w);
    CHECK(res.world.invariants_hold());
  }
}
