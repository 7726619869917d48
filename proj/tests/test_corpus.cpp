#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "drs/config.hpp"
#include "drs/corpus.hpp"
#include "drs/interp.hpp"
#include "drs/tokenizer.hpp"

using namespace drs;
using harness::ExperimentConfig;
using harness::GenOptions;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("every generated reference classifies as Success with passing assertions") {
  const lang::Vocab v = lang::Vocab::robolang();
  GenOptions opts;
  opts.n_tasks = 200;
  const auto tasks = harness::generate_corpus(7, opts);
  REQUIRE(tasks.size() == 200);
  for (const auto& t : tasks) {
    const auto tp = lang::tokenize(v, t.reference_program);
    const sim::TaskRun run = sim::run_task(v, tp, t);
    CHECK(run.outcome.kind == sim::SimOutcome::Kind::Success);
    CHECK(run.assertions_pass);
    CHECK(t.initial_world.invariants_hold());
    CHECK(!t.goal.empty());
    CHECK(!t.assertions.empty());
    CHECK(t.assertions.size() <= 3);
    // prompts tokenize and stay within the model's sequence budget
    const auto prompt = lang::tokenize(v, t.prompt);
    CHECK(prompt.size() <= 48);
    CHECK(tp.size() <= 50);
  }
}

TEST_CASE("same seed twice gives byte-identical corpus files") {
  GenOptions opts;
  opts.n_tasks = 40;
  const auto a = harness::generate_corpus(123, opts);
  const auto b = harness::generate_corpus(123, opts);
  harness::save_corpus("corpus_a.txt", a);
  harness::save_corpus("corpus_b.txt", b);
  CHECK(read_file("corpus_a.txt") == read_file("corpus_b.txt"));
  const auto c = harness::generate_corpus(124, opts);
  harness::save_corpus("corpus_c.txt", c);
  CHECK(read_file("corpus_a.txt") != read_file("corpus_c.txt"));
}

TEST_CASE("task record round trip") {
  GenOptions opts;
  opts.n_tasks = 30;
  const auto tasks = harness::generate_corpus(5, opts);
  for (const auto& t : tasks) {
    const std::string line = harness::serialize_task(t);
    CHECK(line.find('\n') == std::string::npos);
    const sim::TaskSpec back = harness::parse_task(line);
    CHECK(harness::serialize_task(back) == line);
    CHECK(back.id == t.id);
    CHECK(back.prompt == t.prompt);
    CHECK(back.reference_program == t.reference_program);
    CHECK(back.initial_world.rooms == t.initial_world.rooms);
    CHECK(back.initial_world.objects == t.initial_world.objects);
    CHECK(back.initial_world.adjacency == t.initial_world.adjacency);
    CHECK(back.goal.size() == t.goal.size());
    CHECK(back.assertions.size() == t.assertions.size());
  }
}

TEST_CASE("corpus save/load round trip preserves semantics") {
  GenOptions opts;
  opts.n_tasks = 12;
  const auto tasks = harness::generate_corpus(9, opts);
  harness::save_corpus("corpus_rt.txt", tasks);
  const auto loaded = harness::load_corpus("corpus_rt.txt");
  REQUIRE(loaded.size() == tasks.size());
  const lang::Vocab v = lang::Vocab::robolang();
  for (const auto& t : loaded) {
    CHECK(sim::classify(v, t.reference_program, t).kind == sim::SimOutcome::Kind::Success);
  }
}

TEST_CASE("malformed task records are rejected") {
  CHECK_THROWS(harness::parse_task("id=a|prompt=b"));
  CHECK_THROWS(harness::parse_task(
      "prompt=b|id=a|rooms=|adjacency=|objects=|robot_room=x|goal_atoms=|assertions=|reference_program="));
}

TEST_CASE("atom parse round trip") {
  for (const char* s :
       {"object_at(cup,office)", "robot_at(hall)", "said_contains(done)",
        "holding(mug)", "holding_nothing"}) {
    CHECK(sim::Atom::parse(s).to_string() == s);
  }
  CHECK_THROWS(sim::Atom::parse("no_such(x)"));
}

TEST_CASE("config round trip is value-identical") {
  for (const auto kind :
       {harness::ExperimentKind::General, harness::ExperimentKind::Robotics}) {
    ExperimentConfig c = ExperimentConfig::defaults(kind);
    c.seed = 99;
    c.out_dir = "runs/some_dir";
    c.ppo.lr_policy = 0.000123;
    c.pretrain_window_lo = 0.21;
    const ExperimentConfig back = ExperimentConfig::parse(c.serialize());
    CHECK(back == c);
    CHECK(back.serialize() == c.serialize());
  }
}

TEST_CASE("config validation enforces the per-experiment component sets") {
  ExperimentConfig c = ExperimentConfig::defaults(harness::ExperimentKind::General);
  CHECK(c.enabled_components() == std::set<std::string>{"dfg", "test"});
  c.weights.lambda_opt["sim"] = 0.5;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);

  ExperimentConfig r = ExperimentConfig::defaults(harness::ExperimentKind::Robotics);
  CHECK(r.enabled_components() == std::set<std::string>{"sim"});
  r.weights.lambda_opt["test"] = 0.5;
  CHECK_THROWS_AS(r.validate(), std::invalid_argument);
}

TEST_CASE("unknown config keys are rejected") {
  ExperimentConfig c = ExperimentConfig::defaults(harness::ExperimentKind::Robotics);
  CHECK_THROWS(ExperimentConfig::parse(c.serialize() + "bogus.key = 3\n"));
}

TEST_CASE("difficulty mix covers the five templates") {
  GenOptions opts;
  opts.n_tasks = 200;
  const auto tasks = harness::generate_corpus(11, opts);
  int announce = 0, fetchish = 0, conditional = 0, collect = 0, deliver = 0;
  for (const auto& t : tasks) {
    if (t.prompt.find("task : say") != std::string::npos) ++announce;
    if (t.prompt.find("task : fetch") != std::string::npos) ++fetchish;
    if (t.prompt.find("task : if") != std::string::npos) ++conditional;
    if (t.prompt.find("task : collect") != std::string::npos) ++collect;
    if (t.prompt.find("task : deliver") != std::string::npos) ++deliver;
  }
  CHECK(announce == 80);      // 40% one-step
  CHECK(conditional == 40);   // 20% conditional
  CHECK(fetchish + collect + deliver == 80);
  CHECK(collect > 0);
  CHECK(deliver > 0);
}
