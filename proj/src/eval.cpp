#include "drs/eval.hpp"

#include <cstdio>

#include <json.hpp>

#include "drs/dfg.hpp"
#include "drs/lint.hpp"
#include "drs/parser.hpp"
#include "drs/tokenizer.hpp"

namespace drs::harness {

using nlohmann::json;

std::string EvalReport::to_json() const {
  json j;
  j["pass1"] = pass1;
  j["outcome_counts"] = outcome_counts;
  json recs = json::array();
  for (const auto& r : records) {
    recs.push_back({{"task_id", r.task_id},
                    {"outcome", r.outcome},
                    {"pass", r.pass},
                    {"scores", r.scores}});
  }
  j["records"] = std::move(recs);
  return j.dump();
}

EvalReport EvalReport::from_json(const std::string& text) {
  const json j = json::parse(text);
  EvalReport r;
  r.pass1 = j.at("pass1").get<double>();
  r.outcome_counts =
      j.at("outcome_counts").get<std::map<std::string, std::int64_t>>();
  for (const auto& rec : j.at("records")) {
    TaskRecord tr;
    tr.task_id = rec.at("task_id").get<std::string>();
    tr.outcome = rec.at("outcome").get<std::string>();
    tr.pass = rec.at("pass").get<bool>();
    tr.scores = rec.at("scores").get<std::map<std::string, double>>();
    r.records.push_back(std::move(tr));
  }
  return r;
}

EvalReport evaluate(const model::Net& policy, const lang::Grammar& grammar,
                    const std::vector<sim::TaskSpec>& tasks,
                    const sampler::DecodingConfig& decode) {
  const lang::Vocab& vocab = grammar.vocab();
  EvalReport report;
  report.outcome_counts = {{"parse_error", 0},
                           {"simulation_error", 0},
                           {"completion_error", 0},
                           {"success", 0}};
  std::int64_t passed = 0;
  std::mt19937_64 rng(0);  // greedy decoding ignores it
  for (const sim::TaskSpec& task : tasks) {
    const auto prompt = lang::tokenize(vocab, task.prompt).ids;
    const sampler::SampleResult sr =
        sampler::sample(policy, grammar, prompt, decode, rng);
    const lang::TokenizedProgram tp = lang::from_ids(vocab, sr.response);
    const sim::TaskRun run = sim::run_task(vocab, tp, task);

    TaskRecord rec;
    rec.task_id = task.id;
    rec.outcome = sim::outcome_name(run.outcome.kind);
    rec.pass = run.outcome.kind == sim::SimOutcome::Kind::Success && run.assertions_pass;

    double sync_sum = 0.0;
    for (double s : lang::syntax_scores(grammar, tp)) sync_sum += s;
    rec.scores["sync"] = sync_sum;
    double lint_sc = 0.0, dfg_sc = 0.0;
    const lang::ParseResult parsed = lang::parse(vocab, tp);
    if (parsed.ok()) {
      lint::LintOptions opts;
      std::set<std::string> universe;
      for (const auto& [obj, loc] : task.initial_world.objects) universe.insert(obj);
      opts.object_universe = std::move(universe);
      lint_sc = lint::lint_score(lint::lint(*parsed.ast, tp, opts));
      const auto ref = lang::parse(vocab, lang::tokenize(vocab, task.reference_program));
      if (ref.ok()) {
        dfg_sc = dfg::dfg_match(dfg::extract_dfg(*parsed.ast), dfg::extract_dfg(*ref.ast));
      }
    }
    rec.scores["lint"] = lint_sc;
    rec.scores["dfg"] = dfg_sc;
    rec.scores["test"] = rec.pass ? 1.0 : 0.0;
    rec.scores["sim"] = sim::sim_reward(run.outcome).first;

    ++report.outcome_counts[rec.outcome];
    passed += rec.pass ? 1 : 0;
    report.records.push_back(std::move(rec));
  }
  report.pass1 = tasks.empty()
                     ? 0.0
                     : static_cast<double>(passed) / static_cast<double>(tasks.size());
  return report;
}

std::string render_report(const EvalReport& before, const EvalReport& after) {
  char line[256];
  std::string out;
  out += "pass@1\n";
  std::snprintf(line, sizeof line, "  before %.3f\n  after  %.3f\n  delta  %+.3f\n",
                before.pass1, after.pass1, after.pass1 - before.pass1);
  out += line;
  out += "\ntask outcomes\n";
  std::snprintf(line, sizeof line, "  %-18s %8s %8s\n", "outcome", "before", "after");
  out += line;
  const char* order[] = {"parse_error", "simulation_error", "completion_error",
                         "success"};
  for (const char* name : order) {
    const auto b = before.outcome_counts.count(name) ? before.outcome_counts.at(name) : 0;
    const auto a = after.outcome_counts.count(name) ? after.outcome_counts.at(name) : 0;
    std::snprintf(line, sizeof line, "  %-18s %8lld %8lld\n", name,
                  static_cast<long long>(b), static_cast<long long>(a));
    out += line;
  }
  std::snprintf(line, sizeof line, "  %-18s %8lld %8lld\n", "total",
                static_cast<long long>(before.total()),
                static_cast<long long>(after.total()));
  out += line;
  return out;
}

}  // namespace drs::harness
