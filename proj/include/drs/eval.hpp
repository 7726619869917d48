#ifndef DRS_EVAL_HPP_
#define DRS_EVAL_HPP_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "drs/grammar.hpp"
#include "drs/interp.hpp"
#include "drs/model.hpp"
#include "drs/sampler.hpp"

namespace drs::harness {

struct MissingArtifactsError : std::runtime_error {
  explicit MissingArtifactsError(const std::string& what)
      : std::runtime_error("missing artifact: " + what) {}
};

struct TaskRecord {
  std::string task_id;
  std::string outcome;  // outcome_name()
  bool pass = false;    // Success and all assertions hold
  // Raw verifier scores (unweighted): sync_sum, lint, dfg, test, sim.
  std::map<std::string, double> scores;
};

struct EvalReport {
  double pass1 = 0.0;
  std::map<std::string, std::int64_t> outcome_counts;
  std::vector<TaskRecord> records;

  std::int64_t total() const {
    std::int64_t n = 0;
    for (const auto& [k, v] : outcome_counts) n += v;
    return n;
  }
  std::string to_json() const;
  static EvalReport from_json(const std::string& text);
};

// Greedy evaluation of every task: classify + assertions, pass@1 aggregate.
EvalReport evaluate(const model::Net& policy, const lang::Grammar& grammar,
                    const std::vector<sim::TaskSpec>& tasks,
                    const sampler::DecodingConfig& decode);

// Table-1/Table-2 style text rendering of a before/after pair.
std::string render_report(const EvalReport& before, const EvalReport& after);

}  // namespace drs::harness

#endif  // DRS_EVAL_HPP_
