#ifndef DRS_HARNESS_HPP_
#define DRS_HARNESS_HPP_

#include <functional>
#include <string>

#include "drs/config.hpp"
#include "drs/corpus.hpp"
#include "drs/eval.hpp"

namespace drs::harness {

struct RunResult {
  std::string run_dir;
  EvalReport eval_before, eval_after;
  double pretrain_dev_success = 0.0;  // dev greedy success at pretrain stop
  std::int64_t pretrain_steps_run = 0;
  std::int64_t ppo_steps_run = 0;
  bool kl_early_stopped = false;
};

// Resolves the run directory: $DRS_RUN_DIR (when set) overrides the output
// root for relative out_dir values.
std::string resolve_run_dir(const std::string& out_dir);

// Generates (or loads) the three corpus splits for a config. Splits get
// disjoint id prefixes and independent sub-seeds.
struct CorpusSet {
  std::vector<sim::TaskSpec> train, dev, eval;
};
CorpusSet ensure_corpora(const ExperimentConfig& cfg, const std::string& run_dir,
                         bool generate_if_missing = true);

// pretrain -> snapshot reference -> PPO loop -> eval + report artifacts.
// progress, when set, receives one line per coarse phase/step.
RunResult run_experiment(const ExperimentConfig& cfg,
                         const std::function<void(const std::string&)>& progress = {});

// Shrinks a config to a 1-step smoke run on 4 tasks (the --dry-run contract).
ExperimentConfig make_dry_run(ExperimentConfig cfg);

}  // namespace drs::harness

#endif  // DRS_HARNESS_HPP_
