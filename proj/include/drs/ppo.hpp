#ifndef DRS_PPO_HPP_
#define DRS_PPO_HPP_

#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "drs/gae.hpp"
#include "drs/grammar.hpp"
#include "drs/interp.hpp"
#include "drs/model.hpp"
#include "drs/reward.hpp"
#include "drs/sampler.hpp"

namespace drs::ppo {

struct PpoConfig {
  double lr_policy = 1e-3;
  double lr_value = 1e-3;
  double gamma = 1.0;
  double lambda_gae = 0.95;
  double clip_epsilon = 0.2;
  std::int32_t minibatch_size = 8;
  std::int32_t ppo_epochs = 4;
  std::int32_t rollout_batch = 16;
  bool whiten_advantages = true;
  double grad_clip = 1.0;
  double kl_early_stop = 10.0;
  bool dense_attribution = true;  // false: EOS-placement baseline mode
  // Linear LR decay to 10% over this many train steps (0 disables).
  std::int64_t lr_anneal_steps = 0;

  void validate() const;
};

// One rollout record: everything Algorithm 1's evaluation phase attaches to
// a sampled response.
struct Trajectory {
  const sim::TaskSpec* task = nullptr;
  std::vector<lang::TokenId> prompt;
  std::vector<lang::TokenId> response;
  lang::TokenizedProgram resp_tp;
  std::vector<double> logp_old;    // scored under pi_theta at rollout time
  std::vector<double> logp_ref;
  std::vector<double> kl;          // k1 per token
  std::vector<double> values_old;
  std::vector<double> syntax;      // rollout-time syntax scores
  reward::RewardVector rewards;
  std::vector<double> advantages;
  std::vector<double> returns;
  sim::SimOutcome outcome;
  bool test_pass = false;
  double dfg_score = 0.0;
  double lint_score = 0.0;
  bool degenerate_mask = false;
};

struct StepMetrics {
  std::int64_t step = 0;
  double mean_total_reward = 0.0;  // mean over trajectories of summed R_t
  std::map<std::string, double> component_means;
  double kl_mean = 0.0;
  double clip_fraction = 0.0;
  double policy_loss = 0.0;
  double value_loss = 0.0;
  double grad_norm_policy = 0.0;
  double grad_norm_value = 0.0;
  double mean_response_len = 0.0;
  std::map<std::string, std::int64_t> outcome_counts;
  bool kl_early_stop_triggered = false;
};

// Algorithm-1 trainer: rollout -> evaluation -> optimization over K epochs
// of shuffled mini-batches, with the composite dense reward and GAE.
class Trainer {
 public:
  Trainer(model::Net& policy, model::Net& value, const model::Net& reference,
          const lang::Grammar& grammar, reward::RewardWeights weights,
          std::set<std::string> enabled_components, PpoConfig cfg,
          sampler::DecodingConfig rollout_decode, sim::SimRewardLadder ladder = {});

  StepMetrics train_step(const std::vector<const sim::TaskSpec*>& batch,
                         std::mt19937_64& rng);

  // Rollout + evaluation for one task (exposed for tests and reward dumps).
  Trajectory rollout_one(const sim::TaskSpec& task, std::mt19937_64& rng) const;

  const std::vector<Trajectory>& last_batch() const { return last_batch_; }
  const PpoConfig& config() const { return cfg_; }

 private:
  void evaluate_response(Trajectory& traj) const;

  model::Net& policy_;
  model::Net& value_;
  const model::Net& reference_;
  const lang::Grammar& grammar_;
  reward::RewardWeights weights_;
  std::set<std::string> enabled_;
  PpoConfig cfg_;
  sampler::DecodingConfig rollout_decode_;
  sim::SimRewardLadder ladder_;
  model::Adam opt_policy_, opt_value_;
  std::vector<Trajectory> last_batch_;
  std::int64_t step_count_ = 0;
};

}  // namespace drs::ppo

#endif  // DRS_PPO_HPP_
