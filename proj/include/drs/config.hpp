#ifndef DRS_CONFIG_HPP_
#define DRS_CONFIG_HPP_

#include <cstdint>
#include <set>
#include <string>

#include "drs/interp.hpp"
#include "drs/model.hpp"
#include "drs/ppo.hpp"
#include "drs/reward.hpp"
#include "drs/sampler.hpp"

namespace drs::harness {

enum class ExperimentKind : std::uint8_t { General, Robotics };

const char* kind_name(ExperimentKind k);

// Full experiment definition. Serializes to the documented key=value format
// (docs/config.md) and re-loads to an identical value.
struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::Robotics;
  std::uint64_t seed = 0;

  std::string corpus_train, corpus_dev, corpus_eval;  // blank: under out_dir
  std::int32_t n_train = 600;
  std::int32_t n_dev = 200;
  std::int32_t n_eval = 200;

  std::int32_t d_model = 64;
  std::int32_t n_layers = 2;
  std::int32_t n_heads = 4;
  std::int32_t max_seq = 160;

  reward::RewardWeights weights;
  sim::SimRewardLadder ladder;

  ppo::PpoConfig ppo;
  std::int64_t ppo_steps = 300;

  model::PretrainConfig pretrain;
  // Optional stop window on held-out dev greedy success; gate is active when
  // window_hi < 1. Pretraining stops at the first checkpoint inside
  // [window_lo, window_hi] (or beyond window_lo), capped by pretrain.steps.
  double pretrain_window_lo = 0.0;
  double pretrain_window_hi = 1.0;
  std::int64_t pretrain_check_interval = 150;

  sampler::DecodingConfig decode_train, decode_eval;

  std::string out_dir = "runs/run0";
  std::int64_t eval_interval = 0;  // 0: evaluate only before and after
  std::int64_t ckpt_interval = 100;
  bool dump_rewards = false;

  static ExperimentConfig defaults(ExperimentKind kind);
  void validate() const;
  std::set<std::string> enabled_components() const;

  std::string serialize() const;
  static ExperimentConfig parse(const std::string& text);
  void save(const std::string& path) const;
  static ExperimentConfig load(const std::string& path);

  bool operator==(const ExperimentConfig& other) const {
    return serialize() == other.serialize();
  }
};

// Deterministic sub-seed derivation (splitmix64 over seed ^ salt).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt);

}  // namespace drs::harness

#endif  // DRS_CONFIG_HPP_
