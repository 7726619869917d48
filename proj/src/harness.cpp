#include "drs/harness.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "drs/kernels.hpp"
#include "drs/tokenizer.hpp"

namespace drs::harness {

namespace fs = std::filesystem;
using nlohmann::json;

std::string resolve_run_dir(const std::string& out_dir) {
  const fs::path p(out_dir);
  if (p.is_absolute()) return out_dir;
  const char* root = std::getenv("DRS_RUN_DIR");
  if (root == nullptr || *root == '\0') return out_dir;
  return (fs::path(root) / p).string();
}

namespace {

GenOptions split_options(const std::string& prefix, std::int32_t n) {
  GenOptions o;
  o.n_tasks = n;
  o.id_prefix = prefix;
  return o;
}

std::string default_path(const std::string& run_dir, const std::string& name) {
  return (fs::path(run_dir) / name).string();
}

std::vector<model::PretrainExample> to_examples(const lang::Vocab& vocab,
                                                const std::vector<sim::TaskSpec>& tasks) {
  std::vector<model::PretrainExample> out;
  out.reserve(tasks.size());
  for (const auto& t : tasks) {
    model::PretrainExample ex;
    ex.prompt = lang::tokenize(vocab, t.prompt).ids;
    ex.response = lang::tokenize(vocab, "``` " + t.reference_program + " ```").ids;
    ex.response.push_back(vocab.eos());
    out.push_back(std::move(ex));
  }
  return out;
}

double greedy_success(const model::Net& policy, const lang::Grammar& grammar,
                      const std::vector<sim::TaskSpec>& tasks,
                      const sampler::DecodingConfig& decode) {
  if (tasks.empty()) return 0.0;
  const EvalReport r = evaluate(policy, grammar, tasks, decode);
  const auto it = r.outcome_counts.find("success");
  const auto succ = it == r.outcome_counts.end() ? 0 : it->second;
  return static_cast<double>(succ) / static_cast<double>(tasks.size());
}

json metrics_to_json(const ppo::StepMetrics& m) {
  json j;
  j["step"] = m.step;
  j["mean_total_reward"] = m.mean_total_reward;
  j["components"] = m.component_means;
  j["kl_mean"] = m.kl_mean;
  j["clip_fraction"] = m.clip_fraction;
  j["policy_loss"] = m.policy_loss;
  j["value_loss"] = m.value_loss;
  j["grad_norm_policy"] = m.grad_norm_policy;
  j["grad_norm_value"] = m.grad_norm_value;
  j["mean_response_len"] = m.mean_response_len;
  j["outcomes"] = m.outcome_counts;
  return j;
}

void dump_trajectory(std::ofstream& out, std::int64_t step, const lang::Vocab& vocab,
                     const ppo::Trajectory& traj) {
  for (std::size_t t = 0; t < traj.response.size(); ++t) {
    out << "step=" << step << " task=" << traj.task->id << " pos=" << t
        << " tok=" << vocab.surface(traj.response[t]);
    for (const auto& [name, comp] : traj.rewards.components) {
      out << ' ' << name << '=' << comp[t];
    }
    out << " total=" << traj.rewards.total[t] << '\n';
  }
}

struct PretrainOutcome {
  std::int64_t steps_run = 0;
  double dev_success = 0.0;
};

PretrainOutcome pretrain_stage(const ExperimentConfig& cfg, const std::string& run_dir,
                               const lang::Grammar& grammar, const CorpusSet& corpora,
                               model::Net& policy,
                               const std::function<void(const std::string&)>& progress) {
  const lang::Vocab& vocab = grammar.vocab();
  const auto examples = to_examples(vocab, corpora.train);
  std::mt19937_64 rng(derive_seed(cfg.seed, 20));
  model::Adam opt;
  opt.lr = cfg.pretrain.lr;

  std::ofstream metrics(default_path(run_dir, "pretrain_metrics.jsonl"),
                        std::ios::binary);
  const bool gate = cfg.pretrain_window_hi < 1.0 || cfg.pretrain_window_lo > 0.0;
  PretrainOutcome out;
  while (out.steps_run < cfg.pretrain.steps) {
    const std::int64_t chunk =
        std::min<std::int64_t>(cfg.pretrain_check_interval,
                               cfg.pretrain.steps - out.steps_run);
    model::PretrainConfig pc = cfg.pretrain;
    pc.steps = chunk;
    const double loss = model::pretrain_supervised(policy, examples, pc, rng, &opt);
    out.steps_run += chunk;
    out.dev_success = greedy_success(policy, grammar, corpora.dev, cfg.decode_eval);
    json j;
    j["step"] = out.steps_run;
    j["loss"] = loss;
    j["dev_success"] = out.dev_success;
    metrics << j.dump() << '\n';
    if (progress) {
      progress("pretrain step " + std::to_string(out.steps_run) + " loss " +
               std::to_string(loss) + " dev_success " + std::to_string(out.dev_success));
    }
    if (gate && out.dev_success >= cfg.pretrain_window_lo) break;
  }
  model::save_checkpoint(default_path(run_dir, "pretrain.ckpt"), policy, vocab.hash());
  return out;
}

}  // namespace

CorpusSet ensure_corpora(const ExperimentConfig& cfg, const std::string& run_dir,
                         bool generate_if_missing) {
  auto path_for = [&](const std::string& configured, const std::string& name) {
    return configured.empty() ? default_path(run_dir, name) : configured;
  };
  const std::string p_train = path_for(cfg.corpus_train, "corpus_train.txt");
  const std::string p_dev = path_for(cfg.corpus_dev, "corpus_dev.txt");
  const std::string p_eval = path_for(cfg.corpus_eval, "corpus_eval.txt");

  CorpusSet set;
  auto load_or_gen = [&](const std::string& path, const std::string& prefix,
                         std::int32_t n, std::uint64_t salt) {
    if (fs::exists(path)) return load_corpus(path);
    if (!generate_if_missing) throw MissingArtifactsError(path);
    auto tasks = generate_corpus(derive_seed(cfg.seed, salt), split_options(prefix, n));
    save_corpus(path, tasks);
    return tasks;
  };
  set.train = load_or_gen(p_train, "t_train_", cfg.n_train, 1);
  set.dev = load_or_gen(p_dev, "t_dev_", cfg.n_dev, 2);
  set.eval = load_or_gen(p_eval, "t_eval_", cfg.n_eval, 3);
  return set;
}

ExperimentConfig make_dry_run(ExperimentConfig cfg) {
  cfg.n_train = 4;
  cfg.n_dev = 4;
  cfg.n_eval = 4;
  cfg.pretrain.steps = 2;
  cfg.pretrain_check_interval = 2;
  cfg.pretrain_window_lo = 0.0;
  cfg.pretrain_window_hi = 1.0;
  cfg.ppo_steps = 1;
  cfg.ppo.rollout_batch = 4;
  cfg.ppo.minibatch_size = 2;
  cfg.ckpt_interval = 1;
  cfg.eval_interval = 0;
  return cfg;
}

RunResult run_experiment(const ExperimentConfig& cfg_in,
                         const std::function<void(const std::string&)>& progress) {
  ExperimentConfig cfg = cfg_in;
  cfg.validate();
  RunResult result;
  result.run_dir = resolve_run_dir(cfg.out_dir);
  fs::create_directories(result.run_dir);

  const lang::Vocab vocab = lang::Vocab::robolang();
  const lang::Grammar grammar(vocab);
  vocab.save(default_path(result.run_dir, "vocab.txt"));

  const CorpusSet corpora = ensure_corpora(cfg, result.run_dir);
  cfg.corpus_train = cfg.corpus_train.empty()
                         ? default_path(result.run_dir, "corpus_train.txt")
                         : cfg.corpus_train;
  cfg.corpus_dev = cfg.corpus_dev.empty() ? default_path(result.run_dir, "corpus_dev.txt")
                                          : cfg.corpus_dev;
  cfg.corpus_eval = cfg.corpus_eval.empty()
                        ? default_path(result.run_dir, "corpus_eval.txt")
                        : cfg.corpus_eval;
  cfg.save(default_path(result.run_dir, "config.txt"));

  model::ModelConfig dims;
  dims.vocab_size = static_cast<std::int32_t>(vocab.size());
  dims.d_model = cfg.d_model;
  dims.n_layers = cfg.n_layers;
  dims.n_heads = cfg.n_heads;
  dims.max_seq = cfg.max_seq;
  dims.head_out = dims.vocab_size;
  model::Net policy = model::Net::make(dims, derive_seed(cfg.seed, 10));
  dims.head_out = 1;
  model::Net value = model::Net::make(dims, derive_seed(cfg.seed, 11));

  const PretrainOutcome pre =
      pretrain_stage(cfg, result.run_dir, grammar, corpora, policy, progress);
  result.pretrain_steps_run = pre.steps_run;
  result.pretrain_dev_success = pre.dev_success;

  const model::Net reference = policy;  // frozen fine-tuning-start snapshot

  result.eval_before = evaluate(policy, grammar, corpora.eval, cfg.decode_eval);
  {
    std::ofstream f(default_path(result.run_dir, "eval_before.json"), std::ios::binary);
    f << result.eval_before.to_json() << '\n';
  }
  if (progress) {
    progress("eval before: pass@1 " + std::to_string(result.eval_before.pass1));
  }

  ppo::Trainer trainer(policy, value, reference, grammar, cfg.weights,
                       cfg.enabled_components(), cfg.ppo, cfg.decode_train, cfg.ladder);

  std::mt19937_64 rng(derive_seed(cfg.seed, 30));
  std::vector<std::size_t> order(corpora.train.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::shuffle(order.begin(), order.end(), rng);
  std::size_t cursor = 0;

  std::ofstream metrics(default_path(result.run_dir, "metrics.jsonl"), std::ios::binary);
  std::ofstream dump;
  if (cfg.dump_rewards) {
    dump.open(default_path(result.run_dir, "reward_dump.txt"), std::ios::binary);
  }

  for (std::int64_t step = 1; step <= cfg.ppo_steps; ++step) {
    std::vector<const sim::TaskSpec*> batch;
    for (std::int32_t b = 0; b < cfg.ppo.rollout_batch; ++b) {
      if (cursor >= order.size()) {
        std::shuffle(order.begin(), order.end(), rng);
        cursor = 0;
      }
      batch.push_back(&corpora.train[order[cursor++]]);
    }
    const ppo::StepMetrics m = trainer.train_step(batch, rng);
    metrics << metrics_to_json(m).dump() << '\n';
    if (cfg.dump_rewards) {
      for (const auto& traj : trainer.last_batch()) {
        dump_trajectory(dump, step, vocab, traj);
      }
    }
    if (progress && step % 25 == 0) {
      progress("ppo step " + std::to_string(step) + " reward " +
               std::to_string(m.mean_total_reward) + " success " +
               std::to_string(m.outcome_counts.count("success")
                                  ? m.outcome_counts.at("success")
                                  : 0));
    }
    if (cfg.ckpt_interval > 0 && step % cfg.ckpt_interval == 0) {
      model::save_checkpoint(
          default_path(result.run_dir, "ckpt_step_" + std::to_string(step) + ".ckpt"),
          policy, vocab.hash());
    }
    if (cfg.eval_interval > 0 && step % cfg.eval_interval == 0) {
      const EvalReport r = evaluate(policy, grammar, corpora.eval, cfg.decode_eval);
      std::ofstream f(default_path(result.run_dir,
                                   "eval_step_" + std::to_string(step) + ".json"),
                      std::ios::binary);
      f << r.to_json() << '\n';
    }
    result.ppo_steps_run = step;
    if (m.kl_early_stop_triggered) {
      result.kl_early_stopped = true;
      break;
    }
  }

  model::save_checkpoint(default_path(result.run_dir, "final.ckpt"), policy,
                         vocab.hash());
  result.eval_after = evaluate(policy, grammar, corpora.eval, cfg.decode_eval);
  {
    std::ofstream f(default_path(result.run_dir, "eval_after.json"), std::ios::binary);
    f << result.eval_after.to_json() << '\n';
  }
  {
    std::ofstream f(default_path(result.run_dir, "report.txt"), std::ios::binary);
    f << render_report(result.eval_before, result.eval_after);
  }
  if (progress) {
    progress("eval after: pass@1 " + std::to_string(result.eval_after.pass1));
  }
  return result;
}

}  // namespace drs::harness
