#include "drs/config.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace drs::harness {

const char* kind_name(ExperimentKind k) {
  return k == ExperimentKind::General ? "general" : "robotics";
}

ExperimentConfig ExperimentConfig::defaults(ExperimentKind kind) {
  ExperimentConfig c;
  c.kind = kind;
  c.weights.lambda_sync = 0.1;
  c.weights.lambda_lint = 0.1;
  if (kind == ExperimentKind::Robotics) {
    c.weights.beta_kl = 0.9;
    c.weights.lambda_opt = {{"sim", 0.8}};
    c.ppo.minibatch_size = 4;
  } else {
    c.weights.beta_kl = 0.1;
    c.weights.lambda_opt = {{"dfg", 0.1}, {"test", 0.7}};
    c.ppo.minibatch_size = 8;
  }
  c.ppo.lr_policy = 1e-3;
  c.ppo.lr_value = 1e-3;
  c.ppo.rollout_batch = 16;
  c.pretrain.steps = 6000;
  c.pretrain.batch_size = 8;
  c.pretrain.lr = 3e-3;
  c.pretrain_window_lo = 0.22;
  c.pretrain_window_hi = 0.42;
  c.decode_train.temperature = 1.0;
  c.decode_train.top_p = 0.95;
  c.decode_train.max_new_tokens = 56;
  c.decode_train.constrained = false;
  c.decode_eval.temperature = 0.0;  // exact greedy
  c.decode_eval.top_p = 0.95;
  c.decode_eval.max_new_tokens = 64;
  c.decode_eval.constrained = false;
  return c;
}

std::set<std::string> ExperimentConfig::enabled_components() const {
  return kind == ExperimentKind::General ? std::set<std::string>{"dfg", "test"}
                                         : std::set<std::string>{"sim"};
}

void ExperimentConfig::validate() const {
  weights.validate();
  ppo.validate();
  if (kind == ExperimentKind::General && weights.opt("sim") != 0.0) {
    throw std::invalid_argument("general experiments must not enable the sim reward");
  }
  if (kind == ExperimentKind::Robotics &&
      (weights.opt("dfg") != 0.0 || weights.opt("test") != 0.0)) {
    throw std::invalid_argument("robotics experiments enable only sync/lint/sim");
  }
  if (n_train < 1 || n_dev < 0 || n_eval < 1) {
    throw std::invalid_argument("corpus sizes must be positive");
  }
  if (d_model < 1 || n_layers < 1 || n_heads < 1 || d_model % n_heads != 0) {
    throw std::invalid_argument("bad model dims");
  }
  if (ppo_steps < 0 || pretrain.steps < 0) {
    throw std::invalid_argument("step counts must be non-negative");
  }
  if (decode_train.max_new_tokens < 8 || decode_eval.max_new_tokens < 8) {
    throw std::invalid_argument("max_new_tokens must be at least 8");
  }
  if (pretrain_window_lo < 0.0 || pretrain_window_hi > 1.0 ||
      pretrain_window_lo > pretrain_window_hi) {
    throw std::invalid_argument("bad pretrain window");
  }
}

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

std::string ExperimentConfig::serialize() const {
  std::ostringstream os;
  os << "experiment = " << kind_name(kind) << "\n";
  os << "seed = " << seed << "\n";
  os << "out_dir = " << out_dir << "\n";
  os << "corpus.train = " << corpus_train << "\n";
  os << "corpus.dev = " << corpus_dev << "\n";
  os << "corpus.eval = " << corpus_eval << "\n";
  os << "corpus.n_train = " << n_train << "\n";
  os << "corpus.n_dev = " << n_dev << "\n";
  os << "corpus.n_eval = " << n_eval << "\n";
  os << "model.d_model = " << d_model << "\n";
  os << "model.n_layers = " << n_layers << "\n";
  os << "model.n_heads = " << n_heads << "\n";
  os << "model.max_seq = " << max_seq << "\n";
  os << "reward.lambda_sync = " << fmt(weights.lambda_sync) << "\n";
  os << "reward.lambda_lint = " << fmt(weights.lambda_lint) << "\n";
  os << "reward.beta_kl = " << fmt(weights.beta_kl) << "\n";
  os << "reward.lambda_dfg = " << fmt(weights.opt("dfg")) << "\n";
  os << "reward.lambda_test = " << fmt(weights.opt("test")) << "\n";
  os << "reward.lambda_sim = " << fmt(weights.opt("sim")) << "\n";
  os << "reward.sim_success = " << fmt(ladder.success) << "\n";
  os << "reward.sim_completion = " << fmt(ladder.completion_error) << "\n";
  os << "reward.sim_simulation = " << fmt(ladder.simulation_error) << "\n";
  os << "reward.sim_parse = " << fmt(ladder.parse_error) << "\n";
  os << "ppo.lr_policy = " << fmt(ppo.lr_policy) << "\n";
  os << "ppo.lr_value = " << fmt(ppo.lr_value) << "\n";
  os << "ppo.gamma = " << fmt(ppo.gamma) << "\n";
  os << "ppo.lambda_gae = " << fmt(ppo.lambda_gae) << "\n";
  os << "ppo.clip_epsilon = " << fmt(ppo.clip_epsilon) << "\n";
  os << "ppo.minibatch_size = " << ppo.minibatch_size << "\n";
  os << "ppo.ppo_epochs = " << ppo.ppo_epochs << "\n";
  os << "ppo.rollout_batch = " << ppo.rollout_batch << "\n";
  os << "ppo.whiten_advantages = " << (ppo.whiten_advantages ? "true" : "false") << "\n";
  os << "ppo.grad_clip = " << fmt(ppo.grad_clip) << "\n";
  os << "ppo.kl_early_stop = " << fmt(ppo.kl_early_stop) << "\n";
  os << "ppo.dense_attribution = " << (ppo.dense_attribution ? "true" : "false") << "\n";
  os << "ppo.lr_anneal_steps = " << ppo.lr_anneal_steps << "\n";
  os << "ppo.steps = " << ppo_steps << "\n";
  os << "pretrain.steps = " << pretrain.steps << "\n";
  os << "pretrain.batch_size = " << pretrain.batch_size << "\n";
  os << "pretrain.lr = " << fmt(pretrain.lr) << "\n";
  os << "pretrain.grad_clip = " << fmt(pretrain.grad_clip) << "\n";
  os << "pretrain.window_lo = " << fmt(pretrain_window_lo) << "\n";
  os << "pretrain.window_hi = " << fmt(pretrain_window_hi) << "\n";
  os << "pretrain.check_interval = " << pretrain_check_interval << "\n";
  os << "decode.train.temperature = " << fmt(decode_train.temperature) << "\n";
  os << "decode.train.top_p = " << fmt(decode_train.top_p) << "\n";
  os << "decode.train.max_new_tokens = " << decode_train.max_new_tokens << "\n";
  os << "decode.train.constrained = " << (decode_train.constrained ? "true" : "false")
     << "\n";
  os << "decode.eval.temperature = " << fmt(decode_eval.temperature) << "\n";
  os << "decode.eval.top_p = " << fmt(decode_eval.top_p) << "\n";
  os << "decode.eval.max_new_tokens = " << decode_eval.max_new_tokens << "\n";
  os << "decode.eval.constrained = " << (decode_eval.constrained ? "true" : "false")
     << "\n";
  os << "run.eval_interval = " << eval_interval << "\n";
  os << "run.ckpt_interval = " << ckpt_interval << "\n";
  os << "run.dump_rewards = " << (dump_rewards ? "true" : "false") << "\n";
  return os.str();
}

ExperimentConfig ExperimentConfig::parse(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  std::string line;
  auto trim = [](std::string s) {
    const auto a = s.find_first_not_of(" \t\r");
    const auto b = s.find_last_not_of(" \t\r");
    return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
  };
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw std::runtime_error("config line " + std::to_string(lineno) + ": missing '='");
    }
    kv[trim(t.substr(0, eq))] = trim(t.substr(eq + 1));
  }

  ExperimentConfig c;
  auto kind_it = kv.find("experiment");
  if (kind_it != kv.end()) {
    if (kind_it->second == "general") {
      c = defaults(ExperimentKind::General);
    } else if (kind_it->second == "robotics") {
      c = defaults(ExperimentKind::Robotics);
    } else {
      throw std::runtime_error("unknown experiment kind: " + kind_it->second);
    }
    kv.erase(kind_it);
  } else {
    c = defaults(ExperimentKind::Robotics);
  }

  auto s = [&kv](const std::string& key, std::string& out) {
    auto it = kv.find(key);
    if (it != kv.end()) {
      out = it->second;
      kv.erase(it);
    }
  };
  auto u64 = [&kv](const std::string& key, std::uint64_t& out) {
    auto it = kv.find(key);
    if (it != kv.end()) {
      out = std::stoull(it->second);
      kv.erase(it);
    }
  };
  auto i64 = [&kv](const std::string& key, std::int64_t& out) {
    auto it = kv.find(key);
    if (it != kv.end()) {
      out = std::stoll(it->second);
      kv.erase(it);
    }
  };
  auto i32 = [&kv](const std::string& key, std::int32_t& out) {
    auto it = kv.find(key);
    if (it != kv.end()) {
      out = static_cast<std::int32_t>(std::stol(it->second));
      kv.erase(it);
    }
  };
  auto f64 = [&kv](const std::string& key, double& out) {
    auto it = kv.find(key);
    if (it != kv.end()) {
      out = std::stod(it->second);
      kv.erase(it);
    }
  };
  auto b = [&kv](const std::string& key, bool& out) {
    auto it = kv.find(key);
    if (it != kv.end()) {
      if (it->second != "true" && it->second != "false") {
        throw std::runtime_error("bad boolean for " + key);
      }
      out = it->second == "true";
      kv.erase(it);
    }
  };

  u64("seed", c.seed);
  s("out_dir", c.out_dir);
  s("corpus.train", c.corpus_train);
  s("corpus.dev", c.corpus_dev);
  s("corpus.eval", c.corpus_eval);
  i32("corpus.n_train", c.n_train);
  i32("corpus.n_dev", c.n_dev);
  i32("corpus.n_eval", c.n_eval);
  i32("model.d_model", c.d_model);
  i32("model.n_layers", c.n_layers);
  i32("model.n_heads", c.n_heads);
  i32("model.max_seq", c.max_seq);
  f64("reward.lambda_sync", c.weights.lambda_sync);
  f64("reward.lambda_lint", c.weights.lambda_lint);
  f64("reward.beta_kl", c.weights.beta_kl);
  double dfg = c.weights.opt("dfg"), test = c.weights.opt("test"),
         simw = c.weights.opt("sim");
  f64("reward.lambda_dfg", dfg);
  f64("reward.lambda_test", test);
  f64("reward.lambda_sim", simw);
  c.weights.lambda_opt.clear();
  if (dfg != 0.0) c.weights.lambda_opt["dfg"] = dfg;
  if (test != 0.0) c.weights.lambda_opt["test"] = test;
  if (simw != 0.0) c.weights.lambda_opt["sim"] = simw;
  f64("reward.sim_success", c.ladder.success);
  f64("reward.sim_completion", c.ladder.completion_error);
  f64("reward.sim_simulation", c.ladder.simulation_error);
  f64("reward.sim_parse", c.ladder.parse_error);
  f64("ppo.lr_policy", c.ppo.lr_policy);
  f64("ppo.lr_value", c.ppo.lr_value);
  f64("ppo.gamma", c.ppo.gamma);
  f64("ppo.lambda_gae", c.ppo.lambda_gae);
  f64("ppo.clip_epsilon", c.ppo.clip_epsilon);
  i32("ppo.minibatch_size", c.ppo.minibatch_size);
  i32("ppo.ppo_epochs", c.ppo.ppo_epochs);
  i32("ppo.rollout_batch", c.ppo.rollout_batch);
  b("ppo.whiten_advantages", c.ppo.whiten_advantages);
  f64("ppo.grad_clip", c.ppo.grad_clip);
  f64("ppo.kl_early_stop", c.ppo.kl_early_stop);
  b("ppo.dense_attribution", c.ppo.dense_attribution);
  i64("ppo.lr_anneal_steps", c.ppo.lr_anneal_steps);
  i64("ppo.steps", c.ppo_steps);
  i64("pretrain.steps", c.pretrain.steps);
  i32("pretrain.batch_size", c.pretrain.batch_size);
  f64("pretrain.lr", c.pretrain.lr);
  f64("pretrain.grad_clip", c.pretrain.grad_clip);
  f64("pretrain.window_lo", c.pretrain_window_lo);
  f64("pretrain.window_hi", c.pretrain_window_hi);
  i64("pretrain.check_interval", c.pretrain_check_interval);
  f64("decode.train.temperature", c.decode_train.temperature);
  f64("decode.train.top_p", c.decode_train.top_p);
  i32("decode.train.max_new_tokens", c.decode_train.max_new_tokens);
  b("decode.train.constrained", c.decode_train.constrained);
  f64("decode.eval.temperature", c.decode_eval.temperature);
  f64("decode.eval.top_p", c.decode_eval.top_p);
  i32("decode.eval.max_new_tokens", c.decode_eval.max_new_tokens);
  b("decode.eval.constrained", c.decode_eval.constrained);
  i64("run.eval_interval", c.eval_interval);
  i64("run.ckpt_interval", c.ckpt_interval);
  b("run.dump_rewards", c.dump_rewards);

  if (!kv.empty()) {
    throw std::runtime_error("unknown config key: " + kv.begin()->first);
  }
  c.validate();
  return c;
}

void ExperimentConfig::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write config: " + path);
  out << serialize();
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read config: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed ^ (salt * 0x9E3779B97F4A7C15ULL);
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace drs::harness
