#include "drs/ppo.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "drs/dfg.hpp"
#include "drs/lint.hpp"
#include "drs/parser.hpp"

namespace drs::ppo {

void PpoConfig::validate() const {
  if (!(clip_epsilon > 0.0 && clip_epsilon < 1.0)) {
    throw std::invalid_argument("clip_epsilon must lie in (0,1)");
  }
  if (gamma < 0.0 || gamma > 1.0 || lambda_gae < 0.0 || lambda_gae > 1.0) {
    throw std::invalid_argument("gamma and lambda_gae must lie in [0,1]");
  }
  if (ppo_epochs < 1) throw std::invalid_argument("ppo_epochs must be >= 1");
  if (minibatch_size < 1 || rollout_batch < 1) {
    throw std::invalid_argument("batch sizes must be >= 1");
  }
  if (lr_policy < 0.0 || lr_value < 0.0) {
    throw std::invalid_argument("learning rates must be >= 0");
  }
}

Trainer::Trainer(model::Net& policy, model::Net& value, const model::Net& reference,
                 const lang::Grammar& grammar, reward::RewardWeights weights,
                 std::set<std::string> enabled_components, PpoConfig cfg,
                 sampler::DecodingConfig rollout_decode, sim::SimRewardLadder ladder)
    : policy_(policy),
      value_(value),
      reference_(reference),
      grammar_(grammar),
      weights_(std::move(weights)),
      enabled_(std::move(enabled_components)),
      cfg_(cfg),
      rollout_decode_(rollout_decode),
      ladder_(ladder) {
  cfg_.validate();
  weights_.validate();
  opt_policy_.lr = cfg_.lr_policy;
  opt_value_.lr = cfg_.lr_value;
}

void Trainer::evaluate_response(Trajectory& traj) const {
  const lang::Vocab& vocab = grammar_.vocab();
  const sim::TaskSpec& task = *traj.task;

  const sim::TaskRun run = sim::run_task(vocab, traj.resp_tp, task);
  traj.outcome = run.outcome;
  traj.test_pass =
      run.outcome.kind == sim::SimOutcome::Kind::Success && run.assertions_pass;

  std::vector<lint::Diagnostic> diags;
  double dfg_score = 0.0;
  const lang::ParseResult parsed = lang::parse(vocab, traj.resp_tp);
  if (parsed.ok()) {
    lint::LintOptions opts;
    std::set<std::string> universe;
    for (const auto& [obj, loc] : task.initial_world.objects) universe.insert(obj);
    opts.object_universe = std::move(universe);
    diags = lint::lint(*parsed.ast, traj.resp_tp, opts);

    const lang::ParseResult ref_parsed =
        lang::parse(vocab, lang::tokenize(vocab, task.reference_program));
    if (ref_parsed.ok()) {
      dfg_score = dfg::dfg_match(dfg::extract_dfg(*parsed.ast),
                                 dfg::extract_dfg(*ref_parsed.ast));
    }
  }
  traj.dfg_score = dfg_score;
  traj.lint_score = lint::lint_score(diags);

  reward::ComposeInputs in;
  in.response = &traj.resp_tp;
  in.syntax_scores = traj.syntax;
  in.diagnostics = std::move(diags);
  in.kl = traj.kl;
  in.dense = cfg_.dense_attribution;
  if (enabled_.count("dfg")) in.dfg_score = dfg_score;
  if (enabled_.count("test")) in.test_score = traj.test_pass ? 1.0 : 0.0;
  if (enabled_.count("sim")) in.sim = sim::sim_reward(traj.outcome, ladder_);
  traj.rewards = reward::compose(in, weights_);
}

Trajectory Trainer::rollout_one(const sim::TaskSpec& task, std::mt19937_64& rng) const {
  const lang::Vocab& vocab = grammar_.vocab();
  Trajectory traj;
  traj.task = &task;
  const lang::TokenizedProgram prompt_tp = lang::tokenize(vocab, task.prompt);
  traj.prompt = prompt_tp.ids;

  sampler::SampleResult sr =
      sampler::sample(policy_, grammar_, traj.prompt, rollout_decode_, rng);
  if (sr.response.empty()) {
    sr.response.push_back(vocab.eos());
    sr.logp.push_back(0.0);
    sr.syntax.push_back(0.0);
  }
  traj.response = std::move(sr.response);
  traj.syntax = std::move(sr.syntax);
  traj.degenerate_mask = sr.degenerate_mask;
  traj.resp_tp = lang::from_ids(vocab, traj.response);

  // Rollout-time log-probs come from the decode path; KL and the PPO ratios
  // use the full-forward scoring path so pi_theta == pi_ref gives exact zero.
  traj.logp_old =
      sampler::score_logp(policy_, grammar_, traj.prompt, traj.response, rollout_decode_);
  traj.logp_ref = sampler::score_logp(reference_, grammar_, traj.prompt, traj.response,
                                      rollout_decode_);
  traj.kl = reward::kl_per_token(traj.logp_old, traj.logp_ref);
  traj.values_old = sampler::response_values(value_, traj.prompt, traj.response);

  try {
    evaluate_response(traj);
  } catch (const std::exception&) {
    // Degrade to the worst-case classification rather than aborting the batch.
    traj.outcome = {sim::SimOutcome::Kind::ParseError, std::nullopt,
                    "evaluation failure"};
    traj.test_pass = false;
    reward::ComposeInputs in;
    in.response = &traj.resp_tp;
    in.syntax_scores.assign(traj.response.size(), 0.0);
    in.kl = traj.kl;
    in.dense = cfg_.dense_attribution;
    if (enabled_.count("dfg")) in.dfg_score = 0.0;
    if (enabled_.count("test")) in.test_score = 0.0;
    if (enabled_.count("sim")) in.sim = std::make_pair(ladder_.parse_error, std::nullopt);
    traj.rewards = reward::compose(in, weights_);
  }

  GaeResult g = gae(traj.rewards.total, traj.values_old, cfg_.gamma, cfg_.lambda_gae);
  traj.advantages = std::move(g.advantages);
  traj.returns = std::move(g.returns);
  return traj;
}

StepMetrics Trainer::train_step(const std::vector<const sim::TaskSpec*>& batch,
                                std::mt19937_64& rng) {
  StepMetrics m;
  m.step = ++step_count_;
  if (cfg_.lr_anneal_steps > 0) {
    const double frac = static_cast<double>(step_count_ - 1) /
                        static_cast<double>(cfg_.lr_anneal_steps);
    const double scale = std::max(0.1, 1.0 - frac);
    opt_policy_.lr = cfg_.lr_policy * scale;
    opt_value_.lr = cfg_.lr_value * scale;
  }

  // --- Rollout + evaluation phases ---
  std::vector<Trajectory> trajs;
  trajs.reserve(batch.size());
  for (const sim::TaskSpec* task : batch) trajs.push_back(rollout_one(*task, rng));

  if (cfg_.whiten_advantages) {
    std::vector<std::vector<double>*> advs;
    for (auto& t : trajs) advs.push_back(&t.advantages);
    whiten(advs);
  }

  // --- Optimization phase ---
  const double temp = rollout_decode_.temperature > 0.0 ? rollout_decode_.temperature : 1.0;
  const auto V = static_cast<std::size_t>(policy_.config().head_out);
  std::vector<std::size_t> order(trajs.size());
  std::iota(order.begin(), order.end(), 0);

  double sum_ploss = 0.0, sum_vloss = 0.0, sum_clip = 0.0, sum_gnp = 0.0, sum_gnv = 0.0;
  std::int64_t updates = 0;

  std::vector<double> logp_row;
  for (std::int32_t epoch = 0; epoch < cfg_.ppo_epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t mb_start = 0; mb_start < order.size();
         mb_start += static_cast<std::size_t>(cfg_.minibatch_size)) {
      const std::size_t mb_end =
          std::min(order.size(), mb_start + static_cast<std::size_t>(cfg_.minibatch_size));

      // Policy pass: scored log-probs, loss, and gradients.
      policy_.zero_grads();
      std::vector<double> flat_new, flat_old, flat_adv;
      struct Slot {
        std::size_t traj;
        std::vector<std::int32_t> ids;
        model::Activations acts;
        std::vector<std::vector<double>> rows;  // per response token log-probs
      };
      std::vector<Slot> slots;
      for (std::size_t mi = mb_start; mi < mb_end; ++mi) {
        Trajectory& tr = trajs[order[mi]];
        Slot slot;
        slot.traj = order[mi];
        slot.ids.insert(slot.ids.end(), tr.prompt.begin(), tr.prompt.end());
        slot.ids.insert(slot.ids.end(), tr.response.begin(), tr.response.end());
        policy_.forward(slot.ids, slot.acts);
        lang::ResponseState rs(grammar_);
        for (std::size_t j = 0; j < tr.response.size(); ++j) {
          const double* row = slot.acts.logits.data() + (tr.prompt.size() + j - 1) * V;
          std::vector<std::uint8_t> mask;
          const std::uint8_t* mask_ptr = nullptr;
          if (rollout_decode_.constrained) {
            mask = rs.constrained_mask(
                static_cast<std::size_t>(rollout_decode_.max_new_tokens) - j);
            bool any = false;
            for (auto b : mask) any = any || b;
            if (any) mask_ptr = mask.data();
          }
          sampler::masked_log_softmax(row, V, rollout_decode_.temperature, mask_ptr,
                                      logp_row);
          slot.rows.push_back(logp_row);
          flat_new.push_back(logp_row[static_cast<std::size_t>(tr.response[j])]);
          flat_old.push_back(tr.logp_old[j]);
          flat_adv.push_back(tr.advantages[j]);
          rs.consume(tr.response[j]);
        }
        slots.push_back(std::move(slot));
      }
      const PolicyLossResult pl =
          policy_loss(flat_new, flat_old, flat_adv, cfg_.clip_epsilon);

      std::size_t flat = 0;
      for (Slot& slot : slots) {
        const Trajectory& tr = trajs[slot.traj];
        const std::size_t T = slot.ids.size();
        std::vector<double> dlogits(T * V, 0.0);
        for (std::size_t j = 0; j < tr.response.size(); ++j, ++flat) {
          const double gsc = pl.dlogp[flat];
          if (gsc == 0.0) continue;
          const std::size_t pos = tr.prompt.size() + j - 1;
          double* drow = dlogits.data() + pos * V;
          const auto& row = slot.rows[j];
          const double invt = 1.0 / temp;
          for (std::size_t vtok = 0; vtok < V; ++vtok) {
            if (row[vtok] <= -1e299) continue;  // masked out
            drow[vtok] -= gsc * std::exp(row[vtok]) * invt;
          }
          drow[static_cast<std::size_t>(tr.response[j])] += gsc * invt;
        }
        policy_.backward(slot.ids, slot.acts, dlogits);
      }
      sum_gnp += model::clip_grad_norm(policy_.grads(), cfg_.grad_clip);
      opt_policy_.step(policy_.params(), policy_.grads());

      // Value pass: MSE against the frozen returns.
      value_.zero_grads();
      std::vector<double> flat_vals, flat_rets;
      struct VSlot {
        std::size_t traj;
        std::vector<std::int32_t> ids;
        model::Activations acts;
      };
      std::vector<VSlot> vslots;
      for (std::size_t mi = mb_start; mi < mb_end; ++mi) {
        Trajectory& tr = trajs[order[mi]];
        VSlot slot;
        slot.traj = order[mi];
        slot.ids.insert(slot.ids.end(), tr.prompt.begin(), tr.prompt.end());
        slot.ids.insert(slot.ids.end(), tr.response.begin(), tr.response.end());
        value_.forward(slot.ids, slot.acts);
        for (std::size_t j = 0; j < tr.response.size(); ++j) {
          flat_vals.push_back(slot.acts.logits[tr.prompt.size() + j - 1]);
          flat_rets.push_back(tr.returns[j]);
        }
        vslots.push_back(std::move(slot));
      }
      const ValueLossResult vl = value_loss(flat_vals, flat_rets);
      flat = 0;
      for (VSlot& slot : vslots) {
        const Trajectory& tr = trajs[slot.traj];
        std::vector<double> dlogits(slot.ids.size(), 0.0);
        for (std::size_t j = 0; j < tr.response.size(); ++j, ++flat) {
          dlogits[tr.prompt.size() + j - 1] = vl.dvalues[flat];
        }
        value_.backward(slot.ids, slot.acts, dlogits);
      }
      sum_gnv += model::clip_grad_norm(value_.grads(), cfg_.grad_clip);
      opt_value_.step(value_.params(), value_.grads());

      sum_ploss += pl.loss;
      sum_vloss += vl.loss;
      sum_clip += pl.clip_fraction;
      ++updates;
    }
  }

  // --- Metrics ---
  double kl_sum = 0.0;
  std::int64_t tok_count = 0;
  double reward_sum = 0.0, len_sum = 0.0;
  std::map<std::string, double> comp_sums;
  for (const Trajectory& tr : trajs) {
    reward_sum += tr.rewards.total_sum();
    len_sum += static_cast<double>(tr.response.size());
    for (double x : tr.kl) kl_sum += x;
    tok_count += static_cast<std::int64_t>(tr.kl.size());
    for (const auto& [name, comp] : tr.rewards.components) {
      double s = 0.0;
      for (double x : comp) s += x;
      comp_sums[name] += s;
    }
    ++m.outcome_counts[sim::outcome_name(tr.outcome.kind)];
  }
  const double n_traj = static_cast<double>(trajs.size());
  m.mean_total_reward = reward_sum / n_traj;
  m.mean_response_len = len_sum / n_traj;
  m.kl_mean = tok_count > 0 ? kl_sum / static_cast<double>(tok_count) : 0.0;
  for (const auto& [name, s] : comp_sums) m.component_means[name] = s / n_traj;
  if (updates > 0) {
    m.policy_loss = sum_ploss / static_cast<double>(updates);
    m.value_loss = sum_vloss / static_cast<double>(updates);
    m.clip_fraction = sum_clip / static_cast<double>(updates);
    m.grad_norm_policy = sum_gnp / static_cast<double>(updates);
    m.grad_norm_value = sum_gnv / static_cast<double>(updates);
  }
  m.kl_early_stop_triggered = m.kl_mean > cfg_.kl_early_stop;
  last_batch_ = std::move(trajs);
  return m;
}

}  // namespace drs::ppo
