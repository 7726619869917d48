#include "drs/reward.hpp"

#include <cmath>

namespace drs::reward {

void RewardWeights::validate() const {
  auto nonneg = [](double x) { return x >= 0.0 && std::isfinite(x); };
  if (!nonneg(lambda_sync) || !nonneg(lambda_lint) || !nonneg(beta_kl)) {
    throw std::invalid_argument("reward weights must be non-negative");
  }
  double non_kl = lambda_sync + lambda_lint;
  for (const auto& [name, w] : lambda_opt) {
    if (!nonneg(w)) throw std::invalid_argument("reward weights must be non-negative");
    non_kl += w;
  }
  if (non_kl <= 0.0) {
    throw std::invalid_argument("at least one non-KL reward weight must be positive");
  }
}

double RewardVector::component_sum(const std::string& name) const {
  auto it = components.find(name);
  if (it == components.end()) return 0.0;
  double s = 0.0;
  for (double v : it->second) s += v;
  return s;
}

double RewardVector::total_sum() const {
  double s = 0.0;
  for (double v : total) s += v;
  return s;
}

std::vector<double> attribute_span(double score, lang::TokenRange span, double weight,
                                   std::size_t length) {
  if (span.end <= span.begin) throw EmptySpanError();
  if (span.begin < 0 || static_cast<std::size_t>(span.end) > length) {
    throw std::out_of_range("attribution span outside the token vector");
  }
  std::vector<double> out(length, 0.0);
  const double share = weight * score / static_cast<double>(span.end - span.begin);
  for (std::int32_t t = span.begin; t < span.end; ++t) {
    out[static_cast<std::size_t>(t)] = share;
  }
  return out;
}

std::vector<double> attribute_uniform(double score, double weight,
                                      const std::vector<std::uint8_t>& code_mask) {
  std::size_t count = 0;
  for (std::uint8_t m : code_mask) count += m ? 1 : 0;
  if (count == 0) {
    if (score != 0.0) throw NoCodeTokensError();
    return std::vector<double>(code_mask.size(), 0.0);
  }
  std::vector<double> out(code_mask.size(), 0.0);
  const double share = weight * score / static_cast<double>(count);
  for (std::size_t t = 0; t < code_mask.size(); ++t) {
    if (code_mask[t]) out[t] = share;
  }
  return out;
}

std::vector<double> kl_per_token(const std::vector<double>& logp_policy,
                                 const std::vector<double>& logp_ref) {
  if (logp_policy.size() != logp_ref.size()) throw LengthMismatchError();
  std::vector<double> out(logp_policy.size());
  for (std::size_t t = 0; t < out.size(); ++t) out[t] = logp_policy[t] - logp_ref[t];
  return out;
}

namespace {

void add_into(std::vector<double>& acc, const std::vector<double>& v) {
  for (std::size_t t = 0; t < acc.size(); ++t) acc[t] += v[t];
}

// Places weight*score uniformly over code tokens, or entirely on the last
// position when there are none (the EOS routing rule).
std::vector<double> uniform_or_eos(double score, double weight,
                                   const std::vector<std::uint8_t>& mask) {
  bool any = false;
  for (std::uint8_t m : mask) any = any || m;
  if (any || score == 0.0) return attribute_uniform(score, weight, mask);
  std::vector<double> out(mask.size(), 0.0);
  out.back() = weight * score;
  return out;
}

std::vector<double> at_eos(double value, std::size_t n) {
  std::vector<double> out(n, 0.0);
  out[n - 1] = value;
  return out;
}

}  // namespace

RewardVector compose(const ComposeInputs& in, const RewardWeights& w) {
  if (in.response == nullptr || in.response->size() == 0) {
    throw std::invalid_argument("compose requires a non-empty response");
  }
  const std::size_t n = in.response->size();
  if (in.syntax_scores.size() != n || in.kl.size() != n) throw LengthMismatchError();
  const auto& mask = in.response->code_mask;
  const bool has_code = in.response->any_code();

  RewardVector rv;

  // Syntax: already per-token; scores are confined to code tokens whenever a
  // code region exists.
  {
    double seq = 0.0;
    for (double s : in.syntax_scores) seq += s;
    std::vector<double> comp(n, 0.0);
    if (in.dense && has_code) {
      for (std::size_t t = 0; t < n; ++t) comp[t] = w.lambda_sync * in.syntax_scores[t];
    } else if (in.dense && seq != 0.0) {
      comp = at_eos(w.lambda_sync * seq, n);
    } else if (!in.dense) {
      comp = at_eos(w.lambda_sync * seq, n);
    }
    rv.components["sync"] = std::move(comp);
  }

  // Lint: per-diagnostic span attribution; deltas rescaled so the component
  // total equals the clamped lint score.
  {
    double raw = 0.0;
    for (const auto& d : in.diagnostics) raw += d.score_delta;
    const double clamped = lint::lint_score(in.diagnostics);
    const double rescale = (raw < clamped && raw != 0.0) ? clamped / raw : 1.0;
    std::vector<double> comp(n, 0.0);
    if (in.dense) {
      for (const auto& d : in.diagnostics) {
        add_into(comp, attribute_span(d.score_delta * rescale, d.token_span,
                                      w.lambda_lint, n));
      }
    } else {
      comp = at_eos(w.lambda_lint * clamped, n);
    }
    rv.components["lint"] = std::move(comp);
  }

  if (in.dfg_score) {
    rv.components["dfg"] = in.dense
                               ? uniform_or_eos(*in.dfg_score, w.opt("dfg"), mask)
                               : at_eos(w.opt("dfg") * *in.dfg_score, n);
  }
  if (in.test_score) {
    rv.components["test"] = in.dense
                                ? uniform_or_eos(*in.test_score, w.opt("test"), mask)
                                : at_eos(w.opt("test") * *in.test_score, n);
  }
  if (in.sim) {
    const auto& [score, span] = *in.sim;
    if (!in.dense) {
      rv.components["sim"] = at_eos(w.opt("sim") * score, n);
    } else if (span) {
      rv.components["sim"] = attribute_span(score, *span, w.opt("sim"), n);
    } else {
      rv.components["sim"] = uniform_or_eos(score, w.opt("sim"), mask);
    }
  }

  // KL enters at every token (the sole mask-exempt channel) with weight -beta.
  {
    std::vector<double> comp(n, 0.0);
    for (std::size_t t = 0; t < n; ++t) comp[t] = -w.beta_kl * in.kl[t];
    rv.components["kl"] = std::move(comp);
  }

  rv.total.assign(n, 0.0);
  for (const auto& [name, comp] : rv.components) add_into(rv.total, comp);
  return rv;
}

}  // namespace drs::reward
