#include "drs/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace drs::sampler {

void masked_log_softmax(const double* logits, std::size_t n, double temperature,
                        const std::uint8_t* mask, std::vector<double>& out) {
  const double invt = temperature > 0.0 ? 1.0 / temperature : 1.0;
  out.assign(n, -1e300);
  double mx = -1e300;
  for (std::size_t i = 0; i < n; ++i) {
    if (mask != nullptr && !mask[i]) continue;
    const double z = logits[i] * invt;
    out[i] = z;
    mx = z > mx ? z : mx;
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (out[i] > -1e299) sum += std::exp(out[i] - mx);
  }
  const double logz = std::log(sum) + mx;
  for (std::size_t i = 0; i < n; ++i) {
    if (out[i] > -1e299) out[i] -= logz;
  }
}

namespace {

bool any_set(const std::vector<std::uint8_t>& mask) {
  for (std::uint8_t m : mask) {
    if (m) return true;
  }
  return false;
}

// Greedy argmax over (masked) logits; first index wins ties.
std::size_t argmax(const std::vector<double>& logits, const std::uint8_t* mask) {
  std::size_t best = 0;
  double best_v = -1e300;
  bool found = false;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    if (mask != nullptr && !mask[i]) continue;
    if (!found || logits[i] > best_v) {
      best = i;
      best_v = logits[i];
      found = true;
    }
  }
  return best;
}

// Draws from the log-prob vector with nucleus truncation. The recorded
// log-prob stays logp[chosen]; top_p only prunes the draw.
std::size_t draw_top_p(const std::vector<double>& logp, double top_p,
                       std::mt19937_64& rng) {
  std::vector<std::size_t> order;
  order.reserve(logp.size());
  for (std::size_t i = 0; i < logp.size(); ++i) {
    if (logp[i] > -1e299) order.push_back(i);
  }
  std::sort(order.begin(), order.end(), [&logp](std::size_t a, std::size_t b) {
    if (logp[a] != logp[b]) return logp[a] > logp[b];
    return a < b;
  });
  double cum = 0.0;
  std::size_t keep = 0;
  for (; keep < order.size(); ++keep) {
    cum += std::exp(logp[order[keep]]);
    if (cum >= top_p) {
      ++keep;
      break;
    }
  }
  keep = std::max<std::size_t>(keep, 1);
  keep = std::min(keep, order.size());
  double mass = 0.0;
  for (std::size_t i = 0; i < keep; ++i) mass += std::exp(logp[order[i]]);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double r = unit(rng) * mass;
  for (std::size_t i = 0; i < keep; ++i) {
    r -= std::exp(logp[order[i]]);
    if (r <= 0.0) return order[i];
  }
  return order[keep - 1];
}

}  // namespace

SampleResult sample(const model::Net& policy, const lang::Grammar& grammar,
                    const std::vector<lang::TokenId>& prompt,
                    const DecodingConfig& cfg, std::mt19937_64& rng) {
  const lang::Vocab& vocab = grammar.vocab();
  SampleResult res;
  model::Net::DecodeState ds = policy.decode_start();
  std::vector<double> logits;
  for (lang::TokenId id : prompt) policy.decode_step(ds, id, logits);

  lang::ResponseState rs(grammar);
  std::vector<double> logp_row;
  for (std::int32_t step = 0; step < cfg.max_new_tokens; ++step) {
    if (ds.len >= policy.config().max_seq) {
      res.truncated = true;
      return res;
    }
    const std::size_t budget_left = static_cast<std::size_t>(cfg.max_new_tokens - step);
    std::vector<std::uint8_t> mask;
    const std::uint8_t* mask_ptr = nullptr;
    if (cfg.constrained) {
      mask = rs.constrained_mask(budget_left);
      if (!any_set(mask)) {
        // Degenerate mask: emit EOS under the unmasked distribution and flag.
        res.degenerate_mask = true;
        masked_log_softmax(logits.data(), logits.size(), cfg.temperature, nullptr,
                           logp_row);
        res.response.push_back(vocab.eos());
        res.logp.push_back(logp_row[static_cast<std::size_t>(vocab.eos())]);
        res.syntax.push_back(rs.consume(vocab.eos()));
        return res;
      }
      mask_ptr = mask.data();
    }

    masked_log_softmax(logits.data(), logits.size(), cfg.temperature, mask_ptr,
                       logp_row);
    std::size_t chosen;
    if (cfg.temperature <= 0.0) {
      chosen = argmax(logits, mask_ptr);
    } else {
      chosen = draw_top_p(logp_row, cfg.top_p, rng);
    }

    const auto tok = static_cast<lang::TokenId>(chosen);
    res.response.push_back(tok);
    res.logp.push_back(logp_row[chosen]);
    res.syntax.push_back(rs.consume(tok));
    if (tok == vocab.eos()) return res;
    policy.decode_step(ds, tok, logits);
  }
  res.truncated = true;
  return res;
}

std::vector<double> score_logp(const model::Net& net, const lang::Grammar& grammar,
                               const std::vector<lang::TokenId>& prompt,
                               const std::vector<lang::TokenId>& response,
                               const DecodingConfig& cfg) {
  std::vector<std::int32_t> ids;
  ids.reserve(prompt.size() + response.size());
  ids.insert(ids.end(), prompt.begin(), prompt.end());
  ids.insert(ids.end(), response.begin(), response.end());
  model::Activations acts;
  net.forward(ids, acts);

  const auto V = static_cast<std::size_t>(net.config().head_out);
  std::vector<double> out(response.size(), 0.0);
  std::vector<double> logp_row;
  lang::ResponseState rs(grammar);
  for (std::size_t i = 0; i < response.size(); ++i) {
    const std::size_t pos = prompt.size() + i - 1;
    const double* row = acts.logits.data() + pos * V;
    std::vector<std::uint8_t> mask;
    const std::uint8_t* mask_ptr = nullptr;
    if (cfg.constrained) {
      mask = rs.constrained_mask(static_cast<std::size_t>(cfg.max_new_tokens) - i);
      if (any_set(mask)) mask_ptr = mask.data();
    }
    masked_log_softmax(row, V, cfg.temperature, mask_ptr, logp_row);
    out[i] = logp_row[static_cast<std::size_t>(response[i])];
    rs.consume(response[i]);
  }
  return out;
}

std::vector<double> response_values(const model::Net& value_net,
                                    const std::vector<lang::TokenId>& prompt,
                                    const std::vector<lang::TokenId>& response) {
  std::vector<std::int32_t> ids;
  ids.reserve(prompt.size() + response.size());
  ids.insert(ids.end(), prompt.begin(), prompt.end());
  ids.insert(ids.end(), response.begin(), response.end());
  model::Activations acts;
  value_net.forward(ids, acts);
  std::vector<double> out(response.size(), 0.0);
  for (std::size_t i = 0; i < response.size(); ++i) {
    out[i] = acts.logits[prompt.size() + i - 1];
  }
  return out;
}

}  // namespace drs::sampler
