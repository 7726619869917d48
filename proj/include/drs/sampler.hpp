#ifndef DRS_SAMPLER_HPP_
#define DRS_SAMPLER_HPP_

#include <random>
#include <vector>

#include "drs/grammar.hpp"
#include "drs/model.hpp"
#include "drs/vocab.hpp"

namespace drs::sampler {

struct DecodingConfig {
  double temperature = 1.0;  // 0 means exact greedy argmax
  double top_p = 0.95;       // nucleus truncation, affects selection only
  std::int32_t max_new_tokens = 56;
  bool constrained = false;  // grammar-mask illegal next tokens
};

struct SampleResult {
  std::vector<lang::TokenId> response;  // ends with EOS unless truncated
  std::vector<double> logp;             // sampled-time log-probs (decode path)
  std::vector<double> syntax;           // per-token syntax scores
  bool degenerate_mask = false;
  bool truncated = false;
};

// Autoregressive sampling from the policy. Log-probs are recorded under the
// (possibly grammar-masked) temperature softmax; top-p truncation only
// affects which token is drawn. When constrained, the mask additionally
// requires that the response can still close within the remaining budget;
// an all-false mask emits EOS and flags the trajectory.
SampleResult sample(const model::Net& policy, const lang::Grammar& grammar,
                    const std::vector<lang::TokenId>& prompt,
                    const DecodingConfig& cfg, std::mt19937_64& rng);

// Recomputes the per-token log-probs of `response` given `prompt` with a
// full forward pass under the same decode distribution (mask + temperature).
// This is the path PPO optimizes through, and it matches sampled-time values
// to ~1e-10.
std::vector<double> score_logp(const model::Net& net, const lang::Grammar& grammar,
                               const std::vector<lang::TokenId>& prompt,
                               const std::vector<lang::TokenId>& response,
                               const DecodingConfig& cfg);

// Per-position value estimates for response tokens: value-head output at the
// position of each response token's preceding context.
std::vector<double> response_values(const model::Net& value_net,
                                    const std::vector<lang::TokenId>& prompt,
                                    const std::vector<lang::TokenId>& response);

// Shared helper: log-softmax of one logits row after optional masking and
// temperature scaling. mask may be null; temperature 0 is treated as 1
// (callers handle greedy argmax themselves).
void masked_log_softmax(const double* logits, std::size_t n, double temperature,
                        const std::uint8_t* mask, std::vector<double>& out);

}  // namespace drs::sampler

#endif  // DRS_SAMPLER_HPP_
