#ifndef DRS_REWARD_HPP_
#define DRS_REWARD_HPP_

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "drs/lint.hpp"
#include "drs/tokenizer.hpp"

namespace drs::reward {

struct EmptySpanError : std::runtime_error {
  EmptySpanError() : std::runtime_error("attribution span is empty") {}
};
struct NoCodeTokensError : std::runtime_error {
  NoCodeTokensError()
      : std::runtime_error("nonzero score with an all-false code mask") {}
};
struct LengthMismatchError : std::runtime_error {
  LengthMismatchError() : std::runtime_error("per-token vector length mismatch") {}
};

// Tunable coefficients of the composite reward. beta_kl is the KL
// coefficient; lambda_opt holds the optional task-specific channels
// ("dfg", "test", "sim").
struct RewardWeights {
  double lambda_sync = 0.0;
  double lambda_lint = 0.0;
  double beta_kl = 0.0;
  std::map<std::string, double> lambda_opt;

  double opt(const std::string& name) const {
    auto it = lambda_opt.find(name);
    return it == lambda_opt.end() ? 0.0 : it->second;
  }
  void validate() const;
};

// Dense per-token reward with a per-component breakdown for auditing.
// total[t] == sum over components of components[c][t].
struct RewardVector {
  std::vector<double> total;
  std::map<std::string, std::vector<double>> components;

  std::size_t size() const { return total.size(); }
  double component_sum(const std::string& name) const;
  double total_sum() const;
};

// weight*score divided equally over the span's tokens; zeros elsewhere.
std::vector<double> attribute_span(double score, lang::TokenRange span, double weight,
                                   std::size_t length);

// weight*score / (#masked) on masked positions; zeros elsewhere.
// Throws NoCodeTokensError when score != 0 and the mask is all false —
// compose() routes such scores to the EOS position instead.
std::vector<double> attribute_uniform(double score, double weight,
                                      const std::vector<std::uint8_t>& code_mask);

// Per-token k1 estimator: logp_policy[t] - logp_ref[t].
std::vector<double> kl_per_token(const std::vector<double>& logp_policy,
                                 const std::vector<double>& logp_ref);

struct ComposeInputs {
  const lang::TokenizedProgram* response = nullptr;  // defines length and mask
  std::vector<double> syntax_scores;                 // per-token, response coords
  std::vector<lint::Diagnostic> diagnostics;         // spans in response coords
  std::optional<double> dfg_score;
  std::optional<double> test_score;
  std::optional<std::pair<double, std::optional<lang::TokenRange>>> sim;
  std::vector<double> kl;
  bool dense = true;  // false: every non-KL channel lands on the EOS position
};

// The weighted composite reward of the paper with span/uniform attribution.
// Span-attributable scores land on responsible tokens, sequence-level scores
// spread uniformly over code tokens, non-code tokens get nothing, and KL is
// the sole mask-exempt channel (applied at every token with weight -beta).
// A nonzero sequence score with an all-false code mask is routed to the last
// response position so the signal is never dropped.
RewardVector compose(const ComposeInputs& in, const RewardWeights& w);

}  // namespace drs::reward

#endif  // DRS_REWARD_HPP_
