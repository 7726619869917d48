#ifndef DRS_GAE_HPP_
#define DRS_GAE_HPP_

#include <stdexcept>
#include <vector>

namespace drs::ppo {

struct GaeLengthMismatchError : std::runtime_error {
  GaeLengthMismatchError() : std::runtime_error("rewards/values length mismatch") {}
};

struct GaeResult {
  std::vector<double> advantages;
  std::vector<double> returns;  // advantages + values
};

// GAE(gamma, lambda) with terminal bootstrap V_n := 0:
//   delta_t = r_t + gamma*V_{t+1} - V_t
//   A_t     = delta_t + gamma*lambda*A_{t+1}
GaeResult gae(const std::vector<double>& rewards, const std::vector<double>& values,
              double gamma, double lambda);

// Subtract the mean and divide by the population std (+1e-8) across all
// entries of all vectors jointly (the rollout batch).
void whiten(std::vector<std::vector<double>*> batches);

struct PolicyLossResult {
  double loss = 0.0;
  double clip_fraction = 0.0;
  std::vector<double> dlogp;  // d(loss)/d(logp_new)
};

// Clipped PPO surrogate in minimize form: -mean_t min(rho*A, clip(rho)*A)
// with rho = exp(logp_new - logp_old).
PolicyLossResult policy_loss(const std::vector<double>& logp_new,
                             const std::vector<double>& logp_old,
                             const std::vector<double>& advantages, double epsilon);

struct ValueLossResult {
  double loss = 0.0;
  std::vector<double> dvalues;
};

// Mean squared error over response tokens.
ValueLossResult value_loss(const std::vector<double>& values_new,
                           const std::vector<double>& returns);

}  // namespace drs::ppo

#endif  // DRS_GAE_HPP_
