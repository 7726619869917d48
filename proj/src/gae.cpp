#include "drs/gae.hpp"

#include <cmath>

namespace drs::ppo {

GaeResult gae(const std::vector<double>& rewards, const std::vector<double>& values,
              double gamma, double lambda) {
  if (rewards.size() != values.size()) throw GaeLengthMismatchError();
  const std::size_t n = rewards.size();
  GaeResult out;
  out.advantages.assign(n, 0.0);
  out.returns.assign(n, 0.0);
  double next_adv = 0.0;
  for (std::size_t i = n; i-- > 0;) {
    const double next_value = i + 1 < n ? values[i + 1] : 0.0;
    const double delta = rewards[i] + gamma * next_value - values[i];
    next_adv = delta + gamma * lambda * next_adv;
    out.advantages[i] = next_adv;
    out.returns[i] = next_adv + values[i];
  }
  return out;
}

void whiten(std::vector<std::vector<double>*> batches) {
  std::size_t n = 0;
  double mean = 0.0;
  for (const auto* b : batches) {
    for (double x : *b) {
      mean += x;
      ++n;
    }
  }
  if (n < 2) return;
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (const auto* b : batches) {
    for (double x : *b) {
      const double c = x - mean;
      var += c * c;
    }
  }
  var /= static_cast<double>(n);
  const double inv = 1.0 / (std::sqrt(var) + 1e-8);
  for (auto* b : batches) {
    for (double& x : *b) x = (x - mean) * inv;
  }
}

PolicyLossResult policy_loss(const std::vector<double>& logp_new,
                             const std::vector<double>& logp_old,
                             const std::vector<double>& advantages, double epsilon) {
  if (logp_new.size() != logp_old.size() || logp_new.size() != advantages.size()) {
    throw GaeLengthMismatchError();
  }
  const std::size_t n = logp_new.size();
  PolicyLossResult out;
  out.dlogp.assign(n, 0.0);
  if (n == 0) return out;
  const double inv_n = 1.0 / static_cast<double>(n);
  double loss = 0.0;
  std::size_t clipped = 0;
  for (std::size_t t = 0; t < n; ++t) {
    const double rho = std::exp(logp_new[t] - logp_old[t]);
    const double a = advantages[t];
    const double surr1 = rho * a;
    const double clipped_rho =
        rho < 1.0 - epsilon ? 1.0 - epsilon : (rho > 1.0 + epsilon ? 1.0 + epsilon : rho);
    const double surr2 = clipped_rho * a;
    loss -= inv_n * (surr1 < surr2 ? surr1 : surr2);
    if (surr1 <= surr2) {
      out.dlogp[t] = -inv_n * surr1;  // d(rho*A)/dlogp == rho*A
    }
    if (std::abs(rho - 1.0) > epsilon) ++clipped;
  }
  out.loss = loss;
  out.clip_fraction = static_cast<double>(clipped) / static_cast<double>(n);
  return out;
}

ValueLossResult value_loss(const std::vector<double>& values_new,
                           const std::vector<double>& returns) {
  if (values_new.size() != returns.size()) throw GaeLengthMismatchError();
  const std::size_t n = values_new.size();
  ValueLossResult out;
  out.dvalues.assign(n, 0.0);
  if (n == 0) return out;
  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t t = 0; t < n; ++t) {
    const double diff = values_new[t] - returns[t];
    out.loss += inv_n * diff * diff;
    out.dvalues[t] = 2.0 * inv_n * diff;
  }
  return out;
}

}  // namespace drs::ppo
