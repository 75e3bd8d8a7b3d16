#pragma once

#include <cstdint>
#include <vector>

#include "pmp/common.hpp"

namespace pmp::trainer {

struct GaeResult {
  VectorXd advantages;
  VectorXd returns;  // advantages + values, the value-regression target
};

/// Generalized advantage estimation over one trajectory segment. `values`
/// carries one bootstrap entry beyond the last reward; a set done flag cuts
/// both the bootstrap and the recursion at that step.
inline GaeResult compute_gae(const VectorXd& rewards, const VectorXd& values,
                             const std::vector<char>& dones, double gamma,
                             double lam) {
  const Eigen::Index t_len = rewards.size();
  if (values.size() != t_len + 1 || static_cast<Eigen::Index>(dones.size()) != t_len)
    throw ConfigError("compute_gae: length mismatch");
  GaeResult out;
  out.advantages.resize(t_len);
  double acc = 0.0;
  for (Eigen::Index t = t_len - 1; t >= 0; --t) {
    const double live = dones[static_cast<std::size_t>(t)] ? 0.0 : 1.0;
    const double delta = rewards[t] + gamma * live * values[t + 1] - values[t];
    acc = delta + gamma * lam * live * acc;
    out.advantages[t] = acc;
  }
  out.returns = out.advantages + values.head(t_len);
  return out;
}

}  // namespace pmp::trainer
