#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "pmp/common.hpp"
#include "pmp/net/adam.hpp"
#include "pmp/net/checkpoint.hpp"
#include "pmp/net/mlp.hpp"

namespace pmp::trainer {

/// Diagonal Gaussian policy: an MLP mean head plus state-independent
/// log standard deviations.
struct GaussianPolicy {
  net::Mlp mean;
  VectorXd log_std;

  static GaussianPolicy make(int obs_dim, int action_dim, const std::vector<int>& hidden,
                             Rng& rng, double log_std_init = -1.0) {
    GaussianPolicy p;
    std::vector<int> widths;
    widths.push_back(obs_dim);
    for (int h : hidden) widths.push_back(h);
    widths.push_back(action_dim);
    // Small final layer keeps early actions near zero.
    p.mean = net::Mlp::make(widths, net::Activation::Tanh, net::Activation::Identity, rng,
                            /*final_scale=*/0.01);
    p.log_std = VectorXd::Constant(action_dim, log_std_init);
    return p;
  }

  int obs_dim() const { return mean.input_dim(); }
  int action_dim() const { return mean.output_dim(); }

  VectorXd mean_action(const VectorXd& obs) const { return mean.forward(obs); }

  VectorXd sample(const VectorXd& obs, Rng& rng) const {
    const VectorXd mu = mean.forward(obs);
    VectorXd a(mu.size());
    for (Eigen::Index i = 0; i < mu.size(); ++i)
      a[i] = mu[i] + std::exp(log_std[i]) * rng.normal();
    return a;
  }

  double log_prob_from_mean(const VectorXd& mu, const VectorXd& action) const {
    double lp = 0.0;
    for (Eigen::Index i = 0; i < mu.size(); ++i) {
      const double s = std::exp(log_std[i]);
      const double z = (action[i] - mu[i]) / s;
      lp += -0.5 * z * z - log_std[i] - 0.5 * std::log(2.0 * M_PI);
    }
    return lp;
  }

  double log_prob(const VectorXd& obs, const VectorXd& action) const {
    return log_prob_from_mean(mean.forward(obs), action);
  }

  double entropy() const {
    return log_std.sum() +
           0.5 * static_cast<double>(log_std.size()) * std::log(2.0 * M_PI * std::exp(1.0));
  }
};

inline void save_policy(net::TensorFile& tf, const std::string& prefix,
                        const GaussianPolicy& p) {
  net::put_mlp(tf, prefix + ".mean", p.mean);
  tf.put(prefix + ".log_std", p.log_std);
}

inline GaussianPolicy load_policy(const net::TensorFile& tf, const std::string& prefix) {
  GaussianPolicy p;
  p.mean = net::get_mlp(tf, prefix + ".mean");
  p.log_std = tf.get_vector(prefix + ".log_std");
  if (p.log_std.size() != p.mean.output_dim())
    throw IoError("policy checkpoint: log_std dimension mismatch");
  return p;
}

/// Per-sample clipped surrogate objective (to be maximized).
inline double clipped_objective(double ratio, double advantage, double clip) {
  return std::min(ratio * advantage,
                  clampd(ratio, 1.0 - clip, 1.0 + clip) * advantage);
}

struct PpoConfig {
  double lr = 5e-5;
  double gamma = 0.99;
  double lam = 0.95;
  double clip = 0.2;
  double kl_threshold = 0.008;
  int epochs = 5;
  int minibatch = 256;
  double value_coef = 0.5;
  double entropy_coef = 0.0;
  int horizon = 16;
  int env_count = 64;
  int demo_capacity = 200000;
  int replay_capacity = 1000000;
  int disc_batch = 256;
  double disc_lr = 5e-5;
  double lambda_demo = -1.0;  // negative = auto: 0.1 when parts > 2, else 0

  int batch_size() const { return horizon * env_count; }

  void validate() const {
    if (!(gamma > 0.0 && gamma <= 1.0)) throw ConfigError("ppo: gamma out of (0,1]");
    if (!(lam >= 0.0 && lam <= 1.0)) throw ConfigError("ppo: lambda out of [0,1]");
    if (clip <= 0.0) throw ConfigError("ppo: clip must be positive");
    if (lr <= 0.0 || disc_lr <= 0.0) throw ConfigError("ppo: learning rates must be positive");
    if (horizon <= 0 || env_count <= 0 || epochs <= 0 || minibatch <= 0)
      throw ConfigError("ppo: sizes must be positive");
    if (demo_capacity <= 0 || replay_capacity <= 0 || disc_batch <= 0)
      throw ConfigError("ppo: buffer sizes must be positive");
    if (lambda_demo > 1.0) throw ConfigError("ppo: lambda_demo above 1");
  }
};

/// Flat sample batch for one PPO update.
struct PpoBatch {
  MatrixXd obs;       // obs_dim x N
  MatrixXd actions;   // act_dim x N
  VectorXd logp;      // behavior log-probs
  VectorXd advantages;
  VectorXd returns;
};

struct PpoStats {
  double policy_loss = 0.0;
  double value_loss = 0.0;
  double approx_kl = 0.0;
  double clip_fraction = 0.0;
  double entropy = 0.0;
  int epochs_run = 0;
};

/// In-place batch advantage normalization to zero mean, unit deviation.
inline void normalize_advantages(VectorXd& adv) {
  const double mu = adv.mean();
  adv.array() -= mu;
  const double sd = std::sqrt(adv.squaredNorm() / static_cast<double>(adv.size()));
  if (sd > 1e-12) adv /= sd;
}

/// One PPO update: several epochs of clipped-surrogate minibatch Adam steps
/// on the policy and value nets, stopping early once the approximate KL to
/// the behavior policy exceeds the threshold.
inline PpoStats ppo_update(const PpoBatch& batch, GaussianPolicy& policy,
                           net::Mlp& value, net::Adam& policy_opt,
                           net::AdamVec& log_std_opt, net::Adam& value_opt,
                           const PpoConfig& cfg, Rng& rng) {
  const Eigen::Index n = batch.obs.cols();
  if (n == 0) throw ConfigError("ppo_update: empty batch");
  if (batch.actions.cols() != n || batch.logp.size() != n ||
      batch.advantages.size() != n || batch.returns.size() != n)
    throw ConfigError("ppo_update: misaligned batch");

  VectorXd adv = batch.advantages;
  normalize_advantages(adv);

  const Eigen::Index act_dim = policy.action_dim();
  PpoStats stats;

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    // Deterministic shuffle from the run seed.
    for (std::size_t i = order.size(); i > 1; --i)
      std::swap(order[i - 1], order[rng.index(i)]);

    for (Eigen::Index start = 0; start < n; start += cfg.minibatch) {
      const Eigen::Index count = std::min<Eigen::Index>(cfg.minibatch, n - start);
      MatrixXd obs(batch.obs.rows(), count), act(act_dim, count);
      VectorXd old_logp(count), a_mb(count), ret(count);
      for (Eigen::Index i = 0; i < count; ++i) {
        const Eigen::Index s = order[static_cast<std::size_t>(start + i)];
        obs.col(i) = batch.obs.col(s);
        act.col(i) = batch.actions.col(s);
        old_logp[i] = batch.logp[s];
        a_mb[i] = adv[s];
        ret[i] = batch.returns[s];
      }

      // Policy pass: surrogate gradient through the mean head and log_std.
      net::ForwardTrace trace = net::forward_trace(policy.mean, obs);
      const MatrixXd& mu = trace.a.back();
      MatrixXd mean_grad = MatrixXd::Zero(act_dim, count);
      VectorXd log_std_grad = VectorXd::Zero(act_dim);
      double surrogate = 0.0;
      int clipped = 0;
      for (Eigen::Index i = 0; i < count; ++i) {
        const double new_logp = policy.log_prob_from_mean(mu.col(i), act.col(i));
        const double ratio = std::exp(new_logp - old_logp[i]);
        const double unclipped = ratio * a_mb[i];
        const double clamped = clampd(ratio, 1.0 - cfg.clip, 1.0 + cfg.clip) * a_mb[i];
        surrogate += std::min(unclipped, clamped);
        const bool use_unclipped = unclipped <= clamped;
        if (!use_unclipped) ++clipped;
        // d(-objective)/d new_logp, zero on the clipped branch.
        const double dlogp = use_unclipped ? -ratio * a_mb[i] / static_cast<double>(count) : 0.0;
        for (Eigen::Index j = 0; j < act_dim; ++j) {
          const double sd = std::exp(policy.log_std[j]);
          const double z = (act(j, i) - mu(j, i)) / sd;
          mean_grad(j, i) = dlogp * z / sd;               // dlogp/dmu = z/sd
          log_std_grad[j] += dlogp * (z * z - 1.0);       // dlogp/dlogsd = z^2-1
        }
      }
      log_std_grad.array() -= cfg.entropy_coef;  // entropy bonus acts on log_std only
      net::Gradients pg = net::backprop(policy.mean, trace, mean_grad);
      policy_opt.step(policy.mean, pg);
      log_std_opt.step(policy.log_std, log_std_grad);
      stats.policy_loss = -surrogate / static_cast<double>(count);
      stats.clip_fraction = static_cast<double>(clipped) / static_cast<double>(count);

      // Value regression toward the GAE returns.
      net::LossSpec vs;
      vs.kind = net::LossSpec::Kind::Mse;
      vs.targets = ret.transpose();
      net::LossGradients vg = net::param_gradients(value, vs, obs);
      for (auto& wgrad : vg.grads.w) wgrad *= cfg.value_coef;
      for (auto& bgrad : vg.grads.b) bgrad *= cfg.value_coef;
      value_opt.step(value, vg.grads);
      stats.value_loss = vg.value;
    }
    stats.epochs_run = epoch + 1;

    // Full-batch approximate KL gate.
    const MatrixXd mu_all = policy.mean.forward_batch(batch.obs);
    double kl = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
      kl += batch.logp[i] - policy.log_prob_from_mean(mu_all.col(i), batch.actions.col(i));
    stats.approx_kl = kl / static_cast<double>(n);
    if (stats.approx_kl > cfg.kl_threshold) break;
  }
  stats.entropy = policy.entropy();
  if (!std::isfinite(stats.policy_loss) || !std::isfinite(stats.value_loss))
    throw TrainingDivergedError("ppo_update: non-finite loss");
  return stats;
}

}  // namespace pmp::trainer
