#pragma once

#include <memory>
#include <string>
#include <vector>

#include "pmp/common.hpp"
#include "pmp/envs/env.hpp"
#include "pmp/motion/buffers.hpp"
#include "pmp/net/checkpoint.hpp"
#include "pmp/style/discriminator.hpp"
#include "pmp/trainer/gae.hpp"
#include "pmp/trainer/metrics.hpp"
#include "pmp/trainer/policy.hpp"

namespace pmp::trainer {

/// Style-path observations captured with one transition.
struct StyleSample {
  std::vector<motion::ObservationPair> parts;
  std::vector<envs::HandSignal> hands;
};

/// One horizon of transitions across every rollout environment. Columns are
/// env-major: sample (e, t) sits at column e*horizon + t.
struct RolloutBatch {
  int horizon = 0;
  int env_count = 0;
  MatrixXd obs;
  MatrixXd actions;
  VectorXd logp;
  VectorXd values;
  VectorXd task_rewards;
  VectorXd style_rewards;
  VectorXd rewards;
  std::vector<char> dones;
  VectorXd bootstrap;  // V(s_T) per env
  std::vector<StyleSample> style;
  int incidents = 0;  // simulation divergences hit during collection

  Eigen::Index size() const { return static_cast<Eigen::Index>(horizon) * env_count; }
  Eigen::Index at(int e, int t) const {
    return static_cast<Eigen::Index>(e) * horizon + t;
  }
};

/// Collects `horizon` stochastic-policy steps from every environment.
/// Episodes ending mid-horizon reset immediately; a diverged simulation is
/// treated as a zero-reward terminal step and counted as an incident.
inline RolloutBatch run_rollout(std::vector<std::unique_ptr<envs::Env>>& envs,
                                std::vector<Rng>& env_rngs, std::vector<VectorXd>& cur_obs,
                                const GaussianPolicy& policy, const net::Mlp& value,
                                int horizon, Rng& action_rng) {
  const int env_count = static_cast<int>(envs.size());
  if (env_count == 0 || horizon <= 0) throw ConfigError("run_rollout: nothing to collect");
  if (env_rngs.size() != envs.size() || cur_obs.size() != envs.size())
    throw ConfigError("run_rollout: per-env state misaligned");

  RolloutBatch b;
  b.horizon = horizon;
  b.env_count = env_count;
  const Eigen::Index n = b.size();
  b.obs.resize(envs[0]->obs_dim(), n);
  b.actions.resize(envs[0]->action_dim(), n);
  b.logp.resize(n);
  b.values.resize(n);
  b.task_rewards.resize(n);
  b.style_rewards = VectorXd::Zero(n);
  b.rewards = VectorXd::Zero(n);
  b.dones.assign(static_cast<std::size_t>(n), 0);
  b.bootstrap.resize(env_count);
  b.style.resize(static_cast<std::size_t>(n));

  for (int t = 0; t < horizon; ++t) {
    for (int e = 0; e < env_count; ++e) {
      const Eigen::Index i = b.at(e, t);
      const VectorXd& obs = cur_obs[static_cast<std::size_t>(e)];
      b.obs.col(i) = obs;
      b.values[i] = value.forward(obs)[0];
      const VectorXd mu = policy.mean_action(obs);
      VectorXd a(mu.size());
      for (Eigen::Index j = 0; j < mu.size(); ++j)
        a[j] = mu[j] + std::exp(policy.log_std[j]) * action_rng.normal();
      b.actions.col(i) = a;
      b.logp[i] = policy.log_prob_from_mean(mu, a);

      Rng& er = env_rngs[static_cast<std::size_t>(e)];
      try {
        envs::StepResult sr = envs[static_cast<std::size_t>(e)]->step(a, er);
        b.task_rewards[i] = sr.task_reward;
        b.dones[static_cast<std::size_t>(i)] = sr.done ? 1 : 0;
        const envs::StyleSignals& sig = envs[static_cast<std::size_t>(e)]->style_signals();
        b.style[static_cast<std::size_t>(i)] = StyleSample{sig.part_pairs, sig.hands};
        cur_obs[static_cast<std::size_t>(e)] =
            sr.done ? envs[static_cast<std::size_t>(e)]->reset(er) : sr.obs;
      } catch (const SimDivergedError&) {
        ++b.incidents;
        b.task_rewards[i] = 0.0;
        b.dones[static_cast<std::size_t>(i)] = 1;
        cur_obs[static_cast<std::size_t>(e)] = envs[static_cast<std::size_t>(e)]->reset(er);
      }
    }
  }
  for (int e = 0; e < env_count; ++e)
    b.bootstrap[e] = value.forward(cur_obs[static_cast<std::size_t>(e)])[0];
  return b;
}

/// Per-stream reward diagnostics gathered while assembling the style reward.
struct StreamDiagnostics {
  std::vector<double> mean_reward;  // per discriminator stream
  std::vector<long> samples;        // contributing sample count per stream
  double sigma_mean = 0.0;          // mean hand proximity over hand samples
  long sigma_samples = 0;
};

/// Fills the style and total reward columns from the current discriminators.
/// Samples without style observations (diverged steps, pure-task setups)
/// contribute zero style reward.
inline StreamDiagnostics assemble_rewards(RolloutBatch& b, const style::DiscriminatorSet& discs,
                                          const style::RewardWeights& w,
                                          style::BlendMode mode) {
  StreamDiagnostics diag;
  diag.mean_reward.assign(static_cast<std::size_t>(discs.count()), 0.0);
  diag.samples.assign(static_cast<std::size_t>(discs.count()), 0);
  const Eigen::Index n = b.size();
  for (Eigen::Index i = 0; i < n; ++i) {
    const StyleSample& s = b.style[static_cast<std::size_t>(i)];
    double rs = 0.0;
    if (!s.parts.empty() || !s.hands.empty()) {
      std::vector<double> part_reward(static_cast<std::size_t>(discs.count()), 0.0);
      std::vector<bool> hand_part(static_cast<std::size_t>(discs.count()), false);
      for (const envs::HandSignal& h : s.hands) {
        if (h.part < 0 || h.part >= discs.count())
          throw ConfigError("assemble_rewards: hand style part out of range");
        hand_part[static_cast<std::size_t>(h.part)] = true;
      }
      for (const motion::ObservationPair& p : s.parts) {
        if (p.part < 0 || p.part >= discs.count())
          throw ConfigError("assemble_rewards: part id out of range");
        const double r = discs.reward(p.part, p);
        part_reward[static_cast<std::size_t>(p.part)] = r;
        diag.mean_reward[static_cast<std::size_t>(p.part)] += r;
        ++diag.samples[static_cast<std::size_t>(p.part)];
      }
      std::vector<double> body;
      body.reserve(s.parts.size());
      for (const motion::ObservationPair& p : s.parts)
        if (!hand_part[static_cast<std::size_t>(p.part)])
          body.push_back(part_reward[static_cast<std::size_t>(p.part)]);
      std::vector<style::HandBlend> hands;
      hands.reserve(s.hands.size());
      for (const envs::HandSignal& h : s.hands) {
        style::HandBlend hb;
        hb.sigma = h.sigma;
        hb.style = part_reward[static_cast<std::size_t>(h.part)];
        hb.interaction = discs.reward(h.uy.part, h.uy) + w.interaction_offset;
        hands.push_back(hb);
        diag.mean_reward[static_cast<std::size_t>(h.uy.part)] += hb.interaction;
        ++diag.samples[static_cast<std::size_t>(h.uy.part)];
        diag.sigma_mean += h.sigma;
        ++diag.sigma_samples;
      }
      rs = style::blended_style_reward(body, hands, w.scale, mode);
    }
    b.style_rewards[i] = rs;
    b.rewards[i] = style::total_reward(b.task_rewards[i], rs, w);
  }
  for (std::size_t k = 0; k < diag.mean_reward.size(); ++k)
    if (diag.samples[k] > 0) diag.mean_reward[k] /= static_cast<double>(diag.samples[k]);
  if (diag.sigma_samples > 0) diag.sigma_mean /= static_cast<double>(diag.sigma_samples);
  return diag;
}

/// Pushes every style observation of the batch into the per-stream replay.
inline void push_agent_pairs(const RolloutBatch& b, motion::PartBuffers& buffers) {
  for (const StyleSample& s : b.style) {
    for (const motion::ObservationPair& p : s.parts)
      buffers.replay.at(static_cast<std::size_t>(p.part)).push(p);
    for (const envs::HandSignal& h : s.hands)
      buffers.replay.at(static_cast<std::size_t>(h.uy.part)).push(h.uy);
  }
}

/// One adversarial round: a single weighted-loss optimizer step per
/// discriminator stream, demo batches drawn from the reference buffers and
/// agent batches from replay with the demo-substitution blend applied.
/// Returns exactly one loss record per stream.
inline std::vector<style::DiscLossTerms> update_discriminators(
    style::DiscriminatorSet& discs, motion::PartBuffers& buffers, int batch,
    double lambda_d, const style::RewardWeights& w, Rng& rng) {
  if (batch <= 0) throw ConfigError("update_discriminators: batch must be positive");
  std::vector<style::DiscLossTerms> stats(static_cast<std::size_t>(discs.count()));
  for (int k = 0; k < discs.count(); ++k) {
    const auto& demo_buf = buffers.demo.at(static_cast<std::size_t>(k));
    const auto& replay_buf = buffers.replay.at(static_cast<std::size_t>(k));
    if (demo_buf.empty() || replay_buf.empty()) continue;  // stream not active yet
    std::vector<motion::ObservationPair> demo, agent;
    demo.reserve(static_cast<std::size_t>(batch));
    agent.reserve(static_cast<std::size_t>(batch));
    for (int i = 0; i < batch; ++i) demo.push_back(demo_buf.sample(rng));
    for (int i = 0; i < batch; ++i) agent.push_back(replay_buf.sample(rng));
    agent = motion::demo_blend(agent, buffers.demo, lambda_d, rng);
    stats[static_cast<std::size_t>(k)] = style::discriminator_update(
        discs, k, style::pair_matrix(demo), style::pair_matrix(agent), w);
  }
  return stats;
}

/// Rearranges a rollout into the flat PPO batch, running the advantage
/// estimator over each environment's contiguous horizon.
inline PpoBatch make_ppo_batch(const RolloutBatch& b, double gamma, double lam) {
  PpoBatch pb;
  pb.obs = b.obs;
  pb.actions = b.actions;
  pb.logp = b.logp;
  const Eigen::Index n = b.size();
  pb.advantages.resize(n);
  pb.returns.resize(n);
  for (int e = 0; e < b.env_count; ++e) {
    VectorXd r(b.horizon), v(b.horizon + 1);
    std::vector<char> d(static_cast<std::size_t>(b.horizon));
    for (int t = 0; t < b.horizon; ++t) {
      const Eigen::Index i = b.at(e, t);
      r[t] = b.rewards[i];
      v[t] = b.values[i];
      d[static_cast<std::size_t>(t)] = b.dones[static_cast<std::size_t>(i)];
    }
    v[b.horizon] = b.bootstrap[e];
    GaeResult g = compute_gae(r, v, d, gamma, lam);
    for (int t = 0; t < b.horizon; ++t) {
      pb.advantages[b.at(e, t)] = g.advantages[t];
      pb.returns[b.at(e, t)] = g.returns[t];
    }
  }
  return pb;
}

/// Normalized return of the deterministic (mean-action) policy: per episode
/// the undiscounted task-reward sum divided by the episode cap, averaged over
/// episodes. Reset randomization and early termination stay active.
struct NrResult {
  double mean = 0.0;
  double stddev = 0.0;
  int episodes = 0;
};

inline NrResult evaluate_nr(envs::Env& env, const GaussianPolicy& policy, int episodes,
                            Rng& rng) {
  if (episodes <= 0) throw ConfigError("evaluate_nr: episodes must be positive");
  std::vector<double> nr;
  nr.reserve(static_cast<std::size_t>(episodes));
  for (int ep = 0; ep < episodes; ++ep) {
    VectorXd obs = env.reset(rng);
    double total = 0.0;
    for (int t = 0; t < env.max_steps(); ++t) {
      try {
        envs::StepResult sr = env.step(policy.mean_action(obs), rng);
        total += sr.task_reward;
        obs = sr.obs;
        if (sr.done) break;
      } catch (const SimDivergedError&) {
        break;
      }
    }
    nr.push_back(total / static_cast<double>(env.max_steps()));
  }
  NrResult res;
  res.episodes = episodes;
  for (double v : nr) res.mean += v;
  res.mean /= static_cast<double>(episodes);
  double sq = 0.0;
  for (double v : nr) sq += (v - res.mean) * (v - res.mean);
  res.stddev = std::sqrt(sq / static_cast<double>(episodes));
  return res;
}

/// Mean per-part style reward of the deterministic policy under the given
/// discriminators, over full episodes. Stream k scores the env's k-th part
/// pair; parts that never emit report 0. Hand streams are not sampled here.
inline std::vector<double> evaluate_part_style(envs::Env& env, const GaussianPolicy& policy,
                                               const style::DiscriminatorSet& discs,
                                               int episodes, Rng& rng) {
  if (episodes <= 0) throw ConfigError("evaluate_part_style: episodes must be positive");
  std::vector<double> sums(static_cast<std::size_t>(discs.count()), 0.0);
  std::vector<long> counts(static_cast<std::size_t>(discs.count()), 0);
  for (int ep = 0; ep < episodes; ++ep) {
    VectorXd obs = env.reset(rng);
    for (int t = 0; t < env.max_steps(); ++t) {
      envs::StepResult sr;
      try {
        sr = env.step(policy.mean_action(obs), rng);
      } catch (const SimDivergedError&) {
        break;
      }
      const envs::StyleSignals& sig = env.style_signals();
      for (std::size_t k = 0; k < sig.part_pairs.size(); ++k) {
        if (static_cast<int>(k) >= discs.count()) break;
        sums[k] += discs.reward(static_cast<int>(k), sig.part_pairs[k]);
        ++counts[k];
      }
      obs = sr.obs;
      if (sr.done) break;
    }
  }
  std::vector<double> means(sums.size(), 0.0);
  for (std::size_t k = 0; k < sums.size(); ++k)
    if (counts[k] > 0) means[k] = sums[k] / static_cast<double>(counts[k]);
  return means;
}

struct TrainerConfig {
  PpoConfig ppo;
  style::RewardWeights weights;
  style::BlendMode blend = style::BlendMode::PerHand;
  std::vector<int> policy_hidden{64, 64};
  std::vector<int> value_hidden{64, 64};
  std::vector<int> disc_hidden{64, 64};
  double log_std_init = -1.0;
  std::uint64_t seed = 0;
  int body_parts = 0;                 // style streams fed by motion pairs
  std::vector<int> stream_pair_dims;  // per stream, body parts first then hands

  int stream_count() const { return static_cast<int>(stream_pair_dims.size()); }

  void validate() const {
    ppo.validate();
    weights.validate();
    if (body_parts < 0 || body_parts > stream_count())
      throw ConfigError("trainer: body part count exceeds stream count");
    if (weights.style > 0.0 && stream_count() == 0 && body_parts != 0)
      throw ConfigError("trainer: style weight without discriminator streams");
  }
};

struct UpdateStats {
  long update = 0;
  double task_mean = 0.0;
  double style_mean = 0.0;
  double reward_mean = 0.0;
  StreamDiagnostics streams;
  std::vector<style::DiscLossTerms> disc;
  PpoStats ppo;
  int incidents = 0;
};

/// Owns the policy/value/discriminator stacks and the vectorized rollout
/// state; one `update()` call is one full training round.
class Trainer {
 public:
  Trainer(std::vector<std::unique_ptr<envs::Env>> envs, TrainerConfig cfg)
      : cfg_(std::move(cfg)), envs_(std::move(envs)), master_(cfg_.seed) {
    cfg_.validate();
    if (envs_.empty()) throw ConfigError("trainer: needs at least one environment");
    Rng init = master_.spawn();
    action_rng_ = master_.spawn();
    disc_rng_ = master_.spawn();
    ppo_rng_ = master_.spawn();
    eval_rng_ = master_.spawn();
    for (std::size_t e = 0; e < envs_.size(); ++e) env_rngs_.push_back(master_.spawn());

    policy_ = GaussianPolicy::make(envs_[0]->obs_dim(), envs_[0]->action_dim(),
                                   cfg_.policy_hidden, init, cfg_.log_std_init);
    std::vector<int> vw;
    vw.push_back(envs_[0]->obs_dim());
    for (int h : cfg_.value_hidden) vw.push_back(h);
    vw.push_back(1);
    value_ = net::Mlp::make(vw, net::Activation::Tanh, net::Activation::Identity, init);
    policy_opt_ = net::Adam::make(policy_.mean, cfg_.ppo.lr);
    log_std_opt_ = net::AdamVec::make(policy_.action_dim(), cfg_.ppo.lr);
    value_opt_ = net::Adam::make(value_, cfg_.ppo.lr);

    if (cfg_.stream_count() > 0) {
      discs_ = style::DiscriminatorSet::make(cfg_.stream_pair_dims, cfg_.disc_hidden,
                                             cfg_.ppo.disc_lr, init);
      buffers_ = std::make_unique<motion::PartBuffers>(
          cfg_.stream_count(), static_cast<std::size_t>(cfg_.ppo.demo_capacity),
          static_cast<std::size_t>(cfg_.ppo.replay_capacity));
    }
    lambda_demo_ = cfg_.ppo.lambda_demo >= 0.0 ? cfg_.ppo.lambda_demo
                                               : (cfg_.body_parts > 2 ? 0.1 : 0.0);
    for (std::size_t e = 0; e < envs_.size(); ++e)
      cur_obs_.push_back(envs_[e]->reset(env_rngs_[e]));
  }

  /// Loads reference pairs into one stream's demo buffer.
  void seed_demo(int stream, const std::vector<motion::ObservationPair>& pairs) {
    if (!buffers_) throw ConfigError("trainer: no discriminator streams configured");
    auto& buf = buffers_->demo.at(static_cast<std::size_t>(stream));
    for (const motion::ObservationPair& p : pairs) {
      if (p.o.size() + p.o2.size() !=
          cfg_.stream_pair_dims.at(static_cast<std::size_t>(stream)))
        throw ConfigError("trainer: demo pair dimension mismatch on stream " +
                          std::to_string(stream));
      buf.push(p);
    }
  }

  UpdateStats update() {
    RolloutBatch batch = run_rollout(envs_, env_rngs_, cur_obs_, policy_, value_,
                                     cfg_.ppo.horizon, action_rng_);
    UpdateStats stats;
    stats.update = ++update_count_;
    stats.incidents = batch.incidents;
    if (discs_.count() > 0) {
      stats.streams = assemble_rewards(batch, discs_, cfg_.weights, cfg_.blend);
      push_agent_pairs(batch, *buffers_);
      stats.disc = update_discriminators(discs_, *buffers_, cfg_.ppo.disc_batch,
                                         lambda_demo_, cfg_.weights, disc_rng_);
    } else {
      for (Eigen::Index i = 0; i < batch.size(); ++i)
        batch.rewards[i] = style::total_reward(batch.task_rewards[i], 0.0, cfg_.weights);
    }
    stats.task_mean = batch.task_rewards.mean();
    stats.style_mean = batch.style_rewards.mean();
    stats.reward_mean = batch.rewards.mean();

    PpoBatch pb = make_ppo_batch(batch, cfg_.ppo.gamma, cfg_.ppo.lam);
    stats.ppo = ppo_update(pb, policy_, value_, policy_opt_, log_std_opt_, value_opt_,
                           cfg_.ppo, ppo_rng_);
    record(stats);
    return stats;
  }

  NrResult evaluate(int episodes) {
    NrResult r = evaluate_nr(*envs_[0], policy_, episodes, eval_rng_);
    // Evaluation moved env 0; resynchronize the rollout state with it.
    cur_obs_[0] = envs_[0]->reset(env_rngs_[0]);
    metrics_.add("eval/nr_mean", update_count_, r.mean);
    metrics_.add("eval/nr_std", update_count_, r.stddev);
    return r;
  }

  const GaussianPolicy& policy() const { return policy_; }
  GaussianPolicy& policy() { return policy_; }
  const net::Mlp& value_net() const { return value_; }
  const style::DiscriminatorSet& discriminators() const { return discs_; }
  style::DiscriminatorSet& discriminators() { return discs_; }
  motion::PartBuffers* buffers() { return buffers_.get(); }
  const MetricsLog& metrics() const { return metrics_; }
  MetricsLog& metrics() { return metrics_; }
  double lambda_demo() const { return lambda_demo_; }
  long update_count() const { return update_count_; }
  envs::Env& env(int e = 0) { return *envs_.at(static_cast<std::size_t>(e)); }

  void save_checkpoint(const std::string& path) const {
    net::TensorFile tf;
    tf.put_scalar("meta.update", static_cast<double>(update_count_));
    tf.put_scalar("meta.seed", static_cast<double>(cfg_.seed));
    save_policy(tf, "policy", policy_);
    net::put_mlp(tf, "value", value_);
    if (discs_.count() > 0) style::save_discriminators(tf, "disc", discs_);
    tf.save(path);
  }

  void load_checkpoint(const std::string& path) {
    net::TensorFile tf = net::TensorFile::load(path);
    update_count_ = static_cast<long>(tf.get_scalar("meta.update"));
    policy_ = load_policy(tf, "policy");
    value_ = net::get_mlp(tf, "value");
    if (discs_.count() > 0) discs_ = style::load_discriminators(tf, "disc", cfg_.ppo.disc_lr);
    policy_opt_ = net::Adam::make(policy_.mean, cfg_.ppo.lr);
    log_std_opt_ = net::AdamVec::make(policy_.action_dim(), cfg_.ppo.lr);
    value_opt_ = net::Adam::make(value_, cfg_.ppo.lr);
  }

 private:
  void record(const UpdateStats& s) {
    metrics_.add("reward/task_mean", s.update, s.task_mean);
    metrics_.add("reward/style_mean", s.update, s.style_mean);
    metrics_.add("reward/total_mean", s.update, s.reward_mean);
    metrics_.add("ppo/policy_loss", s.update, s.ppo.policy_loss);
    metrics_.add("ppo/value_loss", s.update, s.ppo.value_loss);
    metrics_.add("ppo/kl", s.update, s.ppo.approx_kl);
    metrics_.add("ppo/clip_fraction", s.update, s.ppo.clip_fraction);
    metrics_.add("ppo/epochs", s.update, static_cast<double>(s.ppo.epochs_run));
    metrics_.add("rollout/incidents", s.update, static_cast<double>(s.incidents));
    for (std::size_t k = 0; k < s.streams.mean_reward.size(); ++k)
      metrics_.add("style/stream" + std::to_string(k) + "_reward", s.update,
                   s.streams.mean_reward[k]);
    if (s.streams.sigma_samples > 0)
      metrics_.add("style/sigma_mean", s.update, s.streams.sigma_mean);
    for (std::size_t k = 0; k < s.disc.size(); ++k) {
      metrics_.add("disc/stream" + std::to_string(k) + "_loss", s.update, s.disc[k].disc);
      metrics_.add("disc/stream" + std::to_string(k) + "_gp", s.update, s.disc[k].gp);
      metrics_.add("disc/stream" + std::to_string(k) + "_accuracy", s.update,
                   s.disc[k].demo_accuracy);
    }
  }

  TrainerConfig cfg_;
  std::vector<std::unique_ptr<envs::Env>> envs_;
  Rng master_, action_rng_, disc_rng_, ppo_rng_, eval_rng_;
  std::vector<Rng> env_rngs_;
  std::vector<VectorXd> cur_obs_;
  GaussianPolicy policy_;
  net::Mlp value_;
  net::Adam policy_opt_, value_opt_;
  net::AdamVec log_std_opt_;
  style::DiscriminatorSet discs_;
  std::unique_ptr<motion::PartBuffers> buffers_;
  double lambda_demo_ = 0.0;
  long update_count_ = 0;
  MetricsLog metrics_;
};

}  // namespace pmp::trainer
