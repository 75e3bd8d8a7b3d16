#pragma once

#include <string>
#include <vector>

#include "pmp/common.hpp"
#include "pmp/motion/parts.hpp"
#include "pmp/net/adam.hpp"
#include "pmp/net/checkpoint.hpp"
#include "pmp/net/losses.hpp"
#include "pmp/net/mlp.hpp"
#include "pmp/style/rewards.hpp"

namespace pmp::style {

/// Stacks (o, o') into the column layout every discriminator consumes.
inline VectorXd pair_input(const motion::ObservationPair& p) {
  VectorXd x(p.o.size() + p.o2.size());
  x << p.o, p.o2;
  return x;
}

inline MatrixXd pair_matrix(const std::vector<motion::ObservationPair>& pairs) {
  if (pairs.empty()) throw ConfigError("pair_matrix: empty batch");
  const Eigen::Index dim = pairs[0].o.size() + pairs[0].o2.size();
  MatrixXd x(dim, static_cast<Eigen::Index>(pairs.size()));
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (pairs[i].o.size() + pairs[i].o2.size() != dim)
      throw ConfigError("pair_matrix: inconsistent pair dimensions");
    x.col(static_cast<Eigen::Index>(i)) = pair_input(pairs[i]);
  }
  return x;
}

/// One binary classifier per body part (and, in hand setups, per interaction
/// prior). Tanh hidden layers keep the input-gradient penalty smooth.
struct DiscriminatorSet {
  std::vector<net::Mlp> nets;
  std::vector<net::Adam> opts;
  double prob_clamp = kProbClamp;

  static DiscriminatorSet make(const std::vector<int>& pair_dims,
                               const std::vector<int>& hidden, double lr, Rng& rng) {
    DiscriminatorSet set;
    for (int d : pair_dims) {
      if (d <= 0) throw ConfigError("discriminator input dim must be positive");
      std::vector<int> widths;
      widths.push_back(d);
      for (int h : hidden) widths.push_back(h);
      widths.push_back(1);
      set.nets.push_back(net::Mlp::make(widths, net::Activation::Tanh,
                                        net::Activation::Identity, rng));
      set.opts.push_back(net::Adam::make(set.nets.back(), lr));
    }
    return set;
  }

  int count() const { return static_cast<int>(nets.size()); }

  void check(int k, Eigen::Index pair_dim) const {
    if (k < 0 || k >= count()) throw ConfigError("discriminator index out of range");
    if (pair_dim != nets[static_cast<std::size_t>(k)].input_dim())
      throw ConfigError("discriminator input layout mismatch");
  }

  double logit(int k, const motion::ObservationPair& p) const {
    check(k, p.o.size() + p.o2.size());
    return nets[static_cast<std::size_t>(k)].forward(pair_input(p))[0];
  }

  double prob(int k, const motion::ObservationPair& p) const {
    return prob_from_logit(logit(k, p), prob_clamp);
  }

  double reward(int k, const motion::ObservationPair& p) const {
    return style_reward_from_prob(prob(k, p));
  }
};

inline void save_discriminators(net::TensorFile& tf, const std::string& prefix,
                                const DiscriminatorSet& set) {
  tf.put_scalar(prefix + ".count", set.count());
  for (int k = 0; k < set.count(); ++k)
    net::put_mlp(tf, prefix + "." + std::to_string(k), set.nets[static_cast<std::size_t>(k)]);
}

inline DiscriminatorSet load_discriminators(const net::TensorFile& tf,
                                            const std::string& prefix, double lr) {
  DiscriminatorSet set;
  const int count = static_cast<int>(tf.get_scalar(prefix + ".count"));
  for (int k = 0; k < count; ++k) {
    set.nets.push_back(net::get_mlp(tf, prefix + "." + std::to_string(k)));
    set.opts.push_back(net::Adam::make(set.nets.back(), lr));
  }
  return set;
}

struct DiscLossTerms {
  double disc = 0.0;  // cross-entropy term
  double gp = 0.0;    // input-gradient penalty at demo samples
  double reg = 0.0;   // squared weight norm
  double total = 0.0;
  double demo_accuracy = 0.0;  // fraction of demo samples classified > 0.5
};

/// Cross-entropy discriminator objective: mean -log D over demo columns plus
/// mean -log(1-D) over agent columns.
inline double discriminator_loss_value(const net::Mlp& n, const MatrixXd& demo,
                                       const MatrixXd& agent) {
  if (demo.cols() == 0 || agent.cols() == 0)
    throw ConfigError("discriminator loss: empty batch");
  net::LossSpec d;
  d.kind = net::LossSpec::Kind::BceWithLogits;
  d.labels = VectorXd::Ones(demo.cols());
  net::LossSpec a;
  a.kind = net::LossSpec::Kind::BceWithLogits;
  a.labels = VectorXd::Zero(agent.cols());
  return net::loss_value(n, d, demo) + net::loss_value(n, a, agent);
}

inline double gradient_penalty_value(const net::Mlp& n, const MatrixXd& demo) {
  if (demo.cols() == 0) throw ConfigError("gradient penalty: empty batch");
  return net::input_gradient_penalty_value(n, demo);
}

inline double weighted_disc_loss(double disc, double gp, double reg,
                                 const RewardWeights& w) {
  return w.w_disc * disc + w.w_gp * gp + w.w_reg * reg;
}

struct DiscLossGradients {
  DiscLossTerms terms;
  net::Gradients grads;
};

/// Weighted training objective for one discriminator and its full gradient.
inline DiscLossGradients total_disc_loss(const net::Mlp& n, const MatrixXd& demo,
                                         const MatrixXd& agent,
                                         const RewardWeights& w) {
  if (demo.cols() == 0 || agent.cols() == 0)
    throw ConfigError("discriminator loss: empty batch");

  net::LossSpec demo_spec;
  demo_spec.kind = net::LossSpec::Kind::BceWithLogits;
  demo_spec.labels = VectorXd::Ones(demo.cols());
  net::LossGradients demo_part = net::param_gradients(n, demo_spec, demo);

  net::LossSpec agent_spec;
  agent_spec.kind = net::LossSpec::Kind::BceWithLogits;
  agent_spec.labels = VectorXd::Zero(agent.cols());
  net::LossGradients agent_part = net::param_gradients(n, agent_spec, agent);

  net::PenaltyResult gp = net::input_gradient_penalty(n, demo);

  DiscLossGradients out;
  out.terms.disc = demo_part.value + agent_part.value;
  out.terms.gp = gp.value;
  out.terms.reg = net::weight_squared_norm(n);
  out.terms.total = weighted_disc_loss(out.terms.disc, out.terms.gp, out.terms.reg, w);

  int hits = 0;
  const MatrixXd logits = n.forward_batch(demo);
  for (Eigen::Index i = 0; i < logits.cols(); ++i)
    if (logits(0, i) > 0.0) ++hits;
  out.terms.demo_accuracy = static_cast<double>(hits) / static_cast<double>(demo.cols());

  out.grads = net::Gradients::zeros_like(n);
  out.grads.add_scaled(demo_part.grads, w.w_disc);
  out.grads.add_scaled(agent_part.grads, w.w_disc);
  out.grads.add_scaled(gp.grads, w.w_gp);
  out.grads.add_scaled(net::weight_squared_norm_gradients(n), w.w_reg);
  return out;
}

/// One optimizer step on discriminator k. Returns the pre-step loss terms.
inline DiscLossTerms discriminator_update(DiscriminatorSet& set, int k,
                                          const MatrixXd& demo, const MatrixXd& agent,
                                          const RewardWeights& w) {
  set.check(k, demo.rows());
  set.check(k, agent.rows());
  auto& n = set.nets[static_cast<std::size_t>(k)];
  DiscLossGradients lg = total_disc_loss(n, demo, agent, w);
  set.opts[static_cast<std::size_t>(k)].step(n, lg.grads);
  return lg.terms;
}

}  // namespace pmp::style
