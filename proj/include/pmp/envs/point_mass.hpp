#pragma once

#include "pmp/envs/env.hpp"

namespace pmp::envs {

struct PointMassConfig {
  double dt = 1.0 / 30.0;
  double accel = 3.0;       // |a|=1 maps to this many m/s^2
  double damping = 0.98;    // per-step velocity retention
  double start_min = 0.1;   // initial distance band from the goal
  double start_max = 0.4;
  double bound = 2.0;       // leaving this radius ends the episode
  double reward_gamma = 4.0;
  int steps = 60;
};

/// Planar double integrator steering toward the origin; the pure-task
/// smoke target for the RL loop. Observation [p, v], acceleration actions.
class PointMassEnv : public Env {
 public:
  using Config = PointMassConfig;

  explicit PointMassEnv(Config cfg = Config()) : cfg_(cfg) {
    if (cfg_.dt <= 0.0 || cfg_.steps <= 0 || cfg_.start_min < 0.0 ||
        cfg_.start_max < cfg_.start_min || cfg_.bound <= cfg_.start_max)
      throw ConfigError("point mass: invalid config");
  }

  int obs_dim() const override { return 4; }
  int action_dim() const override { return 2; }
  int max_steps() const override { return cfg_.steps; }

  VectorXd reset(Rng& rng) override {
    const double ang = rng.uniform(0.0, 2.0 * M_PI);
    const double dist = rng.uniform(cfg_.start_min, cfg_.start_max);
    p_ = dist * Vector2d(std::cos(ang), std::sin(ang));
    v_.setZero();
    t_ = 0;
    return observe();
  }

  StepResult step(const VectorXd& action, Rng&) override {
    if (action.size() != 2) throw ConfigError("point mass: action must be 2d");
    const Vector2d a(clampd(action[0], -1.0, 1.0), clampd(action[1], -1.0, 1.0));
    v_ = cfg_.damping * (v_ + cfg_.dt * cfg_.accel * a);
    p_ += cfg_.dt * v_;
    ++t_;
    StepResult r;
    r.task_reward = std::exp(-cfg_.reward_gamma * p_.squaredNorm());
    r.done = t_ >= cfg_.steps || p_.norm() > cfg_.bound;
    r.obs = observe();
    return r;
  }

 private:
  VectorXd observe() const {
    VectorXd o(4);
    o << p_.x(), p_.y(), v_.x(), v_.y();
    return o;
  }

  Config cfg_;
  Vector2d p_{0, 0}, v_{0, 0};
  int t_ = 0;
};

}  // namespace pmp::envs
