#pragma once

#include <vector>

#include "pmp/envs/characters.hpp"
#include "pmp/envs/env.hpp"
#include "pmp/motion/parts.hpp"
#include "pmp/sim/world.hpp"
#include "pmp/tasks/rewards.hpp"
#include "pmp/tasks/termination.hpp"

namespace pmp::envs {

struct WalkerEnvConfig {
  int episode_steps = 300;
  double heading_v_star = 0.5;
  double heading_gamma = 1.0;
  Vector2d heading{1.0, 0.0};
  bool reference_init = true;  // composite clip-sampled initial pose
  bool fall_termination = true;
  double gantry = 0.0;  // overhead-support torque gain on the torso, N*m/rad

  void validate() const {
    if (episode_steps <= 0) throw ConfigError("walker env: episode_steps must be positive");
    if (heading.norm() < 1e-12) throw ConfigError("walker env: zero heading");
    if (gantry < 0.0) throw ConfigError("walker env: gantry gain must be non-negative");
  }
};

/// Planar biped driving toward a target speed along a fixed heading, with
/// per-part style observations for the adversarial reward path.
class WalkerEnv : public Env {
 public:
  WalkerEnv(WalkerEnvConfig cfg, const motion::PartSpec& parts,
            std::vector<motion::MotionClip> clips)
      : cfg_(cfg), world_(build_world(cfg)), clips_(std::move(clips)) {
    parts_ = motion::resolve_parts(world_, parts);
    for (const motion::ResolvedPart& p : parts_.parts)
      if (cfg_.reference_init && p.clips.empty())
        throw ConfigError("walker env: part " + p.name + " has no clips for initialization");
    rule_.fall = cfg_.fall_termination;
    tracker_ = std::make_unique<tasks::TerminationTracker>(world_);
    half_.resize(world_.joint_count());
    mid_.resize(world_.joint_count());
    for (int j = 0; j < world_.joint_count(); ++j) {
      const sim::JointDef& jd = world_.character().joints[j];
      mid_[j] = 0.5 * (jd.lo + jd.hi);
      half_[j] = 0.5 * (jd.hi - jd.lo);
    }
    state_ = world_.make_state();
  }

  int obs_dim() const override { return 5 + 2 * world_.joint_count(); }
  int action_dim() const override { return world_.joint_count(); }
  int max_steps() const override { return cfg_.episode_steps; }

  const sim::World& world() const { return world_; }
  const motion::ResolvedParts& parts() const { return parts_; }
  const sim::SimState& state() const { return state_; }

  VectorXd reset(Rng& rng) override {
    state_ = world_.make_state();
    if (cfg_.reference_init && !clips_.empty()) {
      motion::InitPose init = motion::sample_reference_init(world_, parts_, clips_, rng);
      state_.root_pos = Vector2d(0.0, walker_stand_height() + 0.02);
      state_.root_ang = clampd(init.root_ang, -0.2, 0.2);
      state_.root_vel = init.root_vel;
      state_.root_angvel = clampd(init.root_angvel, -1.0, 1.0);
      for (int j = 0; j < world_.joint_count(); ++j) {
        const sim::JointDef& jd = world_.character().joints[j];
        state_.q[j] = clampd(init.q[j], jd.lo, jd.hi);
        state_.qd[j] = clampd(init.qd[j], -8.0, 8.0);
      }
    } else {
      state_.root_pos = Vector2d(0.0, walker_stand_height() + 0.02);
      for (int j = 0; j < world_.joint_count(); ++j) {
        const sim::JointDef& jd = world_.character().joints[j];
        state_.q[j] = clampd(rng.uniform(-0.05, 0.05), jd.lo, jd.hi);
      }
    }
    world_.refresh_velocities(state_);
    tracker_->reset();
    t_ = 0;
    refresh_part_obs(prev_part_obs_);
    return observe();
  }

  StepResult step(const VectorXd& action, Rng&) override {
    if (action.size() != action_dim()) throw ConfigError("walker env: bad action size");
    sim::PDTarget target;
    target.q_star.resize(world_.joint_count());
    for (int j = 0; j < world_.joint_count(); ++j)
      target.q_star[j] = mid_[j] + clampd(action[j], -1.0, 1.0) * half_[j];

    if (cfg_.gantry > 0.0) {
      const double tau =
          -cfg_.gantry * state_.root_ang - 0.3 * cfg_.gantry * state_.root_angvel;
      state_ = world_.apply_wrench(state_, "torso", Vector2d::Zero(), tau);
    }
    state_ = world_.step(state_, target);
    ++t_;

    signals_.part_pairs.clear();
    signals_.hands.clear();
    std::vector<VectorXd> cur;
    refresh_part_obs(cur);
    for (int k = 0; k < parts_.count(); ++k)
      signals_.part_pairs.push_back(motion::ObservationPair{k, prev_part_obs_[k], cur[k]});
    prev_part_obs_ = cur;

    const double elapsed = static_cast<double>(t_) * (1.0 / world_.params().control_hz);
    const tasks::TerminationReason why = tracker_->check(state_, rule_, elapsed);

    StepResult r;
    r.task_reward = tasks::heading_reward(state_.root_vel, cfg_.heading,
                                          cfg_.heading_v_star, cfg_.heading_gamma);
    r.done = why != tasks::TerminationReason::None || t_ >= cfg_.episode_steps;
    r.obs = observe();
    return r;
  }

  const StyleSignals& style_signals() const override { return signals_; }

 private:
  static sim::World build_world(const WalkerEnvConfig& cfg) {
    cfg.validate();
    return sim::World(make_walker(), {}, sim::SimParams{});
  }

  void refresh_part_obs(std::vector<VectorXd>& out) const {
    out.resize(static_cast<std::size_t>(parts_.count()));
    for (int k = 0; k < parts_.count(); ++k)
      out[static_cast<std::size_t>(k)] = motion::extract_part_obs(world_, state_, parts_, k);
  }

  VectorXd observe() const {
    VectorXd o(obs_dim());
    int at = 0;
    o[at++] = state_.root_pos.y() - walker_stand_height();
    o[at++] = state_.root_ang;
    o[at++] = state_.root_vel.x();
    o[at++] = state_.root_vel.y();
    o[at++] = state_.root_angvel;
    for (int j = 0; j < world_.joint_count(); ++j) o[at++] = state_.q[j];
    for (int j = 0; j < world_.joint_count(); ++j) o[at++] = state_.qd[j];
    return o;
  }

  WalkerEnvConfig cfg_;
  sim::World world_;
  std::vector<motion::MotionClip> clips_;
  motion::ResolvedParts parts_;
  tasks::TerminationRule rule_;
  std::unique_ptr<tasks::TerminationTracker> tracker_;
  sim::SimState state_;
  std::vector<VectorXd> prev_part_obs_;
  StyleSignals signals_;
  VectorXd mid_, half_;
  int t_ = 0;
};

/// The two-part decomposition used by the locomotion setups: legs bound to
/// the gait reference, arms to the wave reference.
inline motion::PartSpec walker_two_parts() {
  motion::PartSpec spec;
  motion::PartDef lower;
  lower.name = "lower";
  lower.joints = {"hip_l", "knee_l", "hip_r", "knee_r"};
  lower.ee_links = {"shin_l", "shin_r"};
  lower.clips = {"gait"};
  motion::PartDef upper;
  upper.name = "upper";
  upper.joints = {"shoulder_l", "shoulder_r"};
  upper.ee_links = {"arm_l", "arm_r"};
  upper.clips = {"wave"};
  spec.parts = {lower, upper};
  spec.base_part = 0;
  return spec;
}

/// Whole-body single-part variant: the ablation/comparator configuration.
inline motion::PartSpec walker_whole_body() {
  motion::PartDef all;
  all.name = "body";
  all.joints = {"hip_l", "knee_l", "hip_r", "knee_r", "shoulder_l", "shoulder_r"};
  all.ee_links = {"shin_l", "shin_r", "arm_l", "arm_r"};
  all.clips = {"gait", "wave"};
  motion::PartSpec spec;
  spec.parts = {all};
  spec.base_part = 0;
  return spec;
}

}  // namespace pmp::envs
