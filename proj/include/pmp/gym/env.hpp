#pragma once

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "pmp/common.hpp"
#include "pmp/envs/characters.hpp"
#include "pmp/envs/env.hpp"
#include "pmp/gym/interaction.hpp"
#include "pmp/gym/rewards.hpp"
#include "pmp/sim/world.hpp"

namespace pmp::gym {

struct DisturbanceConfig {
  double force_min = 50.0;   // N, sampled magnitude range
  double force_max = 100.0;
  double torque_min = -30.0; // N*m
  double torque_max = 30.0;
  double scale = 10.0;       // divisor adapting the ranges to the light rod

  void validate() const {
    if (force_min > force_max || torque_min > torque_max)
      throw ConfigError("disturbance ranges must be ordered");
    if (force_min < 0.0 || scale <= 0.0)
      throw ConfigError("disturbance magnitudes and scale must be positive");
  }
};

/// Magnitude uniform in range, direction uniform on the circle, plus a
/// uniform torque; everything divided by the configured scale.
inline sim::Wrench sample_disturbance(const DisturbanceConfig& c, Rng& rng) {
  const double mag = rng.uniform(c.force_min, c.force_max);
  const double ang = rng.uniform(0.0, 2.0 * M_PI);
  const double tau = rng.uniform(c.torque_min, c.torque_max);
  sim::Wrench w;
  w.force = (mag / c.scale) * Vector2d(std::cos(ang), std::sin(ang));
  w.torque = tau / c.scale;
  return w;
}

struct GymEpisodeConfig {
  DisturbanceConfig disturbance;
  double disturbance_hz = 30.0;
  double rod_angle_min = -M_PI;
  double rod_angle_max = M_PI;
  double rod_jitter = 0.01;       // spawn position jitter, m
  double rod_mass = 1.0;
  double rod_inertia = 0.002;
  double rod_radius = 0.03;
  int episode_steps = 90;
  double wrist_target_min = -0.4;
  double wrist_target_max = 0.4;
  double retarget_seconds = 1.0;  // how long each wrist target holds
  double base_height = 0.30;     // gripper base elevation above the ground

  void validate() const {
    disturbance.validate();
    if (disturbance_hz <= 0.0) throw ConfigError("disturbance frequency must be positive");
    if (rod_angle_min > rod_angle_max) throw ConfigError("rod angle range must be ordered");
    if (wrist_target_min > wrist_target_max)
      throw ConfigError("wrist target range must be ordered");
    if (episode_steps <= 0) throw ConfigError("episode length must be positive");
    if (rod_mass <= 0.0 || rod_inertia <= 0.0 || rod_radius <= 0.0)
      throw ConfigError("rod parameters must be positive");
  }
};

/// Fixed-base gripper holding a disturbance-loaded rod. Task reward only;
/// this environment both trains the grasp policy and supplies the expert
/// state-action pairs for the interaction prior.
class GymEnv : public envs::Env {
 public:
  explicit GymEnv(const GymEpisodeConfig& cfg = {})
      : cfg_(cfg), world_(build_world(cfg)), layout_(GripperLayout::make(
            world_, envs::gripper_mcp_joints(), cfg.rod_radius)) {
    cfg_.validate();
    state_ = world_.make_state();
    const int hz = world_.params().control_hz;
    retarget_steps_ = std::max(1, static_cast<int>(std::lround(cfg_.retarget_seconds * hz)));
    disturb_every_ = std::max(1, static_cast<int>(std::lround(hz / cfg_.disturbance_hz)));
    for (int j : layout_.joints) {
      const auto& jd = world_.character().joints[static_cast<std::size_t>(j)];
      mid_.push_back(0.5 * (jd.lo + jd.hi));
      half_.push_back(0.5 * (jd.hi - jd.lo));
    }
  }

  int obs_dim() const override {
    return InteractionState::flat_dim(static_cast<int>(layout_.joints.size()),
                                      static_cast<int>(layout_.tip_links.size()),
                                      static_cast<int>(layout_.hand_links.size())) +
           1;
  }
  int action_dim() const override { return static_cast<int>(layout_.joints.size()); }
  int max_steps() const override { return cfg_.episode_steps; }

  VectorXd reset(Rng& rng) override {
    state_ = world_.make_state();
    state_.root_pos = Vector2d(0.0, cfg_.base_height);
    for (int j = 0; j < world_.joint_count(); ++j) state_.q[j] = rng.uniform(-0.05, 0.05);
    const Vector2d palm(0.0, cfg_.base_height);
    state_.obj_pos[rod_idx()] = palm + Vector2d(0.085, 0.0) +
                                Vector2d(rng.uniform(-cfg_.rod_jitter, cfg_.rod_jitter),
                                         rng.uniform(-cfg_.rod_jitter, cfg_.rod_jitter));
    state_.obj_ang[rod_idx()] = rng.uniform(cfg_.rod_angle_min, cfg_.rod_angle_max);
    world_.refresh_velocities(state_);
    step_count_ = 0;
    wrist_target_ = rng.uniform(cfg_.wrist_target_min, cfg_.wrist_target_max);
    u_ = build_interaction_state(world_, state_, layout_);
    return observation();
  }

  envs::StepResult step(const VectorXd& action, Rng& rng) override {
    if (action.size() != action_dim()) throw ConfigError("gym: bad action size");
    if (step_count_ > 0 && step_count_ % retarget_steps_ == 0)
      wrist_target_ = rng.uniform(cfg_.wrist_target_min, cfg_.wrist_target_max);

    sim::PDTarget target;
    target.q_star = state_.q;
    VectorXd a = action.cwiseMax(-1.0).cwiseMin(1.0);
    for (std::size_t i = 0; i < layout_.joints.size(); ++i)
      target.q_star[layout_.joints[i]] = mid_[i] + a[static_cast<Eigen::Index>(i)] * half_[i];

    if (step_count_ % disturb_every_ == 0) {
      const sim::Wrench w = sample_disturbance(cfg_.disturbance, rng);
      state_ = world_.apply_wrench(state_, "rod", w.force, w.torque);
    }
    state_ = world_.step(state_, target);
    ++step_count_;
    u_ = build_interaction_state(world_, state_, layout_);

    envs::StepResult out;
    out.task_reward = gym_total_reward(reward_terms(a));
    out.done = step_count_ >= cfg_.episode_steps || rod_lost();
    out.obs = observation();
    return out;
  }

  GymRewardTerms reward_terms(const VectorXd& clamped_action) const {
    GymRewardTerms t;
    const auto frames = world_.link_frames(state_);
    const Vector2d rod_c = state_.obj_pos[rod_idx()];

    t.rod = rod_reward(state_.obj_vel[rod_idx()].norm(), state_.obj_angvel[rod_idx()]);

    std::vector<double> dists;
    for (int tip : layout_.tip_links) {
      const double d =
          (frames[static_cast<std::size_t>(tip)].pos - rod_c).norm() - layout_.rod_radius;
      dists.push_back(std::max(0.0, d));
    }
    t.finger = finger_reward(dists);

    double mean_close = 0.0;
    for (std::size_t i = 0; i < layout_.mcp_joints.size(); ++i) {
      const Eigen::Index ai = action_index(layout_.mcp_joints[i]);
      mean_close += 0.5 * (1.0 + layout_.close_sign[i] * clamped_action[ai]);
    }
    mean_close /= static_cast<double>(layout_.mcp_joints.size());
    t.mcp = mcp_reward(clampd(mean_close, 0.0, 1.0));

    std::vector<double> dots;
    for (std::size_t i = 0; i < layout_.tip_links.size(); ++i) {
      const int tip = layout_.tip_links[i];
      const Vector2d to_rod = rod_c - frames[static_cast<std::size_t>(tip)].pos;
      const double n = to_rod.norm();
      Vector2d inside(0.0, 0.0);
      for (std::size_t l = 0; l < layout_.hand_links.size(); ++l)
        if (layout_.hand_links[l] == tip) inside = layout_.inside_axis[l];
      const Vector2d dh = sim::rotate(frames[static_cast<std::size_t>(tip)].ang, inside);
      dots.push_back(n > 1e-9 ? dh.dot(to_rod / n) : 1.0);
    }
    t.tip = tip_reward(dots);

    t.wrist = wrist_reward(state_.q[layout_.wrist_joint], wrist_target_,
                           state_.qd[layout_.wrist_joint]);

    std::vector<double> taus;
    for (int j : layout_.other_joints) taus.push_back(state_.applied_torque[j]);
    t.torque = torque_reward(taus);
    return t;
  }

  bool rod_lost() const {
    const Vector2d rod_c = state_.obj_pos[rod_idx()];
    const Vector2d palm(0.0, cfg_.base_height);
    return rod_c.y() < cfg_.base_height - 0.12 || (rod_c - palm).norm() > 0.4;
  }

  bool rod_contact() const {
    const int rod_body = world_.link_count() + layout_.rod_object;
    for (int tip : layout_.tip_links)
      if (bodies_in_contact(state_, tip, rod_body)) return true;
    return false;
  }

  const InteractionState& interaction_state() const { return u_; }
  const sim::World& world() const { return world_; }
  const sim::SimState& sim_state() const { return state_; }
  const GripperLayout& layout() const { return layout_; }
  double wrist_target() const { return wrist_target_; }
  const GymEpisodeConfig& config() const { return cfg_; }

 private:
  static sim::World build_world(const GymEpisodeConfig& cfg) {
    cfg.validate();
    sim::SimParams p;
    p.substeps = 16;  // light fingertips need the shorter step for stable tangential damping
    p.contact_kn = 8000.0;
    p.contact_kd = 25.0;
    p.contact_kt = 60.0;
    sim::ObjectDef rod;
    rod.name = "rod";
    rod.mass = cfg.rod_mass;
    rod.inertia = cfg.rod_inertia;
    rod.gravity = false;  // free-floating target: only contacts and wrenches act on it
    rod.shapes = {sim::ShapeDef::disk(cfg.rod_radius)};
    rod.start_pos = Vector2d(0.085, cfg.base_height);
    return sim::World(envs::make_gripper(), {rod}, p);
  }

  std::size_t rod_idx() const { return static_cast<std::size_t>(layout_.rod_object); }

  Eigen::Index action_index(int joint) const {
    for (std::size_t i = 0; i < layout_.joints.size(); ++i)
      if (layout_.joints[i] == joint) return static_cast<Eigen::Index>(i);
    throw ConfigError("gym: joint not in action map");
  }

  VectorXd observation() const {
    const VectorXd u = u_.flat();
    VectorXd obs(u.size() + 1);
    obs << u, wrist_target_;
    return obs;
  }

  GymEpisodeConfig cfg_;
  sim::World world_;
  GripperLayout layout_;
  sim::SimState state_;
  InteractionState u_;
  std::vector<double> mid_, half_;
  double wrist_target_ = 0.0;
  int step_count_ = 0;
  int retarget_steps_ = 30;
  int disturb_every_ = 1;
};

}  // namespace pmp::gym
