#pragma once

#include <cmath>
#include <vector>

#include "pmp/common.hpp"

namespace pmp::tasks {

struct TargetLocationParams {
  double gamma_pos = 0.5;
  double gamma_vel = 1.0;
  double v_star = 2.0;  // desired approach speed, m/s
  double w_pos = 0.7;
  double w_vel = 0.3;
};

inline double position_reward(const Vector2d& to_goal, double gamma_pos) {
  return std::exp(-gamma_pos * to_goal.squaredNorm());
}

/// Rewards closing speed toward the goal; saturates at the desired speed and
/// is defined as 1 exactly at the goal.
inline double velocity_toward_reward(const Vector2d& to_goal, const Vector2d& vel,
                                     double gamma_vel, double v_star) {
  const double dist = to_goal.norm();
  if (dist == 0.0) return 1.0;
  const double shortfall = std::max(0.0, v_star - vel.dot(to_goal / dist));
  return std::exp(-gamma_vel * shortfall * shortfall);
}

inline double target_location_reward(const Vector2d& to_goal, const Vector2d& vel,
                                     const TargetLocationParams& p = {}) {
  return p.w_pos * position_reward(to_goal, p.gamma_pos) +
         p.w_vel * velocity_toward_reward(to_goal, vel, p.gamma_vel, p.v_star);
}

/// Head-direction tracking with planar angle wrapping.
inline double sight_reward(double goal_angle, double head_angle, double gamma = 2.0) {
  const double d = wrap_angle(goal_angle - head_angle);
  return std::exp(-gamma * d * d);
}

/// Locomotion speed target along a heading direction.
inline double heading_reward(const Vector2d& vel, const Vector2d& heading, double v_star,
                             double gamma = 1.0) {
  const double n = heading.norm();
  const double proj = n > 0.0 ? vel.dot(heading / n) : 0.0;
  const double shortfall = std::max(0.0, v_star - proj);
  return std::exp(-gamma * shortfall * shortfall);
}

/// Product over hands of a gate c_n in [0,1] and a proximity bell.
inline double hand_reach_reward(const std::vector<Vector2d>& to_target,
                                const std::vector<double>& gate, double gamma) {
  double r = 1.0;
  for (std::size_t n = 0; n < to_target.size(); ++n)
    r *= gate[n] * std::exp(-gamma * to_target[n].squaredNorm());
  return r;
}

inline TargetLocationParams cart_location_params() {
  TargetLocationParams p;
  p.gamma_pos = 0.5;
  p.gamma_vel = 64.0;
  p.v_star = 0.5;
  p.w_pos = 0.8;
  p.w_vel = 0.2;
  return p;
}

inline double cart_task_reward(double r_cart, double r_hand, double w_cart = 0.8,
                               double w_hand = 0.2) {
  return r_hand * (w_cart * r_cart + w_hand);
}

inline double hang_task_reward(const std::vector<Vector2d>& to_target,
                               const std::vector<double>& palm_aligned) {
  return hand_reach_reward(to_target, palm_aligned, 3.0);
}

/// Stand-in balance bell on the barbell tilt angle.
inline double barbell_balance_reward(double tilt) {
  return std::exp(-4.0 * tilt * tilt);
}

inline double barbell_task_reward(double r_bbl, double r_bal, double r_hand,
                                  double w_bbl = 0.8, double w_hand = 0.2) {
  return r_hand * (w_bbl * r_bbl * r_bal + w_hand);
}

/// Climbing grip reward; the offset keeps a faint signal when far from the
/// next hold, and the sharpness relaxes after the first hang.
inline double climb_task_reward(const std::vector<Vector2d>& to_target,
                                const std::vector<double>& gate, bool first_hang,
                                double offset = 0.05) {
  const double gamma = first_hang ? 128.0 : 16.0;
  double r = 1.0;
  for (std::size_t n = 0; n < to_target.size(); ++n)
    r *= gate[n] *
         ((1.0 - offset) * std::exp(-gamma * to_target[n].squaredNorm()) + offset);
  return r;
}

}  // namespace pmp::tasks
