#pragma once

#include <cmath>
#include <vector>

#include "pmp/common.hpp"

namespace pmp::gym {

/// Rod stillness: a firm grasp keeps both velocities near zero.
inline double rod_reward(double rod_speed, double rod_angvel) {
  return 0.3 * std::exp(-rod_speed * rod_speed) +
         0.7 * std::exp(-0.1 * rod_angvel * rod_angvel);
}

/// Finger proximity, dominated by the worst fingertip.
inline double finger_reward(const std::vector<double>& tip_distances) {
  double worst = 0.0;
  for (double d : tip_distances) worst = std::max(worst, d * d);
  return std::exp(-128.0 * worst);
}

/// Grasp effort: pushes the normalized mean grasp-joint action toward 1.
inline double mcp_reward(double mean_action) {
  const double e = 1.0 - mean_action;
  return std::exp(-3.0 * e * e);
}

/// Fingertip heading alignment, dominated by the worst fingertip.
inline double tip_reward(const std::vector<double>& heading_dots) {
  double worst = 0.0;
  for (double d : heading_dots) {
    const double e = (1.0 - d) * (1.0 - d);
    worst = std::max(worst, e);
  }
  return std::exp(-3.0 * worst);
}

/// Wrist tracking with a velocity damper; factorizes into the two terms.
inline double wrist_reward(double q, double q_target, double qd) {
  const double e = q_target - q;
  return std::exp(-3.0 * e * e) * std::exp(-0.1 * qd * qd);
}

/// Effort regularizer over the non-grasp joints.
inline double torque_reward(const std::vector<double>& non_mcp_torques) {
  double s = 0.0;
  for (double t : non_mcp_torques) s += t * t;
  return std::exp(-0.002 * s);
}

struct GymRewardTerms {
  double rod = 1.0, finger = 1.0, mcp = 1.0, tip = 1.0, wrist = 1.0, torque = 1.0;
};

inline double gym_total_reward(const GymRewardTerms& t) {
  return 0.95 * t.rod * t.finger * t.mcp * t.tip * t.wrist + 0.05 * t.torque;
}

}  // namespace pmp::gym
