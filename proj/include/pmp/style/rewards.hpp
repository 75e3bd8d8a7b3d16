#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "pmp/common.hpp"

namespace pmp::style {

inline constexpr double kProbClamp = 1e-4;

inline double clamp_prob(double p, double eps = kProbClamp) {
  return clampd(p, eps, 1.0 - eps);
}

inline double prob_from_logit(double logit, double eps = kProbClamp) {
  return clamp_prob(1.0 / (1.0 + std::exp(-logit)), eps);
}

/// Per-part style reward. Finite because the probability is clamped away
/// from 1; ranges over [-log(1-eps), -log(eps)].
inline double style_reward_from_prob(double prob) { return -std::log(1.0 - prob); }

/// Whole-body style reward: scaled product of the per-part terms. A single
/// collapsed part annihilates the product, which is what the demo blend in
/// the discriminator updates exists to recover from.
inline double style_reward_product(const std::vector<double>& part_rewards,
                                   double scale = 1.0) {
  double r = scale;
  for (double v : part_rewards) r *= v;
  return r;
}

/// Proximity coefficient for hand-object interaction: fully engaged within
/// the contact radius, steep cubic-exponential falloff beyond it.
inline double interaction_kernel(double dist, double radius = 0.10,
                                 double falloff = 4000.0) {
  if (dist <= radius) return 1.0;
  return std::exp(-falloff * dist * dist * dist);
}

enum class BlendMode { PerHand, Synchronized };

inline BlendMode blend_mode_from_string(const std::string& s) {
  if (s == "per_hand" || s == "per-hand") return BlendMode::PerHand;
  if (s == "synchronized") return BlendMode::Synchronized;
  throw ConfigError("unknown style blend mode: " + s);
}

inline std::string blend_mode_to_string(BlendMode m) {
  return m == BlendMode::PerHand ? "per_hand" : "synchronized";
}

struct HandBlend {
  double style = 0.0;        // the hand part's own style reward
  double interaction = 0.0;  // interaction reward, offset already added
  double sigma = 0.0;        // proximity coefficient in [0, 1]
};

/// Combines hand terms with the remaining body-part style rewards.
///   per_hand:     r = c * prod_h max(0, (1-s_h)*style_h + s_h*inter_h) * prod_k r_k
///   synchronized: r = c * (1 - max_h s_h) * prod_h s_h*inter_h * prod_k r_k
inline double blended_style_reward(const std::vector<double>& body_rewards,
                                   const std::vector<HandBlend>& hands, double scale,
                                   BlendMode mode) {
  for (const auto& h : hands)
    if (!(h.sigma >= 0.0 && h.sigma <= 1.0))
      throw ConfigError("blended_style_reward: sigma out of [0, 1]");
  double r = scale;
  switch (mode) {
    case BlendMode::PerHand:
      for (const auto& h : hands)
        r *= std::max(0.0, (1.0 - h.sigma) * h.style + h.sigma * h.interaction);
      break;
    case BlendMode::Synchronized: {
      double max_sigma = 0.0;
      for (const auto& h : hands) max_sigma = std::max(max_sigma, h.sigma);
      r *= 1.0 - max_sigma;
      for (const auto& h : hands) r *= h.sigma * h.interaction;
      break;
    }
  }
  for (double v : body_rewards) r *= v;
  return r;
}

struct RewardWeights {
  double task = 0.5;               // weight on the task reward
  double style = 0.5;              // weight on the style reward
  double scale = 1.0;              // product scale c
  double interaction_offset = 0.3; // added to the interaction reward
  double w_disc = 5.0;             // discriminator loss weight
  double w_gp = 5.0;               // gradient penalty weight
  double w_reg = 1e-4;             // weight decay weight

  void validate() const {
    if (task < 0.0 || style < 0.0 || scale < 0.0 || interaction_offset < 0.0 ||
        w_disc < 0.0 || w_gp < 0.0 || w_reg < 0.0)
      throw ConfigError("reward weights must be non-negative");
    if (std::abs(task + style - 1.0) > 1e-9)
      throw ConfigError("task and style reward weights must sum to 1");
  }
};

inline double total_reward(double task_reward, double style_reward,
                           const RewardWeights& w) {
  return w.task * task_reward + w.style * style_reward;
}

/// Per-step reward decomposition kept for logging.
struct StyleRewardBreakdown {
  std::vector<double> part;             // style reward per part id
  std::vector<double> hand_interaction; // interaction reward per hand
  std::vector<double> hand_sigma;       // proximity coefficient per hand
  double style = 0.0;                   // combined style reward
  double task = 0.0;
  double total = 0.0;
};

}  // namespace pmp::style
