#pragma once

#include <vector>

#include "pmp/common.hpp"
#include "pmp/motion/parts.hpp"

namespace pmp::envs {

/// Interaction inputs one hand contributes to the blended style reward.
struct HandSignal {
  motion::ObservationPair uy;  // interaction state u and action y
  double sigma = 0.0;          // proximity coefficient
  int part = -1;               // style part id this hand replaces/blends
};

/// Everything the style-reward path consumes after one control step.
struct StyleSignals {
  std::vector<motion::ObservationPair> part_pairs;  // (o, o') per part
  std::vector<HandSignal> hands;
};

struct StepResult {
  VectorXd obs;
  double task_reward = 0.0;
  bool done = false;
};

class Env {
 public:
  virtual ~Env() = default;
  virtual int obs_dim() const = 0;
  virtual int action_dim() const = 0;
  virtual int max_steps() const = 0;
  virtual VectorXd reset(Rng& rng) = 0;
  virtual StepResult step(const VectorXd& action, Rng& rng) = 0;
  /// Style-path observations for the step just taken; empty when unused.
  virtual const StyleSignals& style_signals() const { return none_; }

 private:
  StyleSignals none_;
};

}  // namespace pmp::envs
