#pragma once

#include <utility>

#include "pmp/envs/env.hpp"
#include "pmp/gym/env.hpp"
#include "pmp/gym/interaction.hpp"
#include "pmp/style/rewards.hpp"

namespace pmp::envs {

/// Grasp-and-hold task: the gripper gym wrapped as a style-emitting
/// environment. Each step publishes one hand signal carrying the
/// state-action pair (u, y) for the interaction discriminator and the
/// wrist-object proximity coefficient; there are no body-part streams, so
/// the blended style reward reduces to max(0, sigma * r_interaction).
class GraspEnv : public Env {
 public:
  explicit GraspEnv(const gym::GymEpisodeConfig& cfg = {}) : gym_(cfg) {
    signals_.hands.resize(1);
    signals_.hands[0].part = 0;
    signals_.hands[0].uy.part = 0;
  }

  int obs_dim() const override { return gym_.obs_dim(); }
  int action_dim() const override { return gym_.action_dim(); }
  int max_steps() const override { return gym_.max_steps(); }

  VectorXd reset(Rng& rng) override { return gym_.reset(rng); }

  StepResult step(const VectorXd& action, Rng& rng) override {
    // The pair pre-dates the transition: interaction state before the step,
    // the action commanded from it, and the proximity measured with it.
    motion::ObservationPair uy;
    uy.part = 0;
    uy.o = gym_.interaction_state().flat();
    uy.o2 = action;
    const double dist =
        gym::wrist_object_distance(gym_.world(), gym_.sim_state(), gym_.layout());
    StepResult r = gym_.step(action, rng);
    HandSignal& h = signals_.hands[0];
    h.uy = std::move(uy);
    h.sigma = style::interaction_kernel(dist);
    return r;
  }

  const StyleSignals& style_signals() const override { return signals_; }

  /// Dimension of the concatenated (u, y) discriminator input.
  int pair_dim() const { return gym_.obs_dim() - 1 + gym_.action_dim(); }

  gym::GymEnv& gym() { return gym_; }
  const gym::GymEnv& gym() const { return gym_; }

 private:
  gym::GymEnv gym_;
  StyleSignals signals_;
};

}  // namespace pmp::envs
