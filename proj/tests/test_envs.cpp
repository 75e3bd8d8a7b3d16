#include <catch2/catch_amalgamated.hpp>

#include "pmp/envs/grasp.hpp"
#include "pmp/envs/point_mass.hpp"
#include "pmp/envs/walker.hpp"
#include "pmp/gym/expert.hpp"
#include "pmp/trainer/trainer.hpp"

using namespace pmp;
using namespace pmp::envs;

namespace {

std::vector<motion::MotionClip> walker_clips(std::uint64_t seed) {
  std::vector<std::string> joints = {"hip_l", "knee_l", "hip_r",
                                     "knee_r", "shoulder_l", "shoulder_r"};
  Rng rng(seed);
  std::vector<motion::MotionClip> clips;
  clips.push_back(motion::generate_procedural_clip(motion::ClipStyle::Gait, 2.0, 30.0,
                                                   joints, rng));
  clips.push_back(motion::generate_procedural_clip(motion::ClipStyle::Wave, 2.0, 30.0,
                                                   joints, rng));
  return clips;
}

WalkerEnv make_env(WalkerEnvConfig cfg = {}) {
  return WalkerEnv(cfg, walker_two_parts(), walker_clips(7));
}

}  // namespace

TEST_CASE("walker env exposes the expected interface dimensions") {
  WalkerEnv env = make_env();
  CHECK(env.obs_dim() == 17);  // root pose/velocity summary + q + qd
  CHECK(env.action_dim() == 6);
  CHECK(env.max_steps() == 300);

  Rng rng(3);
  VectorXd obs = env.reset(rng);
  REQUIRE(obs.size() == 17);
  CHECK(obs.allFinite());
  // Root starts at standing height: the height feature is near zero.
  CHECK(std::abs(obs[0]) < 0.05);
}

TEST_CASE("walker reference initialization varies the composite pose") {
  WalkerEnv env = make_env();
  Rng rng(11);
  VectorXd a = env.reset(rng);
  VectorXd b = env.reset(rng);
  CHECK((a - b).norm() > 1e-6);  // different clip frames per reset

  // Same rng state reproduces the same pose bit for bit.
  Rng r1(5), r2(5);
  WalkerEnv e1 = make_env(), e2 = make_env();
  CHECK(e1.reset(r1) == e2.reset(r2));
}

TEST_CASE("walker steps produce per-part style pairs with chained features") {
  WalkerEnv env = make_env();
  Rng rng(2);
  env.reset(rng);
  VectorXd a = VectorXd::Zero(6);

  StepResult r1 = env.step(a, rng);
  const StyleSignals& s1 = env.style_signals();
  REQUIRE(s1.part_pairs.size() == 2);
  CHECK(s1.hands.empty());
  CHECK(s1.part_pairs[0].part == 0);
  CHECK(s1.part_pairs[1].part == 1);
  CHECK(s1.part_pairs[0].o.size() == 12);  // 4 joints doubled + 2 end effectors
  CHECK(s1.part_pairs[1].o.size() == 8);   // 2 joints doubled + 2 end effectors
  CHECK(r1.task_reward >= 0.0);
  CHECK(r1.task_reward <= 1.0);

  // Consecutive steps chain: this step's start is the last step's end.
  std::vector<VectorXd> prev_end = {s1.part_pairs[0].o2, s1.part_pairs[1].o2};
  env.step(a, rng);
  const StyleSignals& s2 = env.style_signals();
  CHECK(s2.part_pairs[0].o == prev_end[0]);
  CHECK(s2.part_pairs[1].o == prev_end[1]);
}

TEST_CASE("walker heading reward follows the root velocity") {
  WalkerEnvConfig cfg;
  cfg.reference_init = false;  // stationary start
  WalkerEnv env(cfg, walker_two_parts(), walker_clips(7));
  Rng rng(4);
  env.reset(rng);
  StepResult r = env.step(VectorXd::Zero(6), rng);
  const double expect =
      tasks::heading_reward(env.state().root_vel, cfg.heading, cfg.heading_v_star,
                            cfg.heading_gamma);
  CHECK(r.task_reward == expect);
}

TEST_CASE("walker falls terminate the episode when enabled") {
  WalkerEnvConfig cfg;
  cfg.reference_init = false;
  WalkerEnv env(cfg, walker_two_parts(), walker_clips(7));
  Rng rng(9);
  env.reset(rng);

  // Fold the legs so the torso must come down.
  VectorXd a(6);
  a << 1.0, -1.0, 1.0, -1.0, 0.0, 0.0;
  bool done = false;
  int steps = 0;
  for (; steps < 300 && !done; ++steps) done = env.step(a, rng).done;
  CHECK(done);
  CHECK(steps < 300);

  WalkerEnvConfig loose = cfg;
  loose.fall_termination = false;
  WalkerEnv env2(loose, walker_two_parts(), walker_clips(7));
  Rng rng2(9);
  env2.reset(rng2);
  int steps2 = 0;
  bool done2 = false;
  for (; steps2 < 300 && !done2; ++steps2) done2 = env2.step(a, rng2).done;
  CHECK(steps2 > steps);  // without fall termination only the cap ends it
}

TEST_CASE("gantry torque rights a tilted walker") {
  auto tilt_after = [](double gantry) {
    WalkerEnvConfig cfg;
    cfg.reference_init = false;
    cfg.gantry = gantry;
    cfg.fall_termination = false;
    WalkerEnv env(cfg, walker_two_parts(), walker_clips(7));
    Rng rng(13);
    env.reset(rng);
    // Kick the torso over, then let the support react.
    for (int i = 0; i < 3; ++i) env.step(VectorXd::Zero(6), rng);
    double worst = 0.0;
    for (int i = 0; i < 60; ++i) {
      VectorXd a = VectorXd::Zero(6);
      a[4] = 1.0;  // swing an arm to disturb balance
      env.step(a, rng);
      worst = std::max(worst, std::abs(env.state().root_ang));
    }
    return worst;
  };
  const double free_tilt = tilt_after(0.0);
  const double held_tilt = tilt_after(8.0);
  INFO("free " << free_tilt << " held " << held_tilt);
  CHECK(held_tilt < free_tilt);
}

TEST_CASE("whole-body part spec covers the walker in one stream") {
  WalkerEnv env(WalkerEnvConfig{}, walker_whole_body(), walker_clips(7));
  CHECK(env.parts().count() == 1);
  Rng rng(6);
  env.reset(rng);
  env.step(VectorXd::Zero(6), rng);
  REQUIRE(env.style_signals().part_pairs.size() == 1);
  CHECK(env.style_signals().part_pairs[0].o.size() == 20);  // 6 joints doubled + 4 ends
}

TEST_CASE("point mass rejects malformed configs") {
  PointMassConfig bad;
  bad.start_max = 0.05;  // below start_min
  CHECK_THROWS_AS(PointMassEnv(bad), ConfigError);
  PointMassConfig bound;
  bound.bound = 0.2;  // inside the start band
  CHECK_THROWS_AS(PointMassEnv(bound), ConfigError);
}

TEST_CASE("point mass episodes end at the cap and report bounded rewards") {
  PointMassEnv env;
  Rng rng(1);
  env.reset(rng);
  int steps = 0;
  bool done = false;
  while (!done) {
    StepResult r = env.step(VectorXd::Zero(2), rng);
    CHECK(r.task_reward > 0.0);
    CHECK(r.task_reward <= 1.0);
    done = r.done;
    ++steps;
  }
  CHECK(steps == env.max_steps());
}

TEST_CASE("grasp env publishes one interaction hand signal per step") {
  GraspEnv env;
  CHECK(env.obs_dim() == env.gym().obs_dim());
  CHECK(env.pair_dim() == env.obs_dim() - 1 + env.action_dim());

  Rng rng(4);
  env.reset(rng);
  const VectorXd u_before = env.gym().interaction_state().flat();
  const double d_before = gym::wrist_object_distance(env.gym().world(),
                                                     env.gym().sim_state(),
                                                     env.gym().layout());
  VectorXd a = VectorXd::Constant(env.action_dim(), 0.3);
  env.step(a, rng);

  const StyleSignals& s = env.style_signals();
  CHECK(s.part_pairs.empty());
  REQUIRE(s.hands.size() == 1);
  CHECK(s.hands[0].part == 0);
  CHECK(s.hands[0].uy.part == 0);
  CHECK(s.hands[0].uy.o == u_before);      // pair state pre-dates the step
  CHECK(s.hands[0].uy.o2 == a);
  CHECK(s.hands[0].uy.o.size() + s.hands[0].uy.o2.size() == env.pair_dim());
  CHECK(s.hands[0].sigma == style::interaction_kernel(d_before));
  // The rod spawns inside the proximity radius, so the prior is fully on.
  CHECK(s.hands[0].sigma == 1.0);
}

TEST_CASE("grasp env trains end to end against an interaction discriminator") {
  trainer::TrainerConfig cfg;
  cfg.ppo.horizon = 8;
  cfg.ppo.env_count = 2;
  cfg.ppo.minibatch = 16;
  cfg.ppo.epochs = 1;
  cfg.ppo.disc_batch = 16;
  cfg.ppo.demo_capacity = 500;
  cfg.ppo.replay_capacity = 500;
  cfg.policy_hidden = {16};
  cfg.value_hidden = {16};
  cfg.disc_hidden = {8};
  cfg.seed = 21;
  cfg.body_parts = 0;

  GraspEnv probe;
  cfg.stream_pair_dims = {probe.pair_dim()};

  std::vector<std::unique_ptr<envs::Env>> envs;
  for (int e = 0; e < cfg.ppo.env_count; ++e) envs.push_back(std::make_unique<GraspEnv>());
  trainer::Trainer tr(std::move(envs), cfg);
  CHECK(tr.lambda_demo() == 0.0);  // no body parts: substitution stays off

  // Expert pairs from a fixed jitter policy; no contact filter keeps it fast.
  gym::GymEnv gym_env;
  Rng expert_rng(9);
  auto drive = [&](const VectorXd&) { return VectorXd::Constant(probe.action_dim(), 0.2); };
  auto pairs = gym::collect_expert_pairs(gym_env, drive, 2, expert_rng, false);
  REQUIRE(pairs.size() > 50);
  CHECK(static_cast<int>(pairs[0].o.size() + pairs[0].o2.size()) == probe.pair_dim());
  tr.seed_demo(0, pairs);

  for (int i = 0; i < 2; ++i) {
    trainer::UpdateStats st = tr.update();
    REQUIRE(st.disc.size() == 1);
    CHECK(std::isfinite(st.disc[0].total));
    CHECK(std::isfinite(st.style_mean));
    CHECK(st.streams.sigma_samples > 0);
    CHECK(st.streams.sigma_mean > 0.5);  // rod stays near the palm early on
  }
}
