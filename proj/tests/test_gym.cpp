#include <catch2/catch_amalgamated.hpp>

#include "pmp/gym/env.hpp"
#include "pmp/gym/expert.hpp"
#include "pmp/gym/interaction.hpp"
#include "pmp/gym/rewards.hpp"

using namespace pmp;
using namespace pmp::gym;

TEST_CASE("rod reward hits its pinned values") {
  CHECK(rod_reward(0.0, 0.0) == 1.0);
  CHECK(rod_reward(1.0, 0.0) == Catch::Approx(0.810364).margin(1e-6));
  CHECK(rod_reward(0.0, std::sqrt(10.0)) == Catch::Approx(0.557515).margin(1e-6));
}

TEST_CASE("finger reward depends only on the worst fingertip") {
  CHECK(finger_reward({0.0, 0.0}) == 1.0);
  CHECK(finger_reward({0.02, 0.1}) == Catch::Approx(std::exp(-1.28)).epsilon(1e-12));
  CHECK(finger_reward({0.02, 0.1}) == Catch::Approx(0.278037).margin(1e-6));
  CHECK(finger_reward({0.05, 0.1}) == finger_reward({0.0, 0.1}));
}

TEST_CASE("grasp effort reward hits its pinned values") {
  CHECK(mcp_reward(1.0) == 1.0);
  CHECK(mcp_reward(0.0) == Catch::Approx(0.049787).margin(1e-6));
  CHECK(mcp_reward(0.5) == Catch::Approx(0.472367).margin(1e-6));
}

TEST_CASE("tip alignment reward hits its pinned values") {
  CHECK(tip_reward({1.0, 1.0}) == 1.0);
  CHECK(tip_reward({0.0, 1.0}) == Catch::Approx(0.049787).margin(1e-6));
  CHECK(tip_reward({-1.0, 1.0}) == Catch::Approx(6.144e-6).margin(1e-9));
}

TEST_CASE("wrist reward factorizes into tracking and damping") {
  CHECK(wrist_reward(0.2, 0.2, 0.0) == 1.0);
  CHECK(wrist_reward(0.0, 1.0, 0.0) == Catch::Approx(0.049787).margin(1e-6));
  const double full = wrist_reward(0.1, 0.6, 2.0);
  CHECK(full == Catch::Approx(wrist_reward(0.1, 0.6, 0.0) * wrist_reward(0.0, 0.0, 2.0))
                    .epsilon(1e-12));
}

TEST_CASE("torque reward hits its pinned values") {
  CHECK(torque_reward({}) == 1.0);
  CHECK(torque_reward({0.0, 0.0, 0.0}) == 1.0);
  CHECK(torque_reward({10.0, 20.0}) == Catch::Approx(std::exp(-1.0)).epsilon(1e-12));
  CHECK(torque_reward({10.0, 20.0}) == Catch::Approx(0.367879).margin(1e-6));
}

TEST_CASE("total grasp reward combines product and regularizer") {
  GymRewardTerms t;
  CHECK(gym_total_reward(t) == 1.0);
  t.rod = 0.0;
  CHECK(gym_total_reward(t) == 0.05);
  t = GymRewardTerms{};
  t.torque = 0.5;
  CHECK(gym_total_reward(t) == Catch::Approx(0.975).margin(1e-12));
}

TEST_CASE("reward formulas match straight-line transcriptions on random input") {
  Rng rng(31);
  for (int i = 0; i < 1000; ++i) {
    const double v = rng.uniform(0.0, 4.0), w = rng.uniform(-6.0, 6.0);
    CHECK(rod_reward(v, w) ==
          Catch::Approx(0.3 * std::exp(-v * v) + 0.7 * std::exp(-0.1 * w * w)).margin(1e-12));

    std::vector<double> d = {rng.uniform(0.0, 0.3), rng.uniform(0.0, 0.3)};
    const double dm = std::max(d[0], d[1]);
    CHECK(finger_reward(d) == Catch::Approx(std::exp(-128.0 * dm * dm)).margin(1e-12));

    const double a = rng.uniform(0.0, 1.0);
    CHECK(mcp_reward(a) == Catch::Approx(std::exp(-3.0 * (1.0 - a) * (1.0 - a))).margin(1e-12));

    std::vector<double> dots = {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
    const double worst =
        std::max((1 - dots[0]) * (1 - dots[0]), (1 - dots[1]) * (1 - dots[1]));
    CHECK(tip_reward(dots) == Catch::Approx(std::exp(-3.0 * worst)).margin(1e-12));

    const double q = rng.uniform(-0.6, 0.6), qt = rng.uniform(-0.6, 0.6),
                 qd = rng.uniform(-5.0, 5.0);
    CHECK(wrist_reward(q, qt, qd) ==
          Catch::Approx(std::exp(-3.0 * (qt - q) * (qt - q)) * std::exp(-0.1 * qd * qd))
              .margin(1e-12));

    std::vector<double> taus = {rng.uniform(-8.0, 8.0), rng.uniform(-8.0, 8.0),
                                rng.uniform(-8.0, 8.0)};
    const double s = taus[0] * taus[0] + taus[1] * taus[1] + taus[2] * taus[2];
    CHECK(torque_reward(taus) == Catch::Approx(std::exp(-0.002 * s)).margin(1e-12));

    GymRewardTerms t{rod_reward(v, w), finger_reward(d), mcp_reward(a),
                     tip_reward(dots), wrist_reward(q, qt, qd), torque_reward(taus)};
    const double total = gym_total_reward(t);
    CHECK(total ==
          Catch::Approx(0.95 * t.rod * t.finger * t.mcp * t.tip * t.wrist + 0.05 * t.torque)
              .margin(1e-12));
    CHECK(total > 0.0);
    CHECK(total <= 1.0);
    for (double term : {t.rod, t.finger, t.mcp, t.tip, t.wrist, t.torque}) {
      CHECK(term > 0.0);
      CHECK(term <= 1.0);
    }
  }
}

TEST_CASE("disturbance sampling is uniform in magnitude and direction") {
  DisturbanceConfig c;
  c.scale = 1.0;
  Rng rng(32);
  double mag_sum = 0.0, tau_min = 1e9, tau_max = -1e9;
  std::vector<int> bins(12, 0);
  const int n = 10000;
  for (int i = 0; i < n; ++i) {
    const sim::Wrench w = sample_disturbance(c, rng);
    const double mag = w.force.norm();
    CHECK(mag >= 50.0);
    CHECK(mag <= 100.0);
    mag_sum += mag;
    tau_min = std::min(tau_min, w.torque);
    tau_max = std::max(tau_max, w.torque);
    CHECK(w.torque >= -30.0);
    CHECK(w.torque <= 30.0);
    const double ang = std::atan2(w.force.y(), w.force.x());
    int b = static_cast<int>((ang + M_PI) / (2.0 * M_PI) * 12.0);
    bins[std::min(b, 11)]++;
  }
  CHECK(mag_sum / n == Catch::Approx(75.0).epsilon(0.02));
  CHECK(tau_min < -25.0);
  CHECK(tau_max > 25.0);
  double chi2 = 0.0;
  for (int b : bins) chi2 += (b - n / 12.0) * (b - n / 12.0) / (n / 12.0);
  CHECK(chi2 < 24.72);  // 0.99 quantile, 11 dof

  DisturbanceConfig point;
  point.force_min = point.force_max = 60.0;
  point.scale = 10.0;
  for (int i = 0; i < 10; ++i)
    CHECK(sample_disturbance(point, rng).force.norm() == Catch::Approx(6.0).epsilon(1e-12));

  DisturbanceConfig bad;
  bad.force_min = 10.0;
  bad.force_max = 5.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("interaction state starts contact-free and matches hand FK") {
  GymEnv env;
  Rng rng(33);
  env.reset(rng);

  const sim::World& w = env.world();
  sim::SimState s = w.make_state();
  s.root_pos = Vector2d(0.0, env.config().base_height);
  const double phi = -0.7, psi = -0.4;  // finger 1 closing
  s.q[w.joint_index("f1_mcp")] = phi;
  s.q[w.joint_index("f1_pip")] = psi;
  s.obj_pos[0] = Vector2d(0.085, env.config().base_height);
  s.obj_ang[0] = 0.6;
  w.refresh_velocities(s);

  InteractionState u = build_interaction_state(w, s, env.layout());
  CHECK(u.contact.cwiseAbs().maxCoeff() == 0.0);
  CHECK(u.align.cwiseAbs().maxCoeff() == 0.0);

  // Independent transform: tip = mcp anchor + R(phi)*(0.07,0) + R(phi+psi)*(0.030,0),
  // all in the palm frame because the wrist is at zero.
  auto rot = [](double a, Vector2d v) {
    return Vector2d(std::cos(a) * v.x() - std::sin(a) * v.y(),
                    std::sin(a) * v.x() + std::cos(a) * v.y());
  };
  const Vector2d tip1 =
      Vector2d(0.0, 0.07) + rot(phi, {0.07, 0.0}) + rot(phi + psi, {0.030, 0.0});
  CHECK((u.tips.col(0) - tip1).norm() < 1e-12);
  const Vector2d tip2 = Vector2d(0.0, -0.07) + Vector2d(0.07, 0.0) + Vector2d(0.030, 0.0);
  CHECK((u.tips.col(1) - tip2).norm() < 1e-12);

  const Vector2d end0 = Vector2d(0.085, 0.0) + 0.03 * Vector2d(std::cos(0.6), std::sin(0.6));
  CHECK((u.rod_ends.col(0) - end0).norm() < 1e-12);

  SECTION("rigid translation and rotation of the whole scene is invisible") {
    const VectorXd before = u.flat();
    sim::SimState m = s;
    const Vector2d shift(0.4, -0.2);
    const double spin = 0.9;
    m.root_pos = s.root_pos + shift;
    m.root_ang = s.root_ang + spin;
    m.obj_pos[0] = m.root_pos + rot(spin, s.obj_pos[0] - s.root_pos);
    m.obj_ang[0] = s.obj_ang[0] + spin;
    w.refresh_velocities(m);
    const VectorXd after = build_interaction_state(w, m, env.layout()).flat();
    CHECK((after - before).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("closed grip touches and holds the rod") {
  GymEpisodeConfig cfg;
  cfg.rod_jitter = 0.0;
  cfg.rod_angle_min = cfg.rod_angle_max = 0.0;
  GymEnv env(cfg);
  Rng rng(34);
  env.reset(rng);

  // Close both fingers hard, wrist neutral, pips wrapping inward.
  VectorXd a(5);
  const auto& w = env.world();
  a.setZero();
  auto set = [&](const char* j, double v) {
    // action order equals joint order
    a[w.joint_index(j)] = v;
  };
  set("wrist", 0.0);
  set("f1_mcp", -1.0);
  set("f1_pip", -1.0);
  set("f2_mcp", 1.0);
  set("f2_pip", 1.0);

  const Vector2d start = env.sim_state().obj_pos[0];
  bool touched = false;
  for (int t = 0; t < 60; ++t) {
    env.step(a, rng);
    touched = touched || env.rod_contact();
  }
  CHECK(touched);
  CHECK(env.rod_contact());
  const Vector2d end = env.sim_state().obj_pos[0];
  CHECK((end - start).norm() < 0.05);

  const InteractionState& u = env.interaction_state();
  CHECK(u.contact.maxCoeff() == 1.0);
  CHECK(u.align.cwiseAbs().maxCoeff() <= 1.0 + 1e-9);
  CHECK(u.align.cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("gym episodes are deterministic and bounded") {
  GymEnv a, b;
  Rng ra(35), rb(35);
  VectorXd oa = a.reset(ra), ob = b.reset(rb);
  REQUIRE(oa.size() == a.obs_dim());
  CHECK(oa == ob);
  Rng act(36);
  for (int t = 0; t < 40; ++t) {
    VectorXd u = act.normal_vector(a.action_dim()) * 0.3;
    auto sa = a.step(u, ra);
    auto sb = b.step(u, rb);
    CHECK(sa.obs == sb.obs);
    CHECK(sa.task_reward == sb.task_reward);
    CHECK(sa.task_reward > 0.0);
    CHECK(sa.task_reward <= 1.0);
    if (sa.done) break;
  }
}

TEST_CASE("an open hand loses the rod and the episode ends early") {
  GymEnv env;
  Rng rng(37);
  env.reset(rng);
  VectorXd open(5);
  open << 0.0, 1.0, 1.0, -1.0, -1.0;  // splay both fingers away
  bool done = false;
  int steps = 0;
  while (!done && steps < env.max_steps()) {
    done = env.step(open, rng).done;
    ++steps;
  }
  CHECK(done);
  CHECK(steps < env.max_steps());
  CHECK(env.rod_lost());
}

TEST_CASE("expert pair collection filters, bounds, and round-trips") {
  GymEnv env;
  Rng rng(38);
  auto close_policy = [&](const VectorXd&) {
    VectorXd a(5);
    a << 0.0, -1.0, -1.0, 1.0, 1.0;
    return a;
  };

  auto none = collect_expert_pairs(env, close_policy, 0, rng);
  CHECK(none.empty());
  save_expert_pairs("tmp_pairs.json", none, env.obs_dim() - 1, env.action_dim());
  CHECK(load_expert_pairs("tmp_pairs.json").pairs.empty());

  Rng rng_all(39), rng_filt(39);
  auto unfiltered = collect_expert_pairs(env, close_policy, 2, rng_all, false);
  auto filtered = collect_expert_pairs(env, close_policy, 2, rng_filt, true);
  CHECK(unfiltered.size() <= static_cast<std::size_t>(2 * env.max_steps()));
  CHECK(filtered.size() <= unfiltered.size());
  CHECK(!filtered.empty());  // the scripted grasp does touch the rod

  const int u_dim = env.obs_dim() - 1;
  for (const auto& p : filtered) {
    CHECK(p.o.size() == u_dim);
    CHECK(p.o2.size() == env.action_dim());
  }
  save_expert_pairs("tmp_pairs.json", filtered, u_dim, env.action_dim());
  ExpertDataset back = load_expert_pairs("tmp_pairs.json");
  REQUIRE(back.pairs.size() == filtered.size());
  CHECK(back.u_dim == u_dim);
  for (std::size_t i = 0; i < filtered.size(); ++i) {
    CHECK(back.pairs[i].o == filtered[i].o);
    CHECK(back.pairs[i].o2 == filtered[i].o2);
  }
  std::remove("tmp_pairs.json");
  CHECK_THROWS_AS(load_expert_pairs("tmp_pairs.json"), IoError);
}
