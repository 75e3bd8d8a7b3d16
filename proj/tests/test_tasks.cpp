#include <catch2/catch_amalgamated.hpp>

#include "pmp/envs/characters.hpp"
#include "pmp/tasks/rewards.hpp"
#include "pmp/tasks/termination.hpp"

using namespace pmp;
using namespace pmp::tasks;

TEST_CASE("target location reward hits its pinned values") {
  TargetLocationParams p;  // 0.5/1.0, v*=2, weights 0.7/0.3
  CHECK(target_location_reward(Vector2d(0, 0), Vector2d(3, -1), p) == 1.0);
  CHECK(target_location_reward(Vector2d(1, 1), Vector2d(2, 2), p) ==
        Catch::Approx(0.7 * std::exp(-1.0) + 0.3).margin(1e-12));
  CHECK(target_location_reward(Vector2d(1, 1), Vector2d(2, 2), p) ==
        Catch::Approx(0.557515).margin(1e-6));
  // Far away, closing at 1 m/s against v*=2: velocity bell at e^-1.
  const double far = target_location_reward(Vector2d(100, 0), Vector2d(1, 0), p);
  CHECK(far == Catch::Approx(0.3 * std::exp(-1.0)).margin(1e-9));
  CHECK(0.3 * 0.367879 == Catch::Approx(far).margin(1e-6));
}

TEST_CASE("sight reward wraps the angle difference") {
  CHECK(sight_reward(0.7, 0.7) == 1.0);
  CHECK(sight_reward(1.0, 0.0) == Catch::Approx(0.135335).margin(1e-6));
  CHECK(sight_reward(M_PI - 0.1, -M_PI + 0.1) == Catch::Approx(std::exp(-0.08)).epsilon(1e-12));
  CHECK(sight_reward(M_PI - 0.1, -M_PI + 0.1) == Catch::Approx(0.923116).margin(1e-6));
}

TEST_CASE("heading reward saturates at the style speed") {
  CHECK(heading_reward(Vector2d(0.6, 0), Vector2d(1, 0), 0.5) == 1.0);
  CHECK(heading_reward(Vector2d(0, 0), Vector2d(1, 0), 0.5) ==
        Catch::Approx(0.778801).margin(1e-6));
  CHECK(heading_reward(Vector2d(0, 0), Vector2d(1, 0), 0.3) ==
        Catch::Approx(0.913931).margin(1e-6));
  // Moving away counts as zero projected speed or worse.
  CHECK(heading_reward(Vector2d(-1, 0), Vector2d(1, 0), 0.5) <
        heading_reward(Vector2d(0, 0), Vector2d(1, 0), 0.5));
}

TEST_CASE("hand reach reward multiplies gated proximity bells") {
  std::vector<Vector2d> at = {{0, 0}, {0, 0}};
  CHECK(hand_reach_reward(at, {1.0, 1.0}, 10.0) == 1.0);
  CHECK(hand_reach_reward(at, {0.0, 1.0}, 10.0) == 0.0);
  std::vector<Vector2d> off = {{0.1, 0}, {0.2, 0}};
  CHECK(hand_reach_reward(off, {1.0, 1.0}, 10.0) ==
        Catch::Approx(std::exp(-0.5)).epsilon(1e-12));
  CHECK(hand_reach_reward(off, {1.0, 1.0}, 10.0) == Catch::Approx(0.606531).margin(1e-6));
}

TEST_CASE("cart task reward composes hand and cart terms") {
  CHECK(cart_task_reward(1.0, 1.0) == 1.0);
  CHECK(cart_task_reward(0.5, 0.0) == 0.0);
  CHECK(cart_task_reward(0.5, 1.0) == Catch::Approx(0.6).margin(1e-12));
  const TargetLocationParams p = cart_location_params();
  CHECK(p.gamma_vel == 64.0);
  CHECK(p.v_star == 0.5);
  CHECK(p.w_pos == 0.8);
}

TEST_CASE("hang task reward gates on palm alignment") {
  std::vector<Vector2d> at = {{0, 0}, {0, 0}};
  CHECK(hang_task_reward(at, {1.0, 1.0}) == 1.0);
  CHECK(hang_task_reward(at, {0.0, 1.0}) == 0.0);
  std::vector<Vector2d> off = {{0.5, 0}, {0, 0}};
  CHECK(hang_task_reward(off, {1.0, 1.0}) == Catch::Approx(0.472367).margin(1e-6));
}

TEST_CASE("barbell task reward composes lift, balance, and grip") {
  CHECK(barbell_task_reward(1.0, 1.0, 1.0) == 1.0);
  CHECK(barbell_task_reward(0.0, 1.0, 1.0) == Catch::Approx(0.2).margin(1e-12));
  CHECK(barbell_task_reward(1.0, 1.0, 0.5) == Catch::Approx(0.5).margin(1e-12));
  CHECK(barbell_balance_reward(0.0) == 1.0);
  CHECK(barbell_balance_reward(0.5) == Catch::Approx(std::exp(-1.0)).epsilon(1e-12));
}

TEST_CASE("climb task reward keeps a floor offset and phase sharpness") {
  std::vector<Vector2d> at = {{0, 0}, {0, 0}};
  CHECK(climb_task_reward(at, {1.0, 1.0}, true) == 1.0);
  std::vector<Vector2d> far = {{100, 0}, {0, 100}};
  CHECK(climb_task_reward(far, {1.0, 1.0}, true) == Catch::Approx(0.0025).margin(1e-12));
  CHECK(climb_task_reward(far, {0.0, 1.0}, true) == 0.0);
  // Same miss distance hurts more during the first hang.
  std::vector<Vector2d> near = {{0.1, 0}, {0.1, 0}};
  CHECK(climb_task_reward(near, {1.0, 1.0}, true) <
        climb_task_reward(near, {1.0, 1.0}, false));
}

TEST_CASE("task formulas match straight-line transcriptions on random input") {
  Rng rng(41);
  for (int i = 0; i < 1000; ++i) {
    const Vector2d p(rng.uniform(-3, 3), rng.uniform(-3, 3));
    const Vector2d v(rng.uniform(-3, 3), rng.uniform(-3, 3));
    TargetLocationParams tp;
    {
      const double rp = std::exp(-0.5 * (p.x() * p.x() + p.y() * p.y()));
      const double n = std::sqrt(p.x() * p.x() + p.y() * p.y());
      double rv = 1.0;
      if (n > 0.0) {
        const double proj = (v.x() * p.x() + v.y() * p.y()) / n;
        const double sh = std::max(0.0, 2.0 - proj);
        rv = std::exp(-sh * sh);
      }
      CHECK(target_location_reward(p, v, tp) ==
            Catch::Approx(0.7 * rp + 0.3 * rv).margin(1e-12));
    }
    {
      const double a = rng.uniform(-6, 6), b = rng.uniform(-6, 6);
      double d = std::fmod(a - b, 2.0 * M_PI);
      if (d <= -M_PI) d += 2.0 * M_PI;
      if (d > M_PI) d -= 2.0 * M_PI;
      CHECK(sight_reward(a, b) == Catch::Approx(std::exp(-2.0 * d * d)).margin(1e-12));
    }
    {
      const double vs = rng.uniform(0.1, 1.0);
      const double sh = std::max(0.0, vs - v.x());
      CHECK(heading_reward(v, Vector2d(1, 0), vs) ==
            Catch::Approx(std::exp(-sh * sh)).margin(1e-12));
    }
    {
      const std::vector<Vector2d> hp = {p, v};
      const std::vector<double> c = {rng.uniform(0, 1), rng.uniform(0, 1)};
      const double g = rng.uniform(0.5, 20.0);
      const double manual = c[0] * std::exp(-g * p.squaredNorm()) * c[1] *
                            std::exp(-g * v.squaredNorm());
      const double got = hand_reach_reward(hp, c, g);
      CHECK(got == Catch::Approx(manual).margin(1e-12));
      CHECK(got >= 0.0);
      CHECK(got <= 1.0);

      const bool first = rng.uniform() < 0.5;
      const double gam = first ? 128.0 : 16.0;
      const double m2 = c[0] * (0.95 * std::exp(-gam * p.squaredNorm()) + 0.05) * c[1] *
                        (0.95 * std::exp(-gam * v.squaredNorm()) + 0.05);
      const double got2 = climb_task_reward(hp, c, first);
      CHECK(got2 == Catch::Approx(m2).margin(1e-12));
      CHECK(got2 >= 0.0);
      CHECK(got2 <= 1.0);
    }
    {
      const double rc = rng.uniform(0, 1), rh = rng.uniform(0, 1);
      CHECK(cart_task_reward(rc, rh) == Catch::Approx(rh * (0.8 * rc + 0.2)).margin(1e-12));
      const double rb = rng.uniform(0, 1), rb2 = rng.uniform(0, 1);
      CHECK(barbell_task_reward(rb, rb2, rh) ==
            Catch::Approx(rh * (0.8 * rb * rb2 + 0.2)).margin(1e-12));
    }
    // Range property across the board.
    CHECK(target_location_reward(p, v, tp) >= 0.0);
    CHECK(target_location_reward(p, v, tp) <= 1.0);
  }
}

namespace {

sim::World walker_world() {
  sim::SimParams params;
  return sim::World(pmp::envs::make_walker(), {pmp::envs::ball_object(0.4, 1.0)}, params);
}

sim::Contact ground_contact(int body) {
  sim::Contact c;
  c.body = body;
  c.other = -1;
  c.normal = Vector2d(0, 1);
  c.force = Vector2d(0, 30);
  return c;
}

}  // namespace

TEST_CASE("termination latches fall, drop, and deadline") {
  sim::World w = walker_world();
  TerminationTracker track(w);
  TerminationRule rule;
  rule.validate();

  sim::SimState s = w.make_state();
  s.obj_pos[0].y() = 1.0;
  CHECK(track.check(s, rule, 0.1) == TerminationReason::None);

  SECTION("foot contact is allowed, torso contact is a fall") {
    s.contacts = {ground_contact(w.link_index("shin_l"))};
    CHECK(track.check(s, rule, 0.2) == TerminationReason::None);
    s.contacts = {ground_contact(w.link_index("torso"))};
    CHECK(track.check(s, rule, 0.3) == TerminationReason::Fall);
    // Monotone: standing back up does not clear the episode.
    s.contacts.clear();
    CHECK(track.check(s, rule, 0.4) == TerminationReason::Fall);
    track.reset();
    CHECK(track.check(s, rule, 0.5) == TerminationReason::None);
  }
  SECTION("ball drop fires below the height floor") {
    rule.ball_drop = true;
    s.obj_pos[0].y() = 0.05;
    CHECK(track.check(s, rule, 0.2) == TerminationReason::BallDrop);
    s.obj_pos[0].y() = 1.0;
    CHECK(track.check(s, rule, 0.3) == TerminationReason::BallDrop);
  }
  SECTION("ground contact matters only after the deadline") {
    rule.fall = false;
    rule.ground_deadline = true;
    s.contacts = {ground_contact(w.link_index("shin_l"))};
    CHECK(track.check(s, rule, 0.69) == TerminationReason::None);
    CHECK(track.check(s, rule, 0.71) == TerminationReason::Deadline);
  }
  SECTION("rule validation") {
    TerminationRule bad;
    bad.deadline_s = 0.0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
  }
}

TEST_CASE("a collapsing walker eventually triggers the fall rule") {
  sim::World w = walker_world();
  sim::SimState s = w.make_state();
  s.root_pos = {0.0, 0.58};
  s.root_ang = 0.4;  // tip it over
  s.root_angvel = 2.0;
  w.refresh_velocities(s);
  TerminationTracker track(w);
  TerminationRule rule;
  sim::PDTarget t;
  t.q_star = VectorXd::Zero(w.joint_count());
  TerminationReason r = TerminationReason::None;
  for (int i = 0; i < 90 && r == TerminationReason::None; ++i) {
    s = w.step(s, t);
    r = track.check(s, rule, s.time);
  }
  CHECK(r == TerminationReason::Fall);
}
