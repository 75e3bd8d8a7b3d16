#include <catch2/catch_amalgamated.hpp>

#include <set>

#include "pmp/envs/characters.hpp"
#include "pmp/motion/buffers.hpp"
#include "pmp/motion/clip.hpp"
#include "pmp/motion/parts.hpp"

using namespace pmp;
using namespace pmp::motion;

namespace {

sim::World walker_world() {
  sim::SimParams p;
  p.enable_contacts = false;
  p.ground = false;
  return sim::World(envs::make_walker(), {}, p);
}

PartSpec walker_parts() {
  PartSpec spec;
  PartDef lower;
  lower.name = "lower";
  lower.joints = {"hip_l", "knee_l", "hip_r", "knee_r"};
  lower.ee_links = {"shin_l", "shin_r"};
  lower.clips = {"gait"};
  PartDef upper;
  upper.name = "upper";
  upper.joints = {"shoulder_l", "shoulder_r"};
  upper.ee_links = {"arm_l", "arm_r"};
  upper.clips = {"wave"};
  spec.parts = {lower, upper};
  spec.base_part = 0;
  return spec;
}

MotionClip ramp_clip(const std::vector<std::string>& joints, int frames, double fps,
                     double slope) {
  MotionClip c;
  c.name = "ramp";
  c.fps = fps;
  c.joints = joints;
  const int nj = static_cast<int>(joints.size());
  for (int f = 0; f < frames; ++f) {
    ClipFrame fr;
    fr.root_pos = {0.1 * f / fps, 0.58};
    fr.root_ang = 0.0;
    fr.q = VectorXd::Constant(nj, slope * f / fps);
    fr.qd = VectorXd::Constant(nj, slope);
    c.frames.push_back(fr);
  }
  return c;
}

std::vector<std::string> walker_joint_names() {
  return {"hip_l", "knee_l", "hip_r", "knee_r", "shoulder_l", "shoulder_r"};
}

}  // namespace

TEST_CASE("procedural clips have consistent velocities and frame counts") {
  Rng rng(5);
  auto clip = generate_procedural_clip(ClipStyle::Gait, 1.0, 30.0, walker_joint_names(), rng);
  CHECK(clip.frame_count() == 30);
  clip.validate();
  for (int f = 0; f + 1 < clip.frame_count(); ++f) {
    const VectorXd fd = (clip.frames[f + 1].q - clip.frames[f].q) * clip.fps;
    CHECK((clip.frames[f].qd - fd).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("gait clips repeat after exactly one period") {
  Rng rng(6);
  auto clip = generate_procedural_clip(ClipStyle::Gait, 2.0, 30.0, walker_joint_names(), rng);
  REQUIRE(clip.frame_count() == 60);
  for (int f = 0; f < 30; ++f)
    CHECK((clip.frames[f].q - clip.frames[f + 30].q).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("clip files round-trip exactly and reject foreign input") {
  Rng rng(7);
  auto clip = generate_procedural_clip(ClipStyle::Wave, 0.8, 30.0, walker_joint_names(), rng);
  const std::string path = "tmp_clip.json";
  save_clip(clip, path);
  MotionClip back = load_clip(path);
  REQUIRE(back.frame_count() == clip.frame_count());
  CHECK(back.name == clip.name);
  CHECK(back.fps == clip.fps);
  for (int f = 0; f < clip.frame_count(); ++f) {
    CHECK(back.frames[f].q == clip.frames[f].q);
    CHECK(back.frames[f].qd == clip.frames[f].qd);
    CHECK(back.frames[f].root_pos == clip.frames[f].root_pos);
  }
  std::remove(path.c_str());
  CHECK_THROWS_AS(load_clip("nope.json"), IoError);
  {
    std::ofstream f(path);
    f << R"({"version": 9, "name": "x", "fps": 30, "joints": [], "frames": []})";
  }
  CHECK_THROWS_AS(load_clip(path), ConfigError);
  std::remove(path.c_str());
}

TEST_CASE("resampling halves the frame count of a double-rate clip") {
  auto names = walker_joint_names();
  MotionClip hi = ramp_clip(names, 61, 60.0, 0.3);  // one second at 60 Hz
  MotionClip lo = resample(hi, 30.0);
  CHECK(lo.frame_count() == 31);
  CHECK(lo.fps == 30.0);
  // Linear channels are reproduced exactly at the resampled instants.
  for (int f = 0; f < lo.frame_count(); ++f) {
    const double t = f / 30.0;
    CHECK(lo.frames[f].q[0] == Catch::Approx(0.3 * t).margin(1e-12));
    CHECK(lo.frames[f].root_pos.x() == Catch::Approx(0.1 * t).margin(1e-12));
  }
}

TEST_CASE("part resolution enforces the disjoint-cover partition rule") {
  sim::World w = walker_world();
  CHECK_NOTHROW(resolve_parts(w, walker_parts()));

  PartSpec overlap = walker_parts();
  overlap.parts[1].joints.push_back("hip_l");
  CHECK_THROWS_AS(resolve_parts(w, overlap), ConfigError);

  PartSpec missing = walker_parts();
  missing.parts[0].joints = {"hip_l", "knee_l", "hip_r"};  // knee_r unclaimed
  CHECK_THROWS_AS(resolve_parts(w, missing), ConfigError);

  PartSpec unknown = walker_parts();
  unknown.parts[0].joints.push_back("tail");
  CHECK_THROWS_AS(resolve_parts(w, unknown), ConfigError);

  PartSpec empty;
  CHECK_THROWS_AS(resolve_parts(w, empty), ConfigError);
}

TEST_CASE("part observations are local and match a hand-built transform") {
  sim::World w = walker_world();
  ResolvedParts parts = resolve_parts(w, walker_parts());
  sim::SimState s = w.make_state();
  s.root_pos = {1.3, 0.9};
  s.root_ang = 0.4;
  s.q = (VectorXd(6) << 0.5, -0.8, -0.2, -0.4, 0.9, -1.1).finished();
  s.qd = (VectorXd(6) << 0.1, 0.2, 0.3, 0.4, 0.5, 0.6).finished();
  w.refresh_velocities(s);

  VectorXd lower = extract_part_obs(w, s, parts, 0);
  REQUIRE(lower.size() == 4 + 4 + 4);  // q, qd, two end effectors
  CHECK(lower.segment(0, 4) == s.q.head(4));
  CHECK(lower.segment(4, 4) == s.qd.head(4));

  // Independent transcription for the left shin position in the root frame:
  // hip at torso (0,-0.18), thigh spans anchors (0,0.10)/(0,-0.10), knee into
  // the shin at (0,0.10). Root-local is invariant to the root transform.
  auto rot = [](double a, Vector2d v) {
    return Vector2d(std::cos(a) * v.x() - std::sin(a) * v.y(),
                    std::sin(a) * v.x() + std::cos(a) * v.y());
  };
  const double hip = s.q[0], knee = s.q[1];
  Vector2d shin_local = Vector2d(0, -0.18) - rot(hip, Vector2d(0, 0.10)) +
                        rot(hip, Vector2d(0, -0.10)) - rot(hip + knee, Vector2d(0, 0.10));
  CHECK(lower[8] == Catch::Approx(shin_local.x()).margin(1e-12));
  CHECK(lower[9] == Catch::Approx(shin_local.y()).margin(1e-12));

  SECTION("rigid root translation and rotation leave the features unchanged") {
    VectorXd upper = extract_part_obs(w, s, parts, 1);
    sim::SimState moved = s;
    moved.root_pos += Vector2d(-2.0, 0.7);
    moved.root_ang += 1.1;
    w.refresh_velocities(moved);
    CHECK((extract_part_obs(w, moved, parts, 0) - lower).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((extract_part_obs(w, moved, parts, 1) - upper).cwiseAbs().maxCoeff() < 1e-12);
  }
  SECTION("zero pose gives zero joint features and constant offsets") {
    sim::SimState zero = w.make_state();
    VectorXd f = extract_part_obs(w, zero, parts, 0);
    CHECK(f.head(8).cwiseAbs().maxCoeff() == 0.0);
    CHECK(f[9] == Catch::Approx(-0.48).margin(1e-12));  // shin center below root
  }
}

TEST_CASE("demo pair extraction yields frames-minus-one pairs per part") {
  sim::World w = walker_world();
  ResolvedParts parts = resolve_parts(w, walker_parts());
  auto names = walker_joint_names();

  auto two = ramp_clip(names, 2, 30.0, 0.2);
  auto pairs2 = clip_to_demo_pairs(w, two, parts);
  REQUIRE(pairs2.size() == 2);
  CHECK(pairs2[0].size() == 1);
  CHECK(pairs2[1].size() == 1);

  auto thirtyone = ramp_clip(names, 31, 30.0, 0.2);
  auto pairs31 = clip_to_demo_pairs(w, thirtyone, parts);
  CHECK(pairs31[0].size() == 30);

  auto sixty = ramp_clip(names, 61, 60.0, 0.2);
  auto pairs60 = clip_to_demo_pairs(w, sixty, parts);
  CHECK(pairs60[0].size() == 30);  // resampled to control rate first

  CHECK(pairs2[0][0].o.size() == parts[0].feature_dim());
  CHECK(pairs2[1][0].o.size() == parts[1].feature_dim());
  // o' of one step is o of the next.
  CHECK(pairs31[0][3].o2 == pairs31[0][4].o);
}

TEST_CASE("reference initialization samples parts independently and uniformly") {
  sim::World w = walker_world();
  ResolvedParts parts = resolve_parts(w, walker_parts());
  auto names = walker_joint_names();

  // Frame-coded clips: joint value = frame index / 100.
  auto coded = [&](const std::string& name, int frames) {
    MotionClip c = ramp_clip(names, frames, 30.0, 0.0);
    c.name = name;
    for (int f = 0; f < frames; ++f) c.frames[f].q.setConstant(f / 100.0);
    return c;
  };
  std::vector<MotionClip> lib = {coded("gait", 20), coded("wave", 20)};

  SECTION("composite pose takes each part from its own draw") {
    Rng rng(11);
    int differing = 0;
    for (int i = 0; i < 200; ++i) {
      InitPose init = sample_reference_init(w, parts, lib, rng);
      const int f_lower = static_cast<int>(std::lround(init.q[0] * 100));
      const int f_upper = static_cast<int>(std::lround(init.q[4] * 100));
      CHECK(init.q.head(4).isConstant(init.q[0]));
      CHECK(init.q.tail(2).isConstant(init.q[4]));
      if (f_lower != f_upper) ++differing;
    }
    CHECK(differing > 100);  // independent draws coincide only 1 in 20
  }
  SECTION("per-part frame histogram is uniform by chi-square") {
    Rng rng(12);
    std::vector<int> hist(20, 0);
    const int n = 10000;
    for (int i = 0; i < n; ++i) {
      InitPose init = sample_reference_init(w, parts, lib, rng);
      ++hist[static_cast<int>(std::lround(init.q[0] * 100))];
    }
    double chi2 = 0.0;
    for (int c : hist) chi2 += (c - 500.0) * (c - 500.0) / 500.0;
    CHECK(chi2 < 36.19);  // 0.99 quantile, 19 dof
  }
  SECTION("identical frames collapse to one exact composite pose") {
    MotionClip g = coded("gait", 2);
    g.frames[1] = g.frames[0];
    MotionClip v = coded("wave", 2);
    v.frames[1] = v.frames[0];
    std::vector<MotionClip> lib2 = {g, v};
    Rng rng(13);
    for (int i = 0; i < 10; ++i) {
      InitPose init = sample_reference_init(w, parts, lib2, rng);
      CHECK(init.q == VectorXd::Zero(6));
      CHECK(init.root_pos.y() == 0.58);
    }
  }
  SECTION("missing clips are a hard error") {
    std::vector<MotionClip> none;
    Rng rng(14);
    CHECK_THROWS_AS(sample_reference_init(w, parts, none, rng), ConfigError);
  }
}

TEST_CASE("pair buffers evict oldest first and sample uniformly") {
  PairBuffer buf(100);
  for (int i = 0; i < 150; ++i) {
    ObservationPair p;
    p.part = 0;
    p.o = VectorXd::Constant(1, static_cast<double>(i));
    p.o2 = p.o;
    buf.push(p);
  }
  REQUIRE(buf.size() == 100);
  std::set<int> kept;
  for (std::size_t i = 0; i < buf.size(); ++i)
    kept.insert(static_cast<int>(buf.at(i).o[0]));
  CHECK(kept.count(49) == 0);
  CHECK(kept.count(50) == 1);
  CHECK(kept.count(149) == 1);
  CHECK(kept.size() == 100);

  Rng rng(15);
  std::vector<int> hits(150, 0);
  const int draws = 100000;
  for (int i = 0; i < draws; ++i) ++hits[static_cast<int>(buf.sample(rng).o[0])];
  const double expect = draws / 100.0;
  const double sigma = std::sqrt(draws * 0.01 * 0.99);
  for (int i = 50; i < 150; ++i) CHECK(std::abs(hits[i] - expect) <= 3.0 * sigma);
  CHECK_THROWS_AS(PairBuffer(0), ConfigError);
}

TEST_CASE("demo blend replaces at the configured rate and spares the source") {
  std::vector<PairBuffer> demo;
  demo.emplace_back(50);
  for (int i = 0; i < 50; ++i) {
    ObservationPair p;
    p.part = 0;
    p.o = VectorXd::Constant(1, -1.0 - i);  // demo entries are negative
    p.o2 = p.o;
    demo[0].push(p);
  }
  auto agent = [&](int n) {
    std::vector<ObservationPair> v;
    for (int i = 0; i < n; ++i) {
      ObservationPair p;
      p.part = 0;
      p.o = VectorXd::Constant(1, 1.0 + i);  // agent entries are positive
      p.o2 = p.o;
      v.push_back(p);
    }
    return v;
  };

  SECTION("lambda zero is the identity") {
    Rng rng(16);
    auto in = agent(1000);
    auto out = demo_blend(in, demo, 0.0, rng);
    REQUIRE(out.size() == in.size());
    for (std::size_t i = 0; i < out.size(); ++i) CHECK(out[i].o == in[i].o);
  }
  SECTION("lambda one replaces everything") {
    Rng rng(17);
    auto out = demo_blend(agent(1000), demo, 1.0, rng);
    for (const auto& p : out) CHECK(p.o[0] < 0.0);
  }
  SECTION("lambda 0.1 lands in the binomial window over 1e5 pairs") {
    Rng rng(18);
    auto out = demo_blend(agent(100000), demo, 0.1, rng);
    int replaced = 0;
    for (const auto& p : out)
      if (p.o[0] < 0.0) ++replaced;
    const double rate = replaced / 100000.0;
    CHECK(rate >= 0.094);
    CHECK(rate <= 0.106);
    // Source buffer untouched.
    for (std::size_t i = 0; i < demo[0].size(); ++i)
      CHECK(demo[0].at(i).o[0] == -1.0 - static_cast<double>(i));
  }
  SECTION("out-of-range lambda is rejected") {
    Rng rng(19);
    auto in = agent(1);
    CHECK_THROWS_AS(demo_blend(in, demo, -0.1, rng), ConfigError);
    CHECK_THROWS_AS(demo_blend(in, demo, 1.1, rng), ConfigError);
  }
}
