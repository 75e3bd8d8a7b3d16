#pragma once

#include "pmp/motion/clip.hpp"
#include "pmp/sim/world.hpp"

namespace pmp::motion {

/// Consecutive-timestep feature pair for one part's discriminator. For hand
/// parts fed by the interaction prior the same container carries a
/// (state, action) pair instead.
struct ObservationPair {
  int part = 0;
  VectorXd o;
  VectorXd o2;
};

struct PartDef {
  std::string name;
  std::vector<std::string> joints;
  std::vector<std::string> ee_links;  // end effectors expressed in the local frame
  std::vector<std::string> clips;     // bound demo clips (expert source for hands)
  std::string frame_link;             // local observation frame; empty = root link
  bool is_hand = false;
};

struct PartSpec {
  std::vector<PartDef> parts;
  int base_part = 0;  // supplies the root pose during composite initialization

  int count() const { return static_cast<int>(parts.size()); }
};

struct ResolvedPart {
  std::string name;
  std::vector<int> joints;
  std::vector<int> ee_links;
  int frame_link = 0;
  bool is_hand = false;
  std::vector<std::string> clips;

  int feature_dim() const {
    return 2 * static_cast<int>(joints.size()) + 2 * static_cast<int>(ee_links.size());
  }
};

struct ResolvedParts {
  std::vector<ResolvedPart> parts;
  int base_part = 0;

  int count() const { return static_cast<int>(parts.size()); }
  const ResolvedPart& operator[](int k) const { return parts[k]; }
};

/// Binds a part spec to a character and enforces the partition rule: the
/// per-part joint sets must be pairwise disjoint and cover every joint.
inline ResolvedParts resolve_parts(const sim::World& world, const PartSpec& spec) {
  if (spec.parts.empty()) throw ConfigError("part spec: needs at least one part");
  if (spec.base_part < 0 || spec.base_part >= spec.count())
    throw ConfigError("part spec: base_part out of range");
  ResolvedParts out;
  out.base_part = spec.base_part;
  std::vector<int> claimed(world.joint_count(), -1);
  for (int k = 0; k < spec.count(); ++k) {
    const PartDef& p = spec.parts[k];
    ResolvedPart r;
    r.name = p.name;
    r.is_hand = p.is_hand;
    r.clips = p.clips;
    if (p.joints.empty()) throw ConfigError("part " + p.name + ": empty joint set");
    for (const std::string& jn : p.joints) {
      const int j = world.joint_index(jn);
      if (claimed[j] >= 0)
        throw ConfigError("part spec: joint " + jn + " appears in two parts");
      claimed[j] = k;
      r.joints.push_back(j);
    }
    for (const std::string& ln : p.ee_links) r.ee_links.push_back(world.link_index(ln));
    r.frame_link = p.frame_link.empty() ? 0 : world.link_index(p.frame_link);
    out.parts.push_back(std::move(r));
  }
  for (int j = 0; j < world.joint_count(); ++j)
    if (claimed[j] < 0)
      throw ConfigError("part spec: joint " + world.character().joints[j].name +
                        " is not covered by any part");
  return out;
}

/// Per-part features: joint positions, joint velocities, then end-effector
/// positions in the part's local frame (root by default, wrist for hands).
inline VectorXd extract_part_obs(const sim::World& world, const sim::SimState& state,
                                 const ResolvedParts& parts, int k) {
  if (k < 0 || k >= parts.count()) throw ConfigError("extract_part_obs: part out of range");
  const ResolvedPart& p = parts[k];
  VectorXd out(p.feature_dim());
  int at = 0;
  for (int j : p.joints) out[at++] = state.q[j];
  for (int j : p.joints) out[at++] = state.qd[j];
  if (!p.ee_links.empty()) {
    const std::vector<sim::BodyFrame> frames = world.link_frames(state);
    const sim::BodyFrame& f = frames[p.frame_link];
    for (int e : p.ee_links) {
      const Vector2d local = sim::rotate(-f.ang, frames[e].pos - f.pos);
      out[at++] = local.x();
      out[at++] = local.y();
    }
  }
  return out;
}

/// SimState whose reduced coordinates follow one clip frame.
inline sim::SimState state_from_frame(const sim::World& world, const MotionClip& clip, int f) {
  if (clip.joint_count() != world.joint_count())
    throw ConfigError("clip " + clip.name + ": joint count differs from character");
  sim::SimState s = world.make_state();
  const ClipFrame& fr = clip.frames.at(f);
  s.root_pos = fr.root_pos;
  s.root_ang = fr.root_ang;
  s.root_vel = clip.root_vel_at(f);
  s.root_angvel = clip.root_angvel_at(f);
  for (int j = 0; j < world.joint_count(); ++j) {
    const sim::JointDef& jd = world.character().joints[j];
    s.q[j] = clampd(fr.q[j], jd.lo, jd.hi);
    s.qd[j] = fr.qd[j];
  }
  world.refresh_velocities(s);
  return s;
}

/// Consecutive-frame observation pairs for every part; the clip is resampled
/// to the control rate first.
inline std::vector<std::vector<ObservationPair>> clip_to_demo_pairs(const sim::World& world,
                                                                    const MotionClip& clip,
                                                                    const ResolvedParts& parts) {
  const MotionClip rs = std::abs(clip.fps - world.params().control_hz) < 1e-12
                            ? clip
                            : resample(clip, world.params().control_hz);
  rs.validate();
  std::vector<std::vector<ObservationPair>> out(parts.count());
  std::vector<VectorXd> prev(parts.count()), cur(parts.count());
  for (int f = 0; f < rs.frame_count(); ++f) {
    sim::SimState s = state_from_frame(world, rs, f);
    for (int k = 0; k < parts.count(); ++k) cur[k] = extract_part_obs(world, s, parts, k);
    if (f > 0)
      for (int k = 0; k < parts.count(); ++k)
        out[k].push_back(ObservationPair{k, prev[k], cur[k]});
    std::swap(prev, cur);
  }
  return out;
}

/// Composite reference pose: an independently sampled (clip, frame) per part.
/// The root pose and velocity come from the base part's sampled frame.
struct InitPose {
  Vector2d root_pos{0, 0};
  double root_ang = 0.0;
  Vector2d root_vel{0, 0};
  double root_angvel = 0.0;
  VectorXd q, qd;
};

inline InitPose sample_reference_init(const sim::World& world, const ResolvedParts& parts,
                                      const std::vector<MotionClip>& clip_library, Rng& rng) {
  InitPose init;
  init.q = VectorXd::Zero(world.joint_count());
  init.qd = VectorXd::Zero(world.joint_count());
  auto find_clip = [&](const std::string& name) -> const MotionClip& {
    for (const MotionClip& c : clip_library)
      if (c.name == name) return c;
    throw ConfigError("reference init: clip " + name + " not loaded");
  };
  for (int k = 0; k < parts.count(); ++k) {
    const ResolvedPart& p = parts[k];
    if (p.clips.empty()) throw ConfigError("part " + p.name + ": no clips to sample");
    const MotionClip& clip = find_clip(p.clips[rng.index(p.clips.size())]);
    if (clip.joint_count() != world.joint_count())
      throw ConfigError("clip " + clip.name + ": joint count differs from character");
    const int f = static_cast<int>(rng.index(clip.frame_count()));
    for (int j : p.joints) {
      init.q[j] = clip.frames[f].q[j];
      init.qd[j] = clip.frames[f].qd[j];
    }
    if (k == parts.base_part) {
      init.root_pos = clip.frames[f].root_pos;
      init.root_ang = clip.frames[f].root_ang;
      init.root_vel = clip.root_vel_at(f);
      init.root_angvel = clip.root_angvel_at(f);
    }
  }
  return init;
}

}  // namespace pmp::motion
