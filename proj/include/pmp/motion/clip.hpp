#pragma once

#include <fstream>

#include <json.hpp>

#include "pmp/common.hpp"

namespace pmp::motion {

struct ClipFrame {
  Vector2d root_pos{0, 0};
  double root_ang = 0.0;
  VectorXd q;
  VectorXd qd;
};

/// Joint-space reference motion sampled at a fixed rate.
struct MotionClip {
  std::string name;
  double fps = 30.0;
  std::vector<std::string> joints;
  std::vector<ClipFrame> frames;

  int joint_count() const { return static_cast<int>(joints.size()); }
  int frame_count() const { return static_cast<int>(frames.size()); }
  double duration() const { return frames.empty() ? 0.0 : (frames.size() - 1) / fps; }

  void validate() const {
    if (fps <= 0) throw ConfigError("clip " + name + ": fps must be positive");
    if (frames.size() < 2) throw ConfigError("clip " + name + ": needs at least 2 frames");
    for (const ClipFrame& f : frames) {
      if (f.q.size() != joint_count() || f.qd.size() != joint_count())
        throw ConfigError("clip " + name + ": frame joint count mismatch");
      if (!f.root_pos.allFinite() || !std::isfinite(f.root_ang) || !all_finite(f.q) ||
          !all_finite(f.qd))
        throw ConfigError("clip " + name + ": non-finite frame");
    }
  }

  /// Root velocity by forward differences (the file stores poses only).
  Vector2d root_vel_at(int f) const {
    const int i = std::min(f, frame_count() - 2);
    return (frames[i + 1].root_pos - frames[i].root_pos) * fps;
  }
  double root_angvel_at(int f) const {
    const int i = std::min(f, frame_count() - 2);
    return wrap_angle(frames[i + 1].root_ang - frames[i].root_ang) * fps;
  }
};

/// Linear-interpolation resampling onto a target rate (planar angles, so
/// plain lerp is exact enough for revolute channels).
inline MotionClip resample(const MotionClip& clip, double target_fps) {
  clip.validate();
  if (target_fps <= 0) throw ConfigError("resample: target fps must be positive");
  MotionClip out;
  out.name = clip.name;
  out.fps = target_fps;
  out.joints = clip.joints;
  const double duration = clip.duration();
  const int frames = std::max(2, static_cast<int>(std::floor(duration * target_fps)) + 1);
  out.frames.reserve(frames);
  for (int i = 0; i < frames; ++i) {
    const double t = std::min(i / target_fps, duration);
    const double x = t * clip.fps;
    const int f0 = std::min(static_cast<int>(std::floor(x)), clip.frame_count() - 2);
    const double a = x - f0;
    const ClipFrame& p = clip.frames[f0];
    const ClipFrame& n = clip.frames[f0 + 1];
    ClipFrame f;
    f.root_pos = (1 - a) * p.root_pos + a * n.root_pos;
    f.root_ang = p.root_ang + a * wrap_angle(n.root_ang - p.root_ang);
    f.q = (1 - a) * p.q + a * n.q;
    f.qd = (1 - a) * p.qd + a * n.qd;
    out.frames.push_back(std::move(f));
  }
  return out;
}

inline nlohmann::json clip_to_json(const MotionClip& clip) {
  nlohmann::json j;
  j["version"] = 1;
  j["name"] = clip.name;
  j["fps"] = clip.fps;
  j["joints"] = clip.joints;
  nlohmann::json frames = nlohmann::json::array();
  for (const ClipFrame& f : clip.frames) {
    nlohmann::json row = nlohmann::json::array();
    row.push_back(f.root_pos.x());
    row.push_back(f.root_pos.y());
    row.push_back(f.root_ang);
    for (int i = 0; i < f.q.size(); ++i) row.push_back(f.q[i]);
    for (int i = 0; i < f.qd.size(); ++i) row.push_back(f.qd[i]);
    frames.push_back(std::move(row));
  }
  j["frames"] = std::move(frames);
  return j;
}

inline MotionClip clip_from_json(const nlohmann::json& j) {
  try {
    if (!j.contains("version") || j.at("version").get<int>() != 1)
      throw ConfigError("clip file: unsupported version");
    MotionClip clip;
    clip.name = j.at("name").get<std::string>();
    clip.fps = j.at("fps").get<double>();
    for (const auto& n : j.at("joints")) clip.joints.push_back(n.get<std::string>());
    const int nj = clip.joint_count();
    for (const auto& row : j.at("frames")) {
      if (!row.is_array() || static_cast<int>(row.size()) != 3 + 2 * nj)
        throw ConfigError("clip " + clip.name + ": frame row needs 3 + 2*joints values");
      ClipFrame f;
      f.root_pos = {row[0].get<double>(), row[1].get<double>()};
      f.root_ang = row[2].get<double>();
      f.q.resize(nj);
      f.qd.resize(nj);
      for (int i = 0; i < nj; ++i) {
        f.q[i] = row[3 + i].get<double>();
        f.qd[i] = row[3 + nj + i].get<double>();
      }
      clip.frames.push_back(std::move(f));
    }
    clip.validate();
    return clip;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("clip file: ") + e.what());
  }
}

inline void save_clip(const MotionClip& clip, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw IoError("cannot write clip: " + path);
  f << clip_to_json(clip).dump(1) << '\n';
}

inline MotionClip load_clip(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open clip: " + path);
  nlohmann::json j;
  try {
    f >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("clip " + path + ": " + e.what());
  }
  return clip_from_json(j);
}

enum class ClipStyle { Gait, CarryIdle, Wave };

inline ClipStyle clip_style_from_string(const std::string& s) {
  if (s == "gait") return ClipStyle::Gait;
  if (s == "carry_idle") return ClipStyle::CarryIdle;
  if (s == "wave") return ClipStyle::Wave;
  throw ConfigError("unknown clip style: " + s);
}

/// Smooth periodic reference motion standing in for mocap data. Joint
/// velocities are forward differences of the position channels, so the two
/// are consistent by construction.
inline MotionClip generate_procedural_clip(ClipStyle style, double duration, double fps,
                                           const std::vector<std::string>& joints, Rng& rng) {
  if (duration <= 0) throw ConfigError("procedural clip: duration must be positive");
  MotionClip clip;
  clip.fps = fps;
  clip.joints = joints;
  const int nj = static_cast<int>(joints.size());
  const int frames = std::max(2, static_cast<int>(std::lround(duration * fps)));

  double freq = 1.0;        // full period per second keeps periodicity checks exact
  double forward = 0.0;     // root drift, m/s
  VectorXd amp(nj), phase(nj), center(nj);
  switch (style) {
    case ClipStyle::Gait:
      forward = 0.4;
      for (int i = 0; i < nj; ++i) {
        amp[i] = rng.uniform(0.25, 0.55);
        phase[i] = (i % 2 == 0 ? 0.0 : M_PI) + rng.uniform(-0.2, 0.2);
        center[i] = rng.uniform(-0.1, 0.1);
      }
      break;
    case ClipStyle::CarryIdle:
      freq = 0.5;
      for (int i = 0; i < nj; ++i) {
        amp[i] = rng.uniform(0.02, 0.08);
        phase[i] = rng.uniform(0.0, 2 * M_PI);
        center[i] = 0.35 + rng.uniform(-0.05, 0.05);  // held-up posture
      }
      break;
    case ClipStyle::Wave:
      freq = 1.5;
      for (int i = 0; i < nj; ++i) {
        const bool waving = i == nj - 1;
        amp[i] = waving ? rng.uniform(0.5, 0.8) : rng.uniform(0.01, 0.03);
        phase[i] = rng.uniform(0.0, 2 * M_PI);
        center[i] = waving ? 0.3 : rng.uniform(-0.05, 0.05);
      }
      break;
  }
  clip.name = style == ClipStyle::Gait ? "gait" : style == ClipStyle::CarryIdle ? "carry_idle" : "wave";

  for (int f = 0; f < frames; ++f) {
    const double t = f / fps;
    ClipFrame fr;
    fr.root_pos = {forward * t, 0.0};
    fr.root_ang = 0.0;
    fr.q.resize(nj);
    fr.qd = VectorXd::Zero(nj);
    for (int i = 0; i < nj; ++i)
      fr.q[i] = center[i] + amp[i] * std::sin(2 * M_PI * freq * t + phase[i]);
    clip.frames.push_back(std::move(fr));
  }
  for (int f = 0; f + 1 < frames; ++f)
    clip.frames[f].qd = (clip.frames[f + 1].q - clip.frames[f].q) * fps;
  if (frames >= 2) clip.frames[frames - 1].qd = clip.frames[frames - 2].qd;
  return clip;
}

}  // namespace pmp::motion
