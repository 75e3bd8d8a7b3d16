#pragma once

#include <algorithm>
#include <fstream>
#include <initializer_list>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "pmp/common.hpp"
#include "pmp/envs/grasp.hpp"
#include "pmp/envs/point_mass.hpp"
#include "pmp/envs/walker.hpp"
#include "pmp/gym/expert.hpp"
#include "pmp/motion/clip.hpp"
#include "pmp/trainer/trainer.hpp"

namespace pmp {

namespace cfgdetail {

inline void check_keys(const nlohmann::json& j, const std::string& where,
                       std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw ConfigError(where + ": expected a JSON object");
  for (const auto& item : j.items()) {
    bool known = false;
    for (const char* k : allowed) known = known || item.key() == k;
    if (!known) throw ConfigError(where + ": unknown key '" + item.key() + "'");
  }
}

template <typename T>
void read(const nlohmann::json& j, const char* key, T& out, const std::string& where) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(where + ": bad value for '" + std::string(key) + "'");
  }
}

}  // namespace cfgdetail

/// Walker-specific run settings: part layout, reference clips and the
/// environment knobs.
struct WalkerRunConfig {
  std::string parts = "two";            // "two" (lower/upper) or "whole"
  envs::WalkerEnvConfig env;
  std::vector<std::string> clip_files;  // load from disk when non-empty
  std::uint64_t clip_seed = 7;          // otherwise generate procedurally
  double clip_seconds = 2.0;
};

/// Expert-pair collection settings used after gym training.
struct ExpertRunConfig {
  int episodes = 50;
  bool contact_filter = true;
};

/// One JSON file describing a full run: the task, the training loop and
/// every override that deviates from the built-in defaults. Unknown keys
/// are rejected so typos fail loudly instead of running the defaults.
struct RunConfig {
  std::string task = "point_mass";  // point_mass | walker | grasp | gym
  long updates = 300;
  int eval_every = 10;
  int eval_episodes = 10;
  int checkpoint_every = 0;  // 0 = final checkpoint only
  trainer::TrainerConfig trainer;  // stream layout is filled at assembly
  WalkerRunConfig walker;
  gym::GymEpisodeConfig gym;
  std::string grasp_expert_pairs;  // dataset seeding the interaction stream
  ExpertRunConfig expert;
  envs::PointMassConfig point_mass;

  void validate() const {
    if (task != "point_mass" && task != "walker" && task != "grasp" && task != "gym")
      throw ConfigError("run: unknown task '" + task + "'");
    if (updates < 0) throw ConfigError("run: updates must be non-negative");
    if (eval_every < 0 || checkpoint_every < 0)
      throw ConfigError("run: intervals must be non-negative");
    if (eval_episodes <= 0) throw ConfigError("run: eval_episodes must be positive");
    if (expert.episodes < 0) throw ConfigError("run: expert episodes must be non-negative");
    trainer.ppo.validate();
    trainer.weights.validate();
    if (task == "walker") {
      if (walker.parts != "two" && walker.parts != "whole")
        throw ConfigError("run: walker parts must be 'two' or 'whole'");
      walker.env.validate();
      if (walker.clip_seconds <= 0.0) throw ConfigError("run: clip_seconds must be positive");
    }
    if (task == "grasp" && grasp_expert_pairs.empty())
      throw ConfigError("run: grasp task needs an expert_pairs path");
    if (task == "grasp" || task == "gym") gym.validate();
  }
};

inline RunConfig run_config_from_json(const nlohmann::json& j) {
  using cfgdetail::check_keys;
  using cfgdetail::read;
  check_keys(j, "run",
             {"task", "seed", "updates", "eval_every", "eval_episodes", "checkpoint_every",
              "ppo", "weights", "blend", "policy_hidden", "value_hidden", "disc_hidden",
              "log_std_init", "walker", "gym", "grasp", "expert", "point_mass"});
  RunConfig rc;
  read(j, "task", rc.task, "run");
  read(j, "seed", rc.trainer.seed, "run");
  read(j, "updates", rc.updates, "run");
  read(j, "eval_every", rc.eval_every, "run");
  read(j, "eval_episodes", rc.eval_episodes, "run");
  read(j, "checkpoint_every", rc.checkpoint_every, "run");
  read(j, "policy_hidden", rc.trainer.policy_hidden, "run");
  read(j, "value_hidden", rc.trainer.value_hidden, "run");
  read(j, "disc_hidden", rc.trainer.disc_hidden, "run");
  read(j, "log_std_init", rc.trainer.log_std_init, "run");
  if (j.contains("blend")) {
    std::string blend;
    read(j, "blend", blend, "run");
    rc.trainer.blend = style::blend_mode_from_string(blend);
  }

  if (j.contains("ppo")) {
    const nlohmann::json& p = j.at("ppo");
    check_keys(p, "ppo", {"lr", "gamma", "lam", "clip", "kl_threshold", "epochs",
                          "minibatch", "value_coef", "entropy_coef", "horizon", "env_count",
                          "demo_capacity", "replay_capacity", "disc_batch", "disc_lr",
                          "lambda_demo"});
    trainer::PpoConfig& c = rc.trainer.ppo;
    read(p, "lr", c.lr, "ppo");
    read(p, "gamma", c.gamma, "ppo");
    read(p, "lam", c.lam, "ppo");
    read(p, "clip", c.clip, "ppo");
    read(p, "kl_threshold", c.kl_threshold, "ppo");
    read(p, "epochs", c.epochs, "ppo");
    read(p, "minibatch", c.minibatch, "ppo");
    read(p, "value_coef", c.value_coef, "ppo");
    read(p, "entropy_coef", c.entropy_coef, "ppo");
    read(p, "horizon", c.horizon, "ppo");
    read(p, "env_count", c.env_count, "ppo");
    read(p, "demo_capacity", c.demo_capacity, "ppo");
    read(p, "replay_capacity", c.replay_capacity, "ppo");
    read(p, "disc_batch", c.disc_batch, "ppo");
    read(p, "disc_lr", c.disc_lr, "ppo");
    read(p, "lambda_demo", c.lambda_demo, "ppo");
  }

  if (j.contains("weights")) {
    const nlohmann::json& w = j.at("weights");
    check_keys(w, "weights",
               {"task", "style", "scale", "interaction_offset", "disc", "gp", "reg"});
    style::RewardWeights& c = rc.trainer.weights;
    read(w, "task", c.task, "weights");
    read(w, "style", c.style, "weights");
    read(w, "scale", c.scale, "weights");
    read(w, "interaction_offset", c.interaction_offset, "weights");
    read(w, "disc", c.w_disc, "weights");
    read(w, "gp", c.w_gp, "weights");
    read(w, "reg", c.w_reg, "weights");
  }

  if (j.contains("walker")) {
    const nlohmann::json& w = j.at("walker");
    check_keys(w, "walker",
               {"parts", "episode_steps", "heading_v_star", "heading_gamma", "gantry",
                "reference_init", "fall_termination", "clip_files", "clip_seed",
                "clip_seconds"});
    read(w, "parts", rc.walker.parts, "walker");
    read(w, "episode_steps", rc.walker.env.episode_steps, "walker");
    read(w, "heading_v_star", rc.walker.env.heading_v_star, "walker");
    read(w, "heading_gamma", rc.walker.env.heading_gamma, "walker");
    read(w, "gantry", rc.walker.env.gantry, "walker");
    read(w, "reference_init", rc.walker.env.reference_init, "walker");
    read(w, "fall_termination", rc.walker.env.fall_termination, "walker");
    read(w, "clip_files", rc.walker.clip_files, "walker");
    read(w, "clip_seed", rc.walker.clip_seed, "walker");
    read(w, "clip_seconds", rc.walker.clip_seconds, "walker");
  }

  if (j.contains("gym")) {
    const nlohmann::json& g = j.at("gym");
    check_keys(g, "gym",
               {"disturbance_scale", "disturbance_hz", "force_min", "force_max", "torque_min",
                "torque_max", "episode_steps", "rod_mass", "wrist_target_min",
                "wrist_target_max", "retarget_seconds"});
    read(g, "disturbance_scale", rc.gym.disturbance.scale, "gym");
    read(g, "disturbance_hz", rc.gym.disturbance_hz, "gym");
    read(g, "force_min", rc.gym.disturbance.force_min, "gym");
    read(g, "force_max", rc.gym.disturbance.force_max, "gym");
    read(g, "torque_min", rc.gym.disturbance.torque_min, "gym");
    read(g, "torque_max", rc.gym.disturbance.torque_max, "gym");
    read(g, "episode_steps", rc.gym.episode_steps, "gym");
    read(g, "rod_mass", rc.gym.rod_mass, "gym");
    read(g, "wrist_target_min", rc.gym.wrist_target_min, "gym");
    read(g, "wrist_target_max", rc.gym.wrist_target_max, "gym");
    read(g, "retarget_seconds", rc.gym.retarget_seconds, "gym");
  }

  if (j.contains("grasp")) {
    const nlohmann::json& g = j.at("grasp");
    check_keys(g, "grasp", {"expert_pairs"});
    read(g, "expert_pairs", rc.grasp_expert_pairs, "grasp");
  }

  if (j.contains("expert")) {
    const nlohmann::json& e = j.at("expert");
    check_keys(e, "expert", {"episodes", "contact_filter"});
    read(e, "episodes", rc.expert.episodes, "expert");
    read(e, "contact_filter", rc.expert.contact_filter, "expert");
  }

  if (j.contains("point_mass")) {
    const nlohmann::json& p = j.at("point_mass");
    check_keys(p, "point_mass",
               {"accel", "damping", "start_min", "start_max", "bound", "reward_gamma",
                "steps"});
    envs::PointMassConfig& c = rc.point_mass;
    read(p, "accel", c.accel, "point_mass");
    read(p, "damping", c.damping, "point_mass");
    read(p, "start_min", c.start_min, "point_mass");
    read(p, "start_max", c.start_max, "point_mass");
    read(p, "bound", c.bound, "point_mass");
    read(p, "reward_gamma", c.reward_gamma, "point_mass");
    read(p, "steps", c.steps, "point_mass");
  }

  rc.validate();
  return rc;
}

inline RunConfig load_run_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open: " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(f);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("run config " + path + ": " + e.what());
  }
  return run_config_from_json(j);
}

/// Reference clips for a walker run: from files when given, otherwise the
/// procedural generator seeded by the config.
inline std::vector<motion::MotionClip> walker_run_clips(const WalkerRunConfig& w) {
  std::vector<motion::MotionClip> clips;
  if (!w.clip_files.empty()) {
    for (const std::string& f : w.clip_files) clips.push_back(motion::load_clip(f));
    return clips;
  }
  const std::vector<std::string> joints = {"hip_l", "knee_l", "hip_r",
                                           "knee_r", "shoulder_l", "shoulder_r"};
  Rng rng(w.clip_seed);
  clips.push_back(
      motion::generate_procedural_clip(motion::ClipStyle::Gait, w.clip_seconds, 30.0, joints, rng));
  clips.push_back(
      motion::generate_procedural_clip(motion::ClipStyle::Wave, w.clip_seconds, 30.0, joints, rng));
  return clips;
}

/// Everything a training run needs beyond the config: the vectorized
/// environments, the completed trainer config (stream layout resolved from
/// the task) and the per-stream demonstration pairs.
struct RunAssembly {
  trainer::TrainerConfig trainer;
  std::vector<std::unique_ptr<envs::Env>> envs;
  std::vector<std::vector<motion::ObservationPair>> demos;  // indexed by stream
};

inline RunAssembly assemble_run(const RunConfig& rc) {
  rc.validate();
  RunAssembly out;
  out.trainer = rc.trainer;
  out.trainer.body_parts = 0;
  out.trainer.stream_pair_dims.clear();
  const int n = rc.trainer.ppo.env_count;

  if (rc.task == "point_mass") {
    for (int e = 0; e < n; ++e)
      out.envs.push_back(std::make_unique<envs::PointMassEnv>(rc.point_mass));
  } else if (rc.task == "gym") {
    for (int e = 0; e < n; ++e) out.envs.push_back(std::make_unique<gym::GymEnv>(rc.gym));
  } else if (rc.task == "grasp") {
    envs::GraspEnv probe(rc.gym);
    out.trainer.stream_pair_dims = {probe.pair_dim()};
    gym::ExpertDataset ds = gym::load_expert_pairs(rc.grasp_expert_pairs);
    if (ds.u_dim + ds.y_dim != probe.pair_dim())
      throw ConfigError("run: expert pair dimensions do not match the grasp task");
    if (ds.pairs.empty()) throw ConfigError("run: expert dataset is empty");
    out.demos.push_back(std::move(ds.pairs));
    for (int e = 0; e < n; ++e) out.envs.push_back(std::make_unique<envs::GraspEnv>(rc.gym));
  } else {  // walker
    const motion::PartSpec spec = rc.walker.parts == "two" ? envs::walker_two_parts()
                                                           : envs::walker_whole_body();
    const std::vector<motion::MotionClip> clips = walker_run_clips(rc.walker);
    sim::World world(envs::make_walker(), {}, sim::SimParams{});
    const motion::ResolvedParts parts = motion::resolve_parts(world, spec);
    out.trainer.body_parts = parts.count();
    out.demos.assign(static_cast<std::size_t>(parts.count()), {});
    for (int k = 0; k < parts.count(); ++k)
      out.trainer.stream_pair_dims.push_back(2 * parts[k].feature_dim());
    for (const motion::MotionClip& clip : clips) {
      const auto per_part = motion::clip_to_demo_pairs(world, clip, parts);
      for (int k = 0; k < parts.count(); ++k) {
        const auto& bound = parts[k].clips;
        if (std::find(bound.begin(), bound.end(), clip.name) == bound.end()) continue;
        auto& dst = out.demos[static_cast<std::size_t>(k)];
        dst.insert(dst.end(), per_part[static_cast<std::size_t>(k)].begin(),
                   per_part[static_cast<std::size_t>(k)].end());
      }
    }
    for (int e = 0; e < n; ++e)
      out.envs.push_back(std::make_unique<envs::WalkerEnv>(rc.walker.env, spec, clips));
  }

  out.trainer.validate();
  return out;
}

}  // namespace pmp
