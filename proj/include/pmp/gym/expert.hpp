#pragma once

#include <fstream>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pmp/gym/env.hpp"
#include "pmp/motion/parts.hpp"

namespace pmp::gym {

/// Versioned state-action dataset produced by expert grasp rollouts. The
/// pairs reuse the (o, o2) container: o is the interaction state, o2 the
/// mean action that was executed from it.
inline void save_expert_pairs(const std::string& path,
                              const std::vector<motion::ObservationPair>& pairs,
                              int u_dim, int y_dim) {
  nlohmann::json j;
  j["version"] = 1;
  j["u_dim"] = u_dim;
  j["y_dim"] = y_dim;
  j["count"] = pairs.size();
  auto& u = j["u"] = nlohmann::json::array();
  auto& y = j["y"] = nlohmann::json::array();
  for (const auto& p : pairs) {
    if (p.o.size() != u_dim || p.o2.size() != y_dim)
      throw ConfigError("expert pairs: inconsistent dimensions");
    u.push_back(std::vector<double>(p.o.data(), p.o.data() + p.o.size()));
    y.push_back(std::vector<double>(p.o2.data(), p.o2.data() + p.o2.size()));
  }
  std::ofstream f(path);
  if (!f) throw IoError("cannot open for write: " + path);
  f << j.dump();
  if (!f) throw IoError("write failed: " + path);
}

struct ExpertDataset {
  int u_dim = 0;
  int y_dim = 0;
  std::vector<motion::ObservationPair> pairs;
};

inline ExpertDataset load_expert_pairs(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open: " + path);
  try {
    const nlohmann::json j = nlohmann::json::parse(f);
    if (j.at("version").get<int>() != 1)
      throw ConfigError("expert pairs: unsupported version in " + path);
    ExpertDataset ds;
    ds.u_dim = j.at("u_dim").get<int>();
    ds.y_dim = j.at("y_dim").get<int>();
    const auto& u = j.at("u");
    const auto& y = j.at("y");
    if (u.size() != y.size() || u.size() != j.at("count").get<std::size_t>())
      throw ConfigError("expert pairs: count mismatch in " + path);
    for (std::size_t i = 0; i < u.size(); ++i) {
      motion::ObservationPair p;
      p.part = 0;
      const auto uv = u[i].get<std::vector<double>>();
      const auto yv = y[i].get<std::vector<double>>();
      if (static_cast<int>(uv.size()) != ds.u_dim || static_cast<int>(yv.size()) != ds.y_dim)
        throw ConfigError("expert pairs: ragged record in " + path);
      p.o = Eigen::Map<const VectorXd>(uv.data(), static_cast<Eigen::Index>(uv.size()));
      p.o2 = Eigen::Map<const VectorXd>(yv.data(), static_cast<Eigen::Index>(yv.size()));
      ds.pairs.push_back(std::move(p));
    }
    return ds;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("expert pairs: " + path + ": " + e.what());
  }
}

/// Rolls the environment with a deterministic policy and keeps only the
/// steps where a fingertip actually touches the rod.
inline std::vector<motion::ObservationPair> collect_expert_pairs(
    GymEnv& env, const std::function<VectorXd(const VectorXd&)>& mean_action,
    int episodes, Rng& rng, bool contact_filter = true) {
  if (episodes < 0) throw ConfigError("collect_expert_pairs: negative episode count");
  std::vector<motion::ObservationPair> out;
  for (int e = 0; e < episodes; ++e) {
    VectorXd obs = env.reset(rng);
    for (int t = 0; t < env.max_steps(); ++t) {
      motion::ObservationPair p;
      p.part = 0;
      p.o = env.interaction_state().flat();
      p.o2 = mean_action(obs);
      const bool keep = !contact_filter || env.rod_contact();
      envs::StepResult r = env.step(p.o2, rng);
      if (keep) out.push_back(std::move(p));
      obs = r.obs;
      if (r.done) break;
    }
  }
  return out;
}

}  // namespace pmp::gym
