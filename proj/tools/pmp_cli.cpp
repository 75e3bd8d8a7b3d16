#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "pmp/config.hpp"

namespace {

using namespace pmp;

// Exit codes: 0 success, 2 bad config, 3 diverged run, 4 missing artifact.

std::string default_out() {
  const char* root = std::getenv("PMP_OUT_ROOT");
  return root != nullptr && *root != '\0' ? std::string(root) : std::string("runs");
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory: " + dir);
}

std::string nr_line(const trainer::NrResult& r) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f (%.2f)", r.mean, r.stddev);
  return std::string(buf);
}

void run_training_loop(trainer::Trainer& tr, const RunConfig& rc, const std::string& out) {
  for (long u = 1; u <= rc.updates; ++u) {
    const trainer::UpdateStats st = tr.update();
    if (rc.eval_every > 0 && u % rc.eval_every == 0) {
      const trainer::NrResult nr = tr.evaluate(rc.eval_episodes);
      std::cout << "update " << u << "  reward " << st.reward_mean << "  nr " << nr_line(nr)
                << std::endl;
    }
    if (rc.checkpoint_every > 0 && u % rc.checkpoint_every == 0)
      tr.save_checkpoint(out + "/checkpoint_" + std::to_string(u) + ".tensors");
  }
  tr.save_checkpoint(out + "/checkpoint.tensors");
  tr.metrics().save(out + "/metrics.csv");
}

int cmd_train(const std::string& cfg_path, const std::string& out) {
  const RunConfig rc = load_run_config(cfg_path);
  ensure_dir(out);
  RunAssembly as = assemble_run(rc);
  trainer::Trainer tr(std::move(as.envs), as.trainer);
  for (std::size_t k = 0; k < as.demos.size(); ++k)
    tr.seed_demo(static_cast<int>(k), as.demos[k]);
  run_training_loop(tr, rc, out);
  std::cout << "saved " << out << "/checkpoint.tensors" << std::endl;
  return 0;
}

int cmd_train_gym(const std::string& cfg_path, const std::string& out) {
  const RunConfig rc = load_run_config(cfg_path);
  if (rc.task != "gym") throw ConfigError("train-gym: config task must be 'gym'");
  ensure_dir(out);
  RunAssembly as = assemble_run(rc);
  trainer::Trainer tr(std::move(as.envs), as.trainer);
  run_training_loop(tr, rc, out);

  gym::GymEnv env(rc.gym);
  Rng expert_rng(rc.trainer.seed + 0x9e3779b97f4a7c15ull);
  const trainer::GaussianPolicy& pol = tr.policy();
  auto mean = [&pol](const VectorXd& o) { return pol.mean_action(o); };
  const auto pairs = gym::collect_expert_pairs(env, mean, rc.expert.episodes, expert_rng,
                                               rc.expert.contact_filter);
  gym::save_expert_pairs(out + "/expert_pairs.json", pairs, env.obs_dim() - 1,
                         env.action_dim());
  std::cout << "expert pairs: " << pairs.size() << " -> " << out << "/expert_pairs.json"
            << std::endl;
  return 0;
}

int cmd_eval(const std::string& cfg_path, const std::string& checkpoint, int episodes) {
  const RunConfig rc = load_run_config(cfg_path);
  RunAssembly as = assemble_run(rc);
  trainer::Trainer tr(std::move(as.envs), as.trainer);
  tr.load_checkpoint(checkpoint);
  const trainer::NrResult r = tr.evaluate(episodes > 0 ? episodes : rc.eval_episodes);
  std::cout << nr_line(r) << std::endl;
  return 0;
}

int cmd_dump_plots(const std::string& metrics_path, const std::string& out) {
  const trainer::MetricsLog log = trainer::MetricsLog::load(metrics_path);
  ensure_dir(out);
  std::map<std::string, trainer::MetricsLog> groups;
  for (const trainer::MetricPoint& p : log.points()) {
    const auto slash = p.name.find('/');
    const std::string g =
        slash == std::string::npos ? std::string("misc") : p.name.substr(0, slash);
    groups[g].add(p.name, p.step, p.value);
  }
  for (const auto& [name, glog] : groups) glog.save(out + "/" + name + ".csv");
  std::cout << "wrote " << groups.size() << " plot group(s) to " << out << std::endl;
  return 0;
}

int cmd_validate(const std::string& cfg_path) {
  const RunConfig rc = load_run_config(cfg_path);
  std::cout << "ok: task " << rc.task << ", " << rc.updates << " update(s), seed "
            << rc.trainer.seed << std::endl;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"part-wise motion prior training toolkit"};
  app.require_subcommand(1);

  std::string config_path, checkpoint, metrics_path;
  std::string out_dir = default_out();
  int episodes = 0;

  CLI::App* sub_gym = app.add_subcommand(
      "train-gym", "train the grasp expert and export its state-action pairs");
  sub_gym->add_option("--config", config_path, "run config with task 'gym'")->required();
  sub_gym->add_option("--out", out_dir, "output directory");

  CLI::App* sub_train =
      app.add_subcommand("train", "train a policy with the configured priors");
  sub_train->add_option("--config", config_path, "run config")->required();
  sub_train->add_option("--out", out_dir, "output directory");

  CLI::App* sub_eval =
      app.add_subcommand("eval", "print the normalized return of a checkpoint");
  sub_eval->add_option("--config", config_path, "run config")->required();
  sub_eval->add_option("--checkpoint", checkpoint, "checkpoint file")->required();
  sub_eval->add_option("--episodes", episodes, "episode count override");

  CLI::App* sub_plots =
      app.add_subcommand("dump-plots", "split a metrics log into per-group plot files");
  sub_plots->add_option("--metrics", metrics_path, "metrics.csv from a training run")
      ->required();
  sub_plots->add_option("--out", out_dir, "output directory");

  CLI::App* sub_validate =
      app.add_subcommand("validate-config", "parse and check a run config");
  sub_validate->add_option("--config", config_path, "run config")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;  // help and version exit clean, bad usage is a config error
  }

  try {
    if (sub_gym->parsed()) return cmd_train_gym(config_path, out_dir);
    if (sub_train->parsed()) return cmd_train(config_path, out_dir);
    if (sub_eval->parsed()) return cmd_eval(config_path, checkpoint, episodes);
    if (sub_plots->parsed()) return cmd_dump_plots(metrics_path, out_dir);
    if (sub_validate->parsed()) return cmd_validate(config_path);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << std::endl;
    return 2;
  } catch (const TrainingDivergedError& e) {
    std::cerr << "training diverged: " << e.what() << std::endl;
    return 3;
  } catch (const SimDivergedError& e) {
    std::cerr << "simulation diverged: " << e.what() << std::endl;
    return 3;
  } catch (const IoError& e) {
    std::cerr << "missing artifact: " << e.what() << std::endl;
    return 4;
  }
  return 0;
}
