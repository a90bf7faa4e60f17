// Copyright 2026 The nonstat-rl Authors. All rights reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line front end over the C API.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "nsrl/nsrl.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

int Report(nsrl_status status) {
  std::cerr << "error: " << nsrl_status_name(status) << ": " << nsrl_last_error() << "\n";
  return status == NSRL_ERR_CONFIG || status == NSRL_ERR_INVALID_ARGUMENT ? kExitUsage
                                                                          : kExitRuntime;
}

// Owns a string returned by the C API.
struct CString {
  char* text = nullptr;
  ~CString() { nsrl_string_free(text); }
};

struct Mdp {
  nsrl_mdp* handle = nullptr;
  ~Mdp() { nsrl_mdp_free(handle); }
};

struct EnvSource {
  std::string file;
  std::string preset;
  std::string params;
  uint64_t seed = 0;

  void add_options(CLI::App* cmd) {
    cmd->add_option("--preset", preset, "Environment preset instead of a file");
    cmd->add_option("--params", params, "Preset parameters as a JSON object");
    cmd->add_option("--seed", seed, "Run seed passed to the preset");
  }

  nsrl_status load(Mdp* mdp) const {
    if (!file.empty() && !preset.empty()) {
      std::cerr << "error: give either an environment file or --preset\n";
      return NSRL_ERR_INVALID_ARGUMENT;
    }
    if (!preset.empty()) {
      return nsrl_mdp_build_preset(preset.c_str(), params.empty() ? nullptr : params.c_str(), seed,
                                   &mdp->handle);
    }
    if (file.empty()) {
      std::cerr << "error: an environment file or --preset is required\n";
      return NSRL_ERR_INVALID_ARGUMENT;
    }
    return nsrl_mdp_load_json(file.c_str(), &mdp->handle);
  }
};

int Finish(nsrl_status status) {
  if (status == NSRL_ERR_INVALID_ARGUMENT && nsrl_last_error()[0] == '\0') return kExitUsage;
  return status == NSRL_OK ? kExitOk : Report(status);
}

std::string Num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Non-stationary linear kernel MDP learners and regret oracles"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(nsrl_version()));

  EnvSource validate_env;
  auto* validate = app.add_subcommand("validate", "Check model invariants; exit 0 iff clean");
  validate->add_option("env", validate_env.file, "Environment JSON file");
  validate_env.add_options(validate);

  EnvSource export_env;
  std::string export_out;
  auto* exporter = app.add_subcommand("export", "Write a preset environment as JSON");
  exporter->add_option("preset", export_env.preset, "Preset name")->required();
  exporter->add_option("--params", export_env.params, "Preset parameters as a JSON object");
  exporter->add_option("--seed", export_env.seed, "Run seed passed to the preset");
  exporter->add_option("-o,--output", export_out, "Output file")->required();

  std::string config_path;
  int threads = 0;
  auto* run = app.add_subcommand("run", "Run an experiment config");
  run->add_option("config", config_path, "Experiment config JSON")->required();
  run->add_option("--threads", threads, "Worker count (default: NONSTAT_RL_THREADS or cores)");

  std::vector<std::string> csv_paths;
  std::string regret_out;
  auto* regret = app.add_subcommand("regret", "Recompute the cross-seed summary from run CSVs");
  regret->add_option("csv", csv_paths, "Run CSV files named <label>__seed<seed>.csv")->required();
  regret->add_option("-o,--output", regret_out, "Write the summary here instead of stdout");

  std::string summary_path, plot_out;
  auto* plot = app.add_subcommand("plot", "SVG of mean cumulative regret with a 1-sd band");
  plot->add_option("summary", summary_path, "summary.json")->required();
  plot->add_option("-o,--output", plot_out, "Output SVG")->required();

  EnvSource hyper_env;
  std::optional<int> d, horizon, episodes, actions;
  std::optional<double> delta, p_t;
  double zeta = 0.05, c_prime = 1.0, alpha_multiplier = 1.0, window_constant = 1.0;
  std::string window_rule = "two-thirds";
  auto* hyper = app.add_subcommand("hyper", "Print theory-driven hyperparameters as JSON");
  hyper->add_option("--env", hyper_env.file, "Environment JSON file (dimensions, Delta, P_T)");
  hyper_env.add_options(hyper);
  hyper->add_option("--d", d, "Feature dimension");
  hyper->add_option("--horizon", horizon, "Horizon H");
  hyper->add_option("--episodes", episodes, "Episodes K");
  hyper->add_option("--actions", actions, "Number of actions");
  hyper->add_option("--delta", delta, "Variation budget Delta");
  hyper->add_option("--pt", p_t, "Benchmark-policy variation P_T");
  hyper->add_option("--zeta", zeta, "Failure probability");
  hyper->add_option("--c-prime", c_prime, "Transition bonus constant");
  hyper->add_option("--alpha-multiplier", alpha_multiplier, "Stepsize multiplier");
  hyper->add_option("--window-constant", window_constant, "Window constant");
  hyper->add_option("--window-rule", window_rule, "two-thirds or quarter");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  if (*validate) {
    Mdp mdp;
    if (nsrl_status st = validate_env.load(&mdp); st != NSRL_OK) return Finish(st);
    int32_t clean = 0;
    CString report;
    if (nsrl_status st = nsrl_mdp_validate(mdp.handle, &clean, &report.text); st != NSRL_OK) {
      return Finish(st);
    }
    std::cout << report.text << "\n";
    return clean ? kExitOk : kExitRuntime;
  }

  if (*exporter) {
    Mdp mdp;
    if (nsrl_status st = export_env.load(&mdp); st != NSRL_OK) return Finish(st);
    return Finish(nsrl_mdp_save_json(mdp.handle, export_out.c_str()));
  }

  if (*run) {
    if (nsrl_status st = nsrl_experiment_run(config_path.c_str(), threads, nullptr); st != NSRL_OK) {
      return Finish(st);
    }
    std::cerr << "run complete\n";
    return kExitOk;
  }

  if (*regret) {
    std::vector<const char*> paths;
    for (const auto& p : csv_paths) paths.push_back(p.c_str());
    CString summary;
    if (nsrl_status st = nsrl_regret_summarize(paths.data(), paths.size(), &summary.text);
        st != NSRL_OK) {
      return Finish(st);
    }
    if (regret_out.empty()) {
      std::cout << summary.text;
    } else {
      std::ofstream out(regret_out, std::ios::binary);
      out << summary.text;
      if (!out) {
        std::cerr << "error: cannot write " << regret_out << "\n";
        return kExitRuntime;
      }
    }
    return kExitOk;
  }

  if (*plot) return Finish(nsrl_plot_svg(summary_path.c_str(), plot_out.c_str()));

  if (*hyper) {
    if (!hyper_env.file.empty() || !hyper_env.preset.empty()) {
      Mdp mdp;
      if (nsrl_status st = hyper_env.load(&mdp); st != NSRL_OK) return Finish(st);
      nsrl_dims dims{};
      double total = 0.0, variation = 0.0;
      nsrl_status st = nsrl_mdp_dims(mdp.handle, &dims);
      if (st == NSRL_OK) st = nsrl_mdp_budgets(mdp.handle, nullptr, nullptr, &total);
      if (st == NSRL_OK) st = nsrl_mdp_policy_variation(mdp.handle, &variation);
      if (st != NSRL_OK) return Finish(st);
      d = d.value_or(dims.dim);
      horizon = horizon.value_or(dims.horizon);
      episodes = episodes.value_or(dims.num_episodes);
      actions = actions.value_or(dims.num_actions);
      delta = delta.value_or(total);
      p_t = p_t.value_or(variation);
    }
    if (!d || !horizon || !episodes || !actions || !delta || !p_t) {
      std::cerr << "error: hyper needs --env/--preset or all of --d --horizon --episodes "
                   "--actions --delta --pt\n";
      return kExitUsage;
    }
    const std::string request =
        "{\"d\":" + std::to_string(*d) + ",\"horizon\":" + std::to_string(*horizon) +
        ",\"num_episodes\":" + std::to_string(*episodes) + ",\"num_actions\":" +
        std::to_string(*actions) + ",\"delta\":" + Num(*delta) + ",\"p_t\":" + Num(*p_t) +
        ",\"zeta\":" + Num(zeta) + ",\"c_prime\":" + Num(c_prime) + ",\"alpha_multiplier\":" +
        Num(alpha_multiplier) + ",\"window_constant\":" + Num(window_constant) +
        ",\"window_rule\":\"" + window_rule + "\"}";
    CString out;
    if (nsrl_status st = nsrl_auto_hyperparams(request.c_str(), &out.text); st != NSRL_OK) {
      return Finish(st);
    }
    std::cout << out.text << "\n";
    return kExitOk;
  }
  return kExitUsage;
}
