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

#include <filesystem>
#include <random>

#include "doctest.h"
#include "nsrl/environments.hpp"
#include "nsrl/error.hpp"
#include "nsrl/harness.hpp"
#include "nsrl/oracle.hpp"
#include "nsrl/report.hpp"

namespace fs = std::filesystem;

namespace {

std::string ConfigError(const std::string& text) {
  try {
    nsrl::parse_experiment_config(text);
  } catch (const nsrl::Error& e) {
    CHECK(e.code() == nsrl::ErrorCode::kConfig);
    return e.what();
  }
  FAIL("config was accepted: " << text);
  return "";
}

fs::path TempDir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("nsrl_test_" + name);
  fs::remove_all(dir);
  return dir;
}

std::string SmallConfig(const fs::path& out, const std::string& extra_algorithm = "") {
  return R"({
  "environment": {"preset": "tabular-abrupt", "params": {"num_episodes": 60, "num_changes": 2}},
  "algorithms": [
    {"name": "propo", "hyperparams": {"beta": 0.5, "beta_prime": 0.5}},
)" + extra_algorithm +
         R"(    {"name": "sw-lsvi-ucb", "label": "lsvi", "hyperparams": {"beta": 0.5, "beta_prime": 0.5}}
  ],
  "seeds": [0, 1, 2],
  "master_seed": 9,
  "output_dir": ")" + out.string() + R"("
})";
}

}  // namespace

TEST_CASE("config errors carry line numbers") {
  CHECK(ConfigError("{\n  \"environment\": {\"preset\": \"tabular-abrupt\"},\n  \"sedes\": [1]\n}")
            .find("line 3") != std::string::npos);
  CHECK(ConfigError("{\n  \"environment\": {\"preset\": \"tabular-abrupt\"},\n  \"algorithms\": [\n"
                    "    {\"name\": \"propo\"},\n    {\"name\": \"ppo\"}\n  ],\n  \"seeds\": [1]\n}")
            .find("line 5") != std::string::npos);
  CHECK(ConfigError("{\n  \"environment\": {\"preset\": \"tabular-abrupt\"},\n  \"algorithms\": [\n"
                    "    {\"name\": \"propo\",\n     \"hyperparams\": {\"tua\": 3}}\n  ],\n"
                    "  \"seeds\": [1]\n}")
            .find("line 5") != std::string::npos);
  CHECK(ConfigError("{\n  \"environment\": {\"preset\": \"tabular-abrupt\"},\n  \"algorithms\": [\n"
                    "    {\"name\": \"propo\"}\n  ],\n  \"seeds\": [1, 1]\n}")
            .find("line 6") != std::string::npos);
  CHECK(ConfigError("{\n  \"environment\": {\"preset\": \"tabular-abrupt\"},\n  \"algorithms\": [\n"
                    "    {\"name\": \"propo\"}\n  ],\n  \"seeds\": [1,\n}")
            .find("line 7") != std::string::npos);
  ConfigError(R"({"environment": {"preset": "nope"}, "algorithms": [{"name": "propo"}], "seeds": [1]})");
  ConfigError(R"({"environment": {"preset": "tabular-abrupt"}, "algorithms": [{"name": "propo"},
                  {"name": "propo"}], "seeds": [1]})");
  ConfigError(R"({"environment": {"preset": "tabular-abrupt"}, "algorithms": [{"name": "propo",
                  "label": "a__seed1"}], "seeds": [1]})");
  ConfigError(R"({"environment": {"preset": "tabular-abrupt"}, "algorithms": [{"name":
                  "lsvi-ucb-fullwindow", "hyperparams": {"w": 5}}], "seeds": [1]})");
  ConfigError(R"({"environment": {"preset": "tabular-abrupt"}, "algorithms": [{"name": "propo"}],
                  "seeds": [-1]})");
  ConfigError(R"({"environment": {"preset": "tabular-abrupt"}, "algorithms": [{"name": "propo",
                  "hyperparams": {"window_rule": "half"}}], "seeds": [1]})");
}

TEST_CASE("environment and hyperparameter problems surface before any run") {
  const fs::path out = TempDir("bad_env");
  const auto config = nsrl::parse_experiment_config(
      "{\n  \"environment\": {\"preset\": \"tabular-abrupt\",\n"
      "                  \"params\": {\"num_episodes\": 10, \"num_changes\": 20}},\n"
      "  \"algorithms\": [{\"name\": \"propo\"}],\n  \"seeds\": [0],\n  \"output_dir\": \"" +
      out.string() + "\"\n}");
  std::string message;
  try {
    nsrl::run_experiment(config, 1);
  } catch (const nsrl::Error& e) {
    message = e.what();
    CHECK(e.code() == nsrl::ErrorCode::kConfig);
  }
  CHECK(message.find("line 2") != std::string::npos);
  CHECK_FALSE(fs::exists(out));

  const auto bad_hp = nsrl::parse_experiment_config(
      "{\n  \"environment\": {\"preset\": \"tabular-stationary\", \"params\": {\"num_episodes\": 10}},\n"
      "  \"algorithms\": [\n    {\"name\": \"propo\",\n     \"hyperparams\": {\"tau\": 50}}],\n"
      "  \"seeds\": [0],\n  \"output_dir\": \"" + out.string() + "\"\n}");
  message.clear();
  try {
    nsrl::run_experiment(bad_hp, 1);
  } catch (const nsrl::Error& e) {
    message = e.what();
  }
  CHECK(message.find("line 4") != std::string::npos);
  CHECK_FALSE(fs::exists(out));
}

TEST_CASE("hyperparameter resolution") {
  const auto mdp = nsrl::build_preset("tabular-abrupt", {{"num_episodes", 200}}, 1);
  const auto bench = nsrl::compute_benchmarks(mdp, std::nullopt, false);
  const auto automatic = nsrl::auto_hyperparams(mdp.dim(), mdp.horizon(), 200, mdp.num_actions(),
                                                bench.budgets.total, bench.p_t);
  const auto all_auto = nsrl::resolve_hyperparams(nsrl::make_algorithm_spec("propo", "\"auto\""), mdp, bench);
  CHECK(all_auto.tau == automatic.tau);
  CHECK(all_auto.alpha == automatic.alpha);
  CHECK(all_auto.w == automatic.w);
  CHECK(all_auto.beta_prime == automatic.beta_prime);

  const auto mixed = nsrl::resolve_hyperparams(
      nsrl::make_algorithm_spec("propo", R"({"tau": 50, "beta": 0.25})"), mdp, bench);
  CHECK(mixed.tau == 50);
  CHECK(mixed.beta == 0.25);
  CHECK(mixed.w == automatic.w);
  // Alpha follows the explicit restart count.
  const auto stationary = nsrl::auto_hyperparams(mdp.dim(), mdp.horizon(), 200, mdp.num_actions(), 0, 0);
  CHECK(mixed.alpha == doctest::Approx(stationary.alpha * 2.0).epsilon(1e-14));

  const auto full = nsrl::resolve_hyperparams(nsrl::make_algorithm_spec("lsvi-ucb-fullwindow", ""), mdp, bench);
  CHECK(full.w == 200);
  CHECK_THROWS_AS(nsrl::make_algorithm_spec("propo", R"({"tau": "three"})"), nsrl::Error);
}

TEST_CASE("stream seeds depend on algorithm name and seed only") {
  CHECK(nsrl::run_stream_seed(1, "propo", 3) == nsrl::run_stream_seed(1, "propo", 3));
  CHECK(nsrl::run_stream_seed(1, "propo", 3) != nsrl::run_stream_seed(1, "propo", 4));
  CHECK(nsrl::run_stream_seed(1, "propo", 3) != nsrl::run_stream_seed(1, "sw-lsvi-ucb", 3));
  CHECK(nsrl::run_stream_seed(1, "propo", 3) != nsrl::run_stream_seed(2, "propo", 3));
}

TEST_CASE("experiment outputs, determinism and recomputation") {
  const fs::path out = TempDir("experiment");
  const auto config = nsrl::parse_experiment_config(SmallConfig(out));
  const auto result = nsrl::run_experiment(config, 2);
  std::vector<std::string> csvs;
  for (const auto& entry : fs::directory_iterator(out)) {
    if (entry.path().extension() == ".csv") csvs.push_back(entry.path().string());
  }
  CHECK(csvs.size() == 6);
  CHECK(fs::exists(out / "summary.json"));
  CHECK(fs::exists(out / "runs.json"));

  // Summary means equal arithmetic means of the CSV values.
  const auto summary = nlohmann::json::parse(nsrl::read_text_file((out / "summary.json").string()));
  std::vector<nsrl::LabeledRun> recomputed;
  for (const auto& path : csvs) {
    nsrl::LabeledRun run;
    nsrl::parse_run_csv_name(path, &run.label, &run.seed);
    run.rows = nsrl::rows_from_csv(nsrl::read_text_file(path));
    recomputed.push_back(std::move(run));
  }
  for (const auto& alg : summary.at("algorithms")) {
    for (const auto& cp : alg.at("checkpoints")) {
      const int k = cp.at("episode");
      double sum = 0.0;
      int n = 0;
      for (const auto& run : recomputed) {
        if (run.label == alg.at("label")) sum += run.rows[k - 1].cumulative_regret, ++n;
      }
      CHECK(n == 3);
      CHECK(cp.at("mean").get<double>() == doctest::Approx(sum / n).epsilon(1e-14));
    }
  }
  CHECK(nsrl::summarize(recomputed).dump(2) + "\n" == nsrl::read_text_file((out / "summary.json").string()));

  // Byte-identical rerun, also with a different pool size.
  std::map<std::string, std::string> first;
  for (const auto& path : csvs) first[path] = nsrl::read_text_file(path);
  nsrl::run_experiment(config, 1);
  for (const auto& [path, text] : first) CHECK(nsrl::read_text_file(path) == text);

  // Adding an algorithm leaves the other runs untouched.
  const fs::path out2 = TempDir("experiment_extra");
  nsrl::run_experiment(nsrl::parse_experiment_config(SmallConfig(
                           out2, "    {\"name\": \"propo-adv\", \"hyperparams\": {\"beta_prime\": 0.5}},\n")),
                       1);
  for (const auto& [path, text] : first) {
    CHECK(nsrl::read_text_file((out2 / fs::path(path).filename()).string()) == text);
  }
  fs::remove_all(out);
  fs::remove_all(out2);
}
