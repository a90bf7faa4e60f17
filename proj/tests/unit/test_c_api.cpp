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

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <string>

#include "doctest.h"
#include "json.hpp"
#include "nsrl/nsrl.h"

namespace fs = std::filesystem;

namespace {

// Takes ownership of a string returned by the library.
std::string Take(char* text) {
  std::string out = text ? text : "";
  nsrl_string_free(text);
  return out;
}

struct MdpHandle {
  nsrl_mdp* ptr = nullptr;
  ~MdpHandle() { nsrl_mdp_free(ptr); }
};

}  // namespace

TEST_CASE("version and status names") {
  CHECK(std::string(nsrl_version()).size() > 0);
  CHECK(std::string(nsrl_status_name(NSRL_OK)) == "ok");
  CHECK(std::string(nsrl_status_name(NSRL_ERR_CONFIG)).size() > 0);
  CHECK(std::string(nsrl_status_name(static_cast<nsrl_status>(99))).size() > 0);
}

TEST_CASE("preset handles and queries") {
  MdpHandle mdp;
  REQUIRE(nsrl_mdp_build_preset("hard2state", nullptr, 0, &mdp.ptr) == NSRL_OK);
  nsrl_dims dims;
  REQUIRE(nsrl_mdp_dims(mdp.ptr, &dims) == NSRL_OK);
  CHECK(dims.num_states == 2);
  CHECK(dims.num_actions == 2);
  CHECK(dims.dim == 2);

  double row[2];
  REQUIRE(nsrl_mdp_transition_row(mdp.ptr, 1, 1, 0, 0, row, 2) == NSRL_OK);
  CHECK(std::abs(row[0] + row[1] - 1.0) <= 1e-12);
  CHECK(nsrl_mdp_transition_row(mdp.ptr, 1, 1, 0, 0, row, 1) == NSRL_ERR_INVALID_ARGUMENT);
  double r = -1.0;
  CHECK(nsrl_mdp_reward(mdp.ptr, 1, 1, 0, 0, &r) == NSRL_OK);
  CHECK(nsrl_mdp_reward(mdp.ptr, 0, 1, 0, 0, &r) == NSRL_ERR_INDEX);
  CHECK(std::string(nsrl_last_error()).size() > 0);

  int32_t clean = 0;
  char* report = nullptr;
  REQUIRE(nsrl_mdp_validate(mdp.ptr, &clean, &report) == NSRL_OK);
  CHECK(clean == 1);
  CHECK(nlohmann::json::parse(Take(report)).is_object());

  double reward = -1, transition = -1, total = -1;
  REQUIRE(nsrl_mdp_budgets(mdp.ptr, &reward, &transition, &total) == NSRL_OK);
  CHECK(total == 0.0);
  double pt = -1;
  REQUIRE(nsrl_mdp_policy_variation(mdp.ptr, &pt) == NSRL_OK);
  CHECK(pt == 0.0);
}

TEST_CASE("json round trip through files and strings") {
  MdpHandle a, b, c;
  REQUIRE(nsrl_mdp_build_preset("tabular-abrupt", R"({"num_episodes": 20})", 4, &a.ptr) == NSRL_OK);
  char* text = nullptr;
  REQUIRE(nsrl_mdp_to_json(a.ptr, &text) == NSRL_OK);
  const std::string json = Take(text);
  REQUIRE(nsrl_mdp_from_json_string(json.c_str(), &b.ptr) == NSRL_OK);
  const fs::path path = fs::temp_directory_path() / "nsrl_capi_env.json";
  REQUIRE(nsrl_mdp_save_json(b.ptr, path.string().c_str()) == NSRL_OK);
  REQUIRE(nsrl_mdp_load_json(path.string().c_str(), &c.ptr) == NSRL_OK);
  REQUIRE(nsrl_mdp_to_json(c.ptr, &text) == NSRL_OK);
  CHECK(Take(text) == json);
  fs::remove(path);
}

TEST_CASE("error codes at the boundary") {
  nsrl_mdp* mdp = nullptr;
  CHECK(nsrl_mdp_build_preset("nope", nullptr, 0, &mdp) == NSRL_ERR_CONFIG);
  CHECK(mdp == nullptr);
  CHECK(nsrl_mdp_build_preset("hard2state", "{not json", 0, &mdp) == NSRL_ERR_CONFIG);
  CHECK(nsrl_mdp_build_preset(nullptr, nullptr, 0, &mdp) == NSRL_ERR_INVALID_ARGUMENT);
  CHECK(nsrl_mdp_build_preset("hard2state", nullptr, 0, nullptr) == NSRL_ERR_INVALID_ARGUMENT);
  CHECK(nsrl_mdp_load_json("/nonexistent/env.json", &mdp) == NSRL_ERR_IO);
  CHECK(nsrl_mdp_from_json_string(R"({"num_states": 2})", &mdp) == NSRL_ERR_CONFIG);
  CHECK(nsrl_mdp_dims(nullptr, nullptr) == NSRL_ERR_INVALID_ARGUMENT);
  CHECK(nsrl_experiment_check("/nonexistent/config.json") == NSRL_ERR_IO);
  nsrl_mdp_free(nullptr);
}

TEST_CASE("auto hyperparameters") {
  char* out = nullptr;
  REQUIRE(nsrl_auto_hyperparams(
              R"({"d": 4, "horizon": 2, "num_episodes": 100, "num_actions": 2, "delta": 0, "p_t": 0})",
              &out) == NSRL_OK);
  const auto hp = nlohmann::json::parse(Take(out));
  CHECK(hp.at("tau") == 100);
  CHECK(hp.at("w") == 100);
  CHECK(hp.at("rho") == 1);
  CHECK(std::abs(hp.at("beta").get<double>() - 2.0) <= 1e-15);
  CHECK(std::abs(hp.at("beta_prime").get<double>() - std::sqrt(16.0 * std::log(16000.0))) <= 1e-12);
  CHECK(nsrl_auto_hyperparams(R"({"d": 4})", &out) == NSRL_ERR_CONFIG);
  CHECK(nsrl_auto_hyperparams(
            R"({"d": 4, "horizon": 2, "num_episodes": 100, "num_actions": 2, "delta": 0, "p_t": 0, "zeta": 2})",
            &out) == NSRL_ERR_PARAMETER);
  CHECK(nsrl_auto_hyperparams(
            R"({"d": 4, "horizon": 2, "num_episodes": 100, "num_actions": 2, "delta": 0, "p_t": 0, "extra": 1})",
            &out) == NSRL_ERR_CONFIG);
}

TEST_CASE("single runs return the regret csv") {
  MdpHandle mdp;
  REQUIRE(nsrl_mdp_build_preset("tabular-stationary", R"({"num_episodes": 30})", 1, &mdp.ptr) == NSRL_OK);
  char* csv = nullptr;
  REQUIRE(nsrl_run_single(mdp.ptr, "sw-lsvi-ucb", R"({"beta": 0.5, "beta_prime": 0.5})", 3, &csv) == NSRL_OK);
  const std::string text = Take(csv);
  CHECK(text.rfind("episode,optimal_value,achieved_value,episode_regret,cumulative_regret,restarted,window_fill\n", 0) == 0);
  size_t lines = 0;
  for (char ch : text) lines += ch == '\n';
  CHECK(lines == 31);
  REQUIRE(nsrl_run_single(mdp.ptr, "sw-lsvi-ucb", R"({"beta": 0.5, "beta_prime": 0.5})", 3, &csv) == NSRL_OK);
  CHECK(Take(csv) == text);
  CHECK(nsrl_run_single(mdp.ptr, "dqn", nullptr, 3, &csv) == NSRL_ERR_CONFIG);
  CHECK(nsrl_run_single(mdp.ptr, "propo", R"({"tau": 0})", 3, &csv) == NSRL_ERR_PARAMETER);
}

TEST_CASE("experiment, regret and plot") {
  const fs::path dir = fs::temp_directory_path() / "nsrl_capi_experiment";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const fs::path config = dir / "config.json";
  {
    FILE* f = std::fopen(config.string().c_str(), "w");
    REQUIRE(f != nullptr);
    std::fprintf(f,
                 R"({"environment": {"preset": "tabular-gradual", "params": {"num_episodes": 40}},
 "algorithms": [{"name": "propo"}, {"name": "lsvi-ucb-fullwindow"}],
 "seeds": [3, 4], "output_dir": "%s"})",
                 (dir / "out").string().c_str());
    std::fclose(f);
  }
  REQUIRE(nsrl_experiment_check(config.string().c_str()) == NSRL_OK);
  char* summary = nullptr;
  REQUIRE(nsrl_experiment_run(config.string().c_str(), 1, &summary) == NSRL_OK);
  const std::string stored = Take(summary);

  std::vector<std::string> paths;
  for (const auto& e : fs::directory_iterator(dir / "out")) {
    if (e.path().extension() == ".csv") paths.push_back(e.path().string());
  }
  REQUIRE(paths.size() == 4);
  std::vector<const char*> cpaths;
  for (const auto& p : paths) cpaths.push_back(p.c_str());
  REQUIRE(nsrl_regret_summarize(cpaths.data(), cpaths.size(), &summary) == NSRL_OK);
  CHECK(nlohmann::json::parse(Take(summary)) == nlohmann::json::parse(stored));

  const fs::path svg = dir / "plot.svg";
  REQUIRE(nsrl_plot_svg((dir / "out" / "summary.json").string().c_str(), svg.string().c_str()) == NSRL_OK);
  CHECK(fs::file_size(svg) > 100);
  fs::remove_all(dir);
}
