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

#ifndef NSRL_HARNESS_HPP_
#define NSRL_HARNESS_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "nsrl/algorithms.hpp"
#include "nsrl/mdp.hpp"
#include "nsrl/oracle.hpp"
#include "nsrl/report.hpp"

namespace nsrl {

// Hyperparameters as written in a config: unset fields are resolved by
// auto_hyperparams with the knobs below.
struct HyperSpec {
  std::optional<int> tau;
  std::optional<double> alpha;
  std::optional<int> w;
  std::optional<double> lambda;
  std::optional<double> lambda_prime;
  std::optional<double> beta;
  std::optional<double> beta_prime;
  AutoKnobs knobs;
};

struct AlgorithmSpec {
  std::string name;   // propo, sw-lsvi-ucb, propo-adv or lsvi-ucb-fullwindow
  std::string label;  // output name, defaults to name
  Algorithm algorithm = Algorithm::kPropo;
  bool full_window = false;  // w = K
  HyperSpec hyper;
  int line = 0;  // config line of the entry, for error messages
};

struct ExperimentConfig {
  std::string preset;
  nlohmann::json params = nlohmann::json::object();
  std::vector<AlgorithmSpec> algorithms;
  std::vector<std::uint64_t> seeds;
  std::string output_dir = "results";
  std::uint64_t master_seed = 0;
  int environment_line = 0;
};

// Parses a JSON config. Every problem, including unknown keys, throws kConfig
// with a message of the form "line N: ...".
ExperimentConfig parse_experiment_config(const std::string& text);
ExperimentConfig load_experiment_config(const std::string& path);

// Algorithm entry from a name and a hyperparameter document ("auto", an
// object, or empty for auto). Throws kConfig.
AlgorithmSpec make_algorithm_spec(const std::string& name, const std::string& hyperparams_json);

// Explicit fields win; the rest come from auto_hyperparams with the true
// variation budget and benchmark-policy variation of `mdp`.
Hyperparams resolve_hyperparams(const AlgorithmSpec& spec, const LinearKernelMdp& mdp,
                                const BenchmarkTable& benchmarks);

// Seed of the learner's random stream for one (algorithm, seed) run.
std::uint64_t run_stream_seed(std::uint64_t master_seed, const std::string& algorithm_name,
                              std::uint64_t seed);

// NONSTAT_RL_THREADS when set, otherwise the number of logical cores.
int pool_size();

struct RunOutcome {
  std::string label;
  std::string algorithm;
  std::uint64_t seed = 0;
  std::uint64_t stream_seed = 0;
  Hyperparams hp;
  double p_t = 0.0;
  VariationBudgets budgets;
  std::vector<RunCsvRow> rows;
};

// One learner run with streamed regret evaluation and invariant checks;
// throws kInvariant when a check fails.
RunOutcome run_single(const LinearKernelMdp& mdp, const BenchmarkTable& benchmarks,
                      const AlgorithmSpec& spec, const Hyperparams& hp, std::uint64_t seed,
                      std::uint64_t stream_seed);

struct ExperimentResult {
  std::vector<RunOutcome> runs;  // sorted by label, then seed
  nlohmann::json summary;
  nlohmann::json runs_json() const;
};

// Runs every (algorithm, seed) pair in a pool of `threads` workers (0: pool
// size from the environment). Environments and hyperparameters are checked
// before any learner starts; every run is checked against the oracle
// invariants. Writes nothing.
ExperimentResult execute_experiment(const ExperimentConfig& config, int threads = 0);

// execute_experiment, then one CSV per run, summary.json and runs.json in
// config.output_dir.
ExperimentResult run_experiment(const ExperimentConfig& config, int threads = 0);

}  // namespace nsrl

#endif  // NSRL_HARNESS_HPP_
