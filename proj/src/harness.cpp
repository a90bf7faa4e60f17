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

#include "nsrl/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <set>
#include <thread>

#include "nsrl/environments.hpp"
#include "nsrl/error.hpp"
#include "nsrl/rng.hpp"

namespace nsrl {

namespace {

// Line-anchored config diagnostics ------------------------------------------

class ConfigText {
 public:
  explicit ConfigText(const std::string& text) : text_(text) {}

  int line_of_offset(size_t offset) const {
    offset = std::min(offset, text_.size());
    return 1 + static_cast<int>(std::count(text_.begin(), text_.begin() + offset, '\n'));
  }

  // Line of the first `"key"` followed by a colon, or 1 when absent.
  int line_of_key(const std::string& key) const {
    const std::string quoted = "\"" + key + "\"";
    for (size_t pos = text_.find(quoted); pos != std::string::npos;
         pos = text_.find(quoted, pos + 1)) {
      size_t after = pos + quoted.size();
      while (after < text_.size() && std::isspace(static_cast<unsigned char>(text_[after]))) ++after;
      if (after < text_.size() && text_[after] == ':') return line_of_offset(pos);
    }
    return 1;
  }

  [[noreturn]] void fail(int line, const std::string& what) const {
    Fail(ErrorCode::kConfig, "line " + std::to_string(line) + ": " + what);
  }
  [[noreturn]] void fail_key(const std::string& key, const std::string& what) const {
    fail(line_of_key(key), what);
  }

 private:
  const std::string& text_;
};

void CheckKeys(const ConfigText& text, const nlohmann::json& obj, const std::string& where,
               const std::vector<std::string>& allowed) {
  for (const auto& item : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), item.key()) == allowed.end()) {
      text.fail_key(item.key(), "unknown key '" + item.key() + "' in " + where);
    }
  }
}

std::uint64_t ReadUnsigned(const ConfigText& text, const nlohmann::json& value,
                           const std::string& key) {
  if (!value.is_number_integer() || (value.is_number_integer() && !value.is_number_unsigned() &&
                                     value.get<std::int64_t>() < 0)) {
    text.fail_key(key, "'" + key + "' must be a non-negative integer");
  }
  return value.get<std::uint64_t>();
}

double ReadNumber(const ConfigText& text, const nlohmann::json& value, const std::string& key) {
  if (!value.is_number()) text.fail_key(key, "'" + key + "' must be a number");
  return value.get<double>();
}

bool IsAuto(const nlohmann::json& value) { return value.is_string() && value == "auto"; }

template <typename T>
std::optional<T> ReadAutoOr(const ConfigText& text, const nlohmann::json& obj,
                            const std::string& key) {
  if (!obj.contains(key) || IsAuto(obj[key])) return std::nullopt;
  const auto& value = obj[key];
  if constexpr (std::is_integral_v<T>) {
    if (!value.is_number_integer()) text.fail_key(key, "'" + key + "' must be an integer or \"auto\"");
    return value.get<T>();
  } else {
    if (!value.is_number()) text.fail_key(key, "'" + key + "' must be a number or \"auto\"");
    return value.get<T>();
  }
}

HyperSpec ParseHyper(const ConfigText& text, const nlohmann::json& value) {
  HyperSpec spec;
  if (IsAuto(value)) return spec;
  if (!value.is_object()) text.fail_key("hyperparams", "'hyperparams' must be \"auto\" or an object");
  CheckKeys(text, value, "hyperparams",
            {"tau", "alpha", "w", "lambda", "lambda_prime", "beta", "beta_prime", "zeta", "c_prime",
             "alpha_multiplier", "window_constant", "window_rule"});
  spec.tau = ReadAutoOr<int>(text, value, "tau");
  spec.alpha = ReadAutoOr<double>(text, value, "alpha");
  spec.w = ReadAutoOr<int>(text, value, "w");
  spec.lambda = ReadAutoOr<double>(text, value, "lambda");
  spec.lambda_prime = ReadAutoOr<double>(text, value, "lambda_prime");
  spec.beta = ReadAutoOr<double>(text, value, "beta");
  spec.beta_prime = ReadAutoOr<double>(text, value, "beta_prime");
  if (auto zeta = ReadAutoOr<double>(text, value, "zeta")) spec.knobs.zeta = *zeta;
  if (value.contains("c_prime")) spec.knobs.c_prime = ReadNumber(text, value["c_prime"], "c_prime");
  if (value.contains("alpha_multiplier")) {
    spec.knobs.alpha_multiplier = ReadNumber(text, value["alpha_multiplier"], "alpha_multiplier");
  }
  if (value.contains("window_constant")) {
    spec.knobs.window_constant = ReadNumber(text, value["window_constant"], "window_constant");
  }
  if (value.contains("window_rule")) {
    const auto& rule = value["window_rule"];
    if (rule == "two-thirds") {
      spec.knobs.window_rule = WindowRule::kTwoThirds;
    } else if (rule == "quarter") {
      spec.knobs.window_rule = WindowRule::kQuarter;
    } else {
      text.fail_key("window_rule", "'window_rule' must be \"two-thirds\" or \"quarter\"");
    }
  }
  return spec;
}

bool SetAlgorithm(const std::string& name, AlgorithmSpec* spec) {
  spec->full_window = false;
  if (name == "propo") {
    spec->algorithm = Algorithm::kPropo;
  } else if (name == "sw-lsvi-ucb") {
    spec->algorithm = Algorithm::kSwLsviUcb;
  } else if (name == "propo-adv") {
    spec->algorithm = Algorithm::kPropoAdversarial;
  } else if (name == "lsvi-ucb-fullwindow") {
    spec->algorithm = Algorithm::kSwLsviUcb;
    spec->full_window = true;
  } else {
    return false;
  }
  return true;
}

bool ValidLabel(const std::string& label) {
  if (label.empty() || label.find("__seed") != std::string::npos) return false;
  return std::all_of(label.begin(), label.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.';
  });
}

// Work pool --------------------------------------------------------------

template <typename F>
void ParallelFor(size_t n, int threads, F&& body) {
  std::vector<std::exception_ptr> errors(n);
  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (size_t i; (i = next.fetch_add(1)) < n;) {
      try {
        body(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const size_t count = std::clamp<size_t>(threads, 1, std::max<size_t>(n, 1));
  std::vector<std::thread> pool;
  for (size_t t = 1; t < count; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace

ExperimentConfig parse_experiment_config(const std::string& raw) {
  const ConfigText text(raw);
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(raw);
  } catch (const nlohmann::json::parse_error& e) {
    text.fail(text.line_of_offset(e.byte > 0 ? e.byte - 1 : 0), std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) text.fail(1, "config must be a JSON object");
  CheckKeys(text, doc, "config", {"environment", "algorithms", "seeds", "output_dir", "master_seed"});

  ExperimentConfig config;
  if (!doc.contains("environment")) text.fail(1, "missing 'environment'");
  const auto& env = doc["environment"];
  config.environment_line = text.line_of_key("environment");
  if (!env.is_object()) text.fail_key("environment", "'environment' must be an object");
  CheckKeys(text, env, "environment", {"preset", "params"});
  if (!env.contains("preset") || !env["preset"].is_string()) {
    text.fail_key("environment", "'environment.preset' must be a string");
  }
  config.preset = env["preset"].get<std::string>();
  if (!is_known_preset(config.preset)) text.fail_key("preset", "unknown preset '" + config.preset + "'");
  if (env.contains("params")) {
    if (!env["params"].is_object()) text.fail_key("params", "'environment.params' must be an object");
    config.params = env["params"];
  }

  if (!doc.contains("algorithms") || !doc["algorithms"].is_array() || doc["algorithms"].empty()) {
    text.fail_key("algorithms", "'algorithms' must be a non-empty array");
  }
  std::set<std::string> labels;
  size_t search_from = 0;
  const std::string& source = raw;
  for (const auto& entry : doc["algorithms"]) {
    if (!entry.is_object()) text.fail_key("algorithms", "each algorithm must be an object");
    CheckKeys(text, entry, "algorithm", {"name", "label", "hyperparams"});
    AlgorithmSpec spec;
    // Entries appear in order, so each "name" key is found after the last one.
    const size_t name_pos = source.find("\"name\"", search_from);
    spec.line = name_pos == std::string::npos ? text.line_of_key("algorithms")
                                              : text.line_of_offset(name_pos);
    if (name_pos != std::string::npos) search_from = name_pos + 1;
    if (!entry.contains("name") || !entry["name"].is_string()) {
      text.fail(spec.line, "algorithm 'name' must be a string");
    }
    spec.name = entry["name"].get<std::string>();
    if (!SetAlgorithm(spec.name, &spec)) text.fail(spec.line, "unknown algorithm '" + spec.name + "'");
    spec.label = spec.name;
    if (entry.contains("label")) {
      if (!entry["label"].is_string()) text.fail(spec.line, "'label' must be a string");
      spec.label = entry["label"].get<std::string>();
    }
    if (!ValidLabel(spec.label)) {
      text.fail(spec.line, "label '" + spec.label + "' must use [A-Za-z0-9._-] and not contain '__seed'");
    }
    if (!labels.insert(spec.label).second) text.fail(spec.line, "duplicate label '" + spec.label + "'");
    if (entry.contains("hyperparams")) spec.hyper = ParseHyper(text, entry["hyperparams"]);
    if (spec.full_window && spec.hyper.w) {
      text.fail(spec.line, "lsvi-ucb-fullwindow fixes w = K; remove 'w'");
    }
    config.algorithms.push_back(std::move(spec));
  }

  if (!doc.contains("seeds") || !doc["seeds"].is_array() || doc["seeds"].empty()) {
    text.fail_key("seeds", "'seeds' must be a non-empty array");
  }
  std::set<std::uint64_t> seen;
  for (const auto& seed : doc["seeds"]) {
    const std::uint64_t value = ReadUnsigned(text, seed, "seeds");
    if (!seen.insert(value).second) text.fail_key("seeds", "duplicate seed " + std::to_string(value));
    config.seeds.push_back(value);
  }
  if (doc.contains("output_dir")) {
    if (!doc["output_dir"].is_string() || doc["output_dir"].get<std::string>().empty()) {
      text.fail_key("output_dir", "'output_dir' must be a non-empty string");
    }
    config.output_dir = doc["output_dir"].get<std::string>();
  }
  if (doc.contains("master_seed")) config.master_seed = ReadUnsigned(text, doc["master_seed"], "master_seed");
  return config;
}

AlgorithmSpec make_algorithm_spec(const std::string& name, const std::string& hyperparams_json) {
  const ConfigText text(hyperparams_json);
  AlgorithmSpec spec;
  spec.name = name;
  spec.label = name;
  if (!SetAlgorithm(name, &spec)) Fail(ErrorCode::kConfig, "unknown algorithm '" + name + "'");
  if (hyperparams_json.empty() || hyperparams_json == "auto") return spec;
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(hyperparams_json);
  } catch (const nlohmann::json::parse_error& e) {
    text.fail(text.line_of_offset(e.byte > 0 ? e.byte - 1 : 0), std::string("invalid JSON: ") + e.what());
  }
  spec.hyper = ParseHyper(text, doc);
  if (spec.full_window && spec.hyper.w) text.fail_key("w", "lsvi-ucb-fullwindow fixes w = K; remove 'w'");
  return spec;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  return parse_experiment_config(read_text_file(path));
}

Hyperparams resolve_hyperparams(const AlgorithmSpec& spec, const LinearKernelMdp& mdp,
                                const BenchmarkTable& benchmarks) {
  const HyperSpec& h = spec.hyper;
  const int K = mdp.num_episodes();
  Hyperparams hp = auto_hyperparams(mdp.dim(), mdp.horizon(), K, mdp.num_actions(),
                                    benchmarks.budgets.total, benchmarks.p_t, h.knobs);
  if (h.tau) {
    hp.tau = *h.tau;
    if (!h.alpha) {
      // The stepsize follows the number of restarts implied by tau.
      hp.alpha = auto_hyperparams(mdp.dim(), mdp.horizon(), K, mdp.num_actions(), 0.0, 0.0, h.knobs).alpha *
                 std::sqrt(static_cast<double>(restart_count(std::clamp(hp.tau, 1, K), K)));
    }
  }
  if (h.alpha) hp.alpha = *h.alpha;
  if (h.w) hp.w = *h.w;
  if (spec.full_window) hp.w = K;
  if (h.lambda) hp.lambda = *h.lambda;
  if (h.lambda_prime) hp.lambda_prime = *h.lambda_prime;
  if (h.beta) hp.beta = *h.beta;
  if (h.beta_prime) hp.beta_prime = *h.beta_prime;
  hp.validate(K);
  return hp;
}

std::uint64_t run_stream_seed(std::uint64_t master_seed, const std::string& algorithm_name,
                              std::uint64_t seed) {
  return Rng(master_seed).split(algorithm_name).split(seed).next_u64();
}

int pool_size() {
  if (const char* env = std::getenv("NONSTAT_RL_THREADS"); env && *env) {
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (*end != '\0' || n < 1 || n > 4096) {
      Fail(ErrorCode::kConfig, "NONSTAT_RL_THREADS must be a positive integer");
    }
    return static_cast<int>(n);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

nlohmann::json ExperimentResult::runs_json() const {
  nlohmann::json out = nlohmann::json::array();
  for (const RunOutcome& run : runs) {
    out.push_back({{"label", run.label},
                   {"algorithm", run.algorithm},
                   {"seed", run.seed},
                   {"stream_seed", run.stream_seed},
                   {"csv", run_csv_name(run.label, run.seed)},
                   {"hyperparams", run.hp.to_json()},
                   {"p_t", run.p_t},
                   {"budgets",
                    {{"reward", run.budgets.reward},
                     {"transition", run.budgets.transition},
                     {"total", run.budgets.total}}}});
  }
  return out;
}

RunOutcome run_single(const LinearKernelMdp& mdp, const BenchmarkTable& benchmarks,
                      const AlgorithmSpec& spec, const Hyperparams& hp, std::uint64_t seed,
                      std::uint64_t stream_seed) {
  RunOutcome out;
  out.label = spec.label;
  out.algorithm = spec.name;
  out.seed = seed;
  out.stream_seed = stream_seed;
  out.hp = hp;
  out.p_t = benchmarks.p_t;
  out.budgets = benchmarks.budgets;

  std::vector<double> achieved;
  std::vector<bool> restarted;
  std::vector<int> fill;
  std::vector<std::string> violations;
  RunOptions options;
  options.keep_tables = false;
  options.keep_policies = false;
  options.observer = [&](const EpisodeRecord& ep) {
    achieved.push_back(policy_tables(mdp.episode_model(ep.k), ep.policy).v(1, mdp.initial_state()));
    restarted.push_back(ep.restarted);
    fill.push_back(ep.window_fill);
    if (violations.size() < 16) {
      auto more = episode_invariant_violations(mdp, spec.algorithm, hp, ep);
      violations.insert(violations.end(), more.begin(), more.end());
    }
  };
  run_algorithm(spec.algorithm, mdp, hp, stream_seed, options);
  const RegretReport report = regret_from_values(benchmarks, std::move(achieved));
  auto more = report_invariant_violations(report);
  violations.insert(violations.end(), more.begin(), more.end());
  if (!violations.empty()) {
    Fail(ErrorCode::kInvariant, spec.label + " seed " + std::to_string(seed) + ": " +
                                    violations.front() + " (" + std::to_string(violations.size()) +
                                    " violations)");
  }
  out.rows = make_rows(report, restarted, fill);
  return out;
}

ExperimentResult execute_experiment(const ExperimentConfig& config, int threads) {
  if (config.algorithms.empty() || config.seeds.empty()) {
    Fail(ErrorCode::kConfig, "config needs at least one algorithm and one seed");
  }
  if (threads <= 0) threads = pool_size();
  const size_t num_seeds = config.seeds.size();
  const size_t num_algs = config.algorithms.size();

  // Environments, benchmarks and hyperparameters, all before any learner runs.
  std::vector<std::optional<LinearKernelMdp>> envs(num_seeds);
  std::vector<BenchmarkTable> benchmarks(num_seeds);
  ParallelFor(num_seeds, threads, [&](size_t i) {
    try {
      envs[i].emplace(build_preset(config.preset, config.params, config.seeds[i]));
    } catch (const Error& e) {
      Fail(ErrorCode::kConfig, "line " + std::to_string(config.environment_line) +
                                   ": environment: " + e.what());
    }
    benchmarks[i] = compute_benchmarks(*envs[i], std::nullopt, false);
  });
  std::vector<Hyperparams> hps(num_algs * num_seeds);
  for (size_t a = 0; a < num_algs; ++a) {
    for (size_t i = 0; i < num_seeds; ++i) {
      try {
        hps[a * num_seeds + i] = resolve_hyperparams(config.algorithms[a], *envs[i], benchmarks[i]);
      } catch (const Error& e) {
        Fail(ErrorCode::kConfig, "line " + std::to_string(config.algorithms[a].line) + ": " +
                                     config.algorithms[a].label + ": " + e.what());
      }
    }
  }

  ExperimentResult result;
  result.runs.resize(num_algs * num_seeds);
  ParallelFor(num_algs * num_seeds, threads, [&](size_t task) {
    const size_t a = task / num_seeds, i = task % num_seeds;
    const AlgorithmSpec& spec = config.algorithms[a];
    const std::uint64_t seed = config.seeds[i];
    result.runs[task] = run_single(*envs[i], benchmarks[i], spec, hps[task], seed,
                                   run_stream_seed(config.master_seed, spec.name, seed));
  });

  std::sort(result.runs.begin(), result.runs.end(), [](const RunOutcome& x, const RunOutcome& y) {
    return x.label != y.label ? x.label < y.label : x.seed < y.seed;
  });
  std::vector<LabeledRun> labeled;
  for (const RunOutcome& run : result.runs) labeled.push_back({run.label, run.seed, run.rows});
  result.summary = summarize(std::move(labeled));
  return result;
}

ExperimentResult run_experiment(const ExperimentConfig& config, int threads) {
  ExperimentResult result = execute_experiment(config, threads);
  std::error_code ec;
  std::filesystem::create_directories(config.output_dir, ec);
  if (ec) Fail(ErrorCode::kIo, "cannot create " + config.output_dir + ": " + ec.message());
  const std::filesystem::path dir(config.output_dir);
  for (const RunOutcome& run : result.runs) {
    write_text_file((dir / run_csv_name(run.label, run.seed)).string(), rows_to_csv(run.rows));
  }
  write_text_file((dir / "summary.json").string(), result.summary.dump(2) + "\n");
  write_text_file((dir / "runs.json").string(), result.runs_json().dump(2) + "\n");
  return result;
}

}  // namespace nsrl
