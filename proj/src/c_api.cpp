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

#include "nsrl/nsrl.h"

#include <algorithm>
#include <cstdlib>
#include <cstring>
#include <new>
#include <stdexcept>
#include <string>

#include "json.hpp"
#include "nsrl/environments.hpp"
#include "nsrl/error.hpp"
#include "nsrl/harness.hpp"
#include "nsrl/mdp.hpp"
#include "nsrl/oracle.hpp"
#include "nsrl/report.hpp"

struct nsrl_mdp {
  nsrl::LinearKernelMdp model;
};

namespace {

thread_local std::string g_last_error;

nsrl_status ToStatus(nsrl::ErrorCode code) {
  using nsrl::ErrorCode;
  switch (code) {
    case ErrorCode::kIndex: return NSRL_ERR_INDEX;
    case ErrorCode::kShape: return NSRL_ERR_SHAPE;
    case ErrorCode::kModelValidity: return NSRL_ERR_MODEL_VALIDITY;
    case ErrorCode::kParameter: return NSRL_ERR_PARAMETER;
    case ErrorCode::kCapacity: return NSRL_ERR_CAPACITY;
    case ErrorCode::kSchedule: return NSRL_ERR_SCHEDULE;
    case ErrorCode::kLinearAlgebra: return NSRL_ERR_LINEAR_ALGEBRA;
    case ErrorCode::kIncompleteRecord: return NSRL_ERR_INCOMPLETE_RECORD;
    case ErrorCode::kConfig: return NSRL_ERR_CONFIG;
    case ErrorCode::kIo: return NSRL_ERR_IO;
    case ErrorCode::kInvariant: return NSRL_ERR_INVARIANT;
  }
  return NSRL_ERR_INTERNAL;
}

nsrl_status Failure(nsrl_status status, const std::string& message) {
  g_last_error = message;
  return status;
}

// Runs `body`, translating exceptions into status codes.
template <typename F>
nsrl_status Guard(F&& body) {
  try {
    g_last_error.clear();
    body();
    return NSRL_OK;
  } catch (const nsrl::Error& e) {
    return Failure(ToStatus(e.code()), e.what());
  } catch (const nlohmann::json::exception& e) {
    return Failure(NSRL_ERR_CONFIG, e.what());
  } catch (const std::invalid_argument& e) {
    return Failure(NSRL_ERR_INVALID_ARGUMENT, e.what());
  } catch (const std::bad_alloc&) {
    return Failure(NSRL_ERR_CAPACITY, "out of memory");
  } catch (const std::exception& e) {
    return Failure(NSRL_ERR_INTERNAL, e.what());
  } catch (...) {
    return Failure(NSRL_ERR_INTERNAL, "unknown failure");
  }
}

char* CopyString(const std::string& text) {
  char* out = static_cast<char*>(std::malloc(text.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, text.c_str(), text.size() + 1);
  return out;
}

nsrl_status InvalidArgument(const char* what) { return Failure(NSRL_ERR_INVALID_ARGUMENT, what); }

}  // namespace

extern "C" {

const char* nsrl_version(void) { return "0.1.0"; }

const char* nsrl_last_error(void) { return g_last_error.c_str(); }

const char* nsrl_status_name(nsrl_status status) {
  switch (status) {
    case NSRL_OK: return "ok";
    case NSRL_ERR_INDEX: return nsrl::ErrorCodeName(nsrl::ErrorCode::kIndex);
    case NSRL_ERR_SHAPE: return nsrl::ErrorCodeName(nsrl::ErrorCode::kShape);
    case NSRL_ERR_MODEL_VALIDITY: return nsrl::ErrorCodeName(nsrl::ErrorCode::kModelValidity);
    case NSRL_ERR_PARAMETER: return nsrl::ErrorCodeName(nsrl::ErrorCode::kParameter);
    case NSRL_ERR_CAPACITY: return nsrl::ErrorCodeName(nsrl::ErrorCode::kCapacity);
    case NSRL_ERR_SCHEDULE: return nsrl::ErrorCodeName(nsrl::ErrorCode::kSchedule);
    case NSRL_ERR_LINEAR_ALGEBRA: return nsrl::ErrorCodeName(nsrl::ErrorCode::kLinearAlgebra);
    case NSRL_ERR_INCOMPLETE_RECORD: return nsrl::ErrorCodeName(nsrl::ErrorCode::kIncompleteRecord);
    case NSRL_ERR_CONFIG: return nsrl::ErrorCodeName(nsrl::ErrorCode::kConfig);
    case NSRL_ERR_IO: return nsrl::ErrorCodeName(nsrl::ErrorCode::kIo);
    case NSRL_ERR_INVARIANT: return nsrl::ErrorCodeName(nsrl::ErrorCode::kInvariant);
    case NSRL_ERR_INVALID_ARGUMENT: return "invalid argument";
    case NSRL_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

void nsrl_string_free(char* text) { std::free(text); }

nsrl_status nsrl_mdp_load_json(const char* path, nsrl_mdp** out) {
  if (!path || !out) return InvalidArgument("path and out must be non-null");
  return Guard([&] { *out = new nsrl_mdp{nsrl::load_mdp(path)}; });
}

nsrl_status nsrl_mdp_from_json_string(const char* json, nsrl_mdp** out) {
  if (!json || !out) return InvalidArgument("json and out must be non-null");
  return Guard([&] { *out = new nsrl_mdp{nsrl::mdp_from_json(nlohmann::json::parse(json))}; });
}

nsrl_status nsrl_mdp_build_preset(const char* name, const char* params_json, uint64_t run_seed,
                                  nsrl_mdp** out) {
  if (!name || !out) return InvalidArgument("name and out must be non-null");
  return Guard([&] {
    const nlohmann::json params =
        params_json ? nlohmann::json::parse(params_json) : nlohmann::json::object();
    *out = new nsrl_mdp{nsrl::build_preset(name, params, run_seed)};
  });
}

nsrl_status nsrl_mdp_to_json(const nsrl_mdp* mdp, char** out) {
  if (!mdp || !out) return InvalidArgument("mdp and out must be non-null");
  return Guard([&] { *out = CopyString(nsrl::mdp_to_json(mdp->model).dump()); });
}

nsrl_status nsrl_mdp_save_json(const nsrl_mdp* mdp, const char* path) {
  if (!mdp || !path) return InvalidArgument("mdp and path must be non-null");
  return Guard([&] { nsrl::save_mdp(mdp->model, path); });
}

void nsrl_mdp_free(nsrl_mdp* mdp) { delete mdp; }

nsrl_status nsrl_mdp_dims(const nsrl_mdp* mdp, nsrl_dims* out) {
  if (!mdp || !out) return InvalidArgument("mdp and out must be non-null");
  const nsrl::LinearKernelMdp& m = mdp->model;
  *out = nsrl_dims{m.num_states(), m.num_actions(), m.horizon(), m.num_episodes(), m.dim(),
                   m.initial_state()};
  return NSRL_OK;
}

nsrl_status nsrl_mdp_reward(const nsrl_mdp* mdp, int32_t k, int32_t h, int32_t s, int32_t a,
                            double* out) {
  if (!mdp || !out) return InvalidArgument("mdp and out must be non-null");
  return Guard([&] { *out = mdp->model.reward(k, h, s, a); });
}

nsrl_status nsrl_mdp_transition_row(const nsrl_mdp* mdp, int32_t k, int32_t h, int32_t s,
                                    int32_t a, double* out, size_t len) {
  if (!mdp || !out) return InvalidArgument("mdp and out must be non-null");
  if (len < static_cast<size_t>(mdp->model.num_states())) {
    return InvalidArgument("output buffer shorter than num_states");
  }
  return Guard([&] {
    const nsrl::Vector row = mdp->model.transition_row(k, h, s, a);
    for (Eigen::Index i = 0; i < row.size(); ++i) out[i] = row(i);
  });
}

nsrl_status nsrl_mdp_validate(const nsrl_mdp* mdp, int32_t* clean, char** report_json) {
  if (!mdp || !clean) return InvalidArgument("mdp and clean must be non-null");
  return Guard([&] {
    const nsrl::ValidationReport report = nsrl::validate_mdp(mdp->model);
    *clean = report.clean() ? 1 : 0;
    if (report_json) *report_json = CopyString(report.to_json().dump(2));
  });
}

nsrl_status nsrl_mdp_budgets(const nsrl_mdp* mdp, double* reward, double* transition,
                             double* total) {
  if (!mdp) return InvalidArgument("mdp must be non-null");
  return Guard([&] {
    const nsrl::VariationBudgets b = nsrl::variation_budgets(mdp->model);
    if (reward) *reward = b.reward;
    if (transition) *transition = b.transition;
    if (total) *total = b.total;
  });
}

nsrl_status nsrl_mdp_policy_variation(const nsrl_mdp* mdp, double* p_t) {
  if (!mdp || !p_t) return InvalidArgument("mdp and p_t must be non-null");
  return Guard([&] { *p_t = nsrl::compute_benchmarks(mdp->model, std::nullopt, false).p_t; });
}

nsrl_status nsrl_auto_hyperparams(const char* request_json, char** out_json) {
  if (!request_json || !out_json) return InvalidArgument("request and out must be non-null");
  return Guard([&] {
    const nlohmann::json req = nlohmann::json::parse(request_json);
    if (!req.is_object()) nsrl::Fail(nsrl::ErrorCode::kConfig, "request must be a JSON object");
    static const char* kAllowed[] = {"d",     "horizon", "num_episodes",     "num_actions",
                                     "delta", "p_t",     "zeta",             "c_prime",
                                     "alpha_multiplier", "window_constant", "window_rule"};
    for (const auto& item : req.items()) {
      if (std::find(std::begin(kAllowed), std::end(kAllowed), item.key()) == std::end(kAllowed)) {
        nsrl::Fail(nsrl::ErrorCode::kConfig, "unknown key '" + item.key() + "'");
      }
    }
    nsrl::AutoKnobs knobs;
    knobs.zeta = req.value("zeta", knobs.zeta);
    knobs.c_prime = req.value("c_prime", knobs.c_prime);
    knobs.alpha_multiplier = req.value("alpha_multiplier", knobs.alpha_multiplier);
    knobs.window_constant = req.value("window_constant", knobs.window_constant);
    const std::string rule = req.value("window_rule", std::string("two-thirds"));
    if (rule == "quarter") {
      knobs.window_rule = nsrl::WindowRule::kQuarter;
    } else if (rule != "two-thirds") {
      nsrl::Fail(nsrl::ErrorCode::kConfig, "window_rule must be two-thirds or quarter");
    }
    const nsrl::Hyperparams hp = nsrl::auto_hyperparams(
        req.at("d").get<int>(), req.at("horizon").get<int>(), req.at("num_episodes").get<int>(),
        req.at("num_actions").get<int>(), req.at("delta").get<double>(),
        req.at("p_t").get<double>(), knobs);
    nlohmann::json out = hp.to_json();
    out["rho"] = nsrl::restart_count(hp.tau, req.at("num_episodes").get<int>());
    *out_json = CopyString(out.dump(2));
  });
}

nsrl_status nsrl_run_single(const nsrl_mdp* mdp, const char* algorithm,
                            const char* hyperparams_json, uint64_t seed, char** csv_out) {
  if (!mdp || !algorithm || !csv_out) return InvalidArgument("mdp, algorithm and out must be non-null");
  return Guard([&] {
    const nsrl::AlgorithmSpec spec =
        nsrl::make_algorithm_spec(algorithm, hyperparams_json ? hyperparams_json : "");
    const nsrl::BenchmarkTable table = nsrl::compute_benchmarks(mdp->model, std::nullopt, false);
    const nsrl::Hyperparams hp = nsrl::resolve_hyperparams(spec, mdp->model, table);
    const nsrl::RunOutcome run = nsrl::run_single(mdp->model, table, spec, hp, seed, seed);
    *csv_out = CopyString(nsrl::rows_to_csv(run.rows));
  });
}

nsrl_status nsrl_experiment_check(const char* config_path) {
  if (!config_path) return InvalidArgument("config path must be non-null");
  return Guard([&] { nsrl::load_experiment_config(config_path); });
}

nsrl_status nsrl_experiment_run(const char* config_path, int32_t threads, char** summary_json) {
  if (!config_path) return InvalidArgument("config path must be non-null");
  return Guard([&] {
    const nsrl::ExperimentConfig config = nsrl::load_experiment_config(config_path);
    const nsrl::ExperimentResult result = nsrl::run_experiment(config, threads);
    if (summary_json) *summary_json = CopyString(result.summary.dump(2) + "\n");
  });
}

nsrl_status nsrl_regret_summarize(const char* const* csv_paths, size_t count, char** summary_json) {
  if (!csv_paths || count == 0 || !summary_json) {
    return InvalidArgument("at least one CSV path and an output pointer are required");
  }
  return Guard([&] {
    std::vector<nsrl::LabeledRun> runs;
    for (size_t i = 0; i < count; ++i) {
      if (!csv_paths[i]) throw std::invalid_argument("null CSV path");
      nsrl::LabeledRun run;
      nsrl::parse_run_csv_name(csv_paths[i], &run.label, &run.seed);
      try {
        run.rows = nsrl::rows_from_csv(nsrl::read_text_file(csv_paths[i]));
      } catch (const nsrl::Error& e) {
        nsrl::Fail(e.code(), std::string(csv_paths[i]) + ": " + e.what());
      }
      runs.push_back(std::move(run));
    }
    *summary_json = CopyString(nsrl::summarize(std::move(runs)).dump(2) + "\n");
  });
}

nsrl_status nsrl_plot_svg(const char* summary_path, const char* out_path) {
  if (!summary_path || !out_path) return InvalidArgument("paths must be non-null");
  return Guard([&] {
    nlohmann::json summary;
    try {
      summary = nlohmann::json::parse(nsrl::read_text_file(summary_path));
    } catch (const nlohmann::json::parse_error& e) {
      nsrl::Fail(nsrl::ErrorCode::kConfig, std::string(summary_path) + ": " + e.what());
    }
    nsrl::write_text_file(out_path, nsrl::summary_to_svg(summary));
  });
}

}  // extern "C"
