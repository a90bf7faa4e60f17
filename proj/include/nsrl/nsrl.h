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

/* C interface to the nonstat-rl library. Objects are opaque handles; every
 * fallible call returns an nsrl_status and, on failure, leaves a message for
 * nsrl_last_error() on the calling thread. Strings returned through char**
 * are owned by the caller and released with nsrl_string_free(). Episodes k
 * and steps h are 1-based; states and actions are 0-based. */
#ifndef NSRL_NSRL_H_
#define NSRL_NSRL_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define NSRL_API __declspec(dllexport)
#else
#define NSRL_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum nsrl_status {
  NSRL_OK = 0,
  NSRL_ERR_INDEX = 1,
  NSRL_ERR_SHAPE = 2,
  NSRL_ERR_MODEL_VALIDITY = 3,
  NSRL_ERR_PARAMETER = 4,
  NSRL_ERR_CAPACITY = 5,
  NSRL_ERR_SCHEDULE = 6,
  NSRL_ERR_LINEAR_ALGEBRA = 7,
  NSRL_ERR_INCOMPLETE_RECORD = 8,
  NSRL_ERR_CONFIG = 9,
  NSRL_ERR_IO = 10,
  NSRL_ERR_INVARIANT = 11,
  NSRL_ERR_INVALID_ARGUMENT = 12,
  NSRL_ERR_INTERNAL = 13
} nsrl_status;

typedef struct nsrl_mdp nsrl_mdp;

typedef struct nsrl_dims {
  int32_t num_states;
  int32_t num_actions;
  int32_t horizon;
  int32_t num_episodes;
  int32_t dim;
  int32_t initial_state;
} nsrl_dims;

NSRL_API const char* nsrl_version(void);
/* Message of the last failed call on this thread ("" if none). */
NSRL_API const char* nsrl_last_error(void);
NSRL_API const char* nsrl_status_name(nsrl_status status);
NSRL_API void nsrl_string_free(char* text);

/* Model construction and export. */
NSRL_API nsrl_status nsrl_mdp_load_json(const char* path, nsrl_mdp** out);
NSRL_API nsrl_status nsrl_mdp_from_json_string(const char* json, nsrl_mdp** out);
/* params_json may be NULL for preset defaults. */
NSRL_API nsrl_status nsrl_mdp_build_preset(const char* name, const char* params_json,
                                           uint64_t run_seed, nsrl_mdp** out);
NSRL_API nsrl_status nsrl_mdp_to_json(const nsrl_mdp* mdp, char** out);
NSRL_API nsrl_status nsrl_mdp_save_json(const nsrl_mdp* mdp, const char* path);
NSRL_API void nsrl_mdp_free(nsrl_mdp* mdp);

/* Queries. */
NSRL_API nsrl_status nsrl_mdp_dims(const nsrl_mdp* mdp, nsrl_dims* out);
NSRL_API nsrl_status nsrl_mdp_reward(const nsrl_mdp* mdp, int32_t k, int32_t h, int32_t s,
                                     int32_t a, double* out);
/* Writes num_states probabilities; len must be at least num_states. */
NSRL_API nsrl_status nsrl_mdp_transition_row(const nsrl_mdp* mdp, int32_t k, int32_t h,
                                             int32_t s, int32_t a, double* out, size_t len);
/* *clean is 1 when every invariant holds; report_json may be NULL. */
NSRL_API nsrl_status nsrl_mdp_validate(const nsrl_mdp* mdp, int32_t* clean, char** report_json);
NSRL_API nsrl_status nsrl_mdp_budgets(const nsrl_mdp* mdp, double* reward, double* transition,
                                      double* total);
/* Total variation of the per-episode optimal policies. */
NSRL_API nsrl_status nsrl_mdp_policy_variation(const nsrl_mdp* mdp, double* p_t);

/* Theory-driven hyperparameters. The request object holds d, horizon,
 * num_episodes, num_actions, delta, p_t and optionally zeta, c_prime,
 * alpha_multiplier, window_constant and window_rule. */
NSRL_API nsrl_status nsrl_auto_hyperparams(const char* request_json, char** out_json);

/* One learner run on a model. algorithm is propo, sw-lsvi-ucb, propo-adv or
 * lsvi-ucb-fullwindow; hyperparams_json is "auto", an object as in experiment
 * configs, or NULL for auto. Returns the per-episode regret CSV. */
NSRL_API nsrl_status nsrl_run_single(const nsrl_mdp* mdp, const char* algorithm,
                                     const char* hyperparams_json, uint64_t seed,
                                     char** csv_out);

/* Experiments and results. threads <= 0 uses NONSTAT_RL_THREADS or the core
 * count. summary_json may be NULL. */
NSRL_API nsrl_status nsrl_experiment_check(const char* config_path);
NSRL_API nsrl_status nsrl_experiment_run(const char* config_path, int32_t threads,
                                         char** summary_json);
NSRL_API nsrl_status nsrl_regret_summarize(const char* const* csv_paths, size_t count,
                                           char** summary_json);
NSRL_API nsrl_status nsrl_plot_svg(const char* summary_path, const char* out_path);

#ifdef __cplusplus
}
#endif

#endif /* NSRL_NSRL_H_ */
