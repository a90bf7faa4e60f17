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

#ifndef NSRL_ENVIRONMENTS_HPP_
#define NSRL_ENVIRONMENTS_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "nsrl/mdp.hpp"

namespace nsrl {

enum class DriftKind { kStationary, kAbrupt, kGradual };

struct DriftSchedule {
  DriftKind kind = DriftKind::kStationary;
  std::vector<int> change_episodes;  // abrupt: sorted, within [2, K]
  double total_budget = 0.0;         // gradual: realized sum of parameter jumps
  std::uint64_t rng_seed = 0;
};

// Two-state lower-bound instance. Action index bits encode a in {-1,+1}^{d-1}
// (bit i set -> a_i = +1). Rewards are 0 at x0 and 1 at x1; from x0 the
// chance of reaching x1 is delta + <a, xi>, from x1 the chance of falling
// back is delta. xi in {-eps/(d-1), +eps/(d-1)}^{d-1} is redrawn (and forced
// to change) at the start of every segment.
struct HardInstance {
  LinearKernelMdp mdp;
  double delta = 0.0;
  double epsilon = 0.0;
  std::vector<int> segment_starts;            // first episode of each segment
  std::vector<std::vector<double>> segment_xi;  // unscaled xi per segment
};

constexpr int kHardStateLow = 0;   // x0
constexpr int kHardStateHigh = 1;  // x1
constexpr int kMaxHardInstanceDim = 17;

HardInstance build_hard_instance(int d, double delta, double epsilon, int horizon,
                                 int num_episodes, int num_segments, std::uint64_t seed);

// Coordinates of action `index` in {-1,+1}^{d-1}.
std::vector<double> hard_instance_action(int index, int d);

// Long-run average reward of the optimal stationary policy: (delta+eps)/(2 delta+eps).
double hard_instance_optimal_average_reward(double delta, double epsilon);

// Tabular MDP in canonical-basis form with d = S*A*S for both maps:
// phi(s,a) = e_{(s,a,0)}, psi(s,a,s') = e_{(s,a,s')}, so theta carries the
// reward table and xi the transition table directly.
struct TabularInstance {
  LinearKernelMdp mdp;
  std::vector<double> rewards;      // [k-1][h-1][s][a]
  std::vector<double> transitions;  // [k-1][h-1][s][a][s']
};

constexpr int kMaxTabularDim = 4096;

TabularInstance build_tabular(int num_states, int num_actions, int horizon, int num_episodes,
                              const DriftSchedule& reward_drift,
                              const DriftSchedule& transition_drift, std::uint64_t seed);

// Named presets: "hard2state", "tabular-abrupt", "tabular-gradual",
// "tabular-stationary". `params` is the preset's parameter block (unknown keys
// rejected); `run_seed` is mixed into the instance seed.
LinearKernelMdp build_preset(const std::string& name, const nlohmann::json& params,
                             std::uint64_t run_seed);

bool is_known_preset(const std::string& name);

}  // namespace nsrl

#endif  // NSRL_ENVIRONMENTS_HPP_
