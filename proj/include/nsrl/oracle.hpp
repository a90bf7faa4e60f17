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

#ifndef NSRL_ORACLE_HPP_
#define NSRL_ORACLE_HPP_

#include <optional>
#include <string>
#include <vector>

#include "nsrl/algorithms.hpp"
#include "nsrl/mdp.hpp"
#include "nsrl/policy.hpp"

namespace nsrl {

struct OptimalSolution {
  ValueTables values;  // Q* and V*, V*(H+1, .) = 0
  Policy policy;       // greedy, ties to the lowest action index
};

// Backward induction on the true model of episode k.
OptimalSolution optimal_values(const LinearKernelMdp& mdp, int k);
OptimalSolution optimal_values(const EpisodeModel& model);

// Q^pi and V^pi of one episode by backward induction.
ValueTables policy_tables(const EpisodeModel& model, const Policy& pi);
// V_1^{pi,k}(s_1).
double policy_value(const LinearKernelMdp& mdp, int k, const Policy& pi);

// P_T = sum_k sum_h max_s ||pi_h^k(.|s) - pi_h^{k-1}(.|s)||_1 with pi^0 := pi^1.
double policy_variation(const std::vector<Policy>& benchmarks);
// One term of P_T: sum_h max_s ||cur_h(.|s) - prev_h(.|s)||_1.
double policy_step_variation(const Policy& prev, const Policy& cur);

// Benchmark policies and their values for every episode, reusable across
// runs on the same environment.
struct BenchmarkTable {
  std::vector<Policy> policies;  // [k-1], empty unless kept
  std::vector<double> values;    // [k-1] = V_1^{bench,k}(s_1)
  double p_t = 0.0;
  VariationBudgets budgets;
};

// Per-episode optimal policies unless `benchmarks` supplies K policies.
BenchmarkTable compute_benchmarks(const LinearKernelMdp& mdp,
                                  const std::optional<std::vector<Policy>>& benchmarks = {},
                                  bool keep_policies = true);

struct RegretReport {
  std::vector<double> per_episode_optimal;
  std::vector<double> per_episode_achieved;
  std::vector<double> cumulative_regret;
  double p_t = 0.0;
  VariationBudgets budgets;
};

// Throws kIncompleteRecord unless the run holds episodes 1..K in order.
RegretReport dynamic_regret(const LinearKernelMdp& mdp, const RunRecord& run,
                            const std::optional<std::vector<Policy>>& benchmarks = {});
RegretReport dynamic_regret(const LinearKernelMdp& mdp, const RunRecord& run,
                            const BenchmarkTable& table);
// Same report from achieved values V_1^{pi^k,k}(s_1) gathered elsewhere.
RegretReport regret_from_values(const BenchmarkTable& table, std::vector<double> achieved);

// Descriptions of broken invariants; empty when everything holds.
// Per episode: policy simplex, restart flag and uniformity, Q clamping.
std::vector<std::string> episode_invariant_violations(const LinearKernelMdp& mdp,
                                                      Algorithm algorithm, const Hyperparams& hp,
                                                      const EpisodeRecord& ep);
// Benchmark dominance and monotone cumulative regret.
std::vector<std::string> report_invariant_violations(const RegretReport& report);
std::vector<std::string> run_invariant_violations(const LinearKernelMdp& mdp, const RunRecord& run,
                                                  const RegretReport& report);

}  // namespace nsrl

#endif  // NSRL_ORACLE_HPP_
