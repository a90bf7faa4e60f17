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

#include "nsrl/oracle.hpp"

#include <algorithm>
#include <cmath>

#include "nsrl/error.hpp"

namespace nsrl {

namespace {

constexpr double kSlack = 1e-9;

void CheckPolicyShape(const EpisodeModel& model, const Policy& pi) {
  if (pi.horizon() != model.horizon || pi.num_states() != model.num_states ||
      pi.num_actions() != model.num_actions) {
    Fail(ErrorCode::kShape, "policy shape does not match the MDP");
  }
}

double Expected(const EpisodeModel& model, int h0, int s, int a, const ValueTables& t) {
  const double* row = model.row(h0, s, a);
  double sum = 0.0;
  for (int s2 = 0; s2 < model.num_states; ++s2) sum += row[s2] * t.v(h0 + 2, s2);
  return sum;
}

}  // namespace

OptimalSolution optimal_values(const EpisodeModel& model) {
  const int S = model.num_states, A = model.num_actions, H = model.horizon;
  OptimalSolution out{ValueTables(H, S, A), Policy(H, S, A)};
  for (int h = H; h >= 1; --h) {
    for (int s = 0; s < S; ++s) {
      double* q = out.values.q_row(h, s);
      for (int a = 0; a < A; ++a) q[a] = model.reward(h - 1, s, a) + Expected(model, h - 1, s, a, out.values);
      const int best = static_cast<int>(std::max_element(q, q + A) - q);
      out.values.v(h, s) = q[best];
      out.policy.set_deterministic(h, s, best);
    }
  }
  return out;
}

OptimalSolution optimal_values(const LinearKernelMdp& mdp, int k) {
  mdp.check_indices(k, 1, 0, 0);
  return optimal_values(mdp.episode_model(k));
}

ValueTables policy_tables(const EpisodeModel& model, const Policy& pi) {
  CheckPolicyShape(model, pi);
  const int S = model.num_states, A = model.num_actions, H = model.horizon;
  ValueTables t(H, S, A);
  for (int h = H; h >= 1; --h) {
    for (int s = 0; s < S; ++s) {
      double* q = t.q_row(h, s);
      const auto p = pi.dist(h, s);
      double v = 0.0;
      for (int a = 0; a < A; ++a) {
        q[a] = model.reward(h - 1, s, a) + Expected(model, h - 1, s, a, t);
        v += p[a] * q[a];
      }
      t.v(h, s) = v;
    }
  }
  return t;
}

double policy_value(const LinearKernelMdp& mdp, int k, const Policy& pi) {
  mdp.check_indices(k, 1, 0, 0);
  return policy_tables(mdp.episode_model(k), pi).v(1, mdp.initial_state());
}

double policy_step_variation(const Policy& prev, const Policy& cur) {
  if (!(prev.horizon() == cur.horizon() && prev.num_states() == cur.num_states() &&
        prev.num_actions() == cur.num_actions())) {
    Fail(ErrorCode::kShape, "benchmark policies differ in shape");
  }
  double total = 0.0;
  for (int h = 1; h <= cur.horizon(); ++h) {
    double worst = 0.0;
    for (int s = 0; s < cur.num_states(); ++s) {
      double l1 = 0.0;
      for (int a = 0; a < cur.num_actions(); ++a) l1 += std::abs(cur.prob(h, s, a) - prev.prob(h, s, a));
      worst = std::max(worst, l1);
    }
    total += worst;
  }
  return total;
}

double policy_variation(const std::vector<Policy>& benchmarks) {
  double total = 0.0;
  for (size_t k = 1; k < benchmarks.size(); ++k) {
    total += policy_step_variation(benchmarks[k - 1], benchmarks[k]);
  }
  return total;
}

BenchmarkTable compute_benchmarks(const LinearKernelMdp& mdp,
                                  const std::optional<std::vector<Policy>>& benchmarks,
                                  bool keep_policies) {
  const int K = mdp.num_episodes();
  if (benchmarks && static_cast<int>(benchmarks->size()) != K) {
    Fail(ErrorCode::kIncompleteRecord, "benchmark sequence must hold one policy per episode");
  }
  BenchmarkTable table;
  table.values.reserve(K);
  Policy previous;
  for (int k = 1; k <= K; ++k) {
    const EpisodeModel model = mdp.episode_model(k);
    Policy current;
    if (benchmarks) {
      current = (*benchmarks)[k - 1];
      table.values.push_back(policy_tables(model, current).v(1, mdp.initial_state()));
    } else {
      OptimalSolution opt = optimal_values(model);
      table.values.push_back(opt.values.v(1, mdp.initial_state()));
      current = std::move(opt.policy);
    }
    if (k > 1) table.p_t += policy_step_variation(previous, current);
    if (keep_policies) table.policies.push_back(current);
    previous = std::move(current);
  }
  table.budgets = variation_budgets(mdp);
  return table;
}

RegretReport regret_from_values(const BenchmarkTable& table, std::vector<double> achieved) {
  if (achieved.size() != table.values.size()) {
    Fail(ErrorCode::kIncompleteRecord, "achieved values cover " + std::to_string(achieved.size()) +
                                           " episodes, expected " +
                                           std::to_string(table.values.size()));
  }
  RegretReport report;
  report.p_t = table.p_t;
  report.budgets = table.budgets;
  report.per_episode_optimal = table.values;
  report.per_episode_achieved = std::move(achieved);
  report.cumulative_regret.reserve(table.values.size());
  double cumulative = 0.0;
  for (size_t i = 0; i < table.values.size(); ++i) {
    cumulative += report.per_episode_optimal[i] - report.per_episode_achieved[i];
    report.cumulative_regret.push_back(cumulative);
  }
  return report;
}

RegretReport dynamic_regret(const LinearKernelMdp& mdp, const RunRecord& run,
                            const BenchmarkTable& table) {
  const int K = mdp.num_episodes();
  if (static_cast<int>(run.episodes.size()) != K) {
    Fail(ErrorCode::kIncompleteRecord, "run record holds " + std::to_string(run.episodes.size()) +
                                           " episodes, expected " + std::to_string(K));
  }
  std::vector<double> achieved;
  achieved.reserve(K);
  for (int k = 1; k <= K; ++k) {
    const EpisodeRecord& ep = run.episodes[k - 1];
    if (ep.k != k || ep.policy.horizon() == 0) {
      Fail(ErrorCode::kIncompleteRecord, "episode " + std::to_string(k) + " missing from run record");
    }
    achieved.push_back(policy_tables(mdp.episode_model(k), ep.policy).v(1, mdp.initial_state()));
  }
  return regret_from_values(table, std::move(achieved));
}

RegretReport dynamic_regret(const LinearKernelMdp& mdp, const RunRecord& run,
                            const std::optional<std::vector<Policy>>& benchmarks) {
  if (static_cast<int>(run.episodes.size()) != mdp.num_episodes()) {
    Fail(ErrorCode::kIncompleteRecord, "run record does not cover episodes 1..K");
  }
  return dynamic_regret(mdp, run, compute_benchmarks(mdp, benchmarks, false));
}

namespace {

std::string At(int k, const std::string& what) { return "episode " + std::to_string(k) + ": " + what; }

}  // namespace

std::vector<std::string> episode_invariant_violations(const LinearKernelMdp& mdp,
                                                      Algorithm algorithm, const Hyperparams& hp,
                                                      const EpisodeRecord& ep) {
  std::vector<std::string> out;
  const int H = mdp.horizon(), S = mdp.num_states(), A = mdp.num_actions();
  if (ep.policy.horizon() != 0) {
    if (simplex_violation(ep.policy) > 1e-10) out.push_back(At(ep.k, "policy leaves the simplex"));
  }
  const bool expect_restart = algorithm != Algorithm::kSwLsviUcb && is_restart(ep.k, hp.tau);
  if (ep.restarted != expect_restart) out.push_back(At(ep.k, "restart flag disagrees with tau"));
  if (expect_restart && ep.policy.horizon() != 0 && !(ep.policy == Policy::uniform(H, S, A))) {
    out.push_back(At(ep.k, "policy is not uniform at a restart"));
  }
  if (ep.values) {
    for (int h = 1; h <= H; ++h) {
      for (int s = 0; s < S; ++s) {
        for (int a = 0; a < A; ++a) {
          const double q = ep.values->q(h, s, a);
          if (!(q >= 0.0 && q <= H - h + 1)) {
            out.push_back(At(ep.k, "Q leaves [0, H-h+1] at h=" + std::to_string(h)));
            return out;
          }
        }
      }
    }
  }
  return out;
}

std::vector<std::string> report_invariant_violations(const RegretReport& report) {
  std::vector<std::string> out;
  const size_t n = report.cumulative_regret.size();
  for (size_t i = 0; i < n; ++i) {
    const int k = static_cast<int>(i) + 1;
    if (report.per_episode_optimal[i] < report.per_episode_achieved[i] - kSlack) {
      out.push_back(At(k, "benchmark value below achieved value"));
    }
    if (i > 0 && report.cumulative_regret[i] < report.cumulative_regret[i - 1] - kSlack) {
      out.push_back(At(k, "cumulative regret decreases"));
    }
  }
  return out;
}

std::vector<std::string> run_invariant_violations(const LinearKernelMdp& mdp, const RunRecord& run,
                                                  const RegretReport& report) {
  std::vector<std::string> out;
  for (const EpisodeRecord& ep : run.episodes) {
    auto more = episode_invariant_violations(mdp, run.algorithm, run.hp, ep);
    out.insert(out.end(), more.begin(), more.end());
  }
  auto more = report_invariant_violations(report);
  out.insert(out.end(), more.begin(), more.end());
  return out;
}

}  // namespace nsrl
