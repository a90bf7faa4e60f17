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

#ifndef NSRL_ALGORITHMS_HPP_
#define NSRL_ALGORITHMS_HPP_

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "nsrl/estimation.hpp"
#include "nsrl/mdp.hpp"
#include "nsrl/policy.hpp"

namespace nsrl {

enum class Algorithm {
  kPropo,             // restarted policy optimization, bandit feedback
  kSwLsviUcb,         // sliding-window optimistic value iteration
  kPropoAdversarial,  // policy optimization, full-information rewards
};

std::string algorithm_name(Algorithm algorithm);

struct Hyperparams {
  int tau = 1;                // restart cycle length, in episodes
  double alpha = 0.1;         // mirror-descent stepsize
  int w = 1;                  // sliding-window length, in episodes
  double lambda = 1.0;        // reward ridge weight
  double lambda_prime = 1.0;  // transition ridge weight
  double beta = 0.0;          // reward bonus multiplier
  double beta_prime = 0.0;    // transition bonus multiplier
  double zeta = 0.05;         // failure probability

  // Throws kParameter unless tau in [1,K], alpha > 0, w >= 1, lambdas > 0,
  // betas >= 0 and zeta in (0,1].
  void validate(int num_episodes) const;
  nlohmann::json to_json() const;
};

// Number of restarts over K episodes, ceil(K / tau).
int restart_count(int tau, int num_episodes);

// Episode k starts a new restart cycle. Written as (k-1) mod tau == 0 so that
// tau = 1 restarts every episode.
inline bool is_restart(int k, int tau) { return (k - 1) % tau == 0; }

enum class WindowRule {
  kTwoThirds,  // w = c * d^{1/3} Delta^{-2/3} T^{2/3}
  kQuarter,    // w = c * Delta^{-1/4} T^{1/4}, for runs without the basis assumption
};

struct AutoKnobs {
  double zeta = 0.05;
  double c_prime = 1.0;
  double alpha_multiplier = 1.0;
  double window_constant = 1.0;
  WindowRule window_rule = WindowRule::kTwoThirds;
};

// Theory-driven settings with T = H*K:
//   tau   = clip_[1,K] floor((T sqrt(log|A|) / (H (P_T + sqrt(d) Delta)))^{2/3})
//   alpha = sqrt(ceil(K/tau) log|A| / (H^2 K))
//   w     = clip_[1,K] ceil(window rule)       (K when Delta = 0)
//   lambda = lambda' = 1, beta = sqrt(d), beta' = C' sqrt(d H^2 log(d T / zeta)).
Hyperparams auto_hyperparams(int d, int horizon, int num_episodes, int num_actions, double delta,
                             double p_t, const AutoKnobs& knobs = {});

// Output of one optimistic backward pass at episode k.
struct Evaluation {
  ValueTables tables;
  Policy greedy;                                   // set by greedy_evaluation only
  std::vector<Matrix> eta;                         // per step h-1: d x (S*A)
  std::vector<std::vector<double>> reward_bonus;   // per step h-1: S*A entries
  std::vector<std::vector<double>> transition_bonus;
  int window_fill = 0;                             // records used per step
};

// Sliding-window optimistic policy evaluation of pi at episode k. Only the
// feature maps of `mdp` are read; rewards and transitions come from history.
Evaluation swope(const LinearKernelMdp& mdp, int k, const Policy& pi, const StepHistory& history,
                 const Hyperparams& hp);

// Full-information variant: the true reward table of episode k replaces the
// reward regression and its bonus.
Evaluation swope_full_information(const LinearKernelMdp& mdp, int k, const Policy& pi,
                                  const StepHistory& history, const Hyperparams& hp);

// Same estimation pipeline with V_h(s) = max_a Q_h(s,a); ties go to the lowest
// action index, and the resulting deterministic policy is returned in greedy.
Evaluation greedy_evaluation(const LinearKernelMdp& mdp, int k, const StepHistory& history,
                             const Hyperparams& hp);

struct EpisodeRecord {
  int k = 0;
  Policy policy;                 // policy executed in episode k
  std::vector<int> states;       // s_1..s_{H+1}
  std::vector<int> actions;      // a_1..a_H
  std::vector<double> rewards;   // observed r_h^k(s_h, a_h)
  bool restarted = false;
  int window_fill = 0;
  // Tables of the evaluation pass of episode k (absent when not kept).
  std::optional<ValueTables> values;
  std::vector<double> reward_bonus;      // [h-1][s][a]
  std::vector<double> transition_bonus;  // [h-1][s][a]
};

struct RunRecord {
  Algorithm algorithm = Algorithm::kPropo;
  Hyperparams hp;
  std::uint64_t seed = 0;
  std::vector<EpisodeRecord> episodes;  // episodes[k-1]
};

struct RunOptions {
  bool keep_tables = true;    // store value tables and bonuses per episode
  bool keep_policies = true;  // store the executed policy per episode
  // Called once per episode with the complete record, before pruning.
  std::function<void(const EpisodeRecord&)> observer;
};

RunRecord propo_run(const LinearKernelMdp& mdp, const Hyperparams& hp, std::uint64_t seed,
                    const RunOptions& options = {});
RunRecord sw_lsvi_ucb_run(const LinearKernelMdp& mdp, const Hyperparams& hp, std::uint64_t seed,
                          const RunOptions& options = {});
RunRecord propo_adversarial_run(const LinearKernelMdp& mdp, const Hyperparams& hp,
                                std::uint64_t seed, const RunOptions& options = {});
RunRecord run_algorithm(Algorithm algorithm, const LinearKernelMdp& mdp, const Hyperparams& hp,
                        std::uint64_t seed, const RunOptions& options = {});

// l_h^k(s,a) = r_h^k(s,a) + sum_{s'} P_h^k(s'|s,a) V_{h+1}(s') - Q_h(s,a), using
// the true model of episode k and V_{h+1}, Q_h from `tables`. One entry per
// pair s*A + a.
std::vector<double> model_prediction_error(const LinearKernelMdp& mdp, int k, int h,
                                           const ValueTables& tables);

// Window sums of true parameter drift feeding the confidence sandwich:
//   theta(h,k,w) = sum_{i=max(1,k-w)}^{k-1} ||theta_h^i - theta_h^{i+1}||_2, same for xi.
class ParameterDrift {
 public:
  explicit ParameterDrift(const LinearKernelMdp& mdp);
  double theta(int h, int k, int w) const;
  double xi(int h, int k, int w) const;

 private:
  double window(const std::vector<double>& prefix, int k, int w) const;
  int horizon_;
  std::vector<std::vector<double>> theta_prefix_;  // [h-1][i] = sum_{j<i} ||theta^j - theta^{j+1}||
  std::vector<std::vector<double>> xi_prefix_;
};

struct SandwichBounds {
  double lower = 0.0;
  double upper = 0.0;
};

// [-2B - 2Gamma - drift, drift] with drift = theta-drift + H sqrt(d) xi-drift.
SandwichBounds ucb_sandwich(const LinearKernelMdp& mdp, const ParameterDrift& drift, int k, int h,
                            int w, double reward_bonus, double transition_bonus);

}  // namespace nsrl

#endif  // NSRL_ALGORITHMS_HPP_
