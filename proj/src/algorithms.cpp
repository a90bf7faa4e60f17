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

#include "nsrl/algorithms.hpp"

#include <algorithm>
#include <cmath>

#include "nsrl/error.hpp"
#include "nsrl/rng.hpp"
#include "nsrl/sampling.hpp"

namespace nsrl {

std::string algorithm_name(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::kPropo: return "propo";
    case Algorithm::kSwLsviUcb: return "sw-lsvi-ucb";
    case Algorithm::kPropoAdversarial: return "propo-adv";
  }
  return "unknown";
}

void Hyperparams::validate(int num_episodes) const {
  auto bad = [](const std::string& what) { Fail(ErrorCode::kParameter, "hyperparameter " + what); };
  if (tau < 1 || tau > num_episodes) bad("tau must lie in [1, K]");
  if (!(alpha > 0.0) || !std::isfinite(alpha)) bad("alpha must be > 0");
  if (w < 1) bad("w must be >= 1");
  if (!(lambda > 0.0) || !(lambda_prime > 0.0)) bad("lambda and lambda_prime must be > 0");
  if (!(beta >= 0.0) || !(beta_prime >= 0.0) || !std::isfinite(beta) || !std::isfinite(beta_prime)) {
    bad("beta and beta_prime must be finite and >= 0");
  }
  if (!(zeta > 0.0 && zeta <= 1.0)) bad("zeta must lie in (0, 1]");
}

nlohmann::json Hyperparams::to_json() const {
  return {{"tau", tau},           {"alpha", alpha}, {"w", w},
          {"lambda", lambda},     {"lambda_prime", lambda_prime},
          {"beta", beta},         {"beta_prime", beta_prime},
          {"zeta", zeta}};
}

int restart_count(int tau, int num_episodes) { return (num_episodes + tau - 1) / tau; }

Hyperparams auto_hyperparams(int d, int horizon, int num_episodes, int num_actions, double delta,
                             double p_t, const AutoKnobs& knobs) {
  if (d < 1 || horizon < 1 || num_episodes < 1 || num_actions < 1) {
    Fail(ErrorCode::kParameter, "dimensions must be >= 1");
  }
  if (!(delta >= 0.0) || !(p_t >= 0.0)) Fail(ErrorCode::kParameter, "Delta and P_T must be >= 0");
  if (!(knobs.zeta > 0.0 && knobs.zeta <= 1.0)) Fail(ErrorCode::kParameter, "zeta must lie in (0, 1]");
  if (!(knobs.c_prime >= 0.0) || !(knobs.alpha_multiplier > 0.0) || !(knobs.window_constant > 0.0)) {
    Fail(ErrorCode::kParameter, "c_prime must be >= 0; alpha_multiplier, window_constant > 0");
  }
  const double H = horizon, K = num_episodes, T = H * K;
  const double log_a = std::log(static_cast<double>(num_actions));
  const double sqrt_d = std::sqrt(static_cast<double>(d));

  Hyperparams hp;
  const double variation = p_t + sqrt_d * delta;
  if (variation == 0.0) {
    hp.tau = num_episodes;
  } else {
    const double raw = std::floor(std::pow(T * std::sqrt(log_a) / (H * variation), 2.0 / 3.0));
    hp.tau = static_cast<int>(std::clamp(raw, 1.0, K));
  }
  const double rho = restart_count(hp.tau, num_episodes);
  hp.alpha = knobs.alpha_multiplier * std::sqrt(rho * log_a / (H * H * K));
  if (!(hp.alpha > 0.0)) {
    // A single action makes the step irrelevant; keep the invariant alpha > 0.
    hp.alpha = knobs.alpha_multiplier * std::sqrt(1.0 / (H * H * K));
  }
  if (delta == 0.0) {
    hp.w = num_episodes;
  } else {
    const double raw = knobs.window_rule == WindowRule::kTwoThirds
                           ? std::cbrt(static_cast<double>(d)) * std::pow(delta, -2.0 / 3.0) *
                                 std::pow(T, 2.0 / 3.0)
                           : std::pow(delta, -0.25) * std::pow(T, 0.25);
    hp.w = static_cast<int>(std::clamp(std::ceil(knobs.window_constant * raw), 1.0, K));
  }
  hp.lambda = 1.0;
  hp.lambda_prime = 1.0;
  hp.zeta = knobs.zeta;
  hp.beta = sqrt_d;
  hp.beta_prime = knobs.c_prime * std::sqrt(d * H * H * std::log(d * T / knobs.zeta));
  return hp;
}

// ---------------------------------------------------------------------------
// Optimistic evaluation

namespace {

struct EvaluationMode {
  const Policy* policy = nullptr;  // null: greedy backup
  bool full_information = false;
};

// beta * sqrt(x^T M^{-1} x) for every column x of `features`.
std::vector<double> ColumnBonuses(const RidgeSolution& fit, const Matrix& features,
                                  double multiplier) {
  std::vector<double> out(features.cols(), 0.0);
  if (multiplier == 0.0) return out;
  const Matrix whitened = fit.factor.matrixL().solve(features);
  for (Eigen::Index c = 0; c < features.cols(); ++c) {
    out[c] = multiplier * std::sqrt(whitened.col(c).squaredNorm());
  }
  return out;
}

Evaluation Evaluate(const LinearKernelMdp& mdp, int k, const StepHistory& history,
                    const Hyperparams& hp, EvaluationMode mode) {
  hp.validate(mdp.num_episodes());
  if (k < 1 || k > mdp.num_episodes()) Fail(ErrorCode::kIndex, "episode out of range");
  const int S = mdp.num_states(), A = mdp.num_actions(), H = mdp.horizon();
  if (history.horizon() != H || history.dim() != mdp.dim()) {
    Fail(ErrorCode::kShape, "history does not match the MDP");
  }
  if (mode.policy && (mode.policy->horizon() != H || mode.policy->num_states() != S ||
                      mode.policy->num_actions() != A)) {
    Fail(ErrorCode::kShape, "policy shape does not match the MDP");
  }

  Evaluation ev;
  ev.tables = ValueTables(H, S, A);
  if (!mode.policy) ev.greedy = Policy(H, S, A);
  ev.eta.resize(H);
  ev.reward_bonus.assign(H, std::vector<double>(S * A, 0.0));
  ev.transition_bonus.assign(H, std::vector<double>(S * A, 0.0));
  ev.window_fill = window_fill(k, hp.w);

  const Matrix& phi = mdp.data().phi;
  Eigen::RowVectorXd base(S * A);
  Eigen::RowVectorXd next_value(S * A);
  for (int h = H; h >= 1; --h) {
    Matrix& eta = ev.eta[h - 1];
    eta = eta_vector(mdp, ev.tables.v_step(h + 1));

    const RidgeSolution transition = estimate_transition(history, h, k, hp.w, hp.lambda_prime);
    next_value.noalias() = transition.estimate.transpose() * eta;
    ev.transition_bonus[h - 1] = ColumnBonuses(transition, eta, hp.beta_prime);

    if (mode.full_information) {
      base.noalias() = mdp.theta(k, h).transpose() * phi;
    } else {
      const RidgeSolution reward = estimate_reward(history, h, k, hp.w, hp.lambda);
      base.noalias() = reward.estimate.transpose() * phi;
      ev.reward_bonus[h - 1] = ColumnBonuses(reward, phi, hp.beta);
    }

    const double cap = H - h + 1;
    for (int s = 0; s < S; ++s) {
      double* q = ev.tables.q_row(h, s);
      for (int a = 0; a < A; ++a) {
        const int p = mdp.pair_index(s, a);
        const double raw = base(p) + next_value(p) + ev.reward_bonus[h - 1][p] +
                           ev.transition_bonus[h - 1][p];
        q[a] = std::max(std::min(raw, cap), 0.0);
      }
      if (mode.policy) {
        const auto pi = mode.policy->dist(h, s);
        double v = 0.0;
        for (int a = 0; a < A; ++a) v += q[a] * pi[a];
        ev.tables.v(h, s) = v;
      } else {
        const int best = static_cast<int>(std::max_element(q, q + A) - q);
        ev.tables.v(h, s) = q[best];
        ev.greedy.set_deterministic(h, s, best);
      }
    }
  }
  return ev;
}

}  // namespace

Evaluation swope(const LinearKernelMdp& mdp, int k, const Policy& pi, const StepHistory& history,
                 const Hyperparams& hp) {
  return Evaluate(mdp, k, history, hp, {&pi, false});
}

Evaluation swope_full_information(const LinearKernelMdp& mdp, int k, const Policy& pi,
                                  const StepHistory& history, const Hyperparams& hp) {
  return Evaluate(mdp, k, history, hp, {&pi, true});
}

Evaluation greedy_evaluation(const LinearKernelMdp& mdp, int k, const StepHistory& history,
                             const Hyperparams& hp) {
  return Evaluate(mdp, k, history, hp, {nullptr, false});
}

// ---------------------------------------------------------------------------
// Learners

namespace {

std::vector<double> Flatten(const std::vector<std::vector<double>>& per_step) {
  std::vector<double> out;
  for (const auto& step : per_step) out.insert(out.end(), step.begin(), step.end());
  return out;
}

// Archives the visited pairs of episode k and fills the episode record.
EpisodeRecord Finish(const LinearKernelMdp& mdp, int k, Policy policy, Trajectory traj,
                     Evaluation& ev, StepHistory& history, bool restarted,
                     const RunOptions& options) {
  const int H = mdp.horizon();
  for (int h = 1; h <= H; ++h) {
    const int s = traj.states[h - 1];
    const int a = traj.actions[h - 1];
    const int pair = mdp.pair_index(s, a);
    history.append(k, h, mdp.phi(s, a), traj.rewards[h - 1], ev.eta[h - 1].col(pair),
                   ev.tables.v(h + 1, traj.states[h]));
  }
  EpisodeRecord rec;
  rec.k = k;
  rec.policy = std::move(policy);
  rec.states = std::move(traj.states);
  rec.actions = std::move(traj.actions);
  rec.rewards = std::move(traj.rewards);
  rec.restarted = restarted;
  rec.window_fill = ev.window_fill;
  if (options.keep_tables || options.observer) {
    rec.reward_bonus = Flatten(ev.reward_bonus);
    rec.transition_bonus = Flatten(ev.transition_bonus);
    rec.values = std::move(ev.tables);
  }
  if (options.observer) {
    options.observer(rec);
    if (!options.keep_tables) {
      rec.values.reset();
      rec.reward_bonus.clear();
      rec.transition_bonus.clear();
    }
  }
  if (!options.keep_policies) rec.policy = Policy();
  return rec;
}

RunRecord PolicyOptimization(const LinearKernelMdp& mdp, const Hyperparams& hp,
                             std::uint64_t seed, const RunOptions& options,
                             bool full_information) {
  hp.validate(mdp.num_episodes());
  const int S = mdp.num_states(), A = mdp.num_actions(), H = mdp.horizon();
  RunRecord run;
  run.algorithm = full_information ? Algorithm::kPropoAdversarial : Algorithm::kPropo;
  run.hp = hp;
  run.seed = seed;
  run.episodes.reserve(mdp.num_episodes());

  Rng rng(seed);
  StepHistory history(H, mdp.dim());
  Policy previous_pi = Policy::uniform(H, S, A);
  ValueTables previous_q(H, S, A);
  for (int k = 1; k <= mdp.num_episodes(); ++k) {
    const bool restarted = is_restart(k, hp.tau);
    if (restarted) {
      previous_pi = Policy::uniform(H, S, A);
      previous_q = ValueTables(H, S, A);
    }
    Policy pi(H, S, A);
    for (int h = 1; h <= H; ++h) {
      for (int s = 0; s < S; ++s) {
        mirror_descent_step(previous_pi.dist(h, s),
                            std::span<const double>(previous_q.q_row(h, s), A), hp.alpha,
                            pi.dist(h, s));
      }
    }
    Trajectory traj = sample_episode(mdp, k, pi, rng);
    Evaluation ev = full_information ? swope_full_information(mdp, k, pi, history, hp)
                                     : swope(mdp, k, pi, history, hp);
    previous_q = ev.tables;
    previous_pi = pi;
    run.episodes.push_back(
        Finish(mdp, k, std::move(pi), std::move(traj), ev, history, restarted, options));
  }
  return run;
}

}  // namespace

RunRecord propo_run(const LinearKernelMdp& mdp, const Hyperparams& hp, std::uint64_t seed,
                    const RunOptions& options) {
  return PolicyOptimization(mdp, hp, seed, options, false);
}

RunRecord propo_adversarial_run(const LinearKernelMdp& mdp, const Hyperparams& hp,
                                std::uint64_t seed, const RunOptions& options) {
  return PolicyOptimization(mdp, hp, seed, options, true);
}

RunRecord sw_lsvi_ucb_run(const LinearKernelMdp& mdp, const Hyperparams& hp, std::uint64_t seed,
                          const RunOptions& options) {
  hp.validate(mdp.num_episodes());
  RunRecord run;
  run.algorithm = Algorithm::kSwLsviUcb;
  run.hp = hp;
  run.seed = seed;
  run.episodes.reserve(mdp.num_episodes());

  Rng rng(seed);
  StepHistory history(mdp.horizon(), mdp.dim());
  for (int k = 1; k <= mdp.num_episodes(); ++k) {
    Evaluation ev = greedy_evaluation(mdp, k, history, hp);
    Trajectory traj = sample_episode(mdp, k, ev.greedy, rng);
    Policy pi = ev.greedy;
    run.episodes.push_back(
        Finish(mdp, k, std::move(pi), std::move(traj), ev, history, false, options));
  }
  return run;
}

RunRecord run_algorithm(Algorithm algorithm, const LinearKernelMdp& mdp, const Hyperparams& hp,
                        std::uint64_t seed, const RunOptions& options) {
  switch (algorithm) {
    case Algorithm::kPropo: return propo_run(mdp, hp, seed, options);
    case Algorithm::kSwLsviUcb: return sw_lsvi_ucb_run(mdp, hp, seed, options);
    case Algorithm::kPropoAdversarial: return propo_adversarial_run(mdp, hp, seed, options);
  }
  Fail(ErrorCode::kParameter, "unknown algorithm");
}

// ---------------------------------------------------------------------------
// Diagnostics

std::vector<double> model_prediction_error(const LinearKernelMdp& mdp, int k, int h,
                                           const ValueTables& tables) {
  const int S = mdp.num_states(), A = mdp.num_actions();
  if (tables.horizon() != mdp.horizon() || tables.num_states() != S || tables.num_actions() != A) {
    Fail(ErrorCode::kShape, "value tables do not match the MDP");
  }
  std::vector<double> out(S * A);
  const auto v_next = tables.v_step(h + 1);
  for (int s = 0; s < S; ++s) {
    for (int a = 0; a < A; ++a) {
      const double expected = mdp.transition_row(k, h, s, a).dot(v_next);
      out[mdp.pair_index(s, a)] = mdp.reward(k, h, s, a) + expected - tables.q(h, s, a);
    }
  }
  return out;
}

ParameterDrift::ParameterDrift(const LinearKernelMdp& mdp) : horizon_(mdp.horizon()) {
  const int K = mdp.num_episodes();
  theta_prefix_.assign(horizon_, std::vector<double>(K, 0.0));
  xi_prefix_.assign(horizon_, std::vector<double>(K, 0.0));
  for (int h = 1; h <= horizon_; ++h) {
    for (int i = 1; i < K; ++i) {
      theta_prefix_[h - 1][i] =
          theta_prefix_[h - 1][i - 1] + (mdp.theta(i, h) - mdp.theta(i + 1, h)).norm();
      xi_prefix_[h - 1][i] = xi_prefix_[h - 1][i - 1] + (mdp.xi(i, h) - mdp.xi(i + 1, h)).norm();
    }
  }
}

double ParameterDrift::window(const std::vector<double>& prefix, int k, int w) const {
  if (k <= 1) return 0.0;
  const int first = std::max(1, k - w);
  return prefix[k - 1] - prefix[first - 1];
}

double ParameterDrift::theta(int h, int k, int w) const { return window(theta_prefix_.at(h - 1), k, w); }
double ParameterDrift::xi(int h, int k, int w) const { return window(xi_prefix_.at(h - 1), k, w); }

SandwichBounds ucb_sandwich(const LinearKernelMdp& mdp, const ParameterDrift& drift, int k, int h,
                            int w, double reward_bonus, double transition_bonus) {
  const double scale = mdp.horizon() * std::sqrt(static_cast<double>(mdp.dim()));
  const double slack = drift.theta(h, k, w) + scale * drift.xi(h, k, w);
  return {-2.0 * reward_bonus - 2.0 * transition_bonus - slack, slack};
}

}  // namespace nsrl
