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

#include "nsrl/environments.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "nsrl/error.hpp"
#include "nsrl/rng.hpp"

namespace nsrl {

std::vector<double> hard_instance_action(int index, int d) {
  std::vector<double> a(d - 1);
  for (int i = 0; i < d - 1; ++i) a[i] = ((index >> i) & 1) ? 1.0 : -1.0;
  return a;
}

namespace {

void CheckHardParameters(double delta, double epsilon) {
  if (!(delta > 0.0) || !(epsilon >= 0.0) || !(2.0 * epsilon <= delta) ||
      !(delta <= 1.0 / 3.0 + 1e-15)) {
    Fail(ErrorCode::kParameter, "hard instance requires 0 <= 2*epsilon <= delta <= 1/3, delta > 0");
  }
}

}  // namespace

double hard_instance_optimal_average_reward(double delta, double epsilon) {
  CheckHardParameters(delta, epsilon);
  return (delta + epsilon) / (2.0 * delta + epsilon);
}

HardInstance build_hard_instance(int d, double delta, double epsilon, int horizon,
                                 int num_episodes, int num_segments, std::uint64_t seed) {
  if (d < 2) Fail(ErrorCode::kParameter, "hard instance needs d >= 2");
  if (d > kMaxHardInstanceDim) {
    Fail(ErrorCode::kCapacity, "hard instance materializes 2^(d-1) actions; d <= " +
                                   std::to_string(kMaxHardInstanceDim) + " supported");
  }
  CheckHardParameters(delta, epsilon);
  if (horizon < 1 || num_episodes < 1) Fail(ErrorCode::kParameter, "horizon and num_episodes must be >= 1");
  if (num_segments < 1 || num_segments > num_episodes) {
    Fail(ErrorCode::kParameter, "num_segments must lie in [1, K]");
  }

  const int m = d - 1;
  const int S = 2, A = 1 << m, H = horizon, K = num_episodes;
  // Basis change keeping every probability and reward intact while meeting
  // ||phi|| <= 1, ||theta||, ||xi|| <= sqrt(d), sum_s' ||psi|| <= sqrt(d):
  // phi/sqrt(d), theta*sqrt(d), and the first d-1 psi coordinates scaled by
  // p with the matching xi coordinates divided by p.
  const double sqrt_d = std::sqrt(static_cast<double>(d));
  const double p = delta / (2.0 * m);

  MdpData data;
  data.num_states = S;
  data.num_actions = A;
  data.horizon = H;
  data.num_episodes = K;
  data.initial_state = kHardStateLow;
  data.phi = Matrix::Zero(d, S * A);
  data.psi = Matrix::Zero(d, S * A * S);
  for (int a = 0; a < A; ++a) {
    const auto coords = hard_instance_action(a, d);
    data.phi.col(kHardStateHigh * A + a).setConstant(1.0 / sqrt_d);
    auto psi_col = [&](int s, int sn) { return data.psi.col((s * A + a) * S + sn); };
    for (int i = 0; i < m; ++i) {
      psi_col(kHardStateLow, kHardStateLow)(i) = -coords[i] * p;
      psi_col(kHardStateLow, kHardStateHigh)(i) = coords[i] * p;
    }
    psi_col(kHardStateLow, kHardStateLow)(m) = 1.0 - delta;
    psi_col(kHardStateLow, kHardStateHigh)(m) = delta;
    psi_col(kHardStateHigh, kHardStateLow)(m) = delta;
    psi_col(kHardStateHigh, kHardStateHigh)(m) = 1.0 - delta;
  }

  std::vector<int> segment_starts;
  std::vector<std::vector<double>> segment_xi;
  Rng rng = Rng(seed).split("hard2state");
  const double magnitude = m > 0 ? epsilon / m : 0.0;
  std::vector<double> previous;
  for (int j = 0; j < num_segments; ++j) {
    segment_starts.push_back(1 + static_cast<int>(static_cast<long>(j) * K / num_segments));
    std::vector<double> xi(m);
    do {
      for (int i = 0; i < m; ++i) xi[i] = (rng.next_u64() >> 63) ? magnitude : -magnitude;
    } while (epsilon > 0.0 && !previous.empty() && xi == previous);
    segment_xi.push_back(xi);
    previous = xi;
  }

  data.theta = Matrix::Constant(d, K * H, sqrt_d / d);
  data.xi = Matrix::Zero(d, K * H);
  for (int j = 0; j < num_segments; ++j) {
    const int first = segment_starts[j];
    const int last = j + 1 < num_segments ? segment_starts[j + 1] - 1 : K;
    for (int k = first; k <= last; ++k) {
      for (int h = 1; h <= H; ++h) {
        auto col = data.xi.col((k - 1) * H + (h - 1));
        for (int i = 0; i < m; ++i) col(i) = segment_xi[j][i] / p;
        col(m) = 1.0;
      }
    }
  }
  return HardInstance{LinearKernelMdp(std::move(data)), delta, epsilon,
                      std::move(segment_starts), std::move(segment_xi)};
}

// ---------------------------------------------------------------------------
// Tabular instances

namespace {

// Per-step parameter tables for one map: reward tables (S*A values) or
// transition tables (S*A*S values), one vector per step h.
using StepTables = std::vector<std::vector<double>>;

StepTables DrawRewards(Rng& rng, int H, int S, int A) {
  StepTables out(H, std::vector<double>(static_cast<size_t>(S) * A));
  for (auto& table : out) {
    for (double& r : table) r = rng.uniform();
  }
  return out;
}

StepTables DrawTransitions(Rng& rng, int H, int S, int A) {
  StepTables out(H, std::vector<double>(static_cast<size_t>(S) * A * S));
  for (auto& table : out) {
    for (int p = 0; p < S * A; ++p) {
      double* row = table.data() + static_cast<size_t>(p) * S;
      double sum = 0.0;
      for (int sn = 0; sn < S; ++sn) sum += (row[sn] = rng.exponential());
      for (int sn = 0; sn < S; ++sn) row[sn] /= sum;
    }
  }
  return out;
}

double Distance(const std::vector<double>& x, const std::vector<double>& y) {
  double sum = 0.0;
  for (size_t i = 0; i < x.size(); ++i) sum += (x[i] - y[i]) * (x[i] - y[i]);
  return std::sqrt(sum);
}

// Fills schedule[k-1] (k = 1..K) with the step tables for each episode.
std::vector<StepTables> Realize(const DriftSchedule& drift, const StepTables& base, int K,
                                const std::function<StepTables(Rng&)>& draw, Rng rng,
                                const char* name) {
  std::vector<StepTables> schedule(K, base);
  switch (drift.kind) {
    case DriftKind::kStationary:
      break;
    case DriftKind::kAbrupt: {
      int previous = 1;
      for (int change : drift.change_episodes) {
        if (change <= previous || change > K) {
          Fail(ErrorCode::kSchedule, std::string(name) +
                                         " change episodes must be strictly increasing within [2, K]");
        }
        previous = change;
      }
      StepTables current = base;
      size_t next = 0;
      for (int k = 1; k <= K; ++k) {
        if (next < drift.change_episodes.size() && drift.change_episodes[next] == k) {
          StepTables fresh;
          do {
            fresh = draw(rng);
          } while (fresh == current);
          current = std::move(fresh);
          ++next;
        }
        schedule[k - 1] = current;
      }
      break;
    }
    case DriftKind::kGradual: {
      if (!(drift.total_budget >= 0.0)) Fail(ErrorCode::kParameter, "drift budget must be >= 0");
      if (drift.total_budget == 0.0) break;
      // Triangle-wave path between base and a fresh target: every leg is
      // monotone with endpoints on integer episodes, so the realized budget
      // is exactly legs * amplitude * sum_h ||target_h - base_h||.
      const StepTables target = draw(rng);
      double span = 0.0;
      for (size_t h = 0; h < base.size(); ++h) span += Distance(base[h], target[h]);
      const double legs_real = drift.total_budget / span;
      const long legs = static_cast<long>(std::ceil(legs_real - 1e-12));
      if (legs > K - 1) {
        Fail(ErrorCode::kSchedule, std::string(name) + " drift budget " +
                                       std::to_string(drift.total_budget) +
                                       " is not reachable within K episodes");
      }
      const double amplitude = legs_real / static_cast<double>(legs);
      std::vector<double> weight(K, 0.0);
      for (long j = 0; j < legs; ++j) {
        const int begin = 1 + static_cast<int>(std::floor(j * (K - 1.0) / legs + 0.5));
        const int end = 1 + static_cast<int>(std::floor((j + 1) * (K - 1.0) / legs + 0.5));
        const double from = (j % 2 == 0) ? 0.0 : amplitude;
        const double to = (j % 2 == 0) ? amplitude : 0.0;
        for (int k = begin; k <= end; ++k) {
          weight[k - 1] = from + (to - from) * (k - begin) / static_cast<double>(end - begin);
        }
      }
      for (int k = 1; k <= K; ++k) {
        const double f = weight[k - 1];
        for (size_t h = 0; h < base.size(); ++h) {
          auto& table = schedule[k - 1][h];
          for (size_t i = 0; i < table.size(); ++i) {
            table[i] = (1.0 - f) * base[h][i] + f * target[h][i];
          }
        }
      }
      break;
    }
  }
  return schedule;
}

}  // namespace

TabularInstance build_tabular(int num_states, int num_actions, int horizon, int num_episodes,
                              const DriftSchedule& reward_drift,
                              const DriftSchedule& transition_drift, std::uint64_t seed) {
  const int S = num_states, A = num_actions, H = horizon, K = num_episodes;
  if (S < 1 || A < 1 || H < 1 || K < 1) Fail(ErrorCode::kParameter, "dimensions must be >= 1");
  const long d_long = static_cast<long>(S) * A * S;
  if (d_long > kMaxTabularDim) {
    Fail(ErrorCode::kCapacity, "tabular embedding needs S*A*S <= " + std::to_string(kMaxTabularDim));
  }
  const int d = static_cast<int>(d_long);
  const Rng root(seed);
  Rng base_rng = root.split("base");
  const StepTables base_rewards = DrawRewards(base_rng, H, S, A);
  const StepTables base_rows = DrawTransitions(base_rng, H, S, A);

  const auto rewards = Realize(
      reward_drift, base_rewards, K, [&](Rng& r) { return DrawRewards(r, H, S, A); },
      root.split("reward-drift").split(reward_drift.rng_seed), "reward");
  const auto rows = Realize(
      transition_drift, base_rows, K, [&](Rng& r) { return DrawTransitions(r, H, S, A); },
      root.split("transition-drift").split(transition_drift.rng_seed), "transition");

  MdpData data;
  data.num_states = S;
  data.num_actions = A;
  data.horizon = H;
  data.num_episodes = K;
  data.initial_state = 0;
  data.phi = Matrix::Zero(d, S * A);
  data.psi = Matrix::Identity(d, d);
  for (int p = 0; p < S * A; ++p) data.phi(p * S, p) = 1.0;
  data.theta = Matrix::Zero(d, static_cast<Eigen::Index>(K) * H);
  data.xi = Matrix::Zero(d, static_cast<Eigen::Index>(K) * H);

  std::vector<double> reward_tables, transition_tables;
  reward_tables.reserve(static_cast<size_t>(K) * H * S * A);
  transition_tables.reserve(static_cast<size_t>(K) * H * S * A * S);
  for (int k = 1; k <= K; ++k) {
    for (int h = 1; h <= H; ++h) {
      const auto& r = rewards[k - 1][h - 1];
      const auto& P = rows[k - 1][h - 1];
      auto theta = data.theta.col((k - 1) * H + (h - 1));
      auto xi = data.xi.col((k - 1) * H + (h - 1));
      for (int p = 0; p < S * A; ++p) theta(p * S) = r[p];
      for (int i = 0; i < d; ++i) xi(i) = P[i];
      reward_tables.insert(reward_tables.end(), r.begin(), r.end());
      transition_tables.insert(transition_tables.end(), P.begin(), P.end());
    }
  }
  return TabularInstance{LinearKernelMdp(std::move(data)), std::move(reward_tables),
                         std::move(transition_tables)};
}

// ---------------------------------------------------------------------------
// Presets

namespace {

class Params {
 public:
  Params(std::string preset, const nlohmann::json& block, const std::vector<std::string>& allowed)
      : preset_(std::move(preset)), block_(block.is_null() ? nlohmann::json::object() : block) {
    if (!block_.is_object()) Fail(ErrorCode::kConfig, preset_ + ": parameter block must be an object");
    for (const auto& item : block_.items()) {
      if (std::find(allowed.begin(), allowed.end(), item.key()) == allowed.end()) {
        Fail(ErrorCode::kConfig, preset_ + ": unknown parameter '" + item.key() + "'");
      }
    }
  }

  bool has(const char* key) const { return block_.contains(key); }

  int integer(const char* key, int fallback) const {
    if (!has(key)) return fallback;
    const auto& v = block_.at(key);
    if (!v.is_number_integer()) Fail(ErrorCode::kConfig, preset_ + ": '" + key + "' must be an integer");
    return v.get<int>();
  }

  double number(const char* key, double fallback) const {
    if (!has(key)) return fallback;
    const auto& v = block_.at(key);
    if (!v.is_number()) Fail(ErrorCode::kConfig, preset_ + ": '" + key + "' must be a number");
    return v.get<double>();
  }

  bool boolean(const char* key, bool fallback) const {
    if (!has(key)) return fallback;
    const auto& v = block_.at(key);
    if (!v.is_boolean()) Fail(ErrorCode::kConfig, preset_ + ": '" + key + "' must be a boolean");
    return v.get<bool>();
  }

  std::vector<int> integers(const char* key) const {
    const auto& v = block_.at(key);
    if (!v.is_array()) Fail(ErrorCode::kConfig, preset_ + ": '" + key + "' must be an array");
    std::vector<int> out;
    for (const auto& x : v) {
      if (!x.is_number_integer()) Fail(ErrorCode::kConfig, preset_ + ": '" + key + "' must hold integers");
      out.push_back(x.get<int>());
    }
    return out;
  }

  std::uint64_t seed(std::uint64_t run_seed) const {
    std::uint64_t base = 0;
    if (has("seed")) {
      const auto& v = block_.at("seed");
      if (!v.is_number_integer()) Fail(ErrorCode::kConfig, preset_ + ": 'seed' must be an integer");
      base = v.get<std::uint64_t>();
    }
    return Rng(base).split(run_seed).next_u64();
  }

 private:
  std::string preset_;
  nlohmann::json block_;
};

const char* const kPresets[] = {"hard2state", "tabular-abrupt", "tabular-gradual",
                                "tabular-stationary"};

}  // namespace

bool is_known_preset(const std::string& name) {
  return std::find(std::begin(kPresets), std::end(kPresets), name) != std::end(kPresets);
}

LinearKernelMdp build_preset(const std::string& name, const nlohmann::json& block,
                             std::uint64_t run_seed) {
  if (name == "hard2state") {
    Params p(name, block,
             {"d", "delta", "epsilon", "horizon", "num_episodes", "num_segments", "seed"});
    return build_hard_instance(p.integer("d", 2), p.number("delta", 1.0 / 3.0),
                               p.number("epsilon", 1.0 / 6.0), p.integer("horizon", 5),
                               p.integer("num_episodes", 1000), p.integer("num_segments", 1),
                               p.seed(run_seed))
        .mdp;
  }
  std::vector<std::string> allowed = {"num_states", "num_actions", "horizon", "num_episodes",
                                      "seed"};
  if (name == "tabular-abrupt") {
    allowed.insert(allowed.end(),
                   {"num_changes", "change_episodes", "drift_rewards", "drift_transitions"});
  } else if (name == "tabular-gradual") {
    allowed.insert(allowed.end(), {"reward_budget", "transition_budget"});
  } else if (name != "tabular-stationary") {
    Fail(ErrorCode::kConfig, "unknown environment preset '" + name + "'");
  }
  Params p(name, block, allowed);
  const int K = p.integer("num_episodes", 1000);
  const std::uint64_t seed = p.seed(run_seed);
  DriftSchedule reward_drift, transition_drift;
  reward_drift.rng_seed = Mix64(seed ^ 1);
  transition_drift.rng_seed = Mix64(seed ^ 2);
  if (name == "tabular-abrupt") {
    std::vector<int> changes;
    if (p.has("change_episodes")) {
      if (p.has("num_changes")) {
        Fail(ErrorCode::kConfig, name + ": give either 'num_changes' or 'change_episodes'");
      }
      changes = p.integers("change_episodes");
    } else {
      const int n = p.integer("num_changes", 4);
      if (n < 0 || n > K - 1) Fail(ErrorCode::kConfig, name + ": 'num_changes' must lie in [0, K-1]");
      for (int j = 1; j <= n; ++j) {
        changes.push_back(1 + static_cast<int>(std::floor(static_cast<double>(j) * K / (n + 1) + 0.5)));
      }
    }
    if (p.boolean("drift_rewards", true)) {
      reward_drift.kind = DriftKind::kAbrupt;
      reward_drift.change_episodes = changes;
    }
    if (p.boolean("drift_transitions", true)) {
      transition_drift.kind = DriftKind::kAbrupt;
      transition_drift.change_episodes = changes;
    }
  } else if (name == "tabular-gradual") {
    reward_drift.kind = DriftKind::kGradual;
    reward_drift.total_budget = p.number("reward_budget", 1.0);
    transition_drift.kind = DriftKind::kGradual;
    transition_drift.total_budget = p.number("transition_budget", 1.0);
  }
  return build_tabular(p.integer("num_states", 4), p.integer("num_actions", 3),
                       p.integer("horizon", 3), K, reward_drift, transition_drift, seed)
      .mdp;
}

}  // namespace nsrl
