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

#ifndef NSRL_POLICY_HPP_
#define NSRL_POLICY_HPP_

#include <span>
#include <vector>

namespace nsrl {

// Per-step state-conditional action distributions, probs(h, s, a) with h in
// [1, H].
class Policy {
 public:
  Policy() = default;
  Policy(int horizon, int num_states, int num_actions);

  static Policy uniform(int horizon, int num_states, int num_actions);

  int horizon() const { return horizon_; }
  int num_states() const { return num_states_; }
  int num_actions() const { return num_actions_; }

  double& prob(int h, int s, int a) { return probs_[index(h, s, 0) + a]; }
  double prob(int h, int s, int a) const { return probs_[index(h, s, 0) + a]; }

  std::span<double> dist(int h, int s) {
    return {probs_.data() + index(h, s, 0), static_cast<size_t>(num_actions_)};
  }
  std::span<const double> dist(int h, int s) const {
    return {probs_.data() + index(h, s, 0), static_cast<size_t>(num_actions_)};
  }

  // Point mass on `a` at (h, s).
  void set_deterministic(int h, int s, int a);

  const std::vector<double>& data() const { return probs_; }
  bool operator==(const Policy& other) const = default;

 private:
  size_t index(int h, int s, int a) const {
    return (static_cast<size_t>(h - 1) * num_states_ + s) * num_actions_ + a;
  }

  int horizon_ = 0;
  int num_states_ = 0;
  int num_actions_ = 0;
  std::vector<double> probs_;
};

// Largest deviation from the simplex over all (h, s): max of
// |sum_a p - 1| and -min_a p (0 for a valid policy).
double simplex_violation(const Policy& pi);

// KL-regularized improvement step on one (h, s):
//   pi(a) proportional to pi_prev(a) * exp(alpha * q_prev(a)).
// Entries of pi_prev are floored at 1e-300 before taking logs, and the
// exponentials are shifted by their maximum.
std::vector<double> mirror_descent_step(std::span<const double> pi_prev,
                                        std::span<const double> q_prev, double alpha);

// In-place variant writing into `out` (may alias pi_prev).
void mirror_descent_step(std::span<const double> pi_prev, std::span<const double> q_prev,
                         double alpha, std::span<double> out);

}  // namespace nsrl

#endif  // NSRL_POLICY_HPP_
