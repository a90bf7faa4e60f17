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

#include "nsrl/policy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nsrl/error.hpp"

namespace nsrl {

namespace {
constexpr double kProbabilityFloor = 1e-300;
}  // namespace

Policy::Policy(int horizon, int num_states, int num_actions)
    : horizon_(horizon),
      num_states_(num_states),
      num_actions_(num_actions),
      probs_(static_cast<size_t>(horizon) * num_states * num_actions, 0.0) {}

Policy Policy::uniform(int horizon, int num_states, int num_actions) {
  Policy pi(horizon, num_states, num_actions);
  std::fill(pi.probs_.begin(), pi.probs_.end(), 1.0 / num_actions);
  return pi;
}

void Policy::set_deterministic(int h, int s, int a) {
  auto d = dist(h, s);
  std::fill(d.begin(), d.end(), 0.0);
  d[a] = 1.0;
}

double simplex_violation(const Policy& pi) {
  double worst = 0.0;
  for (int h = 1; h <= pi.horizon(); ++h) {
    for (int s = 0; s < pi.num_states(); ++s) {
      double sum = 0.0;
      for (double p : pi.dist(h, s)) {
        worst = std::max(worst, -p);
        sum += p;
      }
      worst = std::max(worst, std::abs(sum - 1.0));
    }
  }
  return worst;
}

void mirror_descent_step(std::span<const double> pi_prev, std::span<const double> q_prev,
                         double alpha, std::span<double> out) {
  const size_t n = pi_prev.size();
  if (n == 0 || q_prev.size() != n || out.size() != n) {
    Fail(ErrorCode::kShape, "mirror descent inputs must share one non-empty action dimension");
  }
  if (!(alpha >= 0.0)) Fail(ErrorCode::kParameter, "stepsize must be >= 0");
  double top = -std::numeric_limits<double>::infinity();
  for (size_t a = 0; a < n; ++a) {
    const double logit = std::log(std::max(pi_prev[a], kProbabilityFloor)) + alpha * q_prev[a];
    out[a] = logit;
    top = std::max(top, logit);
  }
  double sum = 0.0;
  for (size_t a = 0; a < n; ++a) sum += (out[a] = std::exp(out[a] - top));
  for (size_t a = 0; a < n; ++a) out[a] /= sum;
}

std::vector<double> mirror_descent_step(std::span<const double> pi_prev,
                                        std::span<const double> q_prev, double alpha) {
  std::vector<double> out(pi_prev.size());
  mirror_descent_step(pi_prev, q_prev, alpha, out);
  return out;
}

}  // namespace nsrl
