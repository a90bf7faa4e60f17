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

#ifndef NSRL_ESTIMATION_HPP_
#define NSRL_ESTIMATION_HPP_

#include <vector>

#include <Eigen/Cholesky>

#include "nsrl/mdp.hpp"

namespace nsrl {

// One (k, h) observation. eta and next_value are frozen at the values the
// evaluation pass of episode k produced; later passes never rewrite them.
struct StepRecord {
  int episode = 0;
  Vector phi;
  double reward = 0.0;
  Vector eta;
  double next_value = 0.0;
  // Indices of nonzero entries, so window sums cost O(nnz^2) per record.
  std::vector<int> phi_support;
  std::vector<int> eta_support;
};

// Append-only per-step archive feeding the sliding-window regressions.
class StepHistory {
 public:
  StepHistory(int horizon, int dim);

  int horizon() const { return static_cast<int>(steps_.size()); }
  int dim() const { return dim_; }

  // Records must arrive in episode order, one per (k, h).
  void append(int k, int h, Vector phi, double reward, Vector eta, double next_value);

  // Number of completed episodes recorded at step h.
  int size(int h) const { return static_cast<int>(steps_.at(h - 1).size()); }
  const StepRecord& record(int h, int k) const { return steps_.at(h - 1).at(k - 1); }
  StepRecord& mutable_record(int h, int k) { return steps_.at(h - 1).at(k - 1); }

 private:
  int dim_;
  std::vector<std::vector<StepRecord>> steps_;
};

// First episode of the window used at episode k: max(1, k - w).
inline int window_start(int k, int w) { return k - w > 1 ? k - w : 1; }
// Records consumed at episode k: min(w, k - 1).
inline int window_fill(int k, int w) { return k - window_start(k, w); }

// Regularized least-squares fit over one window, with the Cholesky factor of
// the precision matrix kept for bonus evaluation.
struct RidgeSolution {
  Vector estimate;
  Matrix precision;
  Eigen::LLT<Matrix> factor;
  int num_records = 0;

  // x^T precision^{-1} x through one triangular solve.
  double quad_form(const Eigen::Ref<const Vector>& x) const;
};

// theta-hat and Lambda from records tau in [max(1, k-w), k-1] at step h.
RidgeSolution estimate_reward(const StepHistory& history, int h, int k, int w, double lambda);

// xi-hat and A from the stored (eta, next_value) pairs over the same window.
RidgeSolution estimate_transition(const StepHistory& history, int h, int k, int w,
                                  double lambda_prime);

// beta * sqrt(phi^T Lambda^{-1} phi).
double bonus_reward(const Eigen::Ref<const Vector>& phi, const Matrix& precision, double beta);
double bonus_reward(const Eigen::Ref<const Vector>& phi, const RidgeSolution& fit, double beta);

// beta' * sqrt(eta^T A^{-1} eta).
double bonus_transition(const Eigen::Ref<const Vector>& eta, const Matrix& precision,
                        double beta_prime);
double bonus_transition(const Eigen::Ref<const Vector>& eta, const RidgeSolution& fit,
                        double beta_prime);

}  // namespace nsrl

#endif  // NSRL_ESTIMATION_HPP_
