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

#include "nsrl/estimation.hpp"

#include <cmath>
#include <string>

#include "nsrl/error.hpp"

namespace nsrl {

namespace {

std::vector<int> Support(const Vector& x) {
  std::vector<int> out;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (x(i) != 0.0) out.push_back(static_cast<int>(i));
  }
  return out;
}

void CheckWindow(const StepHistory& history, int h, int k, int w, double reg) {
  if (w <= 0) Fail(ErrorCode::kParameter, "window length must be >= 1");
  if (!(reg > 0.0)) Fail(ErrorCode::kParameter, "regularization must be > 0");
  if (h < 1 || h > history.horizon()) Fail(ErrorCode::kIndex, "step out of range");
  if (k < 1) Fail(ErrorCode::kIndex, "episode must be >= 1");
  if (history.size(h) < k - 1) {
    Fail(ErrorCode::kIncompleteRecord, "history at step " + std::to_string(h) +
                                           " ends before episode " + std::to_string(k - 1));
  }
}

template <typename Feature, typename Support, typename Target>
RidgeSolution Fit(const StepHistory& history, int h, int k, int w, double reg, Feature feature,
                  Support support, Target target) {
  CheckWindow(history, h, k, w, reg);
  const int d = history.dim();
  RidgeSolution out;
  out.precision = Matrix::Zero(d, d);
  Vector moment = Vector::Zero(d);
  for (int tau = window_start(k, w); tau <= k - 1; ++tau) {
    const StepRecord& rec = history.record(h, tau);
    const Vector& x = feature(rec);
    const double y = target(rec);
    const std::vector<int>& nz = support(rec);
    for (int j : nz) {
      const double xj = x(j);
      for (int i : nz) out.precision(i, j) += x(i) * xj;
      moment(j) += xj * y;
    }
    ++out.num_records;
  }
  out.precision.diagonal().array() += reg;
  out.factor.compute(out.precision);
  if (out.factor.info() != Eigen::Success) {
    Fail(ErrorCode::kLinearAlgebra, "precision matrix is not positive definite");
  }
  out.estimate = out.factor.solve(moment);
  return out;
}

}  // namespace

StepHistory::StepHistory(int horizon, int dim) : dim_(dim), steps_(horizon) {
  if (horizon < 1 || dim < 1) Fail(ErrorCode::kParameter, "history needs horizon, dim >= 1");
}

void StepHistory::append(int k, int h, Vector phi, double reward, Vector eta, double next_value) {
  if (h < 1 || h > horizon()) Fail(ErrorCode::kIndex, "step out of range");
  auto& step = steps_[h - 1];
  if (k != static_cast<int>(step.size()) + 1) {
    Fail(ErrorCode::kIncompleteRecord, "records must be appended in episode order");
  }
  if (phi.size() != dim_ || eta.size() != dim_) Fail(ErrorCode::kShape, "record dimension mismatch");
  StepRecord rec;
  rec.episode = k;
  rec.phi_support = Support(phi);
  rec.eta_support = Support(eta);
  rec.phi = std::move(phi);
  rec.reward = reward;
  rec.eta = std::move(eta);
  rec.next_value = next_value;
  step.push_back(std::move(rec));
}

double RidgeSolution::quad_form(const Eigen::Ref<const Vector>& x) const {
  return factor.matrixL().solve(x).squaredNorm();
}

RidgeSolution estimate_reward(const StepHistory& history, int h, int k, int w, double lambda) {
  return Fit(
      history, h, k, w, lambda, [](const StepRecord& r) -> const Vector& { return r.phi; },
      [](const StepRecord& r) -> const std::vector<int>& { return r.phi_support; },
      [](const StepRecord& r) { return r.reward; });
}

RidgeSolution estimate_transition(const StepHistory& history, int h, int k, int w,
                                  double lambda_prime) {
  return Fit(
      history, h, k, w, lambda_prime, [](const StepRecord& r) -> const Vector& { return r.eta; },
      [](const StepRecord& r) -> const std::vector<int>& { return r.eta_support; },
      [](const StepRecord& r) { return r.next_value; });
}

namespace {

double Bonus(const Eigen::Ref<const Vector>& x, const Matrix& precision, double multiplier) {
  if (!(multiplier >= 0.0)) Fail(ErrorCode::kParameter, "bonus multiplier must be >= 0");
  if (precision.rows() != x.size() || precision.cols() != x.size()) {
    Fail(ErrorCode::kShape, "precision matrix does not match the feature dimension");
  }
  Eigen::LLT<Matrix> factor(precision);
  // LLT only reads one triangle; also reject asymmetric input.
  if (factor.info() != Eigen::Success || !precision.isApprox(precision.transpose(), 1e-12)) {
    Fail(ErrorCode::kLinearAlgebra, "precision matrix is not symmetric positive definite");
  }
  return multiplier * std::sqrt(factor.matrixL().solve(x).squaredNorm());
}

double Bonus(const Eigen::Ref<const Vector>& x, const RidgeSolution& fit, double multiplier) {
  if (!(multiplier >= 0.0)) Fail(ErrorCode::kParameter, "bonus multiplier must be >= 0");
  return multiplier * std::sqrt(fit.quad_form(x));
}

}  // namespace

double bonus_reward(const Eigen::Ref<const Vector>& phi, const Matrix& precision, double beta) {
  return Bonus(phi, precision, beta);
}
double bonus_reward(const Eigen::Ref<const Vector>& phi, const RidgeSolution& fit, double beta) {
  return Bonus(phi, fit, beta);
}
double bonus_transition(const Eigen::Ref<const Vector>& eta, const Matrix& precision,
                        double beta_prime) {
  return Bonus(eta, precision, beta_prime);
}
double bonus_transition(const Eigen::Ref<const Vector>& eta, const RidgeSolution& fit,
                        double beta_prime) {
  return Bonus(eta, fit, beta_prime);
}

}  // namespace nsrl
