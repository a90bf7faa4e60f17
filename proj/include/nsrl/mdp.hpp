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

#ifndef NSRL_MDP_HPP_
#define NSRL_MDP_HPP_

#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include "json.hpp"

namespace nsrl {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Raw arrays describing a linear kernel MDP. Feature maps and parameter
// schedules are stored column-wise:
//   phi   : d x (S*A),    column s*A + a
//   psi   : d x (S*A*S),  column (s*A + a)*S + s'
//   theta : d x (K*H),    column (k-1)*H + (h-1)
//   xi    : d x (K*H),    same layout as theta
struct MdpData {
  int num_states = 0;
  int num_actions = 0;
  int horizon = 0;
  int num_episodes = 0;
  int initial_state = 0;
  Matrix phi;
  Matrix psi;
  Matrix theta;
  Matrix xi;
};

// Exact reward and transition tables of one episode, indexed with
// zero-based step h0 = h - 1.
struct EpisodeModel {
  int num_states = 0;
  int num_actions = 0;
  int horizon = 0;
  std::vector<double> rewards;      // [h0][s][a]
  std::vector<double> transitions;  // [h0][s][a][s']

  double reward(int h0, int s, int a) const {
    return rewards[(static_cast<size_t>(h0) * num_states + s) * num_actions + a];
  }
  const double* row(int h0, int s, int a) const {
    return transitions.data() +
           ((static_cast<size_t>(h0) * num_states + s) * num_actions + a) *
               num_states;
  }
};

// Finite-state, finite-action episodic MDP with
//   r_h^k(s,a)    = phi(s,a) . theta_h^k
//   P_h^k(s'|s,a) = psi(s,a,s') . xi_h^k.
// Immutable after construction. Episodes k and steps h are 1-based in every
// accessor, matching the usual k in [1,K], h in [1,H] convention.
class LinearKernelMdp {
 public:
  explicit LinearKernelMdp(MdpData data);

  int num_states() const { return data_.num_states; }
  int num_actions() const { return data_.num_actions; }
  int horizon() const { return data_.horizon; }
  int num_episodes() const { return data_.num_episodes; }
  int initial_state() const { return data_.initial_state; }
  int dim() const { return static_cast<int>(data_.phi.rows()); }
  const MdpData& data() const { return data_; }

  Matrix::ConstColXpr phi(int s, int a) const {
    return data_.phi.col(pair_index(s, a));
  }
  Matrix::ConstColXpr psi(int s, int a, int s_next) const {
    return data_.psi.col(pair_index(s, a) * num_states() + s_next);
  }
  Matrix::ConstColXpr theta(int k, int h) const {
    return data_.theta.col(schedule_index(k, h));
  }
  Matrix::ConstColXpr xi(int k, int h) const {
    return data_.xi.col(schedule_index(k, h));
  }
  // d x S block of psi(s,a,.) columns.
  Matrix::ConstColsBlockXpr psi_block(int s, int a) const {
    return data_.psi.middleCols(pair_index(s, a) * num_states(), num_states());
  }

  int pair_index(int s, int a) const { return s * num_actions() + a; }
  int schedule_index(int k, int h) const { return (k - 1) * horizon() + (h - 1); }

  // Throws kIndex for out-of-range indices.
  double reward(int k, int h, int s, int a) const;
  // Unclamped psi . xi products; no validity checks beyond indices.
  Vector raw_transition_row(int k, int h, int s, int a) const;
  // Probability vector over next states. Entries in [-1e-12, 0) are clamped
  // to zero and the row renormalized; anything worse throws kModelValidity.
  Vector transition_row(int k, int h, int s, int a) const;
  // All rewards and (checked) transition rows of episode k.
  EpisodeModel episode_model(int k) const;

  void check_indices(int k, int h, int s, int a) const;

 private:
  MdpData data_;
};

// Tabulated per-step values. q is indexed (h,s,a) for h in [1,H]; v is
// indexed (h,s) for h in [1,H+1] with v(H+1,.) = 0.
class ValueTables {
 public:
  ValueTables() = default;
  ValueTables(int horizon, int num_states, int num_actions);

  int horizon() const { return horizon_; }
  int num_states() const { return num_states_; }
  int num_actions() const { return num_actions_; }

  double& q(int h, int s, int a) { return q_[q_index(h, s, a)]; }
  double q(int h, int s, int a) const { return q_[q_index(h, s, a)]; }
  double& v(int h, int s) { return v_[v_index(h, s)]; }
  double v(int h, int s) const { return v_[v_index(h, s)]; }

  // Contiguous views of q(h, s, 0..A-1) and v(h, 0..S-1).
  const double* q_row(int h, int s) const { return q_.data() + q_index(h, s, 0); }
  double* q_row(int h, int s) { return q_.data() + q_index(h, s, 0); }
  Eigen::Map<const Vector> v_step(int h) const {
    return Eigen::Map<const Vector>(v_.data() + v_index(h, 0), num_states_);
  }

  const std::vector<double>& q_data() const { return q_; }
  const std::vector<double>& v_data() const { return v_; }

 private:
  size_t q_index(int h, int s, int a) const {
    return (static_cast<size_t>(h - 1) * num_states_ + s) * num_actions_ + a;
  }
  size_t v_index(int h, int s) const {
    return static_cast<size_t>(h - 1) * num_states_ + s;
  }

  int horizon_ = 0;
  int num_states_ = 0;
  int num_actions_ = 0;
  std::vector<double> q_;
  std::vector<double> v_;
};

// eta(s,a) = sum_{s'} psi(s,a,s') v_next(s'), one column per pair s*A + a.
Matrix eta_vector(const LinearKernelMdp& mdp, const Eigen::Ref<const Vector>& v_next);

struct VariationBudgets {
  double reward = 0.0;      // B_T
  double transition = 0.0;  // B_P
  double total = 0.0;       // Delta = B_T + B_P
};

// Sum over h and k of ||theta_h^{k-1} - theta_h^k||_2 (theta_h^0 := theta_h^1),
// likewise for xi.
VariationBudgets variation_budgets(const LinearKernelMdp& mdp);

struct Violation {
  std::string invariant;
  int k = 0;  // 0 when the invariant does not depend on the episode
  int h = 0;
  int s = -1;
  int a = -1;
  double value = 0.0;
};

struct ValidationReport {
  // At most kMaxWitnesses entries per invariant are kept; counts holds the
  // full number of failures.
  static constexpr int kMaxWitnesses = 64;

  std::vector<Violation> violations;
  std::map<std::string, long> counts;

  bool clean() const { return counts.empty(); }
  nlohmann::json to_json() const;
};

namespace invariant {
inline constexpr const char* kPhiNorm = "phi_norm";
inline constexpr const char* kThetaNorm = "theta_norm";
inline constexpr const char* kXiNorm = "xi_norm";
inline constexpr const char* kPsiIntegral = "psi_integral";
inline constexpr const char* kTransitionRow = "transition_row";
inline constexpr const char* kRewardRange = "reward_range";
}  // namespace invariant

ValidationReport validate_mdp(const LinearKernelMdp& mdp);

// JSON document with fields num_states, num_actions, horizon, num_episodes,
// initial_state, phi[s][a][i], psi[s][a][s'][i], theta[k][h][i], xi[k][h][i].
nlohmann::json mdp_to_json(const LinearKernelMdp& mdp);
LinearKernelMdp mdp_from_json(const nlohmann::json& doc);
LinearKernelMdp load_mdp(const std::string& path);
void save_mdp(const LinearKernelMdp& mdp, const std::string& path);

}  // namespace nsrl

#endif  // NSRL_MDP_HPP_
