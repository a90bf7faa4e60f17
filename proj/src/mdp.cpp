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

#include "nsrl/mdp.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "nsrl/error.hpp"

namespace nsrl {

namespace {

constexpr double kNegativeSlack = 1e-12;
constexpr double kSumTolerance = 1e-10;
constexpr double kNormSlack = 1e-12;

std::string Where(int k, int h, int s, int a) {
  std::ostringstream out;
  out << "(k=" << k << ", h=" << h << ", s=" << s << ", a=" << a << ")";
  return out.str();
}

}  // namespace

const char* ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kIndex: return "index error";
    case ErrorCode::kShape: return "shape error";
    case ErrorCode::kModelValidity: return "model-validity error";
    case ErrorCode::kParameter: return "parameter error";
    case ErrorCode::kCapacity: return "capacity error";
    case ErrorCode::kSchedule: return "schedule error";
    case ErrorCode::kLinearAlgebra: return "linear-algebra error";
    case ErrorCode::kIncompleteRecord: return "incomplete-record error";
    case ErrorCode::kConfig: return "config error";
    case ErrorCode::kIo: return "io error";
    case ErrorCode::kInvariant: return "invariant error";
  }
  return "error";
}

LinearKernelMdp::LinearKernelMdp(MdpData data) : data_(std::move(data)) {
  const auto& d = data_;
  if (d.num_states < 1 || d.num_actions < 1 || d.horizon < 1 ||
      d.num_episodes < 1) {
    Fail(ErrorCode::kShape, "num_states, num_actions, horizon and num_episodes must be >= 1");
  }
  if (d.initial_state < 0 || d.initial_state >= d.num_states) {
    Fail(ErrorCode::kIndex, "initial_state out of range");
  }
  const Eigen::Index dim = d.phi.rows();
  if (dim < 1) Fail(ErrorCode::kShape, "feature dimension must be >= 1");
  const Eigen::Index pairs = static_cast<Eigen::Index>(d.num_states) * d.num_actions;
  const Eigen::Index slots = static_cast<Eigen::Index>(d.num_episodes) * d.horizon;
  auto expect = [&](const Matrix& m, Eigen::Index cols, const char* name) {
    if (m.rows() != dim || m.cols() != cols) {
      std::ostringstream out;
      out << name << " has shape " << m.rows() << "x" << m.cols() << ", expected "
          << dim << "x" << cols;
      Fail(ErrorCode::kShape, out.str());
    }
    if (!m.allFinite()) Fail(ErrorCode::kModelValidity, std::string(name) + " has non-finite entries");
  };
  expect(d.phi, pairs, "phi");
  expect(d.psi, pairs * d.num_states, "psi");
  expect(d.theta, slots, "theta");
  expect(d.xi, slots, "xi");
}

void LinearKernelMdp::check_indices(int k, int h, int s, int a) const {
  if (k < 1 || k > num_episodes() || h < 1 || h > horizon() || s < 0 ||
      s >= num_states() || a < 0 || a >= num_actions()) {
    Fail(ErrorCode::kIndex, "index out of range " + Where(k, h, s, a));
  }
}

double LinearKernelMdp::reward(int k, int h, int s, int a) const {
  check_indices(k, h, s, a);
  return phi(s, a).dot(theta(k, h));
}

Vector LinearKernelMdp::raw_transition_row(int k, int h, int s, int a) const {
  check_indices(k, h, s, a);
  return psi_block(s, a).transpose() * xi(k, h);
}

namespace {

// Clamps tiny negatives, renormalizes; returns false if the row is not a
// distribution within tolerance.
bool SanitizeRow(double* row, int n) {
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    if (!(row[i] >= -kNegativeSlack) || row[i] > 1.0 + kSumTolerance) return false;
    if (row[i] < 0.0) row[i] = 0.0;
    sum += row[i];
  }
  if (std::abs(sum - 1.0) > kSumTolerance) return false;
  for (int i = 0; i < n; ++i) row[i] /= sum;
  return true;
}

}  // namespace

Vector LinearKernelMdp::transition_row(int k, int h, int s, int a) const {
  Vector row = raw_transition_row(k, h, s, a);
  if (!SanitizeRow(row.data(), num_states())) {
    Fail(ErrorCode::kModelValidity,
         "transition row is not a probability distribution " + Where(k, h, s, a));
  }
  return row;
}

EpisodeModel LinearKernelMdp::episode_model(int k) const {
  if (k < 1 || k > num_episodes()) Fail(ErrorCode::kIndex, "episode out of range");
  const int S = num_states(), A = num_actions(), H = horizon();
  EpisodeModel model;
  model.num_states = S;
  model.num_actions = A;
  model.horizon = H;
  model.rewards.resize(static_cast<size_t>(H) * S * A);
  model.transitions.resize(static_cast<size_t>(H) * S * A * S);
  // One product per step gives every (s,a,s') probability at once.
  Eigen::RowVectorXd probs;
  Eigen::RowVectorXd rewards;
  for (int h = 1; h <= H; ++h) {
    probs.noalias() = xi(k, h).transpose() * data_.psi;
    rewards.noalias() = theta(k, h).transpose() * data_.phi;
    const size_t base = static_cast<size_t>(h - 1) * S * A;
    for (int p = 0; p < S * A; ++p) model.rewards[base + p] = rewards(p);
    double* out = model.transitions.data() + base * S;
    std::copy(probs.data(), probs.data() + probs.size(), out);
    for (int s = 0; s < S; ++s) {
      for (int a = 0; a < A; ++a) {
        if (!SanitizeRow(out + static_cast<size_t>(pair_index(s, a)) * S, S)) {
          Fail(ErrorCode::kModelValidity,
               "transition row is not a probability distribution " + Where(k, h, s, a));
        }
      }
    }
  }
  return model;
}

ValueTables::ValueTables(int horizon, int num_states, int num_actions)
    : horizon_(horizon),
      num_states_(num_states),
      num_actions_(num_actions),
      q_(static_cast<size_t>(horizon) * num_states * num_actions, 0.0),
      v_(static_cast<size_t>(horizon + 1) * num_states, 0.0) {}

Matrix eta_vector(const LinearKernelMdp& mdp, const Eigen::Ref<const Vector>& v_next) {
  if (v_next.size() != mdp.num_states()) {
    Fail(ErrorCode::kShape, "v_next must have one entry per state");
  }
  const int S = mdp.num_states(), A = mdp.num_actions();
  Matrix eta(mdp.dim(), S * A);
  for (int s = 0; s < S; ++s) {
    for (int a = 0; a < A; ++a) {
      eta.col(mdp.pair_index(s, a)).noalias() = mdp.psi_block(s, a) * v_next;
    }
  }
  return eta;
}

VariationBudgets variation_budgets(const LinearKernelMdp& mdp) {
  VariationBudgets out;
  for (int h = 1; h <= mdp.horizon(); ++h) {
    for (int k = 2; k <= mdp.num_episodes(); ++k) {
      out.reward += (mdp.theta(k - 1, h) - mdp.theta(k, h)).norm();
      out.transition += (mdp.xi(k - 1, h) - mdp.xi(k, h)).norm();
    }
  }
  out.total = out.reward + out.transition;
  return out;
}

nlohmann::json ValidationReport::to_json() const {
  nlohmann::json doc;
  doc["clean"] = clean();
  doc["counts"] = nlohmann::json::object();
  for (const auto& [name, count] : counts) doc["counts"][name] = count;
  doc["violations"] = nlohmann::json::array();
  for (const auto& v : violations) {
    doc["violations"].push_back({{"invariant", v.invariant},
                                 {"k", v.k},
                                 {"h", v.h},
                                 {"s", v.s},
                                 {"a", v.a},
                                 {"value", v.value}});
  }
  return doc;
}

ValidationReport validate_mdp(const LinearKernelMdp& mdp) {
  ValidationReport report;
  auto flag = [&](const char* name, int k, int h, int s, int a, double value) {
    long& count = report.counts[name];
    if (count < ValidationReport::kMaxWitnesses) {
      report.violations.push_back({name, k, h, s, a, value});
    }
    ++count;
  };
  const int S = mdp.num_states(), A = mdp.num_actions();
  const int H = mdp.horizon(), K = mdp.num_episodes();
  const double sqrt_d = std::sqrt(static_cast<double>(mdp.dim()));
  const double param_bound = sqrt_d * (1.0 + kNormSlack);

  for (int s = 0; s < S; ++s) {
    for (int a = 0; a < A; ++a) {
      const double phi_norm = mdp.phi(s, a).norm();
      if (phi_norm > 1.0 + kNormSlack) flag(invariant::kPhiNorm, 0, 0, s, a, phi_norm);
      double integral = 0.0;
      for (int sn = 0; sn < S; ++sn) integral += mdp.psi(s, a, sn).norm();
      if (integral > param_bound) flag(invariant::kPsiIntegral, 0, 0, s, a, integral);
    }
  }

  const Matrix& psi = mdp.data().psi;
  const Matrix& phi = mdp.data().phi;
  Eigen::RowVectorXd probs, rewards;
  for (int k = 1; k <= K; ++k) {
    for (int h = 1; h <= H; ++h) {
      const double theta_norm = mdp.theta(k, h).norm();
      if (theta_norm > param_bound) flag(invariant::kThetaNorm, k, h, -1, -1, theta_norm);
      const double xi_norm = mdp.xi(k, h).norm();
      if (xi_norm > param_bound) flag(invariant::kXiNorm, k, h, -1, -1, xi_norm);

      rewards.noalias() = mdp.theta(k, h).transpose() * phi;
      probs.noalias() = mdp.xi(k, h).transpose() * psi;
      for (int s = 0; s < S; ++s) {
        for (int a = 0; a < A; ++a) {
          const int p = mdp.pair_index(s, a);
          const double r = rewards(p);
          if (!(r >= -kNegativeSlack && r <= 1.0 + kNegativeSlack)) {
            flag(invariant::kRewardRange, k, h, s, a, r);
          }
          double sum = 0.0;
          bool entries_ok = true;
          for (int sn = 0; sn < S; ++sn) {
            const double pr = probs(p * S + sn);
            if (!(pr >= -kNegativeSlack && pr <= 1.0 + kSumTolerance)) entries_ok = false;
            sum += pr;
          }
          if (!entries_ok || !(std::abs(sum - 1.0) <= kSumTolerance)) {
            flag(invariant::kTransitionRow, k, h, s, a, sum);
          }
        }
      }
    }
  }
  return report;
}

// ---------------------------------------------------------------------------
// JSON

nlohmann::json mdp_to_json(const LinearKernelMdp& mdp) {
  const int S = mdp.num_states(), A = mdp.num_actions();
  const int H = mdp.horizon(), K = mdp.num_episodes(), d = mdp.dim();
  auto vec = [d](const auto& col) {
    std::vector<double> out(d);
    for (int i = 0; i < d; ++i) out[i] = col(i);
    return out;
  };
  nlohmann::json doc;
  doc["num_states"] = S;
  doc["num_actions"] = A;
  doc["horizon"] = H;
  doc["num_episodes"] = K;
  doc["initial_state"] = mdp.initial_state();
  auto& phi = doc["phi"] = nlohmann::json::array();
  auto& psi = doc["psi"] = nlohmann::json::array();
  for (int s = 0; s < S; ++s) {
    nlohmann::json phi_s = nlohmann::json::array();
    nlohmann::json psi_s = nlohmann::json::array();
    for (int a = 0; a < A; ++a) {
      phi_s.push_back(vec(mdp.phi(s, a)));
      nlohmann::json psi_sa = nlohmann::json::array();
      for (int sn = 0; sn < S; ++sn) psi_sa.push_back(vec(mdp.psi(s, a, sn)));
      psi_s.push_back(std::move(psi_sa));
    }
    phi.push_back(std::move(phi_s));
    psi.push_back(std::move(psi_s));
  }
  auto& theta = doc["theta"] = nlohmann::json::array();
  auto& xi = doc["xi"] = nlohmann::json::array();
  for (int k = 1; k <= K; ++k) {
    nlohmann::json theta_k = nlohmann::json::array();
    nlohmann::json xi_k = nlohmann::json::array();
    for (int h = 1; h <= H; ++h) {
      theta_k.push_back(vec(mdp.theta(k, h)));
      xi_k.push_back(vec(mdp.xi(k, h)));
    }
    theta.push_back(std::move(theta_k));
    xi.push_back(std::move(xi_k));
  }
  return doc;
}

namespace {

const nlohmann::json& Field(const nlohmann::json& doc, const char* name) {
  auto it = doc.find(name);
  if (it == doc.end()) Fail(ErrorCode::kConfig, std::string("missing field '") + name + "'");
  return *it;
}

int IntField(const nlohmann::json& doc, const char* name) {
  const auto& v = Field(doc, name);
  if (!v.is_number_integer()) Fail(ErrorCode::kConfig, std::string("field '") + name + "' must be an integer");
  return v.get<int>();
}

// Reads a nested array of the given extents (outer to inner, last = d) into
// column-major storage where every innermost vector becomes one column.
void ReadNested(const nlohmann::json& node, const std::vector<int>& extents, size_t level,
                Matrix& out, Eigen::Index& column, const std::string& name) {
  if (!node.is_array() || static_cast<int>(node.size()) != extents[level]) {
    Fail(ErrorCode::kShape, "field '" + name + "' has wrong nesting or extent at depth " +
                                std::to_string(level));
  }
  if (level + 1 == extents.size()) {
    for (int i = 0; i < extents[level]; ++i) {
      if (!node[i].is_number()) Fail(ErrorCode::kConfig, "field '" + name + "' has a non-numeric entry");
      out(i, column) = node[i].get<double>();
    }
    ++column;
    return;
  }
  for (const auto& child : node) ReadNested(child, extents, level + 1, out, column, name);
}

}  // namespace

LinearKernelMdp mdp_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) Fail(ErrorCode::kConfig, "MDP document must be a JSON object");
  static const char* kKnown[] = {"num_states", "num_actions", "horizon", "num_episodes",
                                 "initial_state", "phi", "psi", "theta", "xi"};
  for (const auto& item : doc.items()) {
    if (std::find(std::begin(kKnown), std::end(kKnown), item.key()) == std::end(kKnown)) {
      Fail(ErrorCode::kConfig, "unknown field '" + item.key() + "'");
    }
  }
  MdpData data;
  data.num_states = IntField(doc, "num_states");
  data.num_actions = IntField(doc, "num_actions");
  data.horizon = IntField(doc, "horizon");
  data.num_episodes = IntField(doc, "num_episodes");
  data.initial_state = IntField(doc, "initial_state");
  const int S = data.num_states, A = data.num_actions, H = data.horizon, K = data.num_episodes;
  if (S < 1 || A < 1 || H < 1 || K < 1) Fail(ErrorCode::kShape, "dimensions must be >= 1");

  const auto& phi = Field(doc, "phi");
  int d = 0;
  if (phi.is_array() && !phi.empty() && phi[0].is_array() && !phi[0].empty() &&
      phi[0][0].is_array()) {
    d = static_cast<int>(phi[0][0].size());
  }
  if (d < 1) Fail(ErrorCode::kShape, "cannot infer feature dimension from phi");

  auto read = [&](const char* name, std::vector<int> extents) {
    long cols = 1;
    for (size_t i = 0; i + 1 < extents.size(); ++i) cols *= extents[i];
    Matrix m(d, cols);
    Eigen::Index column = 0;
    ReadNested(Field(doc, name), extents, 0, m, column, name);
    return m;
  };
  data.phi = read("phi", {S, A, d});
  data.psi = read("psi", {S, A, S, d});
  data.theta = read("theta", {K, H, d});
  data.xi = read("xi", {K, H, d});
  return LinearKernelMdp(std::move(data));
}

LinearKernelMdp load_mdp(const std::string& path) {
  std::ifstream in(path);
  if (!in) Fail(ErrorCode::kIo, "cannot open " + path);
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    Fail(ErrorCode::kConfig, path + ": " + e.what());
  }
  return mdp_from_json(doc);
}

void save_mdp(const LinearKernelMdp& mdp, const std::string& path) {
  std::ofstream out(path);
  if (!out) Fail(ErrorCode::kIo, "cannot write " + path);
  out << mdp_to_json(mdp).dump() << '\n';
}

}  // namespace nsrl
