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

// Small model builders shared by the unit tests.

#ifndef NSRL_TESTS_FIXTURES_HPP_
#define NSRL_TESTS_FIXTURES_HPP_

#include <random>
#include <vector>

#include "nsrl/mdp.hpp"
#include "oracles.hpp"

namespace fixture {

// Random rewards in [0,1] and random transition rows, one table per step.
inline oracle::Tabular RandomTabular(int S, int A, int H, std::mt19937_64& gen,
                                     double sparsity = 0.0) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  oracle::Tabular m;
  m.S = S;
  m.A = A;
  m.H = H;
  m.r.assign(H, std::vector<oracle::Vec>(S, oracle::Vec(A)));
  m.p.assign(H, std::vector<std::vector<oracle::Vec>>(S, std::vector<oracle::Vec>(A, oracle::Vec(S))));
  for (int h = 0; h < H; ++h) {
    for (int s = 0; s < S; ++s) {
      for (int a = 0; a < A; ++a) {
        m.r[h][s][a] = unit(gen);
        double total = 0.0;
        for (int s2 = 0; s2 < S; ++s2) {
          const double w = unit(gen) < sparsity ? 0.0 : unit(gen) + 1e-3;
          m.p[h][s][a][s2] = w;
          total += w;
        }
        if (total == 0.0) {
          m.p[h][s][a][0] = 1.0;
          total = 1.0;
        }
        for (int s2 = 0; s2 < S; ++s2) m.p[h][s][a][s2] /= total;
      }
    }
  }
  return m;
}

// Canonical-basis embedding of per-episode tables: d = S*A*S,
// phi(s,a) = e_{(s,a,0)}, psi(s,a,s') = e_{(s,a,s')}.
inline nsrl::LinearKernelMdp Embed(const std::vector<oracle::Tabular>& episodes, int initial_state = 0) {
  const oracle::Tabular& first = episodes.front();
  const int S = first.S, A = first.A, H = first.H, K = static_cast<int>(episodes.size());
  const int d = S * A * S;
  nsrl::MdpData data;
  data.num_states = S;
  data.num_actions = A;
  data.horizon = H;
  data.num_episodes = K;
  data.initial_state = initial_state;
  data.phi = nsrl::Matrix::Zero(d, S * A);
  data.psi = nsrl::Matrix::Zero(d, S * A * S);
  data.theta = nsrl::Matrix::Zero(d, K * H);
  data.xi = nsrl::Matrix::Zero(d, K * H);
  for (int s = 0; s < S; ++s) {
    for (int a = 0; a < A; ++a) {
      data.phi((s * A + a) * S, s * A + a) = 1.0;
      for (int s2 = 0; s2 < S; ++s2) data.psi((s * A + a) * S + s2, (s * A + a) * S + s2) = 1.0;
    }
  }
  for (int k = 0; k < K; ++k) {
    for (int h = 0; h < H; ++h) {
      for (int s = 0; s < S; ++s) {
        for (int a = 0; a < A; ++a) {
          data.theta((s * A + a) * S, k * H + h) = episodes[k].r[h][s][a];
          for (int s2 = 0; s2 < S; ++s2) {
            data.xi((s * A + a) * S + s2, k * H + h) = episodes[k].p[h][s][a][s2];
          }
        }
      }
    }
  }
  return nsrl::LinearKernelMdp(std::move(data));
}

inline nsrl::LinearKernelMdp RandomEmbedded(int S, int A, int H, int K, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::vector<oracle::Tabular> eps;
  for (int k = 0; k < K; ++k) eps.push_back(RandomTabular(S, A, H, gen));
  return Embed(eps);
}

// Stationary version of RandomEmbedded: one table reused for all K episodes.
inline nsrl::LinearKernelMdp RandomStationary(int S, int A, int H, int K, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  return Embed(std::vector<oracle::Tabular>(K, RandomTabular(S, A, H, gen)));
}

}  // namespace fixture

#endif  // NSRL_TESTS_FIXTURES_HPP_
