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

#include "nsrl/sampling.hpp"

#include "nsrl/error.hpp"

namespace nsrl {

Trajectory sample_episode(const LinearKernelMdp& mdp, int k, const Policy& pi, Rng& rng) {
  const int H = mdp.horizon();
  if (pi.horizon() != H || pi.num_states() != mdp.num_states() ||
      pi.num_actions() != mdp.num_actions()) {
    Fail(ErrorCode::kShape, "policy shape does not match the MDP");
  }
  Trajectory traj;
  traj.states.reserve(H + 1);
  traj.actions.reserve(H);
  traj.rewards.reserve(H);
  int s = mdp.initial_state();
  traj.states.push_back(s);
  for (int h = 1; h <= H; ++h) {
    const int a = rng.categorical(pi.dist(h, s), mdp.num_actions());
    traj.actions.push_back(a);
    traj.rewards.push_back(mdp.reward(k, h, s, a));
    const Vector row = mdp.transition_row(k, h, s, a);
    s = rng.categorical(row, mdp.num_states());
    traj.states.push_back(s);
  }
  return traj;
}

}  // namespace nsrl
