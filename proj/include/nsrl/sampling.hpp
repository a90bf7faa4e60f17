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

#ifndef NSRL_SAMPLING_HPP_
#define NSRL_SAMPLING_HPP_

#include <vector>

#include "nsrl/mdp.hpp"
#include "nsrl/policy.hpp"
#include "nsrl/rng.hpp"

namespace nsrl {

// States s_1..s_{H+1}, actions a_1..a_H and observed rewards r_1..r_H of one
// episode, stored zero-based (states[h-1] is s_h).
struct Trajectory {
  std::vector<int> states;
  std::vector<int> actions;
  std::vector<double> rewards;
};

// Rolls out pi in episode k from the initial state, drawing actions and next
// states by inverse CDF from `rng`.
Trajectory sample_episode(const LinearKernelMdp& mdp, int k, const Policy& pi, Rng& rng);

}  // namespace nsrl

#endif  // NSRL_SAMPLING_HPP_
