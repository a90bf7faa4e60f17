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

#include <random>

#include "doctest.h"
#include "fixtures.hpp"
#include "nsrl/algorithms.hpp"
#include "nsrl/error.hpp"
#include "nsrl/oracle.hpp"

using nsrl::Algorithm;
using nsrl::Hyperparams;

namespace {

Hyperparams Basic(int K, double beta = 0.5, double beta_prime = 0.5) {
  Hyperparams hp;
  hp.tau = K;
  hp.alpha = 0.5;
  hp.w = K;
  hp.beta = beta;
  hp.beta_prime = beta_prime;
  return hp;
}

bool SameRun(const nsrl::RunRecord& a, const nsrl::RunRecord& b) {
  if (a.episodes.size() != b.episodes.size()) return false;
  for (size_t i = 0; i < a.episodes.size(); ++i) {
    const auto& x = a.episodes[i];
    const auto& y = b.episodes[i];
    if (x.states != y.states || x.actions != y.actions || x.rewards != y.rewards ||
        !(x.policy == y.policy) || x.restarted != y.restarted) {
      return false;
    }
    if (x.values.has_value() != y.values.has_value()) return false;
    if (x.values && (x.values->q_data() != y.values->q_data())) return false;
  }
  return true;
}

double FinalRegret(const nsrl::LinearKernelMdp& mdp, const nsrl::RunRecord& run) {
  return nsrl::dynamic_regret(mdp, run).cumulative_regret.back();
}

}  // namespace

TEST_CASE("auto hyperparameters") {
  SUBCASE("stationary limit") {
    const auto hp = nsrl::auto_hyperparams(4, 3, 200, 5, 0.0, 0.0);
    CHECK(hp.tau == 200);
    CHECK(hp.w == 200);
    CHECK(nsrl::restart_count(hp.tau, 200) == 1);
    CHECK(std::abs(hp.alpha - std::sqrt(std::log(5.0) / (9.0 * 200))) <= 1e-15);
    CHECK(hp.lambda == 1.0);
    CHECK(hp.lambda_prime == 1.0);
  }
  SUBCASE("bonus multipliers") {
    const auto hp = nsrl::auto_hyperparams(4, 2, 100, 2, 0.0, 0.0);
    CHECK(std::abs(hp.beta - 2.0) <= 1e-15);
    CHECK(std::abs(hp.beta_prime - std::sqrt(16.0 * std::log(16000.0))) <= 1e-12);
  }
  SUBCASE("large drift restarts every episode") {
    const int K = 50;
    const double big = K * std::sqrt(std::log(3.0));
    const auto hp = nsrl::auto_hyperparams(4, 2, K, 3, 0.0, big);
    CHECK(hp.tau == 1);
    CHECK(nsrl::restart_count(1, K) == K);
    CHECK(std::abs(hp.alpha - std::sqrt(K * std::log(3.0) / (4.0 * K))) <= 1e-15);
  }
  SUBCASE("moderate drift formulas") {
    const int d = 8, H = 3, K = 400, A = 4;
    const double delta = 2.0, pt = 5.0, T = H * K;
    const auto hp = nsrl::auto_hyperparams(d, H, K, A, delta, pt);
    const int tau = static_cast<int>(
        std::floor(std::pow(T * std::sqrt(std::log(A)) / (H * (pt + std::sqrt(d) * delta)), 2.0 / 3.0)));
    CHECK(hp.tau == tau);
    const double rho = std::ceil(double(K) / tau);
    CHECK(std::abs(hp.alpha - std::sqrt(rho * std::log(A) / (H * H * K))) <= 1e-15);
    CHECK(hp.w == std::min(K, static_cast<int>(std::ceil(std::cbrt(d) * std::pow(delta, -2.0 / 3.0) *
                                                         std::pow(T, 2.0 / 3.0)))));
    nsrl::AutoKnobs quarter;
    quarter.window_rule = nsrl::WindowRule::kQuarter;
    const auto hq = nsrl::auto_hyperparams(d, H, K, A, delta, pt, quarter);
    CHECK(hq.w == static_cast<int>(std::ceil(std::pow(delta, -0.25) * std::pow(T, 0.25))));
  }
  SUBCASE("knob validation") {
    nsrl::AutoKnobs bad;
    bad.zeta = 0.0;
    CHECK_THROWS_AS(nsrl::auto_hyperparams(4, 2, 10, 2, 0.0, 0.0, bad), nsrl::Error);
    bad.zeta = 1.5;
    CHECK_THROWS_AS(nsrl::auto_hyperparams(4, 2, 10, 2, 0.0, 0.0, bad), nsrl::Error);
  }
}

TEST_CASE("hyperparameter validation") {
  Hyperparams hp = Basic(10);
  CHECK_NOTHROW(hp.validate(10));
  hp.tau = 11;
  CHECK_THROWS_AS(hp.validate(10), nsrl::Error);
  hp = Basic(10);
  hp.alpha = 0.0;
  CHECK_THROWS_AS(hp.validate(10), nsrl::Error);
  hp = Basic(10);
  hp.lambda = 0.0;
  CHECK_THROWS_AS(hp.validate(10), nsrl::Error);
  hp = Basic(10);
  hp.beta_prime = -1.0;
  CHECK_THROWS_AS(hp.validate(10), nsrl::Error);
}

TEST_CASE("empty history gives pure-bonus Q") {
  const int S = 3, A = 2, H = 3;
  const auto mdp = fixture::RandomStationary(S, A, H, 5, 3);
  const nsrl::StepHistory history(H, mdp.dim());
  Hyperparams hp = Basic(5, 0.3, 0.2);
  const auto pi = nsrl::Policy::uniform(H, S, A);
  const auto ev = nsrl::swope(mdp, 1, pi, history, hp);
  // Canonical embedding: ||phi|| = 1 and ||eta(s,a)|| = ||V_{h+1}||_2.
  std::vector<double> v_next(S, 0.0);
  for (int h = H; h >= 1; --h) {
    double norm = 0.0;
    for (double v : v_next) norm += v * v;
    const double q = std::min(0.3 + 0.2 * std::sqrt(norm), double(H - h + 1));
    for (int s = 0; s < S; ++s) {
      for (int a = 0; a < A; ++a) CHECK(std::abs(ev.tables.q(h, s, a) - q) <= 1e-14);
    }
    std::fill(v_next.begin(), v_next.end(), q);
  }
  CHECK(ev.window_fill == 0);

  hp.beta = 50.0;
  const auto capped = nsrl::swope(mdp, 1, pi, history, hp);
  for (int h = 1; h <= H; ++h) CHECK(capped.tables.q(h, 0, 0) == double(H - h + 1));

  const auto full = nsrl::swope_full_information(mdp, 1, pi, history, Basic(5, 0.3, 0.0));
  for (int h = 1; h <= H; ++h) {
    for (int s = 0; s < S; ++s) {
      for (int a = 0; a < A; ++a) CHECK(full.tables.q(h, s, a) == doctest::Approx(mdp.reward(1, h, s, a)));
    }
  }
}

TEST_CASE("greedy evaluation takes the max and breaks ties low") {
  const auto mdp = fixture::RandomStationary(3, 4, 2, 40, 8);
  const auto run = nsrl::sw_lsvi_ucb_run(mdp, Basic(40), 1);
  for (int h = 1; h <= 2; ++h) {
    for (int s = 0; s < 3; ++s) CHECK(run.episodes[0].policy.prob(h, s, 0) == 1.0);
  }
  for (const auto& ep : run.episodes) {
    const auto& t = *ep.values;
    for (int h = 1; h <= 2; ++h) {
      for (int s = 0; s < 3; ++s) {
        double best = -1.0;
        int arg = -1;
        for (int a = 0; a < 4; ++a) {
          if (t.q(h, s, a) > best) best = t.q(h, s, a), arg = a;
        }
        CHECK(t.v(h, s) == best);
        CHECK(ep.policy.prob(h, s, arg) == 1.0);
      }
    }
  }
}

TEST_CASE("restarts reset to uniform and windows fill as min(w, k-1)") {
  const int K = 20;
  const auto mdp = fixture::RandomEmbedded(3, 3, 2, K, 4);
  Hyperparams hp = Basic(K);
  hp.tau = 6;
  hp.w = 4;
  hp.alpha = 3.0;
  const auto uniform = nsrl::Policy::uniform(2, 3, 3);
  for (Algorithm alg : {Algorithm::kPropo, Algorithm::kPropoAdversarial}) {
    const auto run = nsrl::run_algorithm(alg, mdp, hp, 5);
    for (const auto& ep : run.episodes) {
      CHECK(ep.restarted == ((ep.k - 1) % 6 == 0));
      if (ep.restarted) CHECK(ep.policy == uniform);
      CHECK(ep.window_fill == std::min(4, ep.k - 1));
    }
    CHECK_FALSE(run.episodes[2].policy == uniform);
  }
  const auto lsvi = nsrl::sw_lsvi_ucb_run(mdp, hp, 5);
  for (const auto& ep : lsvi.episodes) CHECK(ep.window_fill == std::min(4, ep.k - 1));
}

TEST_CASE("runs are deterministic in the seed") {
  const auto mdp = fixture::RandomEmbedded(3, 2, 3, 30, 10);
  Hyperparams hp = Basic(30);
  hp.tau = 7;
  hp.w = 9;
  for (Algorithm alg : {Algorithm::kPropo, Algorithm::kSwLsviUcb, Algorithm::kPropoAdversarial}) {
    CAPTURE(nsrl::algorithm_name(alg));
    const auto a = nsrl::run_algorithm(alg, mdp, hp, 77);
    const auto b = nsrl::run_algorithm(alg, mdp, hp, 77);
    const auto c = nsrl::run_algorithm(alg, mdp, hp, 78);
    CHECK(SameRun(a, b));
    CHECK_FALSE(SameRun(a, c));
  }
}

TEST_CASE("a window covering the whole run equals full history") {
  const int K = 25;
  const auto mdp = fixture::RandomStationary(3, 2, 2, K, 12);
  Hyperparams hp = Basic(K);
  Hyperparams wide = hp;
  wide.w = 50 * K;
  CHECK(SameRun(nsrl::sw_lsvi_ucb_run(mdp, hp, 3), nsrl::sw_lsvi_ucb_run(mdp, wide, 3)));
  CHECK(SameRun(nsrl::propo_run(mdp, hp, 3), nsrl::propo_run(mdp, wide, 3)));
}

TEST_CASE("unregularized evaluation converges to the true policy values") {
  const int K = 501, H = 2;
  const auto mdp = fixture::RandomStationary(2, 2, H, K, 21);
  Hyperparams hp = Basic(K, 0.0, 0.0);
  hp.alpha = 0.01;
  hp.lambda = hp.lambda_prime = 1e-3;
  const auto run = nsrl::propo_run(mdp, hp, 2);
  const auto& last = run.episodes.back();
  const auto truth = nsrl::policy_tables(mdp.episode_model(K), last.policy);
  double worst = 0.0;
  for (int h = 1; h <= H; ++h) {
    for (int s = 0; s < 2; ++s) {
      // Step 1 only ever sees the initial state.
      if (h == 1 && s != mdp.initial_state()) continue;
      for (int a = 0; a < 2; ++a) worst = std::max(worst, std::abs(last.values->q(h, s, a) - truth.q(h, s, a)));
    }
  }
  CHECK(worst <= 0.05);
}

TEST_CASE("model prediction error") {
  const auto mdp = fixture::RandomEmbedded(3, 2, 3, 15, 13);
  const auto run = nsrl::propo_run(mdp, Basic(15), 4);
  for (const auto& ep : run.episodes) {
    for (int h = 1; h <= 3; ++h) {
      for (double l : nsrl::model_prediction_error(mdp, ep.k, h, *ep.values)) {
        CHECK(std::abs(l) <= 2.0 * 3);
      }
    }
  }
  // Tables of the true model give zero error.
  const auto model = mdp.episode_model(7);
  const auto exact = nsrl::policy_tables(model, nsrl::Policy::uniform(3, 3, 2));
  for (int h = 1; h <= 3; ++h) {
    for (double l : nsrl::model_prediction_error(mdp, 7, h, exact)) CHECK(std::abs(l) <= 1e-14);
  }
}

TEST_CASE("parameter drift and sandwich bounds") {
  const auto stationary = fixture::RandomStationary(2, 2, 2, 10, 1);
  const nsrl::ParameterDrift none(stationary);
  CHECK(none.theta(1, 8, 3) == 0.0);
  const auto bounds = nsrl::ucb_sandwich(stationary, none, 8, 1, 3, 0.25, 0.5);
  CHECK(bounds.lower == -1.5);
  CHECK(bounds.upper == 0.0);

  const auto mdp = fixture::RandomEmbedded(2, 2, 2, 10, 2);
  const nsrl::ParameterDrift drift(mdp);
  for (int k = 1; k <= 10; ++k) {
    for (int w : {1, 3, 20}) {
      double th = 0.0, xi = 0.0;
      for (int i = std::max(1, k - w); i <= k - 1; ++i) {
        th += (mdp.theta(i, 2) - mdp.theta(i + 1, 2)).norm();
        xi += (mdp.xi(i, 2) - mdp.xi(i + 1, 2)).norm();
      }
      CHECK(std::abs(drift.theta(2, k, w) - th) <= 1e-12);
      CHECK(std::abs(drift.xi(2, k, w) - xi) <= 1e-12);
    }
  }
}

TEST_CASE("run invariants hold on random instances") {
  std::mt19937_64 gen(31);
  for (int trial = 0; trial < 6; ++trial) {
    const int S = 2 + trial % 3, A = 2 + trial % 2, H = 1 + trial % 3, K = 40;
    const auto mdp = fixture::RandomEmbedded(S, A, H, K, gen());
    Hyperparams hp = Basic(K, 0.1 * trial, 0.3);
    hp.tau = 1 + trial * 3;
    hp.w = 2 + trial * 5;
    for (Algorithm alg : {Algorithm::kPropo, Algorithm::kSwLsviUcb, Algorithm::kPropoAdversarial}) {
      const auto run = nsrl::run_algorithm(alg, mdp, hp, trial);
      const auto report = nsrl::dynamic_regret(mdp, run);
      CHECK(nsrl::run_invariant_violations(mdp, run, report).empty());
      CHECK(report.cumulative_regret.back() <= double(K) * H);
    }
  }
}

TEST_CASE("full-information rewards do not hurt on stationary instances") {
  const int K = 400;
  double propo = 0.0, adversarial = 0.0;
  for (int seed = 0; seed < 10; ++seed) {
    const auto mdp = fixture::RandomStationary(3, 3, 2, K, 500 + seed);
    Hyperparams hp = Basic(K);
    hp.alpha = 2.0;
    propo += FinalRegret(mdp, nsrl::propo_run(mdp, hp, seed, {false, true}));
    adversarial += FinalRegret(mdp, nsrl::propo_adversarial_run(mdp, hp, seed, {false, true}));
  }
  CHECK(adversarial <= 2.0 * propo);
}
