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

#include <charconv>
#include <cstring>
#include <random>

#include "doctest.h"
#include "nsrl/error.hpp"
#include "nsrl/report.hpp"

using nsrl::ErrorCode;
using nsrl::RunCsvRow;

namespace {

std::vector<RunCsvRow> RandomRows(int K, std::mt19937_64& gen) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<RunCsvRow> rows(K);
  double cum = 0.0;
  for (int k = 1; k <= K; ++k) {
    auto& r = rows[k - 1];
    r.episode = k;
    r.optimal_value = 3.0 * u(gen);
    r.achieved_value = r.optimal_value * u(gen);
    r.episode_regret = r.optimal_value - r.achieved_value;
    cum += r.episode_regret;
    r.cumulative_regret = cum;
    r.restarted = k % 3 == 1;
    r.window_fill = std::min(k - 1, 5);
  }
  return rows;
}

ErrorCode CodeOf(const std::function<void()>& body, std::string* message = nullptr) {
  try {
    body();
  } catch (const nsrl::Error& e) {
    if (message) *message = e.what();
    return e.code();
  }
  FAIL("expected an nsrl::Error");
  return ErrorCode::kIo;
}

}  // namespace

TEST_CASE("number formatting round-trips bit-exactly") {
  std::mt19937_64 gen(3);
  for (int i = 0; i < 20000; ++i) {
    std::uint64_t bits = gen();
    double x;
    std::memcpy(&x, &bits, sizeof x);
    if (!std::isfinite(x)) continue;
    const std::string text = nsrl::format_double(x);
    double back = 0.0;
    std::from_chars(text.data(), text.data() + text.size(), back);
    CHECK(std::memcmp(&back, &x, sizeof x) == 0);
  }
  CHECK(nsrl::format_double(0.0) == "0");
  CHECK(nsrl::format_double(0.1) == "0.10000000000000001");
}

TEST_CASE("csv round trip") {
  std::mt19937_64 gen(4);
  const auto rows = RandomRows(37, gen);
  const std::string text = nsrl::rows_to_csv(rows);
  CHECK(text.rfind(std::string(nsrl::kRunCsvHeader) + "\n", 0) == 0);
  const auto back = nsrl::rows_from_csv(text);
  REQUIRE(back.size() == rows.size());
  for (size_t i = 0; i < rows.size(); ++i) {
    CHECK(back[i].episode == rows[i].episode);
    CHECK(back[i].optimal_value == rows[i].optimal_value);
    CHECK(back[i].achieved_value == rows[i].achieved_value);
    CHECK(back[i].episode_regret == rows[i].episode_regret);
    CHECK(back[i].cumulative_regret == rows[i].cumulative_regret);
    CHECK(back[i].restarted == rows[i].restarted);
    CHECK(back[i].window_fill == rows[i].window_fill);
  }
  CHECK(nsrl::rows_to_csv(back) == text);
}

TEST_CASE("malformed csv is rejected with its line number") {
  const std::string header = std::string(nsrl::kRunCsvHeader) + "\n";
  std::string msg;
  CHECK(CodeOf([&] { nsrl::rows_from_csv("episode,foo\n1,2\n"); }) == ErrorCode::kConfig);
  CHECK(CodeOf([&] { nsrl::rows_from_csv(header + "1,1,0.5,0.5,0.5,1,0\n2,1,0.5\n"); }, &msg) ==
        ErrorCode::kConfig);
  CHECK(msg.find("line 3") != std::string::npos);
  CHECK(CodeOf([&] { nsrl::rows_from_csv(header + "1,1,x,0.5,0.5,1,0\n"); }, &msg) ==
        ErrorCode::kConfig);
  CHECK(msg.find("line 2") != std::string::npos);
  CHECK(CodeOf([&] { nsrl::rows_from_csv(header + "2,1,0.5,0.5,0.5,1,0\n"); }) == ErrorCode::kConfig);
}

TEST_CASE("run csv names") {
  CHECK(nsrl::run_csv_name("propo-auto", 12) == "propo-auto__seed12.csv");
  std::string label;
  std::uint64_t seed = 0;
  nsrl::parse_run_csv_name("out/dir/sw.lsvi_1__seed7.csv", &label, &seed);
  CHECK(label == "sw.lsvi_1");
  CHECK(seed == 7);
  CHECK(CodeOf([&] { nsrl::parse_run_csv_name("propo_seed7.csv", &label, &seed); }) ==
        ErrorCode::kConfig);
  CHECK(CodeOf([&] { nsrl::parse_run_csv_name("propo__seedx.csv", &label, &seed); }) ==
        ErrorCode::kConfig);
}

TEST_CASE("checkpoints") {
  CHECK(nsrl::checkpoints(2000) == std::vector<int>{500, 1000, 1500, 2000});
  CHECK(nsrl::checkpoints(10) == std::vector<int>{2, 5, 7, 10});
  CHECK(nsrl::checkpoints(1) == std::vector<int>{1, 1, 1, 1});
}

TEST_CASE("summary statistics match direct recomputation") {
  std::mt19937_64 gen(8);
  std::vector<nsrl::LabeledRun> runs;
  for (std::uint64_t seed : {5u, 1u, 3u}) runs.push_back({"b", seed, RandomRows(20, gen)});
  for (std::uint64_t seed : {2u, 0u}) runs.push_back({"a", seed, RandomRows(20, gen)});
  const auto summary = nsrl::summarize(runs);
  const auto& algs = summary.at("algorithms");
  REQUIRE(algs.size() == 2);
  CHECK(algs[0].at("label") == "a");
  CHECK(algs[1].at("seeds") == nlohmann::json::array({1, 3, 5}));
  for (const auto& alg : algs) {
    std::vector<const nsrl::LabeledRun*> mine;
    for (const auto& r : runs) {
      if (r.label == alg.at("label").get<std::string>()) mine.push_back(&r);
    }
    for (const auto& cp : alg.at("checkpoints")) {
      const int k = cp.at("episode");
      double mean = 0.0;
      for (auto* r : mine) mean += r->rows[k - 1].cumulative_regret;
      mean /= mine.size();
      double var = 0.0;
      for (auto* r : mine) var += std::pow(r->rows[k - 1].cumulative_regret - mean, 2);
      var /= mine.size() - 1;
      CHECK(cp.at("mean").get<double>() == doctest::Approx(mean).epsilon(1e-14));
      CHECK(cp.at("stddev").get<double>() == doctest::Approx(std::sqrt(var)).epsilon(1e-12));
    }
    CHECK(alg.at("mean_curve").size() == 20);
  }
  // Input order does not matter.
  std::reverse(runs.begin(), runs.end());
  CHECK(nsrl::summarize(runs) == summary);
}

TEST_CASE("summary errors") {
  std::mt19937_64 gen(9);
  std::vector<nsrl::LabeledRun> dup = {{"a", 1, RandomRows(5, gen)}, {"a", 1, RandomRows(5, gen)}};
  CHECK_THROWS_AS(nsrl::summarize(dup), nsrl::Error);
  std::vector<nsrl::LabeledRun> ragged = {{"a", 1, RandomRows(5, gen)}, {"a", 2, RandomRows(6, gen)}};
  CHECK_THROWS_AS(nsrl::summarize(ragged), nsrl::Error);
}

TEST_CASE("svg plot") {
  std::mt19937_64 gen(10);
  std::vector<nsrl::LabeledRun> runs;
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    runs.push_back({"propo", seed, RandomRows(1000, gen)});
    runs.push_back({"sw-lsvi-ucb", seed, RandomRows(1000, gen)});
  }
  const std::string svg = nsrl::summary_to_svg(nsrl::summarize(runs));
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find("</svg>") != std::string::npos);
  CHECK(svg.find("propo") != std::string::npos);
  CHECK(svg.find("sw-lsvi-ucb") != std::string::npos);
  size_t lines = 0;
  for (size_t pos = 0; (pos = svg.find("<polyline", pos)) != std::string::npos; ++pos) ++lines;
  CHECK(lines == 2);
}
