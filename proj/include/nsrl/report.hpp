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

#ifndef NSRL_REPORT_HPP_
#define NSRL_REPORT_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "nsrl/algorithms.hpp"
#include "nsrl/oracle.hpp"

namespace nsrl {

inline constexpr const char* kRunCsvHeader =
    "episode,optimal_value,achieved_value,episode_regret,cumulative_regret,restarted,window_fill";

struct RunCsvRow {
  int episode = 0;
  double optimal_value = 0.0;
  double achieved_value = 0.0;
  double episode_regret = 0.0;
  double cumulative_regret = 0.0;
  int restarted = 0;
  int window_fill = 0;
};

// 17 significant digits in general notation; parses back to the same double.
std::string format_double(double value);

// Rows from a regret report plus the per-episode restart flags and window
// fills of the run.
std::vector<RunCsvRow> make_rows(const RegretReport& report, const std::vector<bool>& restarted,
                                 const std::vector<int>& window_fill);

std::string rows_to_csv(const std::vector<RunCsvRow>& rows);
// Throws kConfig (with the offending line) on malformed text.
std::vector<RunCsvRow> rows_from_csv(const std::string& text);

void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);

// "<label>__seed<seed>.csv"
std::string run_csv_name(const std::string& label, std::uint64_t seed);
// Inverse of run_csv_name on the file name part of `path`; throws kConfig.
void parse_run_csv_name(const std::string& path, std::string* label, std::uint64_t* seed);

struct LabeledRun {
  std::string label;
  std::uint64_t seed = 0;
  std::vector<RunCsvRow> rows;
};

// Episodes K/4, K/2, 3K/4, K (at least 1).
std::vector<int> checkpoints(int num_episodes);

// Cross-seed summary of cumulative regret per label: seeds in ascending order,
// mean and sample standard deviation at the checkpoints and along the curve.
nlohmann::json summarize(std::vector<LabeledRun> runs);

// Mean cumulative regret per label with a +/- one standard deviation band.
std::string summary_to_svg(const nlohmann::json& summary);

}  // namespace nsrl

#endif  // NSRL_REPORT_HPP_
