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

#include "nsrl/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "nsrl/error.hpp"

namespace nsrl {

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

std::vector<RunCsvRow> make_rows(const RegretReport& report, const std::vector<bool>& restarted,
                                 const std::vector<int>& window_fill) {
  const size_t n = report.cumulative_regret.size();
  if (restarted.size() != n || window_fill.size() != n) {
    Fail(ErrorCode::kIncompleteRecord, "run metadata does not match the regret report");
  }
  std::vector<RunCsvRow> rows(n);
  for (size_t i = 0; i < n; ++i) {
    RunCsvRow& r = rows[i];
    r.episode = static_cast<int>(i) + 1;
    r.optimal_value = report.per_episode_optimal[i];
    r.achieved_value = report.per_episode_achieved[i];
    r.episode_regret = r.optimal_value - r.achieved_value;
    r.cumulative_regret = report.cumulative_regret[i];
    r.restarted = restarted[i] ? 1 : 0;
    r.window_fill = window_fill[i];
  }
  return rows;
}

std::string rows_to_csv(const std::vector<RunCsvRow>& rows) {
  std::string out = kRunCsvHeader;
  out += '\n';
  for (const RunCsvRow& r : rows) {
    out += std::to_string(r.episode);
    for (double v : {r.optimal_value, r.achieved_value, r.episode_regret, r.cumulative_regret}) {
      out += ',';
      out += format_double(v);
    }
    out += ',' + std::to_string(r.restarted) + ',' + std::to_string(r.window_fill) + '\n';
  }
  return out;
}

namespace {

[[noreturn]] void CsvFail(int line, const std::string& what) {
  Fail(ErrorCode::kConfig, "line " + std::to_string(line) + ": " + what);
}

template <typename T>
T ParseField(std::string_view field, int line) {
  T value{};
  const auto res = std::from_chars(field.data(), field.data() + field.size(), value);
  if (res.ec != std::errc() || res.ptr != field.data() + field.size()) {
    CsvFail(line, "malformed field '" + std::string(field) + "'");
  }
  return value;
}

}  // namespace

std::vector<RunCsvRow> rows_from_csv(const std::string& text) {
  std::vector<RunCsvRow> rows;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line_no == 1) {
      if (line != kRunCsvHeader) CsvFail(1, "unexpected header");
      continue;
    }
    if (line.empty()) continue;
    std::vector<std::string_view> fields;
    std::string_view rest(line);
    for (size_t pos; (pos = rest.find(',')) != std::string_view::npos; rest.remove_prefix(pos + 1)) {
      fields.push_back(rest.substr(0, pos));
    }
    fields.push_back(rest);
    if (fields.size() != 7) CsvFail(line_no, "expected 7 fields");
    RunCsvRow r;
    r.episode = ParseField<int>(fields[0], line_no);
    r.optimal_value = ParseField<double>(fields[1], line_no);
    r.achieved_value = ParseField<double>(fields[2], line_no);
    r.episode_regret = ParseField<double>(fields[3], line_no);
    r.cumulative_regret = ParseField<double>(fields[4], line_no);
    r.restarted = ParseField<int>(fields[5], line_no);
    r.window_fill = ParseField<int>(fields[6], line_no);
    if (r.episode != static_cast<int>(rows.size()) + 1) CsvFail(line_no, "episodes out of order");
    rows.push_back(r);
  }
  if (line_no == 0) CsvFail(1, "empty file");
  return rows;
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) Fail(ErrorCode::kIo, "cannot open " + path + " for writing");
  out << text;
  if (!out) Fail(ErrorCode::kIo, "failed writing " + path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) Fail(ErrorCode::kIo, "cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string run_csv_name(const std::string& label, std::uint64_t seed) {
  return label + "__seed" + std::to_string(seed) + ".csv";
}

void parse_run_csv_name(const std::string& path, std::string* label, std::uint64_t* seed) {
  const size_t slash = path.find_last_of("/\\");
  const std::string name = slash == std::string::npos ? path : path.substr(slash + 1);
  const size_t sep = name.rfind("__seed");
  if (sep == std::string::npos || sep == 0 || name.size() < 4 ||
      name.compare(name.size() - 4, 4, ".csv") != 0) {
    Fail(ErrorCode::kConfig, "file name '" + name + "' is not <label>__seed<seed>.csv");
  }
  *label = name.substr(0, sep);
  const std::string digits = name.substr(sep + 6, name.size() - 4 - sep - 6);
  const auto res = std::from_chars(digits.data(), digits.data() + digits.size(), *seed);
  if (digits.empty() || res.ec != std::errc() || res.ptr != digits.data() + digits.size()) {
    Fail(ErrorCode::kConfig, "file name '" + name + "' has a malformed seed");
  }
}

std::vector<int> checkpoints(int num_episodes) {
  std::vector<int> out;
  for (int j = 1; j <= 4; ++j) out.push_back(std::max(1, j * num_episodes / 4));
  return out;
}

nlohmann::json summarize(std::vector<LabeledRun> runs) {
  if (runs.empty()) Fail(ErrorCode::kConfig, "no runs to summarize");
  std::map<std::string, std::vector<LabeledRun*>> groups;
  for (LabeledRun& run : runs) groups[run.label].push_back(&run);

  nlohmann::json algorithms = nlohmann::json::array();
  for (auto& [label, group] : groups) {
    std::sort(group.begin(), group.end(),
              [](const LabeledRun* a, const LabeledRun* b) { return a->seed < b->seed; });
    const size_t K = group.front()->rows.size();
    if (K == 0) Fail(ErrorCode::kConfig, "run '" + label + "' has no episodes");
    std::vector<std::uint64_t> seeds;
    for (size_t i = 0; i < group.size(); ++i) {
      if (i > 0 && group[i]->seed == group[i - 1]->seed) {
        Fail(ErrorCode::kConfig, "duplicate seed " + std::to_string(group[i]->seed) + " for " + label);
      }
      if (group[i]->rows.size() != K) {
        Fail(ErrorCode::kConfig, "runs of '" + label + "' differ in episode count");
      }
      seeds.push_back(group[i]->seed);
    }
    const double n = static_cast<double>(group.size());
    std::vector<double> mean(K, 0.0), stddev(K, 0.0);
    for (size_t k = 0; k < K; ++k) {
      double sum = 0.0;
      for (const LabeledRun* run : group) sum += run->rows[k].cumulative_regret;
      mean[k] = sum / n;
      if (group.size() > 1) {
        double sq = 0.0;
        for (const LabeledRun* run : group) {
          const double dev = run->rows[k].cumulative_regret - mean[k];
          sq += dev * dev;
        }
        stddev[k] = std::sqrt(sq / (n - 1.0));
      }
    }
    nlohmann::json points = nlohmann::json::array();
    for (int episode : checkpoints(static_cast<int>(K))) {
      points.push_back(
          {{"episode", episode}, {"mean", mean[episode - 1]}, {"stddev", stddev[episode - 1]}});
    }
    algorithms.push_back({{"label", label},
                          {"seeds", seeds},
                          {"num_episodes", K},
                          {"checkpoints", points},
                          {"mean_curve", mean},
                          {"stddev_curve", stddev}});
  }
  return {{"algorithms", algorithms}};
}

namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                    "#9467bd", "#8c564b", "#e377c2", "#17becf"};

std::string Num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string Escape(const std::string& text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string summary_to_svg(const nlohmann::json& summary) {
  if (!summary.is_object() || !summary.contains("algorithms") || !summary["algorithms"].is_array() ||
      summary["algorithms"].empty()) {
    Fail(ErrorCode::kConfig, "summary has no algorithms");
  }
  struct Series {
    std::string label;
    std::vector<double> mean, stddev;
  };
  std::vector<Series> series;
  size_t max_k = 1;
  double max_y = 0.0;
  try {
    for (const auto& entry : summary["algorithms"]) {
      Series s{entry.at("label").get<std::string>(), entry.at("mean_curve").get<std::vector<double>>(),
               entry.at("stddev_curve").get<std::vector<double>>()};
      if (s.mean.size() != s.stddev.size() || s.mean.empty()) {
        Fail(ErrorCode::kConfig, "summary curves for '" + s.label + "' are malformed");
      }
      max_k = std::max(max_k, s.mean.size());
      for (size_t i = 0; i < s.mean.size(); ++i) max_y = std::max(max_y, s.mean[i] + s.stddev[i]);
      series.push_back(std::move(s));
    }
  } catch (const nlohmann::json::exception& e) {
    Fail(ErrorCode::kConfig, std::string("malformed summary: ") + e.what());
  }
  if (max_y <= 0.0) max_y = 1.0;

  const double width = 800, height = 500, left = 70, right = 180, top = 30, bottom = 50;
  const double plot_w = width - left - right, plot_h = height - top - bottom;
  auto x_of = [&](size_t episode) {
    return left + (max_k > 1 ? (episode - 1.0) / (max_k - 1.0) : 0.0) * plot_w;
  };
  auto y_of = [&](double v) { return top + plot_h - std::max(0.0, v) / max_y * plot_h; };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<line x1=\"" << left << "\" y1=\"" << top + plot_h << "\" x2=\"" << left + plot_w
      << "\" y2=\"" << top + plot_h << "\" stroke=\"black\"/>\n";
  svg << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\""
      << top + plot_h << "\" stroke=\"black\"/>\n";
  for (int t = 0; t <= 4; ++t) {
    const size_t episode = 1 + static_cast<size_t>(std::llround((max_k - 1) * t / 4.0));
    const double x = x_of(episode);
    svg << "<text x=\"" << Num(x) << "\" y=\"" << top + plot_h + 18 << "\" text-anchor=\"middle\">"
        << episode << "</text>\n";
    const double v = max_y * t / 4.0;
    svg << "<text x=\"" << left - 6 << "\" y=\"" << Num(y_of(v) + 4) << "\" text-anchor=\"end\">"
        << Num(v) << "</text>\n";
  }
  svg << "<text x=\"" << left + plot_w / 2 << "\" y=\"" << height - 10
      << "\" text-anchor=\"middle\">episode</text>\n";
  svg << "<text transform=\"translate(16," << top + plot_h / 2
      << ") rotate(-90)\" text-anchor=\"middle\">cumulative dynamic regret</text>\n";

  for (size_t i = 0; i < series.size(); ++i) {
    const Series& s = series[i];
    const char* color = kPalette[i % (sizeof(kPalette) / sizeof(kPalette[0]))];
    const size_t n = s.mean.size();
    const size_t stride = std::max<size_t>(1, (n + 399) / 400);
    std::vector<size_t> idx;
    for (size_t j = 0; j < n; j += stride) idx.push_back(j);
    if (idx.back() != n - 1) idx.push_back(n - 1);

    svg << "<polygon fill=\"" << color << "\" fill-opacity=\"0.2\" stroke=\"none\" points=\"";
    for (size_t j : idx) svg << Num(x_of(j + 1)) << ',' << Num(y_of(s.mean[j] + s.stddev[j])) << ' ';
    for (auto it = idx.rbegin(); it != idx.rend(); ++it) {
      svg << Num(x_of(*it + 1)) << ',' << Num(y_of(s.mean[*it] - s.stddev[*it])) << ' ';
    }
    svg << "\"/>\n";
    svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
    for (size_t j : idx) svg << Num(x_of(j + 1)) << ',' << Num(y_of(s.mean[j])) << ' ';
    svg << "\"/>\n";
    const double ly = top + 10 + 20.0 * i;
    svg << "<line x1=\"" << left + plot_w + 15 << "\" y1=\"" << ly << "\" x2=\""
        << left + plot_w + 40 << "\" y2=\"" << ly << "\" stroke=\"" << color
        << "\" stroke-width=\"2\"/>\n";
    svg << "<text x=\"" << left + plot_w + 45 << "\" y=\"" << ly + 4 << "\">" << Escape(s.label)
        << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace nsrl
