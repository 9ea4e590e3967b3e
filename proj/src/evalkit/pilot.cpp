// Copyright 2026-present the obscurer project
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

#include "obscurer/evalkit/pilot.h"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "csv.h"
#include "obscurer/common/error.h"

namespace obscurer::evalkit {
namespace {

const std::vector<std::string> kPilotHeader = {"participant", "duration", "ext", "int",
                                               "pins",        "yield",    "abs", "arch",
                                               "cam",         "fil",      "pal", "wikiart"};

void validate(const SessionLog& log) {
  const auto where = "session log '" + log.participant + "'";
  if (log.duration_s < 0 || log.external_seeds < 0 || log.internal_seeds < 0 || log.pins < 0) {
    throw Error(ErrorCode::kInvalidArgument, where + " has a negative count");
  }
  for (int p : log.dataset_pins) {
    if (p < 0) throw Error(ErrorCode::kInvalidArgument, where + " has a negative pin count");
  }
  const int sum = std::accumulate(log.dataset_pins.begin(), log.dataset_pins.end(), 0);
  if (sum != log.pins) {
    throw Error(ErrorCode::kInvalidArgument, where + ": dataset pins sum to " +
                                                 std::to_string(sum) + ", not " +
                                                 std::to_string(log.pins));
  }
}

}  // namespace

double session_yield(int external_seeds, int internal_seeds, int pins) {
  const int actions = external_seeds + internal_seeds;
  if (actions < 1) throw Error(ErrorCode::kNoRetrievals, "no retrieval actions");
  return static_cast<double>(pins) / actions;
}

double round2(double v) { return std::round(v * 100.0) / 100.0; }

PilotSummary pilot_summary(const std::vector<SessionLog>& logs) {
  if (logs.empty()) throw Error(ErrorCode::kEmptyInput, "no session logs");
  PilotSummary out;
  PilotRow& m = out.mean;
  m.participant = "Avg";
  for (const auto& log : logs) {
    validate(log);
    PilotRow r;
    r.participant = log.participant;
    r.duration_s = log.duration_s;
    r.external_seeds = log.external_seeds;
    r.internal_seeds = log.internal_seeds;
    r.pins = log.pins;
    r.yield = session_yield(log.external_seeds, log.internal_seeds, log.pins);
    for (std::size_t i = 0; i < r.dataset_pins.size(); ++i) r.dataset_pins[i] = log.dataset_pins[i];
    out.rows.push_back(r);

    m.duration_s += r.duration_s;
    m.external_seeds += r.external_seeds;
    m.internal_seeds += r.internal_seeds;
    m.pins += r.pins;
    for (std::size_t i = 0; i < m.dataset_pins.size(); ++i) m.dataset_pins[i] += r.dataset_pins[i];
  }
  const double n = static_cast<double>(logs.size());
  m.duration_s /= n;
  m.external_seeds /= n;
  m.internal_seeds /= n;
  m.pins /= n;
  for (auto& p : m.dataset_pins) p /= n;
  m.yield = m.pins / (m.external_seeds + m.internal_seeds);
  return out;
}

std::string format_duration(double seconds) {
  const auto total = static_cast<long long>(std::llround(seconds));
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%lldm%02llds", total / 60, total % 60);
  return buf;
}

int parse_duration(std::string_view text) {
  auto number = [&](std::string_view s) {
    int v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size() || v < 0) {
      throw Error(ErrorCode::kParseError, "bad duration '" + std::string(text) + "'");
    }
    return v;
  };
  std::string_view rest = text;
  int seconds = 0;
  if (const auto m = rest.find('m'); m != std::string_view::npos) {
    seconds += 60 * number(rest.substr(0, m));
    rest.remove_prefix(m + 1);
    if (rest.empty()) return seconds;
  }
  if (!rest.empty() && rest.back() == 's') rest.remove_suffix(1);
  return seconds + number(rest);
}

std::vector<SessionLog> parse_pilot_csv(const std::string& text) {
  const auto lines = detail::csv_lines(text);
  if (lines.empty() || detail::split_csv_line(lines[0], 1) != kPilotHeader) {
    throw Error(ErrorCode::kParseError,
                "pilot csv header must be participant,duration,ext,int,pins,yield,abs,arch,cam,"
                "fil,pal,wikiart");
  }
  std::vector<SessionLog> out;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const std::size_t ln = i + 1;
    const auto f = detail::split_csv_line(lines[i], ln);
    if (f.size() != kPilotHeader.size()) {
      throw Error(ErrorCode::kParseError, "csv line " + std::to_string(ln) + ": expected 12 fields");
    }
    SessionLog log;
    log.participant = f[0];
    log.duration_s = parse_duration(f[1]);
    log.external_seeds = detail::parse_int(f[2], ln, "ext");
    log.internal_seeds = detail::parse_int(f[3], ln, "int");
    log.pins = detail::parse_int(f[4], ln, "pins");
    if (!f[5].empty()) log.reported_yield = detail::parse_double(f[5], ln, "yield");
    for (std::size_t c = 0; c < 6; ++c) {
      log.dataset_pins[c] = detail::parse_int(f[6 + c], ln, kPilotHeader[6 + c].c_str());
    }
    validate(log);
    out.push_back(std::move(log));
  }
  return out;
}

std::string format_pilot_table(const PilotSummary& summary) {
  std::string out = "Part.  Duration  Ext    Int    Pins   Yield";
  for (auto c : kPinColumns) {
    std::string h(c);
    h.resize(std::max<std::size_t>(h.size(), 7), ' ');
    out += "  " + h;
  }
  while (out.back() == ' ') out.pop_back();
  out += '\n';
  auto cell = [](std::string s, std::size_t w) {
    s.resize(std::max(w, s.size()), ' ');
    return s;
  };
  auto row = [&](const PilotRow& r, int decimals) {
    std::string line = cell(r.participant, 5) + "  " + cell(format_duration(r.duration_s), 8) +
                       "  " + cell(detail::format_fixed(r.external_seeds, decimals), 5) + "  " +
                       cell(detail::format_fixed(r.internal_seeds, decimals), 5) + "  " +
                       cell(detail::format_fixed(r.pins, decimals), 5) + "  " + cell(detail::format_fixed(r.yield, 2), 5);
    for (std::size_t i = 0; i < r.dataset_pins.size(); ++i) {
      line += "  " + cell(detail::format_fixed(r.dataset_pins[i], decimals), std::max<std::size_t>(7, kPinColumns[i].size()));
    }
    while (line.back() == ' ') line.pop_back();
    out += line + '\n';
  };
  for (const auto& r : summary.rows) row(r, 0);
  row(summary.mean, 2);
  return out;
}

}  // namespace obscurer::evalkit
