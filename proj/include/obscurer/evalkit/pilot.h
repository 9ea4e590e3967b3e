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

#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace obscurer::evalkit {

// Pin breakdown columns; "camera" counts pinned seed photos.
inline constexpr std::array<std::string_view, 6> kPinColumns = {"Abs", "Arch", "Cam",
                                                                "Fil", "Pal", "WikiArt"};

struct SessionLog {
  std::string participant;
  int duration_s = 0;
  int external_seeds = 0;
  int internal_seeds = 0;
  int pins = 0;
  std::array<int, 6> dataset_pins{};
  std::optional<double> reported_yield;  // as printed in the source log, if any
};

// Pins per retrieval action. Throws kNoRetrievals.
double session_yield(int external_seeds, int internal_seeds, int pins);
double round2(double v);

struct PilotRow {
  std::string participant;
  double duration_s = 0.0;
  double external_seeds = 0.0;
  double internal_seeds = 0.0;
  double pins = 0.0;
  double yield = 0.0;
  std::array<double, 6> dataset_pins{};
};

struct PilotSummary {
  std::vector<PilotRow> rows;
  // Column means. Yield is pins over seeds of the means, which is the
  // pooled rate rather than the mean of per-row yields.
  PilotRow mean;
};

// Throws kEmptyInput, kInvalidArgument for negative counts or pin
// breakdowns that do not add up.
PilotSummary pilot_summary(const std::vector<SessionLog>& logs);

// "5m41s"; seconds are rounded to the nearest whole second.
std::string format_duration(double seconds);
// Accepts "5m41s", "41s", "5m" or a bare number of seconds.
int parse_duration(std::string_view text);

// Header: participant,duration,ext,int,pins,yield,abs,arch,cam,fil,pal,wikiart
// The yield column may be empty.
std::vector<SessionLog> parse_pilot_csv(const std::string& text);
std::string format_pilot_table(const PilotSummary& summary);

}  // namespace obscurer::evalkit
