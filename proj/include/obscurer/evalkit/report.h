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
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "obscurer/evalkit/trials.h"

namespace obscurer::evalkit {

// Per seed image (one non-control trial).
struct ImageStat {
  int trial_id = 0;
  std::string seed_id;
  corpus::DatasetTag dataset = corpus::DatasetTag::kAbstract;
  double distance = 0.0;
  int responses = 0;
  int correct = 0;
  int quartile = 0;  // 1 = lowest accuracy

  double accuracy() const { return static_cast<double>(correct) / responses; }
  int incorrect() const { return responses - correct; }
};

struct DatasetRow {
  std::string label;
  std::size_t images = 0;
  std::int64_t responses = 0;
  std::int64_t correct = 0;
  double accuracy = 0.0;      // correct / responses
  double avg_distance = 0.0;  // mean over images
  std::optional<double> pearson;  // distance vs incorrect count; unset if undefined
  std::array<double, 4> quartile_pct{};
};

struct BinomialResult {
  std::int64_t successes = 0;
  std::int64_t n = 0;
  double p_value = 1.0;
};

struct AccuracyReport {
  std::vector<DatasetRow> datasets;
  DatasetRow overall;
  std::vector<ImageStat> images;  // ascending accuracy, then seed id
  BinomialResult per_trial;       // every response is a Bernoulli trial
  BinomialResult per_image;       // images whose accuracy exceeds 0.5
  std::int64_t control_responses = 0;
  std::int64_t control_correct = 0;
};

// Controls are reported separately and excluded from every aggregate.
// Seed images without responses are left out. Throws kEmptyResponses,
// kInvalidArgument for responses naming unknown trials.
AccuracyReport accuracy_report(const std::vector<Trial>& trials,
                               const std::vector<Response>& responses);

// "87.12%": two decimals of a fraction in [0, 1].
std::string format_percent(double fraction);

// Dataset | Avg Acc. | Avg Dist. | Pearson | Q1..Q4, then an All row.
std::string format_table(const AccuracyReport& report);

}  // namespace obscurer::evalkit
