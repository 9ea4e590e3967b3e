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

#include "obscurer/evalkit/report.h"

#include <algorithm>
#include <map>

#include "csv.h"
#include "obscurer/common/error.h"
#include "obscurer/evalkit/stats.h"

namespace obscurer::evalkit {
namespace {

std::optional<double> try_pearson(const std::vector<const ImageStat*>& imgs) {
  std::vector<double> xs;
  std::vector<double> ys;
  for (const auto* s : imgs) {
    xs.push_back(s->distance);
    ys.push_back(static_cast<double>(s->incorrect()));
  }
  try {
    return pearson(xs, ys);
  } catch (const Error&) {
    return std::nullopt;
  }
}

DatasetRow summarize(std::string label, const std::vector<const ImageStat*>& imgs,
                     const std::array<std::size_t, 4>& quartile_sizes) {
  DatasetRow row;
  row.label = std::move(label);
  row.images = imgs.size();
  std::array<std::size_t, 4> in_q{};
  double dist = 0.0;
  for (const auto* s : imgs) {
    row.responses += s->responses;
    row.correct += s->correct;
    dist += s->distance;
    ++in_q[static_cast<std::size_t>(s->quartile - 1)];
  }
  row.accuracy = row.responses ? static_cast<double>(row.correct) / row.responses : 0.0;
  row.avg_distance = imgs.empty() ? 0.0 : dist / static_cast<double>(imgs.size());
  row.pearson = try_pearson(imgs);
  for (std::size_t q = 0; q < 4; ++q) {
    row.quartile_pct[q] = quartile_sizes[q] ? 100.0 * static_cast<double>(in_q[q]) /
                                                  static_cast<double>(quartile_sizes[q])
                                            : 0.0;
  }
  return row;
}

}  // namespace

AccuracyReport accuracy_report(const std::vector<Trial>& trials,
                               const std::vector<Response>& responses) {
  std::map<int, const Trial*> by_id;
  for (const auto& t : trials) by_id[t.trial_id] = &t;

  AccuracyReport report;
  std::map<int, ImageStat> stats;
  for (const auto& r : responses) {
    const auto it = by_id.find(r.trial_id);
    if (it == by_id.end()) {
      throw Error(ErrorCode::kInvalidArgument,
                  "response names unknown trial " + std::to_string(r.trial_id));
    }
    const Trial& t = *it->second;
    if (t.is_control) {
      ++report.control_responses;
      report.control_correct += r.chose_retrieved ? 1 : 0;
      continue;
    }
    auto& s = stats[t.trial_id];
    s.trial_id = t.trial_id;
    s.seed_id = t.seed_id;
    s.dataset = t.dataset;
    s.distance = t.retrieved_distance;
    ++s.responses;
    s.correct += r.chose_retrieved ? 1 : 0;
  }
  if (stats.empty()) throw Error(ErrorCode::kEmptyResponses, "no responses to non-control trials");

  for (auto& [id, s] : stats) report.images.push_back(std::move(s));
  // Exact comparison of accuracies via cross-multiplication keeps the
  // tie-break on id reliable.
  std::sort(report.images.begin(), report.images.end(), [](const ImageStat& a, const ImageStat& b) {
    const auto lhs = static_cast<std::int64_t>(a.correct) * b.responses;
    const auto rhs = static_cast<std::int64_t>(b.correct) * a.responses;
    if (lhs != rhs) return lhs < rhs;
    return a.seed_id != b.seed_id ? a.seed_id < b.seed_id : a.trial_id < b.trial_id;
  });
  const std::size_t n = report.images.size();
  std::array<std::size_t, 4> quartile_sizes{};
  for (std::size_t i = 0; i < n; ++i) {
    const int q = static_cast<int>(i * 4 / n);
    report.images[i].quartile = q + 1;
    ++quartile_sizes[static_cast<std::size_t>(q)];
  }

  std::map<corpus::DatasetTag, std::vector<const ImageStat*>> groups;
  std::vector<const ImageStat*> all;
  for (const auto& s : report.images) {
    groups[s.dataset].push_back(&s);
    all.push_back(&s);
  }
  for (auto tag : corpus::kDatasetRoster) {
    const auto it = groups.find(tag);
    if (it != groups.end()) {
      report.datasets.push_back(summarize(std::string(corpus::tag_name(tag)), it->second,
                                          quartile_sizes));
    }
  }
  report.overall = summarize("All", all, quartile_sizes);

  report.per_trial.successes = report.overall.correct;
  report.per_trial.n = report.overall.responses;
  report.per_trial.p_value = binomial_test(report.per_trial.successes, report.per_trial.n, 0.5);
  for (const auto& s : report.images) report.per_image.successes += 2 * s.correct > s.responses;
  report.per_image.n = static_cast<std::int64_t>(n);
  report.per_image.p_value = binomial_test(report.per_image.successes, report.per_image.n, 0.5);
  return report;
}

std::string format_percent(double fraction) { return detail::format_fixed(100.0 * fraction, 2) + "%"; }

std::string format_table(const AccuracyReport& report) {
  std::size_t width = 7;
  for (const auto& r : report.datasets) width = std::max(width, r.label.size());
  auto pad = [](std::string s, std::size_t w) {
    s.resize(std::max(w, s.size()), ' ');
    return s;
  };
  std::string out = pad("Dataset", width) + "  Avg Acc.  Avg Dist.  Pearson  Q1     Q2     Q3     Q4\n";
  auto line = [&](const DatasetRow& r) {
    out += pad(r.label, width) + "  " + pad(format_percent(r.accuracy), 8) + "  " +
           pad(detail::format_fixed(r.avg_distance, 3), 9) + "  " +
           pad(r.pearson ? detail::format_fixed(*r.pearson, 2) : "n/a", 7);
    for (double q : r.quartile_pct) out += "  " + pad(detail::format_fixed(q, 1), 5);
    while (!out.empty() && out.back() == ' ') out.pop_back();
    out += '\n';
  };
  for (const auto& r : report.datasets) line(r);
  line(report.overall);
  return out;
}

}  // namespace obscurer::evalkit
