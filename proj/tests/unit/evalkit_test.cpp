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

#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "obscurer/common/error.h"
#include "obscurer/common/rng.h"
#include "obscurer/corpus/datasets.h"
#include "obscurer/corpus/indexer.h"
#include "obscurer/evalkit/pilot.h"
#include "obscurer/evalkit/report.h"
#include "obscurer/evalkit/stats.h"
#include "obscurer/evalkit/trials.h"
#include "temp_dir.h"

namespace obscurer::evalkit {
namespace {

using corpus::DatasetTag;

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::kInvalidArgument;
}

std::string read_text(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

TEST(Binomial, ClosedForms) {
  EXPECT_NEAR(binomial_test(10, 10, 0.5), std::ldexp(1.0, -10), 1e-15);
  EXPECT_NEAR(binomial_test(1, 1, 0.5), 0.5, 1e-15);
  EXPECT_EQ(binomial_test(0, 7, 0.5), 1.0);
  // C(20,15..20) = 15504 + 4845 + 1140 + 190 + 20 + 1 = 21700.
  EXPECT_NEAR(binomial_test(15, 20, 0.5), 21700.0 / 1048576.0, 1e-14);
  // 10(.3^3)(.7^2) + 5(.3^4)(.7) + .3^5
  EXPECT_NEAR(binomial_test(3, 5, 0.3), 0.16308, 1e-12);
}

TEST(Binomial, LargeSampleFromReportedAccuracy) {
  const auto successes = static_cast<std::int64_t>(std::llround(0.8712 * 9600));
  EXPECT_EQ(successes, 8364);
  const double p = binomial_test(successes, 9600, 0.5);
  EXPECT_LT(p, 0.001);
  EXPECT_GE(p, 0.0);
  EXPECT_NEAR(binomial_test(4800, 9600, 0.5), 0.5, 0.01);
}

TEST(Binomial, MonotoneInSuccesses) {
  for (double p0 : {0.1, 0.5, 0.83}) {
    double prev = 2.0;
    for (int s = 0; s <= 60; ++s) {
      const double p = binomial_test(s, 60, p0);
      EXPECT_LE(p, prev + 1e-15);
      prev = p;
    }
  }
}

TEST(Binomial, InvalidParams) {
  EXPECT_EQ(code_of([] { binomial_test(5, 4, 0.5); }), ErrorCode::kInvalidParams);
  EXPECT_EQ(code_of([] { binomial_test(-1, 4, 0.5); }), ErrorCode::kInvalidParams);
  EXPECT_EQ(code_of([] { binomial_test(1, 4, 0.0); }), ErrorCode::kInvalidParams);
  EXPECT_EQ(code_of([] { binomial_test(1, 4, 1.0); }), ErrorCode::kInvalidParams);
}

TEST(Pearson, Examples) {
  const std::vector<double> xs{1, 2, 3, 4.5, 7};
  std::vector<double> up;
  std::vector<double> down;
  for (double x : xs) {
    up.push_back(2 * x + 1);
    down.push_back(-x);
  }
  EXPECT_NEAR(pearson(xs, up), 1.0, 1e-12);
  EXPECT_NEAR(pearson(xs, down), -1.0, 1e-12);
  EXPECT_NEAR(pearson(std::vector<double>{1, 2, 3}, std::vector<double>{1, 3, 2}), 0.5, 1e-12);
}

TEST(Pearson, AffineInvariance) {
  Rng rng(4);
  std::vector<double> xs(40);
  std::vector<double> ys(40);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    xs[i] = rng.normal();
    ys[i] = 0.4 * xs[i] + rng.normal();
  }
  const double r = pearson(xs, ys);
  auto xs2 = xs;
  auto ys2 = ys;
  for (auto& x : xs2) x = 3.5 * x - 12.0;
  for (auto& y : ys2) y = 0.25 * y + 100.0;
  EXPECT_NEAR(pearson(xs2, ys), r, 1e-12);
  EXPECT_NEAR(pearson(xs, ys2), r, 1e-12);
}

TEST(Pearson, Errors) {
  EXPECT_EQ(code_of([] { pearson(std::vector<double>{1, 2}, std::vector<double>{1, 2, 3}); }),
            ErrorCode::kLengthMismatch);
  EXPECT_EQ(code_of([] { pearson(std::vector<double>{1, 1, 1}, std::vector<double>{1, 2, 3}); }),
            ErrorCode::kConstantSeries);
  EXPECT_EQ(code_of([] { pearson(std::vector<double>{1, 2, 3}, std::vector<double>{0.1, 0.1, 0.1}); }),
            ErrorCode::kConstantSeries);
  EXPECT_EQ(code_of([] { pearson(std::vector<double>{1}, std::vector<double>{1}); }),
            ErrorCode::kInvalidParams);
}

TEST(Controls, Count) {
  EXPECT_EQ(control_count(96, 4), 4);
  EXPECT_EQ(control_count(96, 0), 0);
  EXPECT_EQ(control_count(10, 4), 1);
  EXPECT_EQ(code_of([] { control_count(10, 100); }), ErrorCode::kInvalidParams);
}

// Synthetic trials: `images` seeds per dataset, with distances chosen by the caller.
std::vector<Trial> synthetic_trials(const std::vector<std::pair<DatasetTag, double>>& seeds) {
  std::vector<Trial> trials;
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    Trial t;
    t.trial_id = static_cast<int>(i);
    t.seed_id = std::string(corpus::tag_name(seeds[i].first)) + "_" + std::to_string(100 + i);
    t.retrieved_id = t.seed_id + "_r";
    t.random_id = t.seed_id + "_x";
    t.retrieved_distance = seeds[i].second;
    t.dataset = seeds[i].first;
    trials.push_back(t);
  }
  return trials;
}

void respond(std::vector<Response>& out, int trial, int correct, int total) {
  for (int p = 0; p < total; ++p) out.push_back({"p" + std::to_string(p), trial, p < correct});
}

TEST(AccuracyReport, AllCorrect) {
  std::vector<std::pair<DatasetTag, double>> seeds;
  for (int i = 0; i < 6; ++i) seeds.push_back({i % 2 ? DatasetTag::kFiltered : DatasetTag::kAbstract, 0.1 * i});
  const auto trials = synthetic_trials(seeds);
  std::vector<Response> responses;
  for (const auto& t : trials) respond(responses, t.trial_id, 5, 5);
  const auto report = accuracy_report(trials, responses);
  for (const auto& row : report.datasets) {
    EXPECT_EQ(row.accuracy, 1.0);
    EXPECT_FALSE(row.pearson);  // no incorrect selections: constant series
  }
  EXPECT_EQ(format_percent(report.overall.accuracy), "100.00%");
}

TEST(AccuracyReport, PrintsConstructedOverallAccuracy) {
  // 100 seeds x 25 raters = 2500 responses, 2178 correct = 87.12%.
  std::vector<std::pair<DatasetTag, double>> seeds;
  for (int i = 0; i < 100; ++i) {
    seeds.push_back({i < 34 ? DatasetTag::kWikiartLike : i < 67 ? DatasetTag::kFiltered
                                                                : DatasetTag::kAbstract,
                     0.3 + 0.003 * i});
  }
  auto trials = synthetic_trials(seeds);
  std::vector<Response> responses;
  int budget = 2178;
  for (int i = 0; i < 100; ++i) {
    const int c = std::min(25, budget - (99 - i) * 21 > 21 ? 22 : 21);
    const int correct = i == 99 ? budget : c;
    budget -= correct;
    respond(responses, i, correct, 25);
  }
  ASSERT_EQ(budget, 0);
  // Controls never enter the aggregates.
  Trial control;
  control.trial_id = 100;
  control.seed_id = control.retrieved_id = "ctl";
  control.random_id = "other";
  control.is_control = true;
  trials.push_back(control);
  respond(responses, 100, 3, 25);

  const auto report = accuracy_report(trials, responses);
  EXPECT_EQ(report.overall.responses, 2500);
  EXPECT_EQ(report.overall.correct, 2178);
  EXPECT_EQ(format_percent(report.overall.accuracy), "87.12%");
  EXPECT_EQ(report.control_responses, 25);
  EXPECT_EQ(report.control_correct, 3);
  EXPECT_EQ(report.per_trial.successes, 2178);
  EXPECT_EQ(report.per_trial.n, 2500);
  EXPECT_EQ(report.per_image.n, 100);
  const auto table = format_table(report);
  EXPECT_NE(table.find("87.12%"), std::string::npos) << table;
  EXPECT_NE(table.find("All"), std::string::npos);
  EXPECT_NE(table.find("100.0  100.0  100.0  100.0"), std::string::npos) << table;
}

TEST(AccuracyReport, QuartileTieBreakAndColumnTotals) {
  // Equal accuracy everywhere: the ascending seed-id order decides.
  std::vector<std::pair<DatasetTag, double>> seeds;
  for (int i = 0; i < 4; ++i) seeds.push_back({DatasetTag::kFiltered, 0.2});
  for (int i = 0; i < 4; ++i) seeds.push_back({DatasetTag::kAbstract, 0.2});
  const auto trials = synthetic_trials(seeds);
  std::vector<Response> responses;
  for (const auto& t : trials) respond(responses, t.trial_id, 3, 4);
  const auto report = accuracy_report(trials, responses);
  ASSERT_EQ(report.images.size(), 8u);
  for (std::size_t i = 0; i < 8; ++i) {
    EXPECT_EQ(report.images[i].quartile, static_cast<int>(i) / 2 + 1);
    if (i > 0) {
      EXPECT_LT(report.images[i - 1].seed_id, report.images[i].seed_id);
    }
  }
  std::map<std::string, std::array<double, 4>> pct;
  for (const auto& row : report.datasets) pct[row.label] = row.quartile_pct;
  EXPECT_EQ(pct["abstract"], (std::array<double, 4>{100, 100, 0, 0}));
  EXPECT_EQ(pct["filtered"], (std::array<double, 4>{0, 0, 100, 100}));
  for (int q = 0; q < 4; ++q) {
    double sum = 0.0;
    for (const auto& row : report.datasets) sum += row.quartile_pct[static_cast<std::size_t>(q)];
    EXPECT_NEAR(sum, 100.0, 1e-9);
    EXPECT_EQ(report.overall.quartile_pct[static_cast<std::size_t>(q)], 100.0);
  }
}

TEST(AccuracyReport, QuartilesOrderByAccuracy) {
  std::vector<std::pair<DatasetTag, double>> seeds;
  for (int i = 0; i < 12; ++i) seeds.push_back({i < 6 ? DatasetTag::kAbstract : DatasetTag::kWikiartLike, 0.5});
  const auto trials = synthetic_trials(seeds);
  std::vector<Response> responses;
  // Abstract seeds score 1..6 out of 10, wikiart 5..10.
  for (int i = 0; i < 12; ++i) respond(responses, i, i < 6 ? i + 1 : i - 1, 10);
  const auto report = accuracy_report(trials, responses);
  for (std::size_t i = 1; i < report.images.size(); ++i) {
    EXPECT_LE(report.images[i - 1].accuracy(), report.images[i].accuracy());
  }
  std::map<std::string, std::array<double, 4>> pct;
  for (const auto& row : report.datasets) pct[row.label] = row.quartile_pct;
  EXPECT_EQ(pct["abstract"][0], 100.0);
  EXPECT_EQ(pct["wikiart-like-external"][3], 100.0);
  // Accuracy strictly above one half: 6/10 from abstract, 6..10/10 from wikiart.
  EXPECT_EQ(report.per_image.successes, 1 + 5);
}

TEST(AccuracyReport, PearsonDistanceVersusIncorrect) {
  const auto trials = synthetic_trials(
      {{DatasetTag::kAbstract, 1.0}, {DatasetTag::kAbstract, 2.0}, {DatasetTag::kAbstract, 3.0}});
  std::vector<Response> responses;
  respond(responses, 0, 9, 10);  // 1 incorrect
  respond(responses, 1, 7, 10);  // 3 incorrect
  respond(responses, 2, 8, 10);  // 2 incorrect
  const auto report = accuracy_report(trials, responses);
  ASSERT_EQ(report.datasets.size(), 1u);
  ASSERT_TRUE(report.datasets[0].pearson);
  EXPECT_NEAR(*report.datasets[0].pearson, 0.5, 1e-12);
  EXPECT_NEAR(report.datasets[0].avg_distance, 2.0, 1e-12);
  EXPECT_EQ(report.datasets[0].correct, 24);
}

TEST(AccuracyReport, Errors) {
  const auto trials = synthetic_trials({{DatasetTag::kAbstract, 0.1}});
  EXPECT_EQ(code_of([&] { accuracy_report(trials, {}); }), ErrorCode::kEmptyResponses);
  EXPECT_EQ(code_of([&] { accuracy_report(trials, {{"p", 5, true}}); }),
            ErrorCode::kInvalidArgument);
}

TEST(Csv, TrialsAndResponsesRoundTrip) {
  auto trials = synthetic_trials({{DatasetTag::kAbstract, 0.125}, {DatasetTag::kPalette, 0.3}});
  trials[1].seed_id = "needs,quoting \"here\"";
  trials[1].is_control = true;
  EXPECT_EQ(parse_trials_csv(trials_to_csv(trials)), trials);
  const std::vector<Response> responses{{"alice", 0, true}, {"bob", 1, false}};
  EXPECT_EQ(parse_responses_csv(responses_to_csv(responses)), responses);
  EXPECT_TRUE(responses_to_csv(responses).starts_with("participant_id,trial_id,chose_retrieved\n"));
  EXPECT_EQ(code_of([] { parse_responses_csv("who,what\n"); }), ErrorCode::kParseError);
  EXPECT_EQ(code_of([] { parse_responses_csv("participant_id,trial_id,chose_retrieved\na,1,maybe\n"); }),
            ErrorCode::kParseError);
}

// Trials over a real index: 60 palettes and 54 filtered images.
class TrialCorpus : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = new testing_support::TempDir();
    corpus::DatasetManifest m;
    m.append(corpus::build_palette_dataset(corpus::random_palettes(12, 60), dir_->path()));
    std::vector<corpus::SourceImage> sources;
    for (int s = 0; s < 2; ++s) {
      RasterImage img(40, 32);
      for (int y = 0; y < 32; ++y) {
        for (int x = 0; x < 40; ++x) {
          img.set(x, y, {static_cast<std::uint8_t>(x * 6 + s * 90), static_cast<std::uint8_t>(y * 7),
                         static_cast<std::uint8_t>((x ^ y) * 8)});
        }
      }
      sources.push_back({"s" + std::to_string(s), img});
    }
    m.append(corpus::build_filtered_dataset(sources, 27, 3, dir_->path()));
    corpus::IndexOptions opts;
    opts.forest = {6, 8, 2};
    auto built = corpus::index_corpus(m, dir_->path(), opts, dir_->path() / "index.cobs");
    built.manifest.save(dir_->path() / "manifest.txt");
    corpus_ = new corpus::IndexedCorpus(
        corpus::IndexedCorpus::open(dir_->path() / "manifest.txt", dir_->path() / "index.cobs"));
  }
  static void TearDownTestSuite() {
    delete corpus_;
    delete dir_;
  }

  static std::vector<std::string> seeds(std::size_t per_dataset) {
    std::vector<std::string> out;
    for (auto tag : {DatasetTag::kPalette, DatasetTag::kFiltered}) {
      const auto members = corpus_->members(tag);
      for (std::size_t i = 0; i < per_dataset; ++i) out.push_back(members[i]->id);
    }
    return out;
  }

  static testing_support::TempDir* dir_;
  static corpus::IndexedCorpus* corpus_;
};

testing_support::TempDir* TrialCorpus::dir_ = nullptr;
corpus::IndexedCorpus* TrialCorpus::corpus_ = nullptr;

TEST_F(TrialCorpus, NinetySixSeedsMakeHundredTrials) {
  const auto ids = seeds(48);
  ASSERT_EQ(ids.size(), 96u);
  const auto trials = generate_trials(ids, *corpus_, 7, 4);
  ASSERT_EQ(trials.size(), 100u);
  int controls = 0;
  std::set<std::string> control_seeds;
  for (std::size_t i = 0; i < trials.size(); ++i) {
    const auto& t = trials[i];
    EXPECT_EQ(t.trial_id, static_cast<int>(i));
    EXPECT_NE(t.retrieved_id, t.random_id);
    EXPECT_EQ(corpus_->find(t.random_id)->tag, t.dataset);
    EXPECT_EQ(corpus_->find(t.retrieved_id)->tag, t.dataset);
    if (t.is_control) {
      ++controls;
      EXPECT_EQ(t.retrieved_id, t.seed_id);
      EXPECT_EQ(t.retrieved_distance, 0.0);
      control_seeds.insert(t.seed_id);
    } else {
      EXPECT_NE(t.retrieved_id, t.seed_id);
      const auto hits = corpus_->query_dataset(t.dataset, corpus_->embedding(*corpus_->find(t.seed_id)),
                                               1, corpus_->find(t.seed_id));
      EXPECT_EQ(hits[0].record->id, t.retrieved_id);
      EXPECT_DOUBLE_EQ(hits[0].distance, t.retrieved_distance);
    }
  }
  EXPECT_EQ(controls, 4);
  for (const auto& s : control_seeds) {
    EXPECT_EQ(std::find(ids.begin(), ids.end(), s), ids.end()) << "control reuses seed " << s;
  }
}

TEST_F(TrialCorpus, DeterministicPerSeed) {
  const auto ids = seeds(10);
  EXPECT_EQ(generate_trials(ids, *corpus_, 5), generate_trials(ids, *corpus_, 5));
  EXPECT_NE(generate_trials(ids, *corpus_, 5), generate_trials(ids, *corpus_, 6));
}

TEST_F(TrialCorpus, NoControls) {
  for (const auto& t : generate_trials(seeds(5), *corpus_, 1, 0)) EXPECT_FALSE(t.is_control);
}

TEST_F(TrialCorpus, Errors) {
  EXPECT_EQ(code_of([] { generate_trials({}, *corpus_, 1); }), ErrorCode::kEmptyInput);
  EXPECT_EQ(code_of([] { generate_trials({"missing"}, *corpus_, 1); }), ErrorCode::kUnknownImage);
}

TEST_F(TrialCorpus, ProxyPanelPrefersRetrieved) {
  const auto trials = generate_trials(seeds(30), *corpus_, 9);
  const auto responses = proxy_responses(trials, *corpus_);
  EXPECT_EQ(responses.size(), trials.size() * ProxyPanel{}.judges.size());
  for (const auto& r : responses) EXPECT_TRUE(r.participant.starts_with(kProxyParticipantPrefix));
  const auto report = accuracy_report(trials, responses);
  EXPECT_GT(report.overall.accuracy, 0.5);
  EXPECT_LT(report.per_trial.p_value, 0.01);
  // Every judge picks the exact match over a distinct random image.
  EXPECT_EQ(report.control_correct, report.control_responses);
}

TEST(TwoImageDataset, RandomIsTheOtherImage) {
  testing_support::TempDir dir;
  corpus::DatasetManifest m;
  m.append(corpus::build_palette_dataset(corpus::random_palettes(1, 2), dir.path()));
  corpus::IndexOptions opts;
  opts.forest = {2, 4, 1};
  auto built = corpus::index_corpus(m, dir.path(), opts, dir.path() / "index.cobs");
  built.manifest.save(dir.path() / "manifest.txt");
  const auto c = corpus::IndexedCorpus::open(dir.path() / "manifest.txt", dir.path() / "index.cobs");
  const auto a = c.manifest().records[0].id;
  const auto b = c.manifest().records[1].id;
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto trials = generate_trials({a}, c, s, 0);
    ASSERT_EQ(trials.size(), 1u);
    EXPECT_EQ(trials[0].retrieved_id, b);
    EXPECT_EQ(trials[0].random_id, a);
  }
  corpus::DatasetManifest single;
  testing_support::TempDir dir2;
  single.append(corpus::build_palette_dataset(corpus::random_palettes(1, 1), dir2.path()));
  single.append(corpus::build_filtered_dataset({{"s", RasterImage(20, 20, {9, 9, 9})}}, 2, 1, dir2.path()));
  auto built2 = corpus::index_corpus(single, dir2.path(), opts, dir2.path() / "index.cobs");
  built2.manifest.save(dir2.path() / "manifest.txt");
  const auto c2 = corpus::IndexedCorpus::open(dir2.path() / "manifest.txt", dir2.path() / "index.cobs");
  EXPECT_EQ(code_of([&] { generate_trials({c2.manifest().records[0].id}, c2, 1, 0); }),
            ErrorCode::kDatasetTooSmall);
}

TEST(Yield, Examples) {
  EXPECT_EQ(round2(session_yield(19, 5, 20)), 0.83);
  EXPECT_EQ(round2(session_yield(29, 14, 59)), 1.37);
  EXPECT_EQ(round2(session_yield(1, 0, 0)), 0.0);
  EXPECT_EQ(code_of([] { session_yield(0, 0, 3); }), ErrorCode::kNoRetrievals);
}

TEST(Duration, ParseAndFormat) {
  EXPECT_EQ(parse_duration("5m41s"), 341);
  EXPECT_EQ(parse_duration("41s"), 41);
  EXPECT_EQ(parse_duration("5m"), 300);
  EXPECT_EQ(parse_duration("75"), 75);
  EXPECT_EQ(format_duration(341), "5m41s");
  EXPECT_EQ(format_duration(739.125), "12m19s");
  EXPECT_EQ(format_duration(65), "1m05s");
  EXPECT_EQ(code_of([] { parse_duration("5x"); }), ErrorCode::kParseError);
}

class PilotTable : public ::testing::Test {
 protected:
  std::vector<SessionLog> logs = parse_pilot_csv(read_text(OBSCURER_TEST_DATA "/pilot_sessions.csv"));
};

TEST_F(PilotTable, MeanRow) {
  ASSERT_EQ(logs.size(), 8u);
  const auto s = pilot_summary(logs);
  EXPECT_EQ(format_duration(s.mean.duration_s), "12m19s");
  EXPECT_EQ(round2(s.mean.external_seeds), 23.38);
  EXPECT_EQ(round2(s.mean.internal_seeds), 14.13);
  EXPECT_EQ(round2(s.mean.pins), 27.00);
  EXPECT_EQ(round2(s.mean.yield), 0.72);
  const std::array<double, 6> pins{5.00, 3.13, 7.00, 5.38, 0.88, 5.63};
  for (std::size_t i = 0; i < 6; ++i) EXPECT_EQ(round2(s.mean.dataset_pins[i]), pins[i]) << i;
}

TEST_F(PilotTable, RecomputedYieldsMatchPrintedColumn) {
  for (const auto& log : logs) {
    ASSERT_TRUE(log.reported_yield);
    EXPECT_NEAR(session_yield(log.external_seeds, log.internal_seeds, log.pins), *log.reported_yield,
                0.005)
        << log.participant;
  }
}

TEST_F(PilotTable, FormattedTableShowsPrintedValues) {
  const auto table = format_pilot_table(pilot_summary(logs));
  for (const char* want : {"5m41s", "0.83", "1.37", "12m19s", "23.38", "14.13", "27.00", "0.72",
                           "3.13", "5.38", "0.88", "5.63"}) {
    EXPECT_NE(table.find(want), std::string::npos) << want << "\n" << table;
  }
}

TEST(Pilot, SingleLogMeanEqualsLog) {
  SessionLog log{"solo", 100, 3, 1, 2, {1, 0, 1, 0, 0, 0}, std::nullopt};
  const auto s = pilot_summary({log});
  EXPECT_EQ(s.mean.pins, 2.0);
  EXPECT_EQ(s.mean.external_seeds, 3.0);
  EXPECT_EQ(s.mean.yield, s.rows[0].yield);
  EXPECT_EQ(s.mean.dataset_pins, s.rows[0].dataset_pins);
}

TEST(Pilot, ValidationErrors) {
  SessionLog bad{"x", 10, 1, 1, 3, {1, 1, 0, 0, 0, 0}, std::nullopt};
  EXPECT_EQ(code_of([&] { pilot_summary({bad}); }), ErrorCode::kInvalidArgument);
  bad.dataset_pins = {1, 1, 1, 0, 0, 0};
  bad.external_seeds = -1;
  EXPECT_EQ(code_of([&] { pilot_summary({bad}); }), ErrorCode::kInvalidArgument);
  EXPECT_EQ(code_of([] { pilot_summary({}); }), ErrorCode::kEmptyInput);
  EXPECT_EQ(code_of([] { parse_pilot_csv("a,b\n"); }), ErrorCode::kParseError);
}

}  // namespace
}  // namespace obscurer::evalkit
