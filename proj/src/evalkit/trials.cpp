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

#include "obscurer/evalkit/trials.h"

#include <algorithm>
#include <map>
#include <set>

#include "csv.h"
#include "obscurer/common/error.h"
#include "obscurer/common/image_io.h"
#include "obscurer/common/parallel.h"
#include "obscurer/common/rng.h"
#include "obscurer/corpus/datasets.h"

namespace obscurer::evalkit {
namespace {

using corpus::ImageRecord;

const ImageRecord* uniform_except(Rng& rng, std::span<const ImageRecord* const> members,
                                  const ImageRecord* skip) {
  const auto pos = std::find(members.begin(), members.end(), skip) - members.begin();
  auto j = static_cast<std::ptrdiff_t>(rng.below(members.size() - 1));
  if (j >= pos) ++j;
  return members[static_cast<std::size_t>(j)];
}

std::span<const ImageRecord* const> dataset_of(const corpus::IndexedCorpus& corpus,
                                               const ImageRecord& rec) {
  const auto members = corpus.members(rec.tag);
  if (members.size() < 2) {
    throw Error(ErrorCode::kDatasetTooSmall, std::string(corpus::tag_name(rec.tag)) + " has " +
                                                 std::to_string(members.size()) + " image(s)");
  }
  return members;
}

const std::vector<std::string> kTrialHeader = {"trial_id",  "seed_id",    "retrieved_id",
                                               "random_id", "is_control", "retrieved_distance",
                                               "dataset"};
const std::vector<std::string> kResponseHeader = {"participant_id", "trial_id", "chose_retrieved"};

void expect_header(const std::vector<std::string>& lines, const std::vector<std::string>& header) {
  if (lines.empty() || detail::split_csv_line(lines[0], 1) != header) {
    throw Error(ErrorCode::kParseError, "csv header must be " + [&] {
      std::string s;
      for (const auto& h : header) s += (s.empty() ? "" : ",") + h;
      return s;
    }());
  }
}

bool parse_flag(const std::string& s, std::size_t line_no, const char* what) {
  if (s == "1" || s == "true") return true;
  if (s == "0" || s == "false") return false;
  throw Error(ErrorCode::kParseError,
              "csv line " + std::to_string(line_no) + ": bad " + what + " '" + s + "'");
}

}  // namespace

int control_count(std::size_t seeds, int controls_per_100) {
  if (controls_per_100 < 0 || controls_per_100 > 99) {
    throw Error(ErrorCode::kInvalidParams, "controls_per_100 must lie in [0, 99]");
  }
  const auto num = static_cast<std::uint64_t>(seeds) * static_cast<std::uint64_t>(controls_per_100);
  const auto den = static_cast<std::uint64_t>(100 - controls_per_100);
  return static_cast<int>((num + den - 1) / den);
}

std::vector<Trial> generate_trials(const std::vector<std::string>& seed_ids,
                                   const corpus::IndexedCorpus& corpus, std::uint64_t rng_seed,
                                   int controls_per_100, int search_k) {
  if (seed_ids.empty()) throw Error(ErrorCode::kEmptyInput, "no seed images");
  const int controls = control_count(seed_ids.size(), controls_per_100);
  Rng rng(rng_seed);

  std::vector<Trial> trials;
  std::set<std::string, std::less<>> seed_set;
  for (const auto& id : seed_ids) {
    const ImageRecord* seed = corpus.find(id);
    if (seed == nullptr) throw Error(ErrorCode::kUnknownImage, id);
    seed_set.insert(id);
    const auto members = dataset_of(corpus, *seed);
    const auto hits = corpus.query_dataset(seed->tag, corpus.embedding(*seed), 1, seed, search_k);
    Trial t;
    t.seed_id = seed->id;
    t.retrieved_id = hits.at(0).record->id;
    t.random_id = uniform_except(rng, members, hits[0].record)->id;
    t.retrieved_distance = hits[0].distance;
    t.dataset = seed->tag;
    trials.push_back(std::move(t));
  }

  // Control seeds come from the datasets under test, preferring images
  // that are not already seeds.
  for (int c = 0; c < controls; ++c) {
    const ImageRecord* anchor = corpus.find(seed_ids[rng.below(seed_ids.size())]);
    const auto members = dataset_of(corpus, *anchor);
    std::vector<const ImageRecord*> fresh;
    for (const auto* m : members) {
      if (!seed_set.contains(m->id)) fresh.push_back(m);
    }
    const ImageRecord* seed = fresh.empty() ? members[rng.below(members.size())]
                                            : fresh[rng.below(fresh.size())];
    seed_set.insert(seed->id);
    Trial t;
    t.seed_id = seed->id;
    t.retrieved_id = seed->id;
    t.random_id = uniform_except(rng, members, seed)->id;
    t.is_control = true;
    t.retrieved_distance = 0.0;
    t.dataset = seed->tag;
    trials.push_back(std::move(t));
  }

  for (std::size_t i = trials.size(); i > 1; --i) {
    std::swap(trials[i - 1], trials[rng.below(i)]);
  }
  for (std::size_t i = 0; i < trials.size(); ++i) trials[i].trial_id = static_cast<int>(i);
  return trials;
}

std::vector<Response> proxy_responses(const std::vector<Trial>& trials,
                                      const corpus::IndexedCorpus& corpus,
                                      const ProxyPanel& panel) {
  if (panel.judges.empty()) throw Error(ErrorCode::kInvalidParams, "proxy panel has no judges");
  std::map<std::string, std::size_t> slot;
  std::vector<const ImageRecord*> images;
  for (const auto& t : trials) {
    for (const auto* id : {&t.seed_id, &t.retrieved_id, &t.random_id}) {
      if (slot.contains(*id)) continue;
      const ImageRecord* rec = corpus.find(*id);
      if (rec == nullptr) throw Error(ErrorCode::kUnknownImage, *id);
      slot.emplace(*id, images.size());
      images.push_back(rec);
    }
  }

  const std::size_t nj = panel.judges.size();
  std::vector<features::EmbeddingVector> emb(images.size() * nj);
  parallel_for(images.size(), [&](std::size_t i) {
    const RasterImage img = corpus::crop_border(load_image(corpus.image_path(*images[i])),
                                                images[i]->crop_fraction);
    for (std::size_t j = 0; j < nj; ++j) {
      emb[i * nj + j] = features::extract_descriptor(img, panel.judges[j]);
    }
  });

  std::vector<Response> out;
  out.reserve(trials.size() * nj);
  for (std::size_t j = 0; j < nj; ++j) {
    const std::string participant = std::string(kProxyParticipantPrefix) + std::to_string(j + 1);
    for (const auto& t : trials) {
      const auto& s = emb[slot[t.seed_id] * nj + j];
      const double d_ret = features::cosine_distance(s, emb[slot[t.retrieved_id] * nj + j]);
      const double d_rnd = features::cosine_distance(s, emb[slot[t.random_id] * nj + j]);
      out.push_back({participant, t.trial_id, d_ret < d_rnd});
    }
  }
  return out;
}

std::string trials_to_csv(const std::vector<Trial>& trials) {
  std::string out = "trial_id,seed_id,retrieved_id,random_id,is_control,retrieved_distance,dataset\n";
  for (const auto& t : trials) {
    out += std::to_string(t.trial_id) + ',' + detail::csv_field(t.seed_id) + ',' +
           detail::csv_field(t.retrieved_id) + ',' + detail::csv_field(t.random_id) + ',' +
           (t.is_control ? "1" : "0") + ',' + detail::format_double(t.retrieved_distance) + ',' +
           std::string(corpus::tag_name(t.dataset)) + '\n';
  }
  return out;
}

std::vector<Trial> parse_trials_csv(const std::string& text) {
  const auto lines = detail::csv_lines(text);
  expect_header(lines, kTrialHeader);
  std::vector<Trial> out;
  std::set<int> ids;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const std::size_t ln = i + 1;
    const auto f = detail::split_csv_line(lines[i], ln);
    if (f.size() != kTrialHeader.size()) {
      throw Error(ErrorCode::kParseError, "csv line " + std::to_string(ln) + ": expected 7 fields");
    }
    Trial t;
    t.trial_id = detail::parse_int(f[0], ln, "trial_id");
    t.seed_id = f[1];
    t.retrieved_id = f[2];
    t.random_id = f[3];
    t.is_control = parse_flag(f[4], ln, "is_control");
    t.retrieved_distance = detail::parse_double(f[5], ln, "retrieved_distance");
    const auto tag = corpus::parse_tag(f[6]);
    if (!tag) throw Error(ErrorCode::kParseError, "csv line " + std::to_string(ln) + ": bad dataset");
    t.dataset = *tag;
    if (!ids.insert(t.trial_id).second) {
      throw Error(ErrorCode::kDuplicateId, "trial " + std::to_string(t.trial_id));
    }
    out.push_back(std::move(t));
  }
  return out;
}

std::string responses_to_csv(const std::vector<Response>& responses) {
  std::string out = "participant_id,trial_id,chose_retrieved\n";
  for (const auto& r : responses) {
    out += detail::csv_field(r.participant) + ',' + std::to_string(r.trial_id) + ',' +
           (r.chose_retrieved ? "1" : "0") + '\n';
  }
  return out;
}

std::vector<Response> parse_responses_csv(const std::string& text) {
  const auto lines = detail::csv_lines(text);
  expect_header(lines, kResponseHeader);
  std::vector<Response> out;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const std::size_t ln = i + 1;
    const auto f = detail::split_csv_line(lines[i], ln);
    if (f.size() != 3) {
      throw Error(ErrorCode::kParseError, "csv line " + std::to_string(ln) + ": expected 3 fields");
    }
    out.push_back({f[0], detail::parse_int(f[1], ln, "trial_id"),
                   parse_flag(f[2], ln, "chose_retrieved")});
  }
  return out;
}

}  // namespace obscurer::evalkit
