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

#include <cstdint>
#include <string>
#include <vector>

#include "obscurer/corpus/indexer.h"
#include "obscurer/features/descriptor.h"

namespace obscurer::evalkit {

struct Trial {
  int trial_id = 0;
  std::string seed_id;
  std::string retrieved_id;
  std::string random_id;
  bool is_control = false;
  double retrieved_distance = 0.0;
  corpus::DatasetTag dataset = corpus::DatasetTag::kAbstract;

  friend bool operator==(const Trial&, const Trial&) = default;
};

struct Response {
  std::string participant;
  int trial_id = 0;
  bool chose_retrieved = false;

  friend bool operator==(const Response&, const Response&) = default;
};

// Controls added for n seeds: ceil(n * c / (100 - c)), so 96 seeds with
// c = 4 make 100 trials. c must lie in [0, 99].
int control_count(std::size_t seeds, int controls_per_100);

// One trial per seed (retrieved = nearest other image of the seed's
// dataset, random = uniform over that dataset minus the retrieved one),
// plus control trials whose retrieved image is their own seed. Trial
// order is shuffled; ids are positions. Throws kUnknownImage,
// kDatasetTooSmall.
std::vector<Trial> generate_trials(const std::vector<std::string>& seed_ids,
                                   const corpus::IndexedCorpus& corpus, std::uint64_t rng_seed,
                                   int controls_per_100 = 4,
                                   int search_k = ann::kDefaultSearchK);

// Deterministic stand-in raters for pipeline tests. Each judge embeds
// seed, retrieved and random images with its own descriptor config and
// picks whichever is closer to the seed. These are not human responses.
struct ProxyPanel {
  std::vector<features::DescriptorConfig> judges{
      {2, 4, 4, 64}, {3, 6, 6, 96}, {4, 4, 12, 128}, {6, 8, 8, 96}};
};
inline constexpr std::string_view kProxyParticipantPrefix = "machine-proxy-";

std::vector<Response> proxy_responses(const std::vector<Trial>& trials,
                                      const corpus::IndexedCorpus& corpus,
                                      const ProxyPanel& panel = {});

// CSV with a header row.
//   trials:    trial_id,seed_id,retrieved_id,random_id,is_control,retrieved_distance,dataset
//   responses: participant_id,trial_id,chose_retrieved
std::string trials_to_csv(const std::vector<Trial>& trials);
std::vector<Trial> parse_trials_csv(const std::string& text);
std::string responses_to_csv(const std::vector<Response>& responses);
std::vector<Response> parse_responses_csv(const std::string& text);

}  // namespace obscurer::evalkit
