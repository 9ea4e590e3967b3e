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
#include <deque>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "obscurer/corpus/indexer.h"

namespace obscurer::service {

struct RetrievedImage {
  std::string id;
  corpus::DatasetTag tag = corpus::DatasetTag::kAbstract;
  double distance = 0.0;
  std::string url;

  friend bool operator==(const RetrievedImage&, const RetrievedImage&) = default;
};

struct SeedRef {
  enum class Kind { kUpload, kImage };
  Kind kind = Kind::kImage;
  std::string ref;  // upload hash or image id

  friend bool operator==(const SeedRef&, const SeedRef&) = default;
};

struct RetrievalSet {
  SeedRef seed;
  std::vector<RetrievedImage> results;
  bool underfilled = false;  // fewer than the requested number available
  std::int64_t timestamp_ms = 0;
};

struct Pin {
  std::string ref;
  std::int64_t timestamp_ms = 0;
  std::string session;
};

struct DatasetInfo {
  corpus::DatasetTag tag;
  std::size_t count = 0;
};

struct ServiceOptions {
  std::filesystem::path boards_dir;
  int result_count = 10;
  std::size_t history_capacity = 50;
  int search_k = ann::kDefaultSearchK;
};

// Splits `total` slots across datasets with the given availability:
// an even share each (earlier datasets take the remainder), then
// round-robin top-up from datasets that still have images.
std::vector<int> allocate_slots(std::span<const std::size_t> available, int total);

bool is_valid_board_name(std::string_view name);
bool is_upload_ref(std::string_view ref);

// Search, history, boards and uploads on top of a loaded corpus. A null
// corpus makes every search fail with kIndexUnavailable.
class RetrievalService {
 public:
  RetrievalService(std::shared_ptr<const corpus::IndexedCorpus> corpus, ServiceOptions options);

  RetrievalSet search_by_upload(const std::string& session, std::span<const std::uint8_t> bytes);
  RetrievalSet search_by_image_id(const std::string& session, std::string_view id);
  RetrievalSet undo(const std::string& session);

  void create_board(const std::string& board);
  std::vector<Pin> pin(const std::string& session, const std::string& board,
                       const std::string& ref);
  std::vector<Pin> board(const std::string& board) const;
  std::vector<std::string> boards() const;

  std::vector<DatasetInfo> datasets() const;
  // Full-resolution file for an indexed id or a stored upload hash.
  std::optional<std::filesystem::path> image_file(std::string_view ref) const;

  const corpus::IndexedCorpus* corpus() const noexcept { return corpus_.get(); }

 private:
  struct Session {
    std::mutex mu;
    std::optional<RetrievalSet> current;
    std::deque<RetrievalSet> history;  // back is most recent
  };

  const corpus::IndexedCorpus& require_corpus() const;
  RetrievalSet retrieve(SeedRef seed, std::span<const float> q,
                        const corpus::ImageRecord* exclude) const;
  void record(const std::string& session, const RetrievalSet& set);
  std::shared_ptr<Session> session(const std::string& id);
  std::filesystem::path board_path(const std::string& board) const;
  void load_boards();

  std::shared_ptr<const corpus::IndexedCorpus> corpus_;
  ServiceOptions options_;

  std::mutex sessions_mu_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;

  mutable std::mutex boards_mu_;
  std::map<std::string, std::vector<Pin>> boards_;
};

}  // namespace obscurer::service
