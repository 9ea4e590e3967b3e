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

#include "obscurer/service/service.h"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cctype>
#include <chrono>
#include <fstream>

#include "json.hpp"
#include "obscurer/common/error.h"
#include "obscurer/common/image_io.h"

namespace obscurer::service {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr std::string_view kDefaultBoard = "default";

std::int64_t now_ms() {
  return std::chrono::duration_cast<std::chrono::milliseconds>(
             std::chrono::system_clock::now().time_since_epoch())
      .count();
}

std::string url_encode(std::string_view s) {
  static constexpr char kHex[] = "0123456789ABCDEF";
  std::string out;
  for (unsigned char c : s) {
    if (std::isalnum(c) || c == '-' || c == '_' || c == '.' || c == '~') {
      out += static_cast<char>(c);
    } else {
      out += '%';
      out += kHex[c >> 4];
      out += kHex[c & 0x0f];
    }
  }
  return out;
}

void append_durably(const fs::path& path, const std::string& line) {
  const int fd = ::open(path.c_str(), O_WRONLY | O_APPEND | O_CREAT | O_CLOEXEC, 0644);
  if (fd < 0) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  std::size_t done = 0;
  while (done < line.size()) {
    const ssize_t n = ::write(fd, line.data() + done, line.size() - done);
    if (n < 0) {
      ::close(fd);
      throw Error(ErrorCode::kIoError, "write failed on " + path.string());
    }
    done += static_cast<std::size_t>(n);
  }
  const bool synced = ::fsync(fd) == 0;
  ::close(fd);
  if (!synced) throw Error(ErrorCode::kIoError, "fsync failed on " + path.string());
}

}  // namespace

std::vector<int> allocate_slots(std::span<const std::size_t> available, int total) {
  const std::size_t n = available.size();
  std::vector<int> slots(n, 0);
  if (n == 0 || total <= 0) return slots;
  const int base = total / static_cast<int>(n);
  const int extra = total % static_cast<int>(n);
  int remaining = total;
  for (std::size_t i = 0; i < n; ++i) {
    const int want = base + (static_cast<int>(i) < extra ? 1 : 0);
    slots[i] = static_cast<int>(std::min<std::size_t>(want, available[i]));
    remaining -= slots[i];
  }
  for (bool progress = true; remaining > 0 && progress;) {
    progress = false;
    for (std::size_t i = 0; i < n && remaining > 0; ++i) {
      if (static_cast<std::size_t>(slots[i]) < available[i]) {
        ++slots[i];
        --remaining;
        progress = true;
      }
    }
  }
  return slots;
}

bool is_valid_board_name(std::string_view name) {
  if (name.empty() || name.size() > 64) return false;
  return std::all_of(name.begin(), name.end(), [](unsigned char c) {
    return std::isalnum(c) || c == '-' || c == '_';
  });
}

bool is_upload_ref(std::string_view ref) {
  return ref.size() == 64 && std::all_of(ref.begin(), ref.end(), [](char c) {
           return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f');
         });
}

RetrievalService::RetrievalService(std::shared_ptr<const corpus::IndexedCorpus> corpus,
                                   ServiceOptions options)
    : corpus_(std::move(corpus)), options_(std::move(options)) {
  if (options_.boards_dir.empty()) throw Error(ErrorCode::kInvalidArgument, "boards dir required");
  if (options_.result_count < 1) throw Error(ErrorCode::kInvalidArgument, "result_count < 1");
  fs::create_directories(options_.boards_dir / "uploads");
  load_boards();
}

void RetrievalService::load_boards() {
  boards_[std::string(kDefaultBoard)];
  for (const auto& entry : fs::directory_iterator(options_.boards_dir)) {
    const auto& p = entry.path();
    if (!entry.is_regular_file() || p.extension() != ".jsonl") continue;
    const std::string name = p.stem().string();
    if (!is_valid_board_name(name)) continue;
    auto& pins = boards_[name];
    std::ifstream in(p);
    std::string line;
    while (std::getline(in, line)) {
      // A torn final line from an interrupted append carries no
      // acknowledged pin, so it is dropped.
      const json j = json::parse(line, nullptr, false);
      if (j.is_discarded() || !j.is_object() || !j.contains("ref")) continue;
      pins.push_back({j.value("ref", ""), j.value("timestamp", std::int64_t{0}),
                      j.value("session", "")});
    }
  }
}

const corpus::IndexedCorpus& RetrievalService::require_corpus() const {
  if (!corpus_) throw Error(ErrorCode::kIndexUnavailable, "no index loaded");
  return *corpus_;
}

RetrievalSet RetrievalService::retrieve(SeedRef seed, std::span<const float> q,
                                        const corpus::ImageRecord* exclude) const {
  const auto& c = require_corpus();
  const auto tags = c.datasets();
  std::vector<std::size_t> available;
  for (auto tag : tags) {
    std::size_t n = c.members(tag).size();
    if (exclude != nullptr && exclude->tag == tag) --n;
    available.push_back(n);
  }
  const auto slots = allocate_slots(available, options_.result_count);

  RetrievalSet set;
  set.seed = std::move(seed);
  for (std::size_t i = 0; i < tags.size(); ++i) {
    if (slots[i] == 0) continue;
    for (const auto& hit : c.query_dataset(tags[i], q, slots[i], exclude, options_.search_k)) {
      set.results.push_back({hit.record->id, hit.record->tag, hit.distance,
                             "/api/image/" + url_encode(hit.record->id)});
    }
  }
  set.underfilled = set.results.size() < static_cast<std::size_t>(options_.result_count);
  set.timestamp_ms = now_ms();
  return set;
}

std::shared_ptr<RetrievalService::Session> RetrievalService::session(const std::string& id) {
  std::lock_guard lock(sessions_mu_);
  auto& s = sessions_[id];
  if (!s) s = std::make_shared<Session>();
  return s;
}

void RetrievalService::record(const std::string& session_id, const RetrievalSet& set) {
  auto s = session(session_id);
  std::lock_guard lock(s->mu);
  if (s->current) {
    s->history.push_back(std::move(*s->current));
    if (s->history.size() > options_.history_capacity) s->history.pop_front();
  }
  s->current = set;
}

RetrievalSet RetrievalService::search_by_upload(const std::string& session_id,
                                                std::span<const std::uint8_t> bytes) {
  const auto& c = require_corpus();
  const RasterImage img = decode_image(bytes);
  const auto q = c.embed(img);

  const std::string hash = sha256_hex(bytes);
  const fs::path dst = options_.boards_dir / "uploads" / hash;
  if (!fs::exists(dst)) {
    // Write-then-rename keeps concurrent identical uploads from exposing
    // a partial file.
    static std::atomic<std::uint64_t> counter{0};
    const fs::path tmp = dst.string() + ".tmp" + std::to_string(::getpid()) + "_" +
                         std::to_string(counter.fetch_add(1));
    write_file(tmp, bytes);
    fs::rename(tmp, dst);
  }

  auto set = retrieve({SeedRef::Kind::kUpload, hash}, q, nullptr);
  record(session_id, set);
  return set;
}

RetrievalSet RetrievalService::search_by_image_id(const std::string& session_id,
                                                  std::string_view id) {
  const auto& c = require_corpus();
  const auto* rec = c.find(id);
  if (rec == nullptr) throw Error(ErrorCode::kUnknownImage, std::string(id));
  auto set = retrieve({SeedRef::Kind::kImage, rec->id}, c.embedding(*rec), rec);
  record(session_id, set);
  return set;
}

RetrievalSet RetrievalService::undo(const std::string& session_id) {
  auto s = session(session_id);
  std::lock_guard lock(s->mu);
  if (s->history.empty()) throw Error(ErrorCode::kHistoryEmpty, "nothing to undo");
  s->current = std::move(s->history.back());
  s->history.pop_back();
  return *s->current;
}

fs::path RetrievalService::board_path(const std::string& board) const {
  return options_.boards_dir / (board + ".jsonl");
}

void RetrievalService::create_board(const std::string& board) {
  if (!is_valid_board_name(board)) {
    throw Error(ErrorCode::kInvalidArgument, "board names use [A-Za-z0-9_-], 1-64 chars");
  }
  std::lock_guard lock(boards_mu_);
  if (boards_.contains(board)) return;
  append_durably(board_path(board), "");
  boards_[board];
}

std::vector<Pin> RetrievalService::pin(const std::string& session_id, const std::string& board,
                                       const std::string& ref) {
  const bool known = (corpus_ && corpus_->find(ref) != nullptr) ||
                     (is_upload_ref(ref) && fs::exists(options_.boards_dir / "uploads" / ref));
  std::lock_guard lock(boards_mu_);
  const auto it = boards_.find(board);
  if (it == boards_.end()) throw Error(ErrorCode::kUnknownBoard, board);
  if (!known) throw Error(ErrorCode::kUnknownImage, ref);
  const Pin p{ref, now_ms(), session_id};
  const json j = {{"ref", p.ref}, {"timestamp", p.timestamp_ms}, {"session", p.session}};
  append_durably(board_path(board), j.dump() + "\n");
  it->second.push_back(p);
  return it->second;
}

std::vector<Pin> RetrievalService::board(const std::string& board) const {
  std::lock_guard lock(boards_mu_);
  const auto it = boards_.find(board);
  if (it == boards_.end()) throw Error(ErrorCode::kUnknownBoard, board);
  return it->second;
}

std::vector<std::string> RetrievalService::boards() const {
  std::lock_guard lock(boards_mu_);
  std::vector<std::string> out;
  for (const auto& [name, pins] : boards_) out.push_back(name);
  return out;
}

std::vector<DatasetInfo> RetrievalService::datasets() const {
  std::vector<DatasetInfo> out;
  const auto& c = require_corpus();
  for (auto tag : c.datasets()) out.push_back({tag, c.members(tag).size()});
  return out;
}

std::optional<fs::path> RetrievalService::image_file(std::string_view ref) const {
  if (corpus_) {
    if (const auto* rec = corpus_->find(ref)) return corpus_->image_path(*rec);
  }
  if (is_upload_ref(ref)) {
    fs::path p = options_.boards_dir / "uploads" / std::string(ref);
    if (fs::exists(p)) return p;
  }
  return std::nullopt;
}

}  // namespace obscurer::service
