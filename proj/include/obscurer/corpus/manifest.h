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
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "obscurer/features/descriptor.h"

namespace obscurer::corpus {

enum class DatasetTag : std::uint8_t { kAbstract, kFiltered, kWikiartLike, kArchiveLike, kPalette };

inline constexpr std::array<DatasetTag, 5> kDatasetRoster = {
    DatasetTag::kAbstract, DatasetTag::kFiltered, DatasetTag::kWikiartLike,
    DatasetTag::kArchiveLike, DatasetTag::kPalette};

std::string_view tag_name(DatasetTag tag);
std::optional<DatasetTag> parse_tag(std::string_view name);

struct ImageRecord {
  std::string id;
  DatasetTag tag = DatasetTag::kAbstract;
  std::string path;             // relative to the corpus root unless absolute
  double crop_fraction = 0.0;   // applied to the analysed copy only
  std::int64_t embedding_offset = -1;

  friend bool operator==(const ImageRecord&, const ImageRecord&) = default;
};

struct ManifestFragment {
  std::vector<ImageRecord> records;
  std::size_t skipped = 0;
  std::map<std::string, std::string> meta;
};

// Line-oriented catalog:
//
//   obscurer-manifest 1
//   meta <key>=<value>          (sorted by key; includes count.<tag>)
//   record id=.. tag=.. path=.. crop=.. offset=..
//
// Values are percent-encoded for space, '=', '%' and control bytes.
class DatasetManifest {
 public:
  std::vector<ImageRecord> records;
  std::map<std::string, std::string> meta;

  void append(const ManifestFragment& fragment);
  const ImageRecord* find(std::string_view id) const;
  std::map<DatasetTag, std::size_t> counts() const;

  features::DescriptorConfig descriptor() const;
  void set_descriptor(const features::DescriptorConfig& cfg);

  std::string serialize() const;
  // Throws kParseError, kDuplicateId.
  static DatasetManifest parse(std::string_view text);

  void save(const std::filesystem::path& path) const;
  static DatasetManifest load(const std::filesystem::path& path);
};

std::filesystem::path resolve_record_path(const std::filesystem::path& root,
                                          const ImageRecord& record);

}  // namespace obscurer::corpus
