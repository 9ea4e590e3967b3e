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
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "obscurer/annforest/forest.h"

namespace obscurer::ann {

// Binary layout, all little-endian:
//
//   "COBS" | version u32 | D u32 | count u64 | n_trees u32
//   build_seed u64 | manifest_ref_len u32 | manifest_ref bytes
//   vectors f32[count * D]
//   per tree: leaf_size u32 | tree_seed u64 | node_count u32 | nodes...
//     leaf:  tag u8 = 0 | item_count u32 | ids u32[item_count]
//     split: tag u8 = 1 | left u32 | right u32 | offset f32 | normal f32[D]
//   crc32 u32 over every preceding byte
inline constexpr std::uint32_t kIndexFormatVersion = 1;

struct LoadedIndex {
  RPForest forest;
  std::string manifest_ref;
};

std::vector<std::uint8_t> serialize_index(const RPForest& forest, const std::string& manifest_ref);
LoadedIndex deserialize_index(std::span<const std::uint8_t> bytes);

void save_index(const RPForest& forest, const std::string& manifest_ref,
                const std::filesystem::path& path);
LoadedIndex load_index(const std::filesystem::path& path);

}  // namespace obscurer::ann
