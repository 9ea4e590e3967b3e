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

#include <filesystem>
#include <string>

#include "json.hpp"

#include "obscurer/annforest/forest.h"
#include "obscurer/corpus/datasets.h"
#include "obscurer/features/descriptor.h"

namespace obscurer::corpus {

struct ExternalDatasetSpec {
  std::filesystem::path dir;
  DatasetTag tag = DatasetTag::kWikiartLike;
};

struct FilteredDatasetSpec {
  std::filesystem::path sources;
  int filter_count = 1000;
  std::uint64_t seed = 0;
  int max_depth = 4;
};

struct PaletteDatasetSpec {
  int count = 0;
  std::uint64_t seed = 0;
  std::filesystem::path file;  // overrides count/seed when set
};

struct CorpusConfig {
  std::optional<AbstractDatasetSpec> abstract;
  std::optional<FilteredDatasetSpec> filtered;
  std::optional<PaletteDatasetSpec> palette;
  std::vector<ExternalDatasetSpec> external;
  features::DescriptorConfig descriptor;
  ann::ForestParams forest;
  std::optional<std::filesystem::path> external_embeddings;
};

// Relative source paths resolve against base_dir.
CorpusConfig parse_corpus_config(const nlohmann::json& j, const std::filesystem::path& base_dir);
CorpusConfig load_corpus_config(const std::filesystem::path& path);

struct CorpusBuild {
  DatasetManifest manifest;
  std::filesystem::path manifest_path;
  std::filesystem::path index_path;
  std::size_t skipped = 0;
};

// Builds every configured dataset under out_dir, then writes
// out_dir/index.cobs and out_dir/manifest.txt.
CorpusBuild build_corpus(const CorpusConfig& config, const std::filesystem::path& out_dir,
                         bool build_index = true);

}  // namespace obscurer::corpus
