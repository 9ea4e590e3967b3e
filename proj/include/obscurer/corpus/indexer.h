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
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "obscurer/annforest/forest.h"
#include "obscurer/corpus/manifest.h"
#include "obscurer/features/descriptor.h"

namespace obscurer::corpus {

struct IndexOptions {
  features::DescriptorConfig descriptor;
  // When set, embeddings come from this file instead of the descriptor.
  std::optional<std::filesystem::path> external_embeddings;
  ann::ForestParams forest;
};

struct IndexBuild {
  DatasetManifest manifest;  // offsets filled in, record order preserved
  ann::RPForest forest;
};

// Embeds every record (border-cropped per record), builds the forest and
// writes it to index_path. The manifest's offsets and embedding metadata
// are updated; the caller persists it. Throws kMissingEmbedding.
IndexBuild index_corpus(const DatasetManifest& manifest, const std::filesystem::path& root,
                        const IndexOptions& options, const std::filesystem::path& index_path);

// Embeds the image as indexing would for an uncropped record.
std::vector<float> embed_for_index(const RasterImage& img, const features::DescriptorConfig& cfg);

struct Hit {
  const ImageRecord* record = nullptr;
  double distance = 0.0;
};

// A loaded index plus manifest, with one sub-forest per dataset so that
// each dataset can be searched on its own.
class IndexedCorpus {
 public:
  IndexedCorpus(DatasetManifest manifest, std::filesystem::path root, ann::RPForest forest);

  static IndexedCorpus open(const std::filesystem::path& manifest_path,
                            const std::filesystem::path& index_path);

  const DatasetManifest& manifest() const noexcept { return manifest_; }
  const ann::RPForest& forest() const noexcept { return forest_; }
  const std::filesystem::path& root() const noexcept { return root_; }

  // Datasets with at least one record, in roster order.
  std::vector<DatasetTag> datasets() const;
  std::span<const ImageRecord* const> members(DatasetTag tag) const;

  const ImageRecord* find(std::string_view id) const;
  std::span<const float> embedding(const ImageRecord& record) const;
  std::filesystem::path image_path(const ImageRecord& record) const;

  // False when the index was built from external embeddings.
  bool can_embed_images() const noexcept { return embeds_images_; }
  std::vector<float> embed(const RasterImage& img) const;

  // Up to k nearest records within one dataset, ascending distance then id,
  // optionally skipping one record.
  std::vector<Hit> query_dataset(DatasetTag tag, std::span<const float> q, int k,
                                 const ImageRecord* exclude = nullptr,
                                 int search_k = ann::kDefaultSearchK) const;

 private:
  struct Partition {
    std::vector<const ImageRecord*> members;
    ann::RPForest forest;
  };

  DatasetManifest manifest_;
  std::filesystem::path root_;
  ann::RPForest forest_;
  bool embeds_images_ = true;
  features::DescriptorConfig descriptor_;
  std::map<std::string, const ImageRecord*, std::less<>> by_id_;
  std::map<DatasetTag, Partition> partitions_;
};

}  // namespace obscurer::corpus
