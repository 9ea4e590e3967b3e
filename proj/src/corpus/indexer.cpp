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

#include "obscurer/corpus/indexer.h"

#include <algorithm>

#include "obscurer/annforest/index_io.h"
#include "obscurer/common/error.h"
#include "obscurer/common/image_io.h"
#include "obscurer/common/parallel.h"
#include "obscurer/common/rng.h"
#include "obscurer/corpus/datasets.h"
#include "obscurer/features/embedding.h"

namespace obscurer::corpus {
namespace {

namespace fs = std::filesystem;

constexpr std::string_view kSourceKey = "embedding.source";
constexpr std::string_view kDescriptorSource = "descriptor";

std::string manifest_digest(const std::string& text) {
  return sha256_hex({reinterpret_cast<const std::uint8_t*>(text.data()), text.size()});
}

}  // namespace

std::vector<float> embed_for_index(const RasterImage& img, const features::DescriptorConfig& cfg) {
  return features::extract_descriptor(img, cfg).to_f32();
}

IndexBuild index_corpus(const DatasetManifest& manifest, const fs::path& root,
                        const IndexOptions& options, const fs::path& index_path) {
  if (manifest.records.empty()) throw Error(ErrorCode::kEmptyInput, "manifest has no records");
  DatasetManifest out = manifest;
  const std::size_t n = out.records.size();

  std::size_t dim = 0;
  std::vector<float> data;
  if (options.external_embeddings) {
    const auto table = features::load_external_embeddings(*options.external_embeddings);
    for (std::size_t i = 0; i < n; ++i) {
      const auto it = table.find(out.records[i].id);
      if (it == table.end()) throw Error(ErrorCode::kMissingEmbedding, out.records[i].id);
      if (i == 0) {
        dim = it->second.dimension();
        data.reserve(n * dim);
      }
      const auto row = it->second.to_f32();
      data.insert(data.end(), row.begin(), row.end());
    }
    out.meta[std::string(kSourceKey)] =
        "external:" + options.external_embeddings->filename().string();
    for (auto it = out.meta.begin(); it != out.meta.end();) {
      it = it->first.starts_with("descriptor.") ? out.meta.erase(it) : std::next(it);
    }
  } else {
    dim = options.descriptor.dimension();
    data.resize(n * dim);
    parallel_for(n, [&](std::size_t i) {
      const ImageRecord& rec = out.records[i];
      const RasterImage img = load_image(resolve_record_path(root, rec));
      const auto row = embed_for_index(crop_border(img, rec.crop_fraction), options.descriptor);
      std::copy(row.begin(), row.end(), data.begin() + static_cast<std::ptrdiff_t>(i * dim));
    });
    out.meta[std::string(kSourceKey)] = std::string(kDescriptorSource);
    out.set_descriptor(options.descriptor);
  }
  for (std::size_t i = 0; i < n; ++i) out.records[i].embedding_offset = static_cast<std::int64_t>(i);
  out.meta["index.n_trees"] = std::to_string(options.forest.n_trees);
  out.meta["index.leaf_size"] = std::to_string(options.forest.leaf_size);
  out.meta["index.seed"] = std::to_string(options.forest.seed);

  auto forest = ann::build_forest(ann::VectorStore(dim, std::move(data)), options.forest);
  ann::save_index(forest, manifest_digest(out.serialize()), index_path);
  return {std::move(out), std::move(forest)};
}

IndexedCorpus::IndexedCorpus(DatasetManifest manifest, fs::path root, ann::RPForest forest)
    : manifest_(std::move(manifest)), root_(std::move(root)), forest_(std::move(forest)) {
  if (forest_.size() != manifest_.records.size()) {
    throw Error(ErrorCode::kCorruptIndex, "index holds " + std::to_string(forest_.size()) +
                                              " vectors but the manifest lists " +
                                              std::to_string(manifest_.records.size()) + " records");
  }
  const auto source = manifest_.meta.find(std::string(kSourceKey));
  embeds_images_ = source == manifest_.meta.end() || source->second == kDescriptorSource;
  descriptor_ = manifest_.descriptor();
  if (embeds_images_ && descriptor_.dimension() != forest_.dimension()) {
    throw Error(ErrorCode::kCorruptIndex, "descriptor dimension does not match the index");
  }

  std::map<DatasetTag, std::vector<float>> rows;
  for (const auto& rec : manifest_.records) {
    if (rec.embedding_offset < 0 ||
        static_cast<std::size_t>(rec.embedding_offset) >= forest_.size()) {
      throw Error(ErrorCode::kCorruptIndex, "record " + rec.id + " has no embedding row");
    }
    by_id_.emplace(rec.id, &rec);
    partitions_[rec.tag].members.push_back(&rec);
    const auto row = embedding(rec);
    auto& dst = rows[rec.tag];
    dst.insert(dst.end(), row.begin(), row.end());
  }

  ann::ForestParams params;
  params.n_trees = std::max<int>(1, static_cast<int>(forest_.trees().size()));
  if (!forest_.trees().empty()) params.leaf_size = static_cast<int>(forest_.trees()[0].leaf_size);
  for (auto& [tag, part] : partitions_) {
    params.seed = derive_seed(forest_.build_seed(), static_cast<std::uint64_t>(tag));
    part.forest = ann::build_forest(ann::VectorStore(forest_.dimension(), std::move(rows[tag])), params);
  }
}

IndexedCorpus IndexedCorpus::open(const fs::path& manifest_path, const fs::path& index_path) {
  const auto bytes = read_file(manifest_path);
  const std::string text(bytes.begin(), bytes.end());
  auto manifest = DatasetManifest::parse(text);
  auto loaded = ann::load_index(index_path);
  if (loaded.manifest_ref != manifest_digest(text)) {
    throw Error(ErrorCode::kCorruptIndex,
                index_path.string() + " was not built from " + manifest_path.string());
  }
  return IndexedCorpus(std::move(manifest), manifest_path.parent_path(), std::move(loaded.forest));
}

std::vector<DatasetTag> IndexedCorpus::datasets() const {
  std::vector<DatasetTag> out;
  for (DatasetTag tag : kDatasetRoster) {
    if (partitions_.contains(tag)) out.push_back(tag);
  }
  return out;
}

std::span<const ImageRecord* const> IndexedCorpus::members(DatasetTag tag) const {
  const auto it = partitions_.find(tag);
  if (it == partitions_.end()) return {};
  return it->second.members;
}

const ImageRecord* IndexedCorpus::find(std::string_view id) const {
  const auto it = by_id_.find(id);
  return it == by_id_.end() ? nullptr : it->second;
}

std::span<const float> IndexedCorpus::embedding(const ImageRecord& record) const {
  return forest_.vectors().row(static_cast<ann::ItemId>(record.embedding_offset));
}

fs::path IndexedCorpus::image_path(const ImageRecord& record) const {
  return resolve_record_path(root_, record);
}

std::vector<float> IndexedCorpus::embed(const RasterImage& img) const {
  if (!embeds_images_) {
    throw Error(ErrorCode::kIndexUnavailable,
                "index was built from external embeddings; images cannot be embedded");
  }
  return embed_for_index(img, descriptor_);
}

std::vector<Hit> IndexedCorpus::query_dataset(DatasetTag tag, std::span<const float> q, int k,
                                              const ImageRecord* exclude, int search_k) const {
  if (k < 1) throw Error(ErrorCode::kInvalidArgument, "k must be >= 1");
  const auto it = partitions_.find(tag);
  if (it == partitions_.end()) return {};
  const Partition& part = it->second;
  const bool skip = exclude != nullptr && exclude->tag == tag;
  const int want = std::min<int>(k + (skip ? 1 : 0), static_cast<int>(part.members.size()));
  if (want == 0) return {};
  const auto found = part.forest.query(q, want, std::max(search_k, want));

  std::vector<Hit> hits;
  hits.reserve(found.size());
  for (const auto& r : found) {
    const ImageRecord* rec = part.members[r.id];
    if (rec != exclude) hits.push_back({rec, r.distance});
  }
  std::sort(hits.begin(), hits.end(), [](const Hit& a, const Hit& b) {
    return a.distance != b.distance ? a.distance < b.distance : a.record->id < b.record->id;
  });
  if (hits.size() > static_cast<std::size_t>(k)) hits.resize(static_cast<std::size_t>(k));
  return hits;
}

}  // namespace obscurer::corpus
