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

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "obscurer/features/embedding.h"

namespace obscurer::ann {

using ItemId = std::uint32_t;

// Dense row-major f32 matrix of unit vectors; row i belongs to item id i.
class VectorStore {
 public:
  VectorStore() = default;
  VectorStore(std::size_t dimension, std::vector<float> data);

  static VectorStore from_embeddings(std::span<const features::EmbeddingVector> vectors);

  std::size_t dimension() const noexcept { return dimension_; }
  std::size_t size() const noexcept { return dimension_ == 0 ? 0 : data_.size() / dimension_; }
  std::span<const float> row(ItemId id) const {
    return {data_.data() + static_cast<std::size_t>(id) * dimension_, dimension_};
  }
  std::span<const float> data() const noexcept { return data_; }

 private:
  std::size_t dimension_ = 0;
  std::vector<float> data_;
};

// Dot product with a fixed summation order; every margin and distance in
// this module goes through it so build, query and oracle agree bit-for-bit.
double dot(std::span<const float> a, std::span<const float> b);

// 1 - a.b, clamped to [0, 2].
double cosine_distance(std::span<const float> a, std::span<const float> b);

struct QueryResult {
  ItemId id = 0;
  double distance = 0.0;
  int rank = 0;

  friend bool operator==(const QueryResult&, const QueryResult&) = default;
};

struct RPTree {
  static constexpr std::int32_t kLeaf = -1;

  // Split nodes: normal_slot >= 0, children in a/b (left, right), items on
  // the right when v.normal - offset >= 0.
  // Leaves: normal_slot == kLeaf, items leaf_items[a, a + b).
  struct Node {
    std::int32_t normal_slot = kLeaf;
    std::uint32_t a = 0;
    std::uint32_t b = 0;
    float offset = 0.0f;

    bool is_leaf() const noexcept { return normal_slot == kLeaf; }
    friend bool operator==(const Node&, const Node&) = default;
  };

  std::uint32_t leaf_size = 0;
  std::uint64_t seed = 0;
  std::vector<Node> nodes;        // root at index 0
  std::vector<float> normals;     // slot-major, D floats per split
  std::vector<ItemId> leaf_items;

  std::span<const ItemId> leaf(const Node& n) const { return {leaf_items.data() + n.a, n.b}; }
  std::span<const float> normal(const Node& n, std::size_t dim) const {
    return {normals.data() + static_cast<std::size_t>(n.normal_slot) * dim, dim};
  }

  friend bool operator==(const RPTree&, const RPTree&) = default;
};

struct ForestParams {
  int n_trees = 50;
  int leaf_size = 16;
  std::uint64_t seed = 0;
};

inline constexpr int kDefaultSearchK = 2000;

class RPForest {
 public:
  RPForest() = default;
  RPForest(VectorStore vectors, std::vector<RPTree> trees, std::uint64_t build_seed);

  std::size_t dimension() const noexcept { return vectors_.dimension(); }
  std::size_t size() const noexcept { return vectors_.size(); }
  const VectorStore& vectors() const noexcept { return vectors_; }
  const std::vector<RPTree>& trees() const noexcept { return trees_; }
  std::uint64_t build_seed() const noexcept { return build_seed_; }

  // Best-first search over all trees sharing one priority queue. Collects
  // leaves until at least search_k distinct items are gathered (the last
  // leaf is admitted whole), then ranks candidates by exact distance with
  // ties broken by ascending id.
  std::vector<QueryResult> query(std::span<const float> q, int k,
                                 int search_k = kDefaultSearchK) const;

 private:
  VectorStore vectors_;
  std::vector<RPTree> trees_;
  std::uint64_t build_seed_ = 0;
};

// Trees are built from independent streams derive_seed(seed, tree_index), so
// the result does not depend on how many worker threads run the build.
RPForest build_forest(VectorStore vectors, const ForestParams& params);

std::vector<QueryResult> brute_force_knn(const VectorStore& vectors, std::span<const float> q,
                                         int k);

// |approx ids ∩ exact ids| / k over the first k entries of each list.
double recall_at_k(std::span<const QueryResult> approx, std::span<const QueryResult> exact,
                   int k);

}  // namespace obscurer::ann
