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

#include "obscurer/annforest/forest.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <tuple>

#include "obscurer/common/error.h"
#include "obscurer/common/parallel.h"
#include "obscurer/common/rng.h"

namespace obscurer::ann {

VectorStore::VectorStore(std::size_t dimension, std::vector<float> data)
    : dimension_(dimension), data_(std::move(data)) {
  if (dimension_ == 0 && !data_.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "zero dimension with non-empty data");
  }
  if (dimension_ != 0 && data_.size() % dimension_ != 0) {
    throw Error(ErrorCode::kDimensionMismatch, "data length is not a multiple of dimension");
  }
}

VectorStore VectorStore::from_embeddings(std::span<const features::EmbeddingVector> vectors) {
  if (vectors.empty()) return {};
  const std::size_t dim = vectors.front().dimension();
  std::vector<float> data;
  data.reserve(dim * vectors.size());
  for (const auto& v : vectors) {
    if (v.dimension() != dim) {
      throw Error(ErrorCode::kDimensionMismatch, "mixed embedding dimensions");
    }
    for (double x : v.values()) data.push_back(static_cast<float>(x));
  }
  return VectorStore(dim, std::move(data));
}

double dot(std::span<const float> a, std::span<const float> b) {
  const std::size_t n = a.size();
  double acc[4] = {0.0, 0.0, 0.0, 0.0};
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc[0] += static_cast<double>(a[i]) * b[i];
    acc[1] += static_cast<double>(a[i + 1]) * b[i + 1];
    acc[2] += static_cast<double>(a[i + 2]) * b[i + 2];
    acc[3] += static_cast<double>(a[i + 3]) * b[i + 3];
  }
  for (; i < n; ++i) acc[0] += static_cast<double>(a[i]) * b[i];
  return (acc[0] + acc[1]) + (acc[2] + acc[3]);
}

double cosine_distance(std::span<const float> a, std::span<const float> b) {
  const double d = 1.0 - dot(a, b);
  return d < 0.0 ? 0.0 : (d > 2.0 ? 2.0 : d);
}

namespace {

constexpr int kSplitAttempts = 4;  // first try plus three retries

class TreeBuilder {
 public:
  TreeBuilder(const VectorStore& vectors, std::uint32_t leaf_size, std::uint64_t seed)
      : vectors_(vectors), dim_(vectors.dimension()), rng_(seed) {
    tree_.leaf_size = leaf_size;
    tree_.seed = seed;
  }

  RPTree build() {
    std::vector<ItemId> ids(vectors_.size());
    for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = static_cast<ItemId>(i);

    struct Task {
      std::uint32_t node;
      std::vector<ItemId> items;
    };
    std::vector<Task> stack;
    tree_.nodes.emplace_back();
    stack.push_back({0, std::move(ids)});

    std::vector<float> normal(dim_);
    std::vector<ItemId> left;
    std::vector<ItemId> right;
    while (!stack.empty()) {
      Task task = std::move(stack.back());
      stack.pop_back();
      const auto& items = task.items;

      bool split = false;
      float offset = 0.0f;
      if (items.size() > tree_.leaf_size) {
        for (int attempt = 0; attempt < kSplitAttempts && !split; ++attempt) {
          if (!sample_plane(items, normal, offset)) continue;
          left.clear();
          right.clear();
          for (ItemId id : items) {
            const double margin = dot(vectors_.row(id), normal) - offset;
            (margin >= 0.0 ? right : left).push_back(id);
          }
          split = !left.empty() && !right.empty();
        }
      }

      if (!split) {
        auto& node = tree_.nodes[task.node];
        node.normal_slot = RPTree::kLeaf;
        node.a = static_cast<std::uint32_t>(tree_.leaf_items.size());
        node.b = static_cast<std::uint32_t>(items.size());
        tree_.leaf_items.insert(tree_.leaf_items.end(), items.begin(), items.end());
        continue;
      }

      const auto slot = static_cast<std::int32_t>(tree_.normals.size() / dim_);
      tree_.normals.insert(tree_.normals.end(), normal.begin(), normal.end());
      const auto left_index = static_cast<std::uint32_t>(tree_.nodes.size());
      const auto right_index = left_index + 1;
      tree_.nodes.emplace_back();
      tree_.nodes.emplace_back();
      auto& node = tree_.nodes[task.node];
      node.normal_slot = slot;
      node.a = left_index;
      node.b = right_index;
      node.offset = offset;
      // Right pushed first so the left subtree is laid out first.
      stack.push_back({right_index, right});
      stack.push_back({left_index, left});
    }
    return std::move(tree_);
  }

 private:
  // Perpendicular bisector of two distinct sampled items.
  bool sample_plane(const std::vector<ItemId>& items, std::vector<float>& normal, float& offset) {
    const auto n = items.size();
    const auto i = rng_.below(n);
    auto j = rng_.below(n - 1);
    if (j >= i) ++j;
    const auto a = vectors_.row(items[i]);
    const auto b = vectors_.row(items[j]);
    double norm_sq = 0.0;
    for (std::size_t d = 0; d < dim_; ++d) {
      const double diff = static_cast<double>(a[d]) - b[d];
      norm_sq += diff * diff;
    }
    if (!(norm_sq > 0.0)) return false;
    const double inv = 1.0 / std::sqrt(norm_sq);
    for (std::size_t d = 0; d < dim_; ++d) {
      normal[d] = static_cast<float>((static_cast<double>(a[d]) - b[d]) * inv);
    }
    offset = static_cast<float>(0.5 * (dot(a, normal) + dot(b, normal)));
    return true;
  }

  const VectorStore& vectors_;
  std::size_t dim_;
  Rng rng_;
  RPTree tree_;
};

bool result_less(const QueryResult& x, const QueryResult& y) {
  return std::tie(x.distance, x.id) < std::tie(y.distance, y.id);
}

std::vector<QueryResult> rank_candidates(const VectorStore& vectors, std::span<const float> q,
                                         std::span<const ItemId> candidates, int k) {
  std::vector<QueryResult> scored;
  scored.reserve(candidates.size());
  for (ItemId id : candidates) scored.push_back({id, cosine_distance(q, vectors.row(id)), 0});
  const auto keep = std::min<std::size_t>(static_cast<std::size_t>(k), scored.size());
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(keep),
                    scored.end(), result_less);
  scored.resize(keep);
  for (std::size_t r = 0; r < scored.size(); ++r) scored[r].rank = static_cast<int>(r + 1);
  return scored;
}

void check_query(std::size_t dim, std::span<const float> q, int k) {
  if (q.size() != dim) {
    throw Error(ErrorCode::kDimensionMismatch,
                "query has " + std::to_string(q.size()) + ", index has " + std::to_string(dim));
  }
  if (k < 1) throw Error(ErrorCode::kInvalidArgument, "k must be at least 1");
}

}  // namespace

RPForest::RPForest(VectorStore vectors, std::vector<RPTree> trees, std::uint64_t build_seed)
    : vectors_(std::move(vectors)), trees_(std::move(trees)), build_seed_(build_seed) {}

RPForest build_forest(VectorStore vectors, const ForestParams& params) {
  if (vectors.size() == 0) throw Error(ErrorCode::kEmptyInput, "no vectors to index");
  if (params.n_trees < 1) throw Error(ErrorCode::kInvalidArgument, "n_trees must be >= 1");
  if (params.leaf_size < 1) throw Error(ErrorCode::kInvalidArgument, "leaf_size must be >= 1");

  std::vector<RPTree> trees(static_cast<std::size_t>(params.n_trees));
  parallel_for(trees.size(), [&](std::size_t t) {
    TreeBuilder builder(vectors, static_cast<std::uint32_t>(params.leaf_size),
                        derive_seed(params.seed, t));
    trees[t] = builder.build();
  });
  return RPForest(std::move(vectors), std::move(trees), params.seed);
}

std::vector<QueryResult> RPForest::query(std::span<const float> q, int k, int search_k) const {
  check_query(dimension(), q, k);
  if (search_k < k) throw Error(ErrorCode::kInvalidArgument, "search_k must be >= k");

  struct Pending {
    double priority;
    std::uint32_t tree;
    std::uint32_t node;
  };
  // Highest priority first; ties resolved toward lower (tree, node).
  auto worse = [](const Pending& x, const Pending& y) {
    if (x.priority != y.priority) return x.priority < y.priority;
    return std::tie(x.tree, x.node) > std::tie(y.tree, y.node);
  };
  std::priority_queue<Pending, std::vector<Pending>, decltype(worse)> queue(worse);
  constexpr double kInf = std::numeric_limits<double>::infinity();
  for (std::uint32_t t = 0; t < trees_.size(); ++t) queue.push({kInf, t, 0});

  const std::size_t budget = static_cast<std::size_t>(search_k);
  std::vector<std::uint8_t> seen(size(), 0);
  std::vector<ItemId> candidates;
  candidates.reserve(budget + 64);

  const std::size_t dim = dimension();
  while (!queue.empty() && candidates.size() < budget) {
    const Pending top = queue.top();
    queue.pop();
    const RPTree& tree = trees_[top.tree];
    const RPTree::Node& node = tree.nodes[top.node];
    if (node.is_leaf()) {
      for (ItemId id : tree.leaf(node)) {
        if (seen[id] == 0) {
          seen[id] = 1;
          candidates.push_back(id);
        }
      }
      continue;
    }
    const double margin = dot(q, tree.normal(node, dim)) - node.offset;
    const std::uint32_t near = margin >= 0.0 ? node.b : node.a;
    const std::uint32_t far = margin >= 0.0 ? node.a : node.b;
    const double gap = std::abs(margin);
    queue.push({std::min(top.priority, gap), top.tree, near});
    queue.push({std::min(top.priority, -gap), top.tree, far});
  }
  return rank_candidates(vectors_, q, candidates, k);
}

std::vector<QueryResult> brute_force_knn(const VectorStore& vectors, std::span<const float> q,
                                         int k) {
  check_query(vectors.dimension(), q, k);
  std::vector<ItemId> all(vectors.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<ItemId>(i);
  return rank_candidates(vectors, q, all, k);
}

double recall_at_k(std::span<const QueryResult> approx, std::span<const QueryResult> exact,
                   int k) {
  if (k <= 0) return 0.0;
  const auto na = std::min<std::size_t>(approx.size(), static_cast<std::size_t>(k));
  const auto ne = std::min<std::size_t>(exact.size(), static_cast<std::size_t>(k));
  std::vector<ItemId> truth;
  truth.reserve(ne);
  for (std::size_t i = 0; i < ne; ++i) truth.push_back(exact[i].id);
  std::sort(truth.begin(), truth.end());
  std::size_t hits = 0;
  for (std::size_t i = 0; i < na; ++i) {
    if (std::binary_search(truth.begin(), truth.end(), approx[i].id)) ++hits;
  }
  return static_cast<double>(hits) / k;
}

}  // namespace obscurer::ann
