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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>

#include "obscurer/annforest/forest.h"
#include "obscurer/annforest/index_io.h"
#include "obscurer/common/error.h"
#include "obscurer/common/rng.h"

namespace obscurer::ann {
namespace {

std::vector<float> unit_rows(std::size_t n, std::size_t d, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<float> data(n * d);
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    std::vector<double> row(d);
    for (auto& x : row) {
      x = rng.normal();
      s += x * x;
    }
    const double inv = 1.0 / std::sqrt(s);
    for (std::size_t j = 0; j < d; ++j) data[i * d + j] = static_cast<float>(row[j] * inv);
  }
  return data;
}

VectorStore random_store(std::size_t n, std::size_t d, std::uint64_t seed) {
  return VectorStore(d, unit_rows(n, d, seed));
}

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::kInvalidArgument;
}

double mean_recall(const RPForest& forest, const std::vector<float>& queries, std::size_t d,
                   int search_k) {
  const std::size_t nq = queries.size() / d;
  double total = 0.0;
  for (std::size_t i = 0; i < nq; ++i) {
    const std::span<const float> q(queries.data() + i * d, d);
    const auto approx = forest.query(q, 10, search_k);
    const auto exact = brute_force_knn(forest.vectors(), q, 10);
    total += recall_at_k(approx, exact, 10);
  }
  return total / static_cast<double>(nq);
}

TEST(BuildForest, SingleVector) {
  const auto forest = build_forest(random_store(1, 8, 1), {5, 16, 3});
  ASSERT_EQ(forest.trees().size(), 5u);
  for (const auto& t : forest.trees()) {
    ASSERT_EQ(t.nodes.size(), 1u);
    EXPECT_TRUE(t.nodes[0].is_leaf());
    EXPECT_EQ(t.leaf_items, std::vector<ItemId>{0});
  }
}

TEST(BuildForest, PartitionCompletenessAndLeafBound) {
  const auto forest = build_forest(random_store(1000, 16, 2), {8, 10, 7});
  for (const auto& t : forest.trees()) {
    std::vector<int> seen(1000, 0);
    for (const auto& node : t.nodes) {
      if (!node.is_leaf()) continue;
      EXPECT_LE(node.b, 10u);
      for (ItemId id : t.leaf(node)) ++seen[id];
    }
    for (int c : seen) ASSERT_EQ(c, 1);
  }
}

TEST(BuildForest, DuplicateVectorsTerminate) {
  // Identical points cannot be separated; the degenerate-split fallback
  // forces them into one oversized leaf.
  std::vector<float> data;
  for (int i = 0; i < 50; ++i) data.insert(data.end(), {0.6f, 0.8f});
  const auto forest = build_forest(VectorStore(2, data), {2, 4, 1});
  for (const auto& t : forest.trees()) EXPECT_EQ(t.leaf_items.size(), 50u);
  EXPECT_EQ(forest.query(std::vector<float>{0.6f, 0.8f}, 3, 3).size(), 3u);
}

TEST(BuildForest, Deterministic) {
  const auto a = build_forest(random_store(500, 12, 4), {6, 8, 99});
  const auto b = build_forest(random_store(500, 12, 4), {6, 8, 99});
  EXPECT_EQ(serialize_index(a, "m"), serialize_index(b, "m"));
  const auto c = build_forest(random_store(500, 12, 4), {6, 8, 100});
  EXPECT_NE(serialize_index(a, "m"), serialize_index(c, "m"));
}

TEST(BuildForest, Errors) {
  EXPECT_EQ(code_of([] { build_forest(VectorStore(), {1, 1, 0}); }), ErrorCode::kEmptyInput);
  EXPECT_EQ(code_of([] { VectorStore(3, std::vector<float>(7)); }), ErrorCode::kDimensionMismatch);
  const std::vector<features::EmbeddingVector> mixed{features::EmbeddingVector::normalized({1, 0}),
                                                     features::EmbeddingVector::normalized({1, 0, 0})};
  EXPECT_EQ(code_of([&] { VectorStore::from_embeddings(mixed); }), ErrorCode::kDimensionMismatch);
  const auto forest = build_forest(random_store(10, 4, 1), {1, 2, 0});
  EXPECT_EQ(code_of([&] { forest.query(std::vector<float>{1, 0, 0}, 1, 10); }),
            ErrorCode::kDimensionMismatch);
}

TEST(Query, TwoVectorExactMatch) {
  const VectorStore store(2, {1.0f, 0.0f, 0.0f, 1.0f});
  const auto forest = build_forest(store, {3, 1, 5});
  const auto r = forest.query(std::vector<float>{0.0f, 1.0f}, 1, 2);
  ASSERT_EQ(r.size(), 1u);
  EXPECT_EQ(r[0].id, 1u);
  EXPECT_EQ(r[0].distance, 0.0);
  EXPECT_EQ(r[0].rank, 1);
}

TEST(Query, FewerItemsThanK) {
  const auto forest = build_forest(random_store(4, 6, 8), {2, 2, 1});
  const auto q = unit_rows(1, 6, 77);
  EXPECT_EQ(forest.query(q, 10, 10).size(), 4u);
}

TEST(Query, ExhaustiveEquivalence) {
  const auto store = random_store(800, 24, 5);
  const auto forest = build_forest(store, {4, 8, 11});
  const auto queries = unit_rows(50, 24, 6);
  for (std::size_t i = 0; i < 50; ++i) {
    const std::span<const float> q(queries.data() + i * 24, 24);
    EXPECT_EQ(forest.query(q, 10, 800), brute_force_knn(store, q, 10));
  }
}

TEST(Query, ResultsSortedWithConsecutiveRanks) {
  const auto forest = build_forest(random_store(600, 16, 12), {10, 10, 2});
  const auto q = unit_rows(1, 16, 13);
  const auto r = forest.query(q, 25, 200);
  ASSERT_EQ(r.size(), 25u);
  std::set<ItemId> ids;
  for (std::size_t i = 0; i < r.size(); ++i) {
    EXPECT_EQ(r[i].rank, static_cast<int>(i) + 1);
    if (i > 0) {
      EXPECT_LE(r[i - 1].distance, r[i].distance);
    }
    ids.insert(r[i].id);
  }
  EXPECT_EQ(ids.size(), r.size());
}

TEST(Query, MonotoneRecall) {
  const std::size_t d = 32;
  const auto store = random_store(3000, d, 21);
  const auto queries = unit_rows(100, d, 22);

  const auto forest = build_forest(store, {10, 10, 3});
  double prev = 0.0;
  for (int search_k : {50, 200, 800}) {
    const double r = mean_recall(forest, queries, d, search_k);
    EXPECT_GE(r, prev - 0.02) << "search_k " << search_k;
    prev = r;
  }
  prev = 0.0;
  for (int trees : {2, 8, 32}) {
    const double r = mean_recall(build_forest(store, {trees, 10, 3}), queries, d, 300);
    EXPECT_GE(r, prev - 0.02) << "n_trees " << trees;
    prev = r;
  }
}

TEST(BruteForce, Examples) {
  const VectorStore store(2, {1.0f, 0.0f, 0.0f, 1.0f});
  const auto r = brute_force_knn(store, std::vector<float>{1.0f, 0.0f}, 2);
  ASSERT_EQ(r.size(), 2u);
  EXPECT_EQ(r[0].id, 0u);
  EXPECT_EQ(r[0].distance, 0.0);
  EXPECT_EQ(r[1].distance, 1.0);
  EXPECT_EQ(brute_force_knn(store, std::vector<float>{1.0f, 0.0f}, 10).size(), 2u);
}

TEST(BruteForce, TiesByAscendingId) {
  const VectorStore store(2, {0.0f, 1.0f, 1.0f, 0.0f, 0.0f, 1.0f, 1.0f, 0.0f});
  const auto r = brute_force_knn(store, std::vector<float>{1.0f, 0.0f}, 4);
  ASSERT_EQ(r.size(), 4u);
  EXPECT_EQ(r[0].id, 1u);
  EXPECT_EQ(r[1].id, 3u);
  EXPECT_EQ(r[2].id, 0u);
  EXPECT_EQ(r[3].id, 2u);
}

TEST(RecallAtK, Definition) {
  std::vector<QueryResult> a;
  std::vector<QueryResult> b;
  std::vector<QueryResult> c;
  for (ItemId i = 0; i < 10; ++i) {
    a.push_back({i, 0.0, static_cast<int>(i) + 1});
    b.push_back({i < 7 ? i : 100 + i, 0.0, static_cast<int>(i) + 1});
    c.push_back({200 + i, 0.0, static_cast<int>(i) + 1});
  }
  EXPECT_DOUBLE_EQ(recall_at_k(a, a, 10), 1.0);
  EXPECT_DOUBLE_EQ(recall_at_k(a, c, 10), 0.0);
  EXPECT_DOUBLE_EQ(recall_at_k(a, b, 10), 0.7);
}

class IndexFile : public ::testing::Test {
 protected:
  void SetUp() override {
    forest_ = build_forest(random_store(300, 20, 31), {5, 8, 17});
    bytes_ = serialize_index(forest_, "ref-abc");
  }
  RPForest forest_;
  std::vector<std::uint8_t> bytes_;
};

TEST_F(IndexFile, RoundTripQueriesIdentical) {
  const auto path = std::filesystem::temp_directory_path() / "obscurer_index_test.cobs";
  save_index(forest_, "ref-abc", path);
  const auto loaded = load_index(path);
  std::filesystem::remove(path);
  EXPECT_EQ(loaded.manifest_ref, "ref-abc");
  EXPECT_EQ(serialize_index(loaded.forest, "ref-abc"), bytes_);
  const auto queries = unit_rows(100, 20, 32);
  for (std::size_t i = 0; i < 100; ++i) {
    const std::span<const float> q(queries.data() + i * 20, 20);
    EXPECT_EQ(loaded.forest.query(q, 10, 40), forest_.query(q, 10, 40));
  }
}

TEST_F(IndexFile, WrongMagic) {
  bytes_[0] = 'X';
  EXPECT_EQ(code_of([&] { deserialize_index(bytes_); }), ErrorCode::kCorruptIndex);
}

TEST_F(IndexFile, WrongVersion) {
  bytes_[4] = 9;
  EXPECT_EQ(code_of([&] { deserialize_index(bytes_); }), ErrorCode::kCorruptIndex);
}

TEST_F(IndexFile, ChecksumMismatch) {
  bytes_[100] ^= 0x40;
  EXPECT_EQ(code_of([&] { deserialize_index(bytes_); }), ErrorCode::kCorruptIndex);
}

TEST_F(IndexFile, TruncatedVectorBlock) {
  bytes_.resize(200);
  EXPECT_EQ(code_of([&] { deserialize_index(bytes_); }), ErrorCode::kTruncatedFile);
}

TEST_F(IndexFile, TruncatedAnywhere) {
  for (std::size_t len : {std::size_t{0}, std::size_t{3}, std::size_t{20}, bytes_.size() / 2,
                          bytes_.size() - 1}) {
    const std::span<const std::uint8_t> cut(bytes_.data(), len);
    EXPECT_THROW(deserialize_index(cut), Error) << len;
  }
}

TEST_F(IndexFile, MissingFile) {
  EXPECT_THROW(load_index("/nonexistent/obscurer/index.cobs"), Error);
}

}  // namespace
}  // namespace obscurer::ann
