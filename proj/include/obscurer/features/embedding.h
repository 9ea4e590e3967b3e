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
#include <span>
#include <string>
#include <vector>

namespace obscurer::features {

// Unit-normalized feature vector. Construction via normalized() is the only
// way to obtain one, so every instance satisfies the norm invariant.
class EmbeddingVector {
 public:
  EmbeddingVector() = default;

  // L2-normalizes raw values. Throws kInvalidArgument if any entry is
  // non-finite or the norm is below 1e-12.
  static EmbeddingVector normalized(std::vector<double> raw);

  std::size_t dimension() const noexcept { return values_.size(); }
  std::span<const double> values() const noexcept { return values_; }
  std::vector<float> to_f32() const;

  friend bool operator==(const EmbeddingVector&, const EmbeddingVector&) = default;

 private:
  explicit EmbeddingVector(std::vector<double> values) : values_(std::move(values)) {}
  std::vector<double> values_;
};

// 1 - a.b for unit vectors, clamped to [0, 2]. Throws kDimensionMismatch.
double cosine_distance(const EmbeddingVector& a, const EmbeddingVector& b);

// Whitespace-separated `<id> <f1> ... <fD>` records, one per line.
// Blank lines are ignored.
std::map<std::string, EmbeddingVector> load_external_embeddings(
    const std::filesystem::path& path);
std::map<std::string, EmbeddingVector> parse_external_embeddings(const std::string& text);

}  // namespace obscurer::features
