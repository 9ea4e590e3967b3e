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
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "obscurer/common/raster.h"
#include "obscurer/common/rng.h"

namespace obscurer::filtertree {

enum class UnaryFilter : std::uint8_t {
  kBlur, kSharpen, kEmboss, kInvert, kGrayscale, kThreshold, kChannelSwap, kPosterize, kHueRotate,
};
enum class BinaryFilter : std::uint8_t {
  kAnd, kOr, kXor, kAddSat, kSubtractSat, kMultiply, kScreen, kMin, kMax,
};
inline constexpr std::size_t kUnaryFilterCount = 9;
inline constexpr std::size_t kBinaryFilterCount = 9;

std::string_view filter_name(UnaryFilter f);
std::string_view filter_name(BinaryFilter f);
bool is_commutative(BinaryFilter f);

class FilterNode;
using FilterPtr = std::shared_ptr<const FilterNode>;

// Composition tree over a single source image. Every leaf is the source,
// so the reachable-source invariant holds by construction.
//
// Unary parameter meaning: blur radius (1..3), threshold luma level
// (64..192), channel permutation index (0..5), posterize levels (2..6),
// hue rotation in degrees (0..359). Others ignore it.
class FilterNode {
 public:
  enum class Kind : std::uint8_t { kSource, kUnary, kBinary };

  static FilterPtr source();
  static FilterPtr unary(UnaryFilter f, int param, FilterPtr child);
  static FilterPtr binary(BinaryFilter f, FilterPtr left, FilterPtr right);

  Kind kind() const noexcept { return kind_; }
  UnaryFilter unary_filter() const noexcept { return unary_; }
  BinaryFilter binary_filter() const noexcept { return binary_; }
  int param() const noexcept { return param_; }
  const FilterPtr& left() const noexcept { return left_; }
  const FilterPtr& right() const noexcept { return right_; }

  // Operator levels above the source: source() is 0, unary(source()) is 1.
  int depth() const noexcept { return depth_; }

 private:
  FilterNode() = default;

  Kind kind_ = Kind::kSource;
  UnaryFilter unary_ = UnaryFilter::kBlur;
  BinaryFilter binary_ = BinaryFilter::kAnd;
  int param_ = 0;
  FilterPtr left_;
  FilterPtr right_;
  int depth_ = 0;
};

inline constexpr int kMaxFilterDepth = 8;

// Bottom-up evaluation; channels saturate to [0, 255]. Throws
// kDepthExceeded for trees deeper than kMaxFilterDepth.
RasterImage apply_filter(const FilterNode& filter, const RasterImage& src);

// Single-operator primitives, exposed for reuse and testing.
RasterImage apply_unary(UnaryFilter f, int param, const RasterImage& img);
RasterImage apply_binary(BinaryFilter f, const RasterImage& a, const RasterImage& b);

// e.g. "(xor (blur 2 source) (invert 0 source))"
std::string to_sexpr(const FilterNode& filter);

struct FilterLibrary {
  std::vector<FilterPtr> filters;
  std::uint64_t seed = 0;
};

FilterPtr random_filter(Rng& rng, int max_depth);

// Uniform random trees with at most max_depth operator levels.
FilterLibrary random_filter_library(std::uint64_t seed, int count, int max_depth = 4);

}  // namespace obscurer::filtertree
