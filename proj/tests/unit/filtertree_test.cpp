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
#include <array>
#include <functional>
#include <set>

#include "obscurer/common/error.h"
#include "obscurer/common/rng.h"
#include "obscurer/filtertree/filter.h"

namespace obscurer::filtertree {
namespace {

using F = FilterNode;

RasterImage noise(std::uint64_t seed, int w = 23, int h = 17) {
  Rng rng(seed);
  RasterImage img(w, h);
  for (auto& b : img.bytes()) b = static_cast<std::uint8_t>(rng.below(256));
  return img;
}

RasterImage single(Rgb p) { return RasterImage(1, 1, p); }

void visit(const FilterNode& n, const std::function<void(const FilterNode&)>& fn) {
  fn(n);
  if (n.left()) visit(*n.left(), fn);
  if (n.right()) visit(*n.right(), fn);
}

TEST(ApplyFilter, SourceIsIdentity) {
  for (std::uint64_t s = 0; s < 5; ++s) {
    const auto img = noise(s);
    EXPECT_EQ(apply_filter(*F::source(), img), img);
  }
}

TEST(ApplyFilter, XorWithSelfIsBlack) {
  const auto img = noise(1);
  EXPECT_EQ(apply_filter(*F::binary(BinaryFilter::kXor, F::source(), F::source()), img),
            RasterImage(img.width(), img.height()));
}

TEST(ApplyFilter, InvertPixel) {
  const auto out = apply_filter(*F::unary(UnaryFilter::kInvert, 0, F::source()), single({10, 200, 255}));
  EXPECT_EQ(out.at(0, 0), (Rgb{245, 55, 0}));
}

TEST(ApplyFilter, DepthBoundEnforced) {
  FilterPtr f = F::source();
  for (int i = 0; i < kMaxFilterDepth; ++i) f = F::unary(UnaryFilter::kInvert, 0, f);
  EXPECT_NO_THROW(apply_filter(*f, noise(2)));
  f = F::unary(UnaryFilter::kInvert, 0, f);
  try {
    apply_filter(*f, noise(2));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDepthExceeded);
  }
}

TEST(UnaryFilters, HandValues) {
  // Luma = (299 r + 587 g + 114 b + 500) / 1000.
  EXPECT_EQ(apply_unary(UnaryFilter::kGrayscale, 0, single({100, 150, 200})).at(0, 0),
            (Rgb{141, 141, 141}));
  EXPECT_EQ(apply_unary(UnaryFilter::kThreshold, 141, single({100, 150, 200})).at(0, 0),
            (Rgb{255, 255, 255}));
  EXPECT_EQ(apply_unary(UnaryFilter::kThreshold, 142, single({100, 150, 200})).at(0, 0),
            (Rgb{0, 0, 0}));
  EXPECT_EQ(apply_unary(UnaryFilter::kPosterize, 2, single({127, 128, 255})).at(0, 0),
            (Rgb{0, 255, 255}));
  EXPECT_EQ(apply_unary(UnaryFilter::kPosterize, 3, single({60, 70, 200})).at(0, 0),
            (Rgb{0, 128, 255}));
  EXPECT_EQ(apply_unary(UnaryFilter::kHueRotate, 120, single({255, 0, 0})).at(0, 0),
            (Rgb{0, 255, 0}));
  EXPECT_EQ(apply_unary(UnaryFilter::kHueRotate, 240, single({255, 0, 0})).at(0, 0),
            (Rgb{0, 0, 255}));
  EXPECT_EQ(apply_unary(UnaryFilter::kHueRotate, 0, single({12, 34, 56})).at(0, 0),
            (Rgb{12, 34, 56}));
}

TEST(UnaryFilters, ChannelSwapPermutes) {
  std::set<std::array<std::uint8_t, 3>> seen;
  for (int p = 1; p <= 5; ++p) {
    const auto px = apply_unary(UnaryFilter::kChannelSwap, p, single({1, 2, 3})).at(0, 0);
    std::array<std::uint8_t, 3> v{px.r, px.g, px.b};
    auto sorted = v;
    std::sort(sorted.begin(), sorted.end());
    EXPECT_EQ(sorted, (std::array<std::uint8_t, 3>{1, 2, 3}));
    EXPECT_NE(v, (std::array<std::uint8_t, 3>{1, 2, 3}));
    seen.insert(v);
  }
  EXPECT_EQ(seen.size(), 5u);
}

TEST(UnaryFilters, SharpenHandValues) {
  RasterImage img(3, 3, {50, 50, 50});
  img.set(1, 1, {100, 100, 100});
  const auto out = apply_unary(UnaryFilter::kSharpen, 0, img);
  EXPECT_EQ(out.at(1, 1).r, 255);  // 5*100 - 4*50 = 300, saturated
  EXPECT_EQ(out.at(1, 0).r, 0);    // 5*50 - 50 - 50 - 50 - 100 = 0
}

TEST(UnaryFilters, KernelsKeepUniformImages) {
  const RasterImage img(9, 7, {77, 130, 3});
  EXPECT_EQ(apply_unary(UnaryFilter::kSharpen, 0, img), img);
  EXPECT_EQ(apply_unary(UnaryFilter::kEmboss, 0, img), img);
  EXPECT_EQ(apply_unary(UnaryFilter::kBlur, 2, img), img);
}

TEST(BinaryFilters, Saturation) {
  const auto a = single({200, 10, 128});
  const auto b = single({100, 20, 128});
  EXPECT_EQ(apply_binary(BinaryFilter::kAddSat, a, b).at(0, 0), (Rgb{255, 30, 255}));
  EXPECT_EQ(apply_binary(BinaryFilter::kSubtractSat, a, b).at(0, 0), (Rgb{100, 0, 0}));
  EXPECT_EQ(apply_binary(BinaryFilter::kMultiply, single({255, 128, 0}), single({255, 128, 9})).at(0, 0),
            (Rgb{255, 64, 0}));
  EXPECT_EQ(apply_binary(BinaryFilter::kScreen, single({0, 128, 255}), single({0, 128, 9})).at(0, 0),
            (Rgb{0, 192, 255}));
}

TEST(BinaryFilters, DimensionMismatch) {
  EXPECT_THROW(apply_binary(BinaryFilter::kAnd, noise(1, 4, 4), noise(2, 5, 4)), Error);
}

TEST(BinaryFilters, CommutativeOnesCommute) {
  const auto a = noise(10);
  const auto b = noise(11);
  for (std::size_t i = 0; i < kBinaryFilterCount; ++i) {
    const auto f = static_cast<BinaryFilter>(i);
    if (!is_commutative(f)) continue;
    EXPECT_EQ(apply_binary(f, a, b), apply_binary(f, b, a)) << filter_name(f);
  }
  EXPECT_NE(apply_binary(BinaryFilter::kSubtractSat, a, b),
            apply_binary(BinaryFilter::kSubtractSat, b, a));
}

TEST(BinaryFilters, CommutativityThroughTrees) {
  const auto img = noise(12);
  const auto l = F::unary(UnaryFilter::kEmboss, 0, F::source());
  const auto r = F::unary(UnaryFilter::kHueRotate, 77, F::source());
  for (auto f : {BinaryFilter::kXor, BinaryFilter::kAddSat, BinaryFilter::kMultiply,
                 BinaryFilter::kMin, BinaryFilter::kMax, BinaryFilter::kAnd, BinaryFilter::kOr,
                 BinaryFilter::kScreen}) {
    EXPECT_EQ(apply_filter(*F::binary(f, l, r), img), apply_filter(*F::binary(f, r, l), img));
  }
}

TEST(Library, Deterministic) {
  const auto a = random_filter_library(1, 3);
  const auto b = random_filter_library(1, 3);
  ASSERT_EQ(a.filters.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(to_sexpr(*a.filters[i]), to_sexpr(*b.filters[i]));
}

TEST(Library, CountAndDepth) {
  const auto lib = random_filter_library(9, 1000);
  EXPECT_EQ(lib.filters.size(), 1000u);
  std::set<std::string> distinct;
  for (const auto& f : lib.filters) {
    EXPECT_LE(f->depth(), 4);
    EXPECT_NE(f->kind(), FilterNode::Kind::kSource);
    distinct.insert(to_sexpr(*f));
  }
  EXPECT_GT(distinct.size(), 900u);
}

TEST(Library, DepthOneIsUnaryOverSource) {
  for (const auto& f : random_filter_library(4, 200, 1).filters) {
    if (f->kind() == FilterNode::Kind::kSource) continue;
    ASSERT_EQ(f->kind(), FilterNode::Kind::kUnary);
    EXPECT_EQ(f->left()->kind(), FilterNode::Kind::kSource);
  }
}

TEST(Library, ParametersInRange) {
  for (const auto& f : random_filter_library(77, 500, 6).filters) {
    visit(*f, [](const FilterNode& n) {
      if (n.kind() != FilterNode::Kind::kUnary) return;
      const int p = n.param();
      switch (n.unary_filter()) {
        case UnaryFilter::kBlur: EXPECT_TRUE(p >= 1 && p <= 3); break;
        case UnaryFilter::kThreshold: EXPECT_TRUE(p >= 64 && p <= 192); break;
        case UnaryFilter::kPosterize: EXPECT_TRUE(p >= 2 && p <= 6); break;
        case UnaryFilter::kHueRotate: EXPECT_TRUE(p >= 0 && p < 360); break;
        default: break;
      }
    });
  }
}

TEST(Library, FuzzKeepsDimensions) {
  const auto lib = random_filter_library(31, 300, 8);
  for (std::size_t i = 0; i < lib.filters.size(); ++i) {
    const auto img = noise(i, 5 + static_cast<int>(i % 7), 4 + static_cast<int>(i % 5));
    const auto out = apply_filter(*lib.filters[i], img);
    ASSERT_EQ(out.width(), img.width());
    ASSERT_EQ(out.height(), img.height());
    ASSERT_EQ(out.bytes().size(), img.bytes().size());
  }
}

TEST(Sexpr, Format) {
  EXPECT_EQ(to_sexpr(*F::unary(UnaryFilter::kBlur, 2, F::source())), "(blur 2 source)");
  EXPECT_EQ(to_sexpr(*F::binary(BinaryFilter::kXor, F::source(),
                                F::unary(UnaryFilter::kInvert, 0, F::source()))),
            "(xor source (invert 0 source))");
}

}  // namespace
}  // namespace obscurer::filtertree
