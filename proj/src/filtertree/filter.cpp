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

#include "obscurer/filtertree/filter.h"

#include <algorithm>
#include <array>
#include <cmath>

#include "obscurer/common/error.h"
#include "obscurer/imagegen/render.h"

namespace obscurer::filtertree {
namespace {

constexpr std::string_view kUnaryNames[kUnaryFilterCount] = {
    "blur", "sharpen", "emboss", "invert", "grayscale", "threshold", "channel_swap", "posterize",
    "hue_rotate"};
constexpr std::string_view kBinaryNames[kBinaryFilterCount] = {
    "and", "or", "xor", "add_sat", "subtract_sat", "multiply", "screen", "min", "max"};

constexpr std::array<std::array<int, 3>, 6> kPermutations = {
    {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}}};

std::uint8_t saturate(int v) { return static_cast<std::uint8_t>(std::clamp(v, 0, 255)); }

int luma(Rgb p) { return (299 * p.r + 587 * p.g + 114 * p.b + 500) / 1000; }

RasterImage convolve3(const RasterImage& img, const std::array<int, 9>& k) {
  const int w = img.width();
  const int h = img.height();
  RasterImage out(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      int acc[3] = {0, 0, 0};
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          const int weight = k[static_cast<std::size_t>((dy + 1) * 3 + dx + 1)];
          if (weight == 0) continue;
          const Rgb p = img.at(std::clamp(x + dx, 0, w - 1), std::clamp(y + dy, 0, h - 1));
          acc[0] += weight * p.r;
          acc[1] += weight * p.g;
          acc[2] += weight * p.b;
        }
      }
      out.set(x, y, {saturate(acc[0]), saturate(acc[1]), saturate(acc[2])});
    }
  }
  return out;
}

template <typename Fn>
RasterImage map_pixels(const RasterImage& img, Fn&& fn) {
  RasterImage out(img.width(), img.height());
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) out.set(x, y, fn(img.at(x, y)));
  }
  return out;
}

Rgb rotate_hue(Rgb p, int degrees) {
  const double r = p.r / 255.0;
  const double g = p.g / 255.0;
  const double b = p.b / 255.0;
  const double mx = std::max({r, g, b});
  const double mn = std::min({r, g, b});
  const double delta = mx - mn;
  if (delta <= 0.0) return p;
  double hue = 0.0;
  if (mx == r) {
    hue = 60.0 * std::fmod((g - b) / delta, 6.0);
  } else if (mx == g) {
    hue = 60.0 * ((b - r) / delta + 2.0);
  } else {
    hue = 60.0 * ((r - g) / delta + 4.0);
  }
  hue = std::fmod(hue + degrees + 720.0, 360.0);
  const double sat = delta / mx;
  const double c = mx * sat;
  const double xh = c * (1.0 - std::abs(std::fmod(hue / 60.0, 2.0) - 1.0));
  const double m = mx - c;
  double rr = 0, gg = 0, bb = 0;
  switch (static_cast<int>(hue / 60.0) % 6) {
    case 0: rr = c; gg = xh; break;
    case 1: rr = xh; gg = c; break;
    case 2: gg = c; bb = xh; break;
    case 3: gg = xh; bb = c; break;
    case 4: rr = xh; bb = c; break;
    default: rr = c; bb = xh; break;
  }
  auto to8 = [](double v) { return saturate(static_cast<int>(std::lround(v * 255.0))); };
  return {to8(rr + m), to8(gg + m), to8(bb + m)};
}

void write_sexpr(const FilterNode& f, std::string& out) {
  switch (f.kind()) {
    case FilterNode::Kind::kSource:
      out += "source";
      return;
    case FilterNode::Kind::kUnary:
      out += '(';
      out += filter_name(f.unary_filter());
      out += ' ';
      out += std::to_string(f.param());
      out += ' ';
      write_sexpr(*f.left(), out);
      out += ')';
      return;
    case FilterNode::Kind::kBinary:
      out += '(';
      out += filter_name(f.binary_filter());
      out += ' ';
      write_sexpr(*f.left(), out);
      out += ' ';
      write_sexpr(*f.right(), out);
      out += ')';
      return;
  }
}

RasterImage evaluate(const FilterNode& f, const RasterImage& src) {
  switch (f.kind()) {
    case FilterNode::Kind::kSource:
      return src;
    case FilterNode::Kind::kUnary:
      return apply_unary(f.unary_filter(), f.param(), evaluate(*f.left(), src));
    case FilterNode::Kind::kBinary: {
      const RasterImage l = evaluate(*f.left(), src);
      const RasterImage r = evaluate(*f.right(), src);
      return apply_binary(f.binary_filter(), l, r);
    }
  }
  return src;
}

int random_param(Rng& rng, UnaryFilter f) {
  switch (f) {
    case UnaryFilter::kBlur: return static_cast<int>(rng.between(1, 3));
    case UnaryFilter::kThreshold: return static_cast<int>(rng.between(64, 192));
    case UnaryFilter::kChannelSwap: return static_cast<int>(rng.between(1, 5));
    case UnaryFilter::kPosterize: return static_cast<int>(rng.between(2, 6));
    case UnaryFilter::kHueRotate: return static_cast<int>(rng.between(0, 359));
    default: return 0;
  }
}

FilterPtr random_operator(Rng& rng, int max_depth);

FilterPtr random_subtree(Rng& rng, int max_depth) {
  if (max_depth <= 0 || rng.chance(0.2)) return FilterNode::source();
  return random_operator(rng, max_depth);
}

// Binary nodes need two levels of budget so that depth 1 stays a single
// unary over the source.
FilterPtr random_operator(Rng& rng, int max_depth) {
  if (max_depth >= 2 && rng.chance(0.4)) {
    const auto f = static_cast<BinaryFilter>(rng.below(kBinaryFilterCount));
    auto l = random_subtree(rng, max_depth - 1);
    auto r = random_subtree(rng, max_depth - 1);
    return FilterNode::binary(f, std::move(l), std::move(r));
  }
  const auto f = static_cast<UnaryFilter>(rng.below(kUnaryFilterCount));
  const int param = random_param(rng, f);
  return FilterNode::unary(f, param, random_subtree(rng, max_depth - 1));
}

}  // namespace

std::string_view filter_name(UnaryFilter f) { return kUnaryNames[static_cast<std::size_t>(f)]; }
std::string_view filter_name(BinaryFilter f) { return kBinaryNames[static_cast<std::size_t>(f)]; }

bool is_commutative(BinaryFilter f) { return f != BinaryFilter::kSubtractSat; }

FilterPtr FilterNode::source() {
  return std::shared_ptr<FilterNode>(new FilterNode());
}

FilterPtr FilterNode::unary(UnaryFilter f, int param, FilterPtr child) {
  if (!child) throw Error(ErrorCode::kInvalidArgument, "null filter child");
  auto n = std::shared_ptr<FilterNode>(new FilterNode());
  n->kind_ = Kind::kUnary;
  n->unary_ = f;
  n->param_ = param;
  n->depth_ = child->depth() + 1;
  n->left_ = std::move(child);
  return n;
}

FilterPtr FilterNode::binary(BinaryFilter f, FilterPtr left, FilterPtr right) {
  if (!left || !right) throw Error(ErrorCode::kInvalidArgument, "null filter child");
  auto n = std::shared_ptr<FilterNode>(new FilterNode());
  n->kind_ = Kind::kBinary;
  n->binary_ = f;
  n->depth_ = std::max(left->depth(), right->depth()) + 1;
  n->left_ = std::move(left);
  n->right_ = std::move(right);
  return n;
}

RasterImage apply_unary(UnaryFilter f, int param, const RasterImage& img) {
  switch (f) {
    case UnaryFilter::kBlur:
      return imagegen::box_blur(img, std::clamp(param, 1, 3));
    case UnaryFilter::kSharpen:
      return convolve3(img, {0, -1, 0, -1, 5, -1, 0, -1, 0});
    case UnaryFilter::kEmboss:
      return convolve3(img, {-2, -1, 0, -1, 1, 1, 0, 1, 2});
    case UnaryFilter::kInvert:
      return map_pixels(img, [](Rgb p) {
        return Rgb{static_cast<std::uint8_t>(255 - p.r), static_cast<std::uint8_t>(255 - p.g),
                   static_cast<std::uint8_t>(255 - p.b)};
      });
    case UnaryFilter::kGrayscale:
      return map_pixels(img, [](Rgb p) {
        const auto l = static_cast<std::uint8_t>(luma(p));
        return Rgb{l, l, l};
      });
    case UnaryFilter::kThreshold:
      return map_pixels(img, [param](Rgb p) {
        const std::uint8_t v = luma(p) >= param ? 255 : 0;
        return Rgb{v, v, v};
      });
    case UnaryFilter::kChannelSwap: {
      const auto& perm = kPermutations[static_cast<std::size_t>(std::clamp(param, 0, 5))];
      return map_pixels(img, [&perm](Rgb p) {
        const std::uint8_t c[3] = {p.r, p.g, p.b};
        return Rgb{c[perm[0]], c[perm[1]], c[perm[2]]};
      });
    }
    case UnaryFilter::kPosterize: {
      const int steps = std::clamp(param, 2, 6) - 1;
      auto q = [steps](std::uint8_t c) {
        const int level = (c * steps + 127) / 255;
        return static_cast<std::uint8_t>((level * 255 + steps / 2) / steps);
      };
      return map_pixels(img, [&q](Rgb p) { return Rgb{q(p.r), q(p.g), q(p.b)}; });
    }
    case UnaryFilter::kHueRotate:
      return map_pixels(img, [param](Rgb p) { return rotate_hue(p, param); });
  }
  return img;
}

RasterImage apply_binary(BinaryFilter f, const RasterImage& a, const RasterImage& b) {
  if (a.width() != b.width() || a.height() != b.height()) {
    throw Error(ErrorCode::kDimensionMismatch, "binary filter operands differ in size");
  }
  RasterImage out(a.width(), a.height());
  const auto pa = a.bytes();
  const auto pb = b.bytes();
  auto po = out.bytes();
  for (std::size_t i = 0; i < pa.size(); ++i) {
    const int x = pa[i];
    const int y = pb[i];
    int v = 0;
    switch (f) {
      case BinaryFilter::kAnd: v = x & y; break;
      case BinaryFilter::kOr: v = x | y; break;
      case BinaryFilter::kXor: v = x ^ y; break;
      case BinaryFilter::kAddSat: v = x + y; break;
      case BinaryFilter::kSubtractSat: v = x - y; break;
      case BinaryFilter::kMultiply: v = (x * y + 127) / 255; break;
      case BinaryFilter::kScreen: v = 255 - ((255 - x) * (255 - y) + 127) / 255; break;
      case BinaryFilter::kMin: v = std::min(x, y); break;
      case BinaryFilter::kMax: v = std::max(x, y); break;
    }
    po[i] = saturate(v);
  }
  return out;
}

RasterImage apply_filter(const FilterNode& filter, const RasterImage& src) {
  if (filter.depth() > kMaxFilterDepth) {
    throw Error(ErrorCode::kDepthExceeded, "filter depth " + std::to_string(filter.depth()) +
                                               " exceeds " + std::to_string(kMaxFilterDepth));
  }
  return evaluate(filter, src);
}

std::string to_sexpr(const FilterNode& filter) {
  std::string out;
  write_sexpr(filter, out);
  return out;
}

FilterPtr random_filter(Rng& rng, int max_depth) {
  if (max_depth < 1) return FilterNode::source();
  return random_operator(rng, std::min(max_depth, kMaxFilterDepth));
}

FilterLibrary random_filter_library(std::uint64_t seed, int count, int max_depth) {
  if (count < 1) throw Error(ErrorCode::kInvalidArgument, "filter count must be >= 1");
  if (max_depth < 0 || max_depth > kMaxFilterDepth) {
    throw Error(ErrorCode::kInvalidArgument, "max_depth must be in [0, 8]");
  }
  FilterLibrary lib;
  lib.seed = seed;
  lib.filters.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(i)));
    lib.filters.push_back(random_filter(rng, max_depth));
  }
  return lib;
}

}  // namespace obscurer::filtertree
