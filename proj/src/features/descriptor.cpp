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

#include "obscurer/features/descriptor.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "obscurer/common/error.h"

namespace obscurer::features {
namespace {

constexpr double kLumaR = 0.299;
constexpr double kLumaG = 0.587;
constexpr double kLumaB = 0.114;

void normalize_block(std::span<double> block) {
  double sum_sq = 0.0;
  for (double v : block) sum_sq += v * v;
  if (sum_sq <= 0.0) return;
  const double inv = 1.0 / std::sqrt(sum_sq);
  for (double& v : block) v *= inv;
}

}  // namespace

RasterImage resize_shorter_edge(const RasterImage& img, int edge) {
  if (edge <= 0) throw Error(ErrorCode::kInvalidArgument, "resize edge must be positive");
  const int w = img.width();
  const int h = img.height();
  int out_w = 0;
  int out_h = 0;
  if (w <= h) {
    out_w = edge;
    out_h = std::max(1, static_cast<int>(std::lround(static_cast<double>(h) * edge / w)));
  } else {
    out_h = edge;
    out_w = std::max(1, static_cast<int>(std::lround(static_cast<double>(w) * edge / h)));
  }
  if (out_w == w && out_h == h) return img;

  RasterImage out(out_w, out_h);
  const double sx = static_cast<double>(w) / out_w;
  const double sy = static_cast<double>(h) / out_h;
  for (int y = 0; y < out_h; ++y) {
    const double fy = std::clamp((y + 0.5) * sy - 0.5, 0.0, static_cast<double>(h - 1));
    const int y0 = static_cast<int>(fy);
    const int y1 = std::min(y0 + 1, h - 1);
    const double ty = fy - y0;
    for (int x = 0; x < out_w; ++x) {
      const double fx = std::clamp((x + 0.5) * sx - 0.5, 0.0, static_cast<double>(w - 1));
      const int x0 = static_cast<int>(fx);
      const int x1 = std::min(x0 + 1, w - 1);
      const double tx = fx - x0;
      const Rgb a = img.at(x0, y0);
      const Rgb b = img.at(x1, y0);
      const Rgb c = img.at(x0, y1);
      const Rgb d = img.at(x1, y1);
      auto lerp = [&](std::uint8_t pa, std::uint8_t pb, std::uint8_t pc, std::uint8_t pd) {
        const double top = pa + (pb - pa) * tx;
        const double bottom = pc + (pd - pc) * tx;
        const double v = top + (bottom - top) * ty;
        return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
      };
      out.set(x, y, {lerp(a.r, b.r, c.r, d.r), lerp(a.g, b.g, c.g, d.g),
                     lerp(a.b, b.b, c.b, d.b)});
    }
  }
  return out;
}

EmbeddingVector extract_descriptor(const RasterImage& img, const DescriptorConfig& cfg) {
  if (cfg.grid <= 0 || cfg.color_bins <= 0 || cfg.gradient_bins <= 0 || cfg.resize_edge <= 0) {
    throw Error(ErrorCode::kInvalidArgument, "descriptor config fields must be positive");
  }
  if (img.width() < kMinDescriptorEdge || img.height() < kMinDescriptorEdge) {
    throw Error(ErrorCode::kImageTooSmall, std::to_string(img.width()) + "x" +
                                               std::to_string(img.height()));
  }
  const RasterImage work = resize_shorter_edge(img, cfg.resize_edge);
  const int w = work.width();
  const int h = work.height();
  if (w < cfg.grid || h < cfg.grid) {
    throw Error(ErrorCode::kInvalidArgument, "grid finer than resized image");
  }

  std::vector<double> luma(static_cast<std::size_t>(w) * h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const Rgb p = work.at(x, y);
      luma[static_cast<std::size_t>(y) * w + x] = kLumaR * p.r + kLumaG * p.g + kLumaB * p.b;
    }
  }
  auto lum = [&](int x, int y) {
    x = std::clamp(x, 0, w - 1);
    y = std::clamp(y, 0, h - 1);
    return luma[static_cast<std::size_t>(y) * w + x];
  };

  const std::size_t per_cell = 3 * static_cast<std::size_t>(cfg.color_bins) + cfg.gradient_bins;
  std::vector<double> out(cfg.dimension(), 0.0);

  for (int cy = 0; cy < cfg.grid; ++cy) {
    const int y_begin = cy * h / cfg.grid;
    const int y_end = (cy + 1) * h / cfg.grid;
    for (int cx = 0; cx < cfg.grid; ++cx) {
      const int x_begin = cx * w / cfg.grid;
      const int x_end = (cx + 1) * w / cfg.grid;
      double* cell = out.data() + (static_cast<std::size_t>(cy) * cfg.grid + cx) * per_cell;
      double* red = cell;
      double* green = red + cfg.color_bins;
      double* blue = green + cfg.color_bins;
      double* grad = blue + cfg.color_bins;

      for (int y = y_begin; y < y_end; ++y) {
        for (int x = x_begin; x < x_end; ++x) {
          const Rgb p = work.at(x, y);
          red[p.r * cfg.color_bins / 256] += 1.0;
          green[p.g * cfg.color_bins / 256] += 1.0;
          blue[p.b * cfg.color_bins / 256] += 1.0;

          const double gx = 0.5 * (lum(x + 1, y) - lum(x - 1, y));
          const double gy = 0.5 * (lum(x, y + 1) - lum(x, y - 1));
          const double mag = std::hypot(gx, gy);
          if (mag <= 0.0) continue;
          double theta = std::atan2(gy, gx);
          if (theta < 0.0) theta += std::numbers::pi;
          if (theta >= std::numbers::pi) theta -= std::numbers::pi;
          const int bin = std::min(
              static_cast<int>(theta / std::numbers::pi * cfg.gradient_bins),
              cfg.gradient_bins - 1);
          grad[bin] += mag;
        }
      }
      normalize_block({red, static_cast<std::size_t>(cfg.color_bins)});
      normalize_block({green, static_cast<std::size_t>(cfg.color_bins)});
      normalize_block({blue, static_cast<std::size_t>(cfg.color_bins)});
      normalize_block({grad, static_cast<std::size_t>(cfg.gradient_bins)});
    }
  }
  return EmbeddingVector::normalized(std::move(out));
}

}  // namespace obscurer::features
