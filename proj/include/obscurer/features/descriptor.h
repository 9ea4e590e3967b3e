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

#include "obscurer/common/raster.h"
#include "obscurer/features/embedding.h"

namespace obscurer::features {

/// Grid of per-cell color and gradient-orientation histograms, a compact
/// deterministic stand-in for a convolutional feature extractor.
struct DescriptorConfig {
  int grid = 4;
  int color_bins = 8;
  int gradient_bins = 8;
  int resize_edge = 128;

  std::size_t dimension() const {
    return static_cast<std::size_t>(grid) * grid * (3 * color_bins + gradient_bins);
  }

  friend bool operator==(const DescriptorConfig&, const DescriptorConfig&) = default;
};

inline constexpr int kMinDescriptorEdge = 16;

/// Layout per cell (cells row-major): R, G, B intensity histograms then the
/// gradient histogram. Each of those four blocks is L2-normalized when
/// nonzero, then the full vector is normalized.
///
/// Throws kImageTooSmall when either edge is below 16 pixels and
/// kInvalidArgument for a non-positive config field.
EmbeddingVector extract_descriptor(const RasterImage& img, const DescriptorConfig& cfg = {});

/// Bilinear resize so the shorter edge equals `edge`; aspect preserved.
RasterImage resize_shorter_edge(const RasterImage& img, int edge);

}  // namespace obscurer::features
