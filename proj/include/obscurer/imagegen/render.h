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

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "obscurer/common/raster.h"
#include "obscurer/imagegen/genome.h"

namespace obscurer::imagegen {

struct CanvasSpec {
  int width = 256;
  int height = 256;
  int particle_count = 1000;
  int timesteps = 100;
  int blur_radius = 1;
  std::optional<Rgb> background;  // nullopt: random monotone from genome seed

  void validate() const;
};

enum class TransformKind { kIdentity, kDiamond, kGrid, kKaleidoscope, kNecklace, kOval, kPolar, kTron };

std::string_view transform_name(TransformKind kind);
std::optional<TransformKind> parse_transform(std::string_view name);

struct LineTransform {
  TransformKind kind = TransformKind::kIdentity;
  int bead_count = 8;          // necklace
  double bead_pull = 0.6;      // necklace
  int cell_size = 32;          // grid
  int sector_count = 6;        // kaleidoscope
  double oval_factor = 1.5;    // oval major axis / focal distance

  void validate() const;
};

struct Point {
  double x = 0.0;
  double y = 0.0;
};

struct Segment {
  double x0 = 0.0;
  double y0 = 0.0;
  double x1 = 0.0;
  double y1 = 0.0;
};

struct Ellipse {
  Point focus_a;
  Point focus_b;
  double major_axis = 0.0;
};

using Primitive = std::variant<Segment, Ellipse>;

// Endpoint remapping before rasterization. Output may lie off-canvas;
// clamping happens when drawing. Throws kInvalidSegment on non-finite input.
std::vector<Primitive> apply_line_transform(const LineTransform& t, const Segment& segment,
                                            const CanvasSpec& canvas);

Point polar_map(Point p, const CanvasSpec& canvas);

// Reflects v into [0, 1] with period 2: 0 -> 0, 1 -> 1, 1.5 -> 0.5, -0.25 -> 0.25.
double fold_unit(double v);
inline double fold_coordinate(double v, int extent) { return fold_unit(v) * (extent - 1); }
std::uint8_t fold_channel(double v);

// Rounds endpoints, clamps them to the canvas and draws a 1-pixel line
// with the integer midpoint algorithm.
void draw_line(RasterImage& img, Point a, Point b, Rgb color);
void draw_primitive(RasterImage& img, const Primitive& prim, Rgb color);

Rgb resolve_background(const CanvasSpec& canvas, const ParticleGenome& genome);

RasterImage render_particle_image(const ParticleGenome& genome, const CanvasSpec& canvas,
                                  const LineTransform& transform);

RasterImage render_coordinate_image(const Expr& red, const Expr& green, const Expr& blue,
                                    const CanvasSpec& canvas);

// Mean over the (2r+1)^2 neighbourhood with edge clamping, rounded half up.
RasterImage box_blur(const RasterImage& img, int radius);

inline constexpr int kCoverageThreshold = 8;

// Fraction of pixels whose largest channel deviation from background
// exceeds kCoverageThreshold.
double coverage_score(const RasterImage& img, Rgb background);

struct CurationThresholds {
  double min_coverage = 0.02;
  double max_coverage = 0.90;

  bool accepts(double coverage) const {
    return coverage >= min_coverage && coverage <= max_coverage;
  }
};

}  // namespace obscurer::imagegen
