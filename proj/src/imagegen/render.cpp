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

#include "obscurer/imagegen/render.h"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "obscurer/common/error.h"
#include "obscurer/common/rng.h"
#include "obscurer/imagegen/compiled_expr.h"

namespace obscurer::imagegen {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr std::string_view kTransformNames[] = {"identity", "diamond",  "grid",  "kaleidoscope",
                                                "necklace", "oval", "polar", "tron"};

bool finite(const Segment& s) {
  return std::isfinite(s.x0) && std::isfinite(s.y0) && std::isfinite(s.x1) && std::isfinite(s.y1);
}

Point center_of(const CanvasSpec& c) { return {c.width / 2.0, c.height / 2.0}; }

double positive_mod(double v, double m) {
  double r = std::fmod(v, m);
  if (r < 0.0) r += m;
  return r;
}

Point diamond_map(Point p, const CanvasSpec& canvas) {
  const Point c = center_of(canvas);
  const double limit = 0.5 * std::hypot(c.x, c.y);
  const double dx = p.x - c.x;
  const double dy = p.y - c.y;
  const double d = std::abs(dx) + std::abs(dy);
  if (d <= limit || d == 0.0) return p;
  const double folded = limit - std::abs(positive_mod(d, 2.0 * limit) - limit);
  const double s = folded / d;
  return {c.x + dx * s, c.y + dy * s};
}

Segment grid_map(const Segment& s, int cell) {
  const double origin_x = std::floor(s.x0 / cell) * cell;
  const double origin_y = std::floor(s.y0 / cell) * cell;
  return {origin_x + positive_mod(s.x0, cell), origin_y + positive_mod(s.y0, cell),
          origin_x + positive_mod(s.x1, cell), origin_y + positive_mod(s.y1, cell)};
}

Point kaleidoscope_map(Point p, const CanvasSpec& canvas, int sectors) {
  const Point c = center_of(canvas);
  const double dx = p.x - c.x;
  const double dy = p.y - c.y;
  const double r = std::hypot(dx, dy);
  if (r == 0.0) return c;
  const double wedge = 2.0 * kPi / sectors;
  const double theta = positive_mod(std::atan2(dy, dx), 2.0 * kPi);
  const double m = positive_mod(theta, 2.0 * wedge);
  const double folded = m <= wedge ? m : 2.0 * wedge - m;
  return {c.x + r * std::cos(folded), c.y + r * std::sin(folded)};
}

Point necklace_map(Point p, const CanvasSpec& canvas, int beads, double pull) {
  const Point c = center_of(canvas);
  const double radius = std::min(canvas.width, canvas.height) / 3.0;
  Point best{};
  double best_d2 = std::numeric_limits<double>::infinity();
  for (int k = 0; k < beads; ++k) {
    const double a = 2.0 * kPi * k / beads;
    const Point bead{c.x + radius * std::cos(a), c.y + radius * std::sin(a)};
    const double d2 = (bead.x - p.x) * (bead.x - p.x) + (bead.y - p.y) * (bead.y - p.y);
    if (d2 < best_d2) {
      best_d2 = d2;
      best = bead;
    }
  }
  return {p.x + pull * (best.x - p.x), p.y + pull * (best.y - p.y)};
}

Segment tron_map(const Segment& s) {
  const double dx = s.x1 - s.x0;
  const double dy = s.y1 - s.y0;
  const double len = std::hypot(dx, dy);
  if (len == 0.0) return s;
  const double step = kPi / 4.0;
  const double snapped = std::round(std::atan2(dy, dx) / step) * step;
  const double mx = 0.5 * (s.x0 + s.x1);
  const double my = 0.5 * (s.y0 + s.y1);
  const double hx = 0.5 * len * std::cos(snapped);
  const double hy = 0.5 * len * std::sin(snapped);
  return {mx - hx, my - hy, mx + hx, my + hy};
}

int clamp_round(double v, int extent) {
  if (!std::isfinite(v)) return 0;
  const double r = std::round(v);
  if (r < 0.0) return 0;
  if (r > extent - 1) return extent - 1;
  return static_cast<int>(r);
}

// Integer midpoint (Bresenham) line between clamped endpoints.
void raster_line(RasterImage& img, int x0, int y0, int x1, int y1, Rgb color) {
  const int dx = std::abs(x1 - x0);
  const int dy = -std::abs(y1 - y0);
  const int sx = x0 < x1 ? 1 : -1;
  const int sy = y0 < y1 ? 1 : -1;
  int err = dx + dy;
  for (;;) {
    img.set(x0, y0, color);
    if (x0 == x1 && y0 == y1) break;
    const int e2 = 2 * err;
    if (e2 >= dy) {
      err += dy;
      x0 += sx;
    }
    if (e2 <= dx) {
      err += dx;
      y0 += sy;
    }
  }
}

constexpr int kEllipseSegments = 64;

}  // namespace

void CanvasSpec::validate() const {
  if (width < 16 || height < 16) {
    throw Error(ErrorCode::kInvalidArgument, "canvas must be at least 16x16");
  }
  if (particle_count < 1) throw Error(ErrorCode::kInvalidArgument, "particle_count must be >= 1");
  if (timesteps < 1) throw Error(ErrorCode::kInvalidArgument, "timesteps must be >= 1");
  if (blur_radius < 0) throw Error(ErrorCode::kInvalidArgument, "blur_radius must be >= 0");
}

std::string_view transform_name(TransformKind kind) {
  return kTransformNames[static_cast<std::size_t>(kind)];
}

std::optional<TransformKind> parse_transform(std::string_view name) {
  for (std::size_t i = 0; i < std::size(kTransformNames); ++i) {
    if (kTransformNames[i] == name) return static_cast<TransformKind>(i);
  }
  return std::nullopt;
}

void LineTransform::validate() const {
  switch (kind) {
    case TransformKind::kNecklace:
      if (bead_count < 2) throw Error(ErrorCode::kInvalidArgument, "bead_count must be >= 2");
      if (!(bead_pull >= 0.0 && bead_pull <= 1.0)) {
        throw Error(ErrorCode::kInvalidArgument, "bead_pull must be in [0, 1]");
      }
      break;
    case TransformKind::kGrid:
      if (cell_size < 4) throw Error(ErrorCode::kInvalidArgument, "cell_size must be >= 4");
      break;
    case TransformKind::kKaleidoscope:
      if (sector_count < 2) throw Error(ErrorCode::kInvalidArgument, "sector_count must be >= 2");
      break;
    case TransformKind::kOval:
      if (!(oval_factor >= 1.0)) throw Error(ErrorCode::kInvalidArgument, "oval_factor must be >= 1");
      break;
    default:
      break;
  }
}

Point polar_map(Point p, const CanvasSpec& canvas) {
  const Point c = center_of(canvas);
  const double dx = p.x - c.x;
  const double dy = p.y - c.y;
  const double r = std::hypot(dx, dy);
  const double theta = (dx == 0.0 && dy == 0.0) ? 0.0 : std::atan2(dy, dx);
  const double r_max = std::hypot(c.x, c.y);
  return {canvas.width * (theta + kPi) / (2.0 * kPi), canvas.height * r / r_max};
}

std::vector<Primitive> apply_line_transform(const LineTransform& t, const Segment& s,
                                            const CanvasSpec& canvas) {
  if (!finite(s)) throw Error(ErrorCode::kInvalidSegment, "segment has non-finite coordinates");
  t.validate();
  auto per_point = [&](auto&& fn) -> std::vector<Primitive> {
    const Point a = fn(Point{s.x0, s.y0});
    const Point b = fn(Point{s.x1, s.y1});
    return {Segment{a.x, a.y, b.x, b.y}};
  };
  switch (t.kind) {
    case TransformKind::kIdentity:
      return {s};
    case TransformKind::kDiamond:
      return per_point([&](Point p) { return diamond_map(p, canvas); });
    case TransformKind::kGrid:
      return {grid_map(s, t.cell_size)};
    case TransformKind::kKaleidoscope:
      return per_point([&](Point p) { return kaleidoscope_map(p, canvas, t.sector_count); });
    case TransformKind::kNecklace:
      return per_point([&](Point p) { return necklace_map(p, canvas, t.bead_count, t.bead_pull); });
    case TransformKind::kOval: {
      const double d = std::hypot(s.x1 - s.x0, s.y1 - s.y0);
      return {Ellipse{{s.x0, s.y0}, {s.x1, s.y1}, t.oval_factor * d}};
    }
    case TransformKind::kPolar:
      return per_point([&](Point p) { return polar_map(p, canvas); });
    case TransformKind::kTron:
      return {tron_map(s)};
  }
  return {s};
}

double fold_unit(double v) {
  if (!std::isfinite(v)) return 0.0;
  const double m = positive_mod(v, 2.0);
  return m <= 1.0 ? m : 2.0 - m;
}

std::uint8_t fold_channel(double v) {
  return static_cast<std::uint8_t>(std::lround(fold_unit(v) * 255.0));
}

void draw_line(RasterImage& img, Point a, Point b, Rgb color) {
  if (img.empty()) return;
  raster_line(img, clamp_round(a.x, img.width()), clamp_round(a.y, img.height()),
              clamp_round(b.x, img.width()), clamp_round(b.y, img.height()), color);
}

void draw_primitive(RasterImage& img, const Primitive& prim, Rgb color) {
  if (const auto* seg = std::get_if<Segment>(&prim)) {
    draw_line(img, {seg->x0, seg->y0}, {seg->x1, seg->y1}, color);
    return;
  }
  const auto& e = std::get<Ellipse>(prim);
  const double cx = 0.5 * (e.focus_a.x + e.focus_b.x);
  const double cy = 0.5 * (e.focus_a.y + e.focus_b.y);
  const double semi_major = 0.5 * e.major_axis;
  const double focal = 0.5 * std::hypot(e.focus_b.x - e.focus_a.x, e.focus_b.y - e.focus_a.y);
  if (semi_major <= 0.0) {
    draw_line(img, {cx, cy}, {cx, cy}, color);
    return;
  }
  const double semi_minor = std::sqrt(std::max(0.0, semi_major * semi_major - focal * focal));
  const double angle = std::atan2(e.focus_b.y - e.focus_a.y, e.focus_b.x - e.focus_a.x);
  const double ca = std::cos(angle);
  const double sa = std::sin(angle);
  auto at = [&](int i) {
    const double th = 2.0 * kPi * i / kEllipseSegments;
    const double u = semi_major * std::cos(th);
    const double v = semi_minor * std::sin(th);
    return Point{cx + u * ca - v * sa, cy + u * sa + v * ca};
  };
  Point prev = at(0);
  for (int i = 1; i <= kEllipseSegments; ++i) {
    const Point next = at(i);
    draw_line(img, prev, next, color);
    prev = next;
  }
}

Rgb resolve_background(const CanvasSpec& canvas, const ParticleGenome& genome) {
  if (canvas.background) return *canvas.background;
  Rng rng(derive_seed(genome.rng_seed, 0xb6c0));
  const auto r = static_cast<std::uint8_t>(rng.below(256));
  const auto g = static_cast<std::uint8_t>(rng.below(256));
  const auto b = static_cast<std::uint8_t>(rng.below(256));
  return {r, g, b};
}

RasterImage render_particle_image(const ParticleGenome& genome, const CanvasSpec& canvas,
                                  const LineTransform& transform) {
  canvas.validate();
  transform.validate();
  std::array<CompiledExpr, 5> init;
  std::array<CompiledExpr, 5> update;
  for (std::size_t k = 0; k < 5; ++k) {
    init[k] = CompiledExpr(*genome.init[k]);
    update[k] = CompiledExpr(*genome.update[k]);
  }

  RasterImage img(canvas.width, canvas.height, resolve_background(canvas, genome));
  const auto n = static_cast<std::size_t>(canvas.particle_count);

  // Per particle: f1..f10 then the last drawn position.
  struct Particle {
    std::array<double, 10> f;
    Point pos;
  };
  std::vector<Particle> particles(n);
  for (std::size_t i = 0; i < n; ++i) {
    Env env;
    env.set(Var::kP, static_cast<double>(i + 1));
    auto& part = particles[i];
    for (std::size_t k = 0; k < 5; ++k) {
      part.f[k] = init[k].eval(env);
      part.f[k + 5] = part.f[k];
    }
    part.pos = {fold_coordinate(part.f[0], canvas.width), fold_coordinate(part.f[1], canvas.height)};
  }

  for (int t = 1; t <= canvas.timesteps; ++t) {
    for (std::size_t i = 0; i < n; ++i) {
      auto& part = particles[i];
      Env env;
      env.set(Var::kP, static_cast<double>(i + 1)).set(Var::kT, static_cast<double>(t));
      for (int k = 1; k <= 10; ++k) env.set(prior_value(k), part.f[static_cast<std::size_t>(k - 1)]);
      for (std::size_t k = 0; k < 5; ++k) {
        const double v = update[k].eval(env);
        part.f[k + 5] = v;
        env.set(prior_value(static_cast<int>(k) + 6), v);
      }
      const Point next{fold_coordinate(part.f[5], canvas.width),
                       fold_coordinate(part.f[6], canvas.height)};
      const Rgb color{fold_channel(part.f[7]), fold_channel(part.f[8]), fold_channel(part.f[9])};
      for (const auto& prim : apply_line_transform(
               transform, Segment{part.pos.x, part.pos.y, next.x, next.y}, canvas)) {
        draw_primitive(img, prim, color);
      }
      part.pos = next;
    }
    img = box_blur(img, canvas.blur_radius);
  }
  return img;
}

RasterImage render_coordinate_image(const Expr& red, const Expr& green, const Expr& blue,
                                    const CanvasSpec& canvas) {
  if (canvas.width < 16 || canvas.height < 16) {
    throw Error(ErrorCode::kInvalidArgument, "canvas must be at least 16x16");
  }
  const CompiledExpr r(red);
  const CompiledExpr g(green);
  const CompiledExpr b(blue);
  RasterImage img(canvas.width, canvas.height);
  for (int py = 0; py < canvas.height; ++py) {
    for (int px = 0; px < canvas.width; ++px) {
      Env env;
      env.set(Var::kX, static_cast<double>(px) / (canvas.width - 1))
          .set(Var::kY, static_cast<double>(py) / (canvas.height - 1));
      img.set(px, py, {fold_channel(r.eval(env)), fold_channel(g.eval(env)),
                       fold_channel(b.eval(env))});
    }
  }
  return img;
}

RasterImage box_blur(const RasterImage& img, int radius) {
  if (radius < 0) throw Error(ErrorCode::kInvalidArgument, "blur radius must be >= 0");
  if (radius == 0 || img.empty()) return img;
  const int w = img.width();
  const int h = img.height();
  const auto src = img.bytes();

  // Horizontal window sums (not yet divided), then vertical sums of those,
  // so the final division sees the exact 2-D neighbourhood total.
  std::vector<std::int32_t> rows(static_cast<std::size_t>(w) * h * 3);
  for (int y = 0; y < h; ++y) {
    const std::size_t base = static_cast<std::size_t>(y) * w * 3;
    for (int x = 0; x < w; ++x) {
      std::int32_t acc[3] = {0, 0, 0};
      for (int dx = -radius; dx <= radius; ++dx) {
        const int sx = std::clamp(x + dx, 0, w - 1);
        for (int c = 0; c < 3; ++c) acc[c] += src[base + static_cast<std::size_t>(sx) * 3 + c];
      }
      for (int c = 0; c < 3; ++c) rows[base + static_cast<std::size_t>(x) * 3 + c] = acc[c];
    }
  }
  const std::int32_t den = (2 * radius + 1) * (2 * radius + 1);
  RasterImage out(w, h);
  auto dst = out.bytes();
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      std::int32_t acc[3] = {0, 0, 0};
      for (int dy = -radius; dy <= radius; ++dy) {
        const int sy = std::clamp(y + dy, 0, h - 1);
        const std::size_t i = (static_cast<std::size_t>(sy) * w + x) * 3;
        for (int c = 0; c < 3; ++c) acc[c] += rows[i + c];
      }
      const std::size_t o = (static_cast<std::size_t>(y) * w + x) * 3;
      for (int c = 0; c < 3; ++c) dst[o + c] = static_cast<std::uint8_t>((acc[c] + den / 2) / den);
    }
  }
  return out;
}

double coverage_score(const RasterImage& img, Rgb background) {
  if (img.empty()) return 0.0;
  std::size_t covered = 0;
  const auto px = img.bytes();
  const int bg[3] = {background.r, background.g, background.b};
  for (std::size_t i = 0; i < px.size(); i += 3) {
    int dev = 0;
    for (int c = 0; c < 3; ++c) dev = std::max(dev, std::abs(static_cast<int>(px[i + c]) - bg[c]));
    if (dev > kCoverageThreshold) ++covered;
  }
  return static_cast<double>(covered) / static_cast<double>(px.size() / 3);
}

}  // namespace obscurer::imagegen
