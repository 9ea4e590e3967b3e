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

#include <bit>
#include <cmath>
#include <numbers>

#include "obscurer/common/error.h"
#include "obscurer/common/rng.h"
#include "obscurer/imagegen/compiled_expr.h"
#include "obscurer/imagegen/expr.h"
#include "obscurer/imagegen/genome.h"
#include "obscurer/imagegen/render.h"

namespace obscurer::imagegen {
namespace {

using E = Expr;

ExprPtr c(double v) { return E::constant(v); }
ExprPtr in(Var v) { return E::input(v); }

// --- expressions -----------------------------------------------------------

TEST(EvalExpr, ConstantLeaf) { EXPECT_EQ(eval_expr(*c(3.5), Env{}), 3.5); }

TEST(EvalExpr, DivisionByZeroIsZero) {
  EXPECT_EQ(eval_expr(*E::binary(BinaryOp::kDiv, c(1), c(0)), Env{}), 0.0);
}

TEST(EvalExpr, SinOfTPlusP) {
  auto e = E::binary(BinaryOp::kAdd, E::unary(UnaryOp::kSin, in(Var::kT)), in(Var::kP));
  EXPECT_EQ(eval_expr(*e, Env{}.set(Var::kT, 0).set(Var::kP, 2)), 2.0);
}

TEST(EvalExpr, TotalizationRules) {
  EXPECT_EQ(eval_expr(*E::unary(UnaryOp::kLog, c(0)), Env{}), 0.0);
  EXPECT_EQ(eval_expr(*E::unary(UnaryOp::kLog, c(-3)), Env{}), 0.0);
  EXPECT_EQ(eval_expr(*E::binary(BinaryOp::kPow, c(0), c(-1)), Env{}), 0.0);
  EXPECT_EQ(eval_expr(*E::binary(BinaryOp::kMod, c(5), c(0)), Env{}), 0.0);
  EXPECT_EQ(eval_expr(*E::unary(UnaryOp::kExp, c(1000)), Env{}), 0.0);
  EXPECT_EQ(eval_expr(*E::unary(UnaryOp::kSqrt, c(-4)), Env{}), 0.0);
  EXPECT_EQ(eval_expr(*E::unary(UnaryOp::kNegate, c(2)), Env{}), -2.0);
}

TEST(EvalExpr, UnboundInputThrows) {
  try {
    eval_expr(*in(Var::kF3), Env{}.set(Var::kP, 1));
    FAIL() << "expected UnboundInput";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kUnboundInput);
  }
}

TEST(EvalExpr, TotalityFuzz) {
  Grammar g;
  g.max_depth = 8;
  Rng rng(20261018);
  for (int i = 0; i < 100000; ++i) {
    const auto tree = random_tree(rng, kUpdateInputs, 1 + static_cast<int>(rng.below(8)), g);
    Env env;
    for (Var v : kUpdateInputs) {
      // Mix ordinary magnitudes with extreme ones.
      const double mag = rng.chance(0.1) ? 1e300 : 10.0;
      env.set(v, rng.uniform(-mag, mag));
    }
    const double a = eval_expr(*tree, env);
    ASSERT_TRUE(std::isfinite(a)) << to_sexpr(*tree);
    ASSERT_EQ(std::bit_cast<std::uint64_t>(a),
              std::bit_cast<std::uint64_t>(CompiledExpr(*tree).eval(env)))
        << to_sexpr(*tree);
  }
}

TEST(Sexpr, PrintsPrefixForm) {
  auto e = E::binary(BinaryOp::kAdd, E::unary(UnaryOp::kSin, in(Var::kT)), in(Var::kP));
  EXPECT_EQ(to_sexpr(*e), "(add (sin t) p)");
  EXPECT_EQ(to_sexpr(*E::unary(UnaryOp::kNegate, in(Var::kF10))), "(neg f10)");
}

TEST(Sexpr, RoundTripsRandomTrees) {
  Rng rng(5);
  for (int i = 0; i < 2000; ++i) {
    const auto tree = random_tree(rng, kUpdateInputs, 6, Grammar{});
    const auto back = parse_sexpr(to_sexpr(*tree));
    ASSERT_TRUE(same_structure(*tree, *back)) << to_sexpr(*tree);
  }
}

TEST(Sexpr, RejectsGarbage) {
  for (const char* bad : {"", "(add p)", "(frob p p)", "(sin p", "q", "(add p p) x"}) {
    EXPECT_THROW(parse_sexpr(bad), Error) << bad;
  }
}

// --- genomes ---------------------------------------------------------------

TEST(Genome, SameSeedSameGenome) {
  EXPECT_TRUE(same_structure(random_genome(7), random_genome(7)));
}

TEST(Genome, NeighbouringSeedsDiffer) {
  for (std::uint64_t s = 0; s < 100; ++s) {
    EXPECT_FALSE(same_structure(random_genome(s), random_genome(s + 1))) << s;
  }
}

TEST(Genome, DepthOneGivesLeaves) {
  Grammar g;
  g.max_depth = 1;
  const auto genome = random_genome(3, g);
  for (const auto& t : genome.init) EXPECT_EQ(t->depth(), 1);
  for (const auto& t : genome.update) EXPECT_EQ(t->depth(), 1);
}

TEST(Genome, InputSetsHold) {
  for (std::uint64_t s = 0; s < 200; ++s) {
    const auto g = random_genome(s);
    EXPECT_TRUE(g.satisfies_input_sets());
    for (const auto& t : g.init) EXPECT_TRUE(uses_only(*t, kInitInputs));
    for (const auto& t : g.update) EXPECT_LE(t->depth(), Grammar{}.max_depth);
  }
}

TEST(Genome, MutationRateZeroIsIdentity) {
  const auto g = random_genome(11);
  EXPECT_TRUE(same_structure(mutate_genome(g, 99, 0.0), g));
}

TEST(Genome, MutationRateOneDepthOneGivesFreshLeaves) {
  Grammar g;
  g.max_depth = 1;
  const auto base = random_genome(11);
  const auto m = mutate_genome(base, 12, 1.0, g);
  for (const auto& t : m.init) EXPECT_EQ(t->depth(), 1);
  for (const auto& t : m.update) EXPECT_EQ(t->depth(), 1);
  EXPECT_TRUE(m.satisfies_input_sets());
}

TEST(Genome, MutationIsDeterministicAndValid) {
  const auto base = random_genome(21);
  const auto a = mutate_genome(base, 5, 0.1);
  EXPECT_TRUE(same_structure(a, mutate_genome(base, 5, 0.1)));
  EXPECT_TRUE(a.satisfies_input_sets());
  EXPECT_THROW(mutate_genome(base, 5, 1.5), Error);
}

TEST(Genome, TextRoundTrip) {
  const auto g = random_genome(42);
  const auto back = parse_genome(genome_to_text(g));
  EXPECT_TRUE(same_structure(g, back));
  EXPECT_EQ(back.rng_seed, g.rng_seed);
}

// --- transforms ------------------------------------------------------------

CanvasSpec canvas(int w, int h) {
  CanvasSpec c;
  c.width = w;
  c.height = h;
  return c;
}

LineTransform of(TransformKind k) {
  LineTransform t;
  t.kind = k;
  return t;
}

TEST(LineTransform, IdentityUnchanged) {
  const auto out = apply_line_transform(of(TransformKind::kIdentity), {10, 10, 20, 20}, canvas(64, 64));
  ASSERT_EQ(out.size(), 1u);
  const auto& s = std::get<Segment>(out[0]);
  EXPECT_EQ(s.x0, 10);
  EXPECT_EQ(s.y0, 10);
  EXPECT_EQ(s.x1, 20);
  EXPECT_EQ(s.y1, 20);
}

TEST(LineTransform, PolarHandValue) {
  const Point p = polar_map({100, 50}, canvas(100, 100));
  EXPECT_NEAR(p.x, 50.0, 1e-12);
  EXPECT_NEAR(p.y, 100.0 * 50.0 / std::sqrt(5000.0), 1e-12);
  EXPECT_NEAR(p.y, 70.71, 0.005);
}

TEST(LineTransform, OvalEllipse) {
  const auto out = apply_line_transform(of(TransformKind::kOval), {0, 0, 10, 0}, canvas(64, 64));
  ASSERT_EQ(out.size(), 1u);
  const auto& e = std::get<Ellipse>(out[0]);
  EXPECT_EQ(e.focus_a.x, 0);
  EXPECT_EQ(e.focus_a.y, 0);
  EXPECT_EQ(e.focus_b.x, 10);
  EXPECT_EQ(e.focus_b.y, 0);
  EXPECT_DOUBLE_EQ(e.major_axis, 15.0);
}

TEST(LineTransform, NonFiniteSegmentRejected) {
  try {
    apply_line_transform(of(TransformKind::kPolar), {0, NAN, 1, 1}, canvas(64, 64));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidSegment);
  }
}

TEST(LineTransform, ParameterValidation) {
  auto t = of(TransformKind::kNecklace);
  t.bead_count = 1;
  EXPECT_THROW(t.validate(), Error);
  t = of(TransformKind::kGrid);
  t.cell_size = 3;
  EXPECT_THROW(t.validate(), Error);
  t = of(TransformKind::kKaleidoscope);
  t.sector_count = 1;
  EXPECT_THROW(t.validate(), Error);
}

class TransformGeometry : public ::testing::Test {
 protected:
  static constexpr int kSamples = 10000;
  CanvasSpec cv = canvas(200, 120);
  Rng rng{777};
  Segment random_segment() {
    // Endpoints range beyond the canvas to exercise every fold.
    return {rng.uniform(-300, 500), rng.uniform(-300, 400), rng.uniform(-300, 500),
            rng.uniform(-300, 400)};
  }
};

TEST_F(TransformGeometry, PolarCentreMapsToTopEdge) {
  const Point p = polar_map({100, 60}, cv);
  EXPECT_EQ(p.y, 0.0);
  EXPECT_EQ(p.x, cv.width / 2.0);  // atan2(0, 0) taken as 0
  for (int i = 0; i < kSamples; ++i) {
    const Point q = polar_map({rng.uniform(0, 200), rng.uniform(0, 120)}, cv);
    ASSERT_GE(q.x, 0.0);
    ASSERT_LE(q.x, cv.width);
    ASSERT_GE(q.y, 0.0);
    ASSERT_LE(q.y, cv.height + 1e-9);
  }
}

TEST_F(TransformGeometry, KaleidoscopeStaysInOneWedge) {
  for (int sectors : {2, 3, 6, 11}) {
    auto t = of(TransformKind::kKaleidoscope);
    t.sector_count = sectors;
    const double wedge = 2.0 * std::numbers::pi / sectors;
    for (int i = 0; i < kSamples; ++i) {
      const Segment s = random_segment();
      const Segment out = std::get<Segment>(apply_line_transform(t, s, cv)[0]);
      for (auto [x, y, ox, oy] : {std::array{out.x0, out.y0, s.x0, s.y0},
                                  std::array{out.x1, out.y1, s.x1, s.y1}}) {
        const double dx = x - 100.0;
        const double dy = y - 60.0;
        const double angle = std::atan2(dy, dx);
        ASSERT_GE(angle, -1e-9);
        ASSERT_LE(angle, wedge + 1e-9);
        ASSERT_NEAR(std::hypot(dx, dy), std::hypot(ox - 100.0, oy - 60.0), 1e-9);
      }
    }
  }
}

TEST_F(TransformGeometry, GridStaysInOneCell) {
  auto t = of(TransformKind::kGrid);
  t.cell_size = 24;
  for (int i = 0; i < kSamples; ++i) {
    const Segment s = random_segment();
    const Segment out = std::get<Segment>(apply_line_transform(t, s, cv)[0]);
    const double ox = std::floor(s.x0 / 24.0) * 24.0;
    const double oy = std::floor(s.y0 / 24.0) * 24.0;
    for (double x : {out.x0, out.x1}) {
      ASSERT_GE(x, ox);
      ASSERT_LT(x, ox + 24.0);
    }
    for (double y : {out.y0, out.y1}) {
      ASSERT_GE(y, oy);
      ASSERT_LT(y, oy + 24.0);
    }
  }
}

TEST_F(TransformGeometry, DiamondStaysInsideL1Ball) {
  const double limit = 0.5 * std::hypot(100.0, 60.0);
  for (int i = 0; i < kSamples; ++i) {
    const Segment out = std::get<Segment>(apply_line_transform(of(TransformKind::kDiamond), random_segment(), cv)[0]);
    ASSERT_LE(std::abs(out.x0 - 100) + std::abs(out.y0 - 60), limit + 1e-9);
    ASSERT_LE(std::abs(out.x1 - 100) + std::abs(out.y1 - 60), limit + 1e-9);
  }
}

TEST_F(TransformGeometry, TronSnapsTo45DegreesKeepingLengthAndMidpoint) {
  for (int i = 0; i < kSamples; ++i) {
    const Segment s = random_segment();
    const Segment out = std::get<Segment>(apply_line_transform(of(TransformKind::kTron), s, cv)[0]);
    const double len = std::hypot(s.x1 - s.x0, s.y1 - s.y0);
    ASSERT_NEAR(std::hypot(out.x1 - out.x0, out.y1 - out.y0), len, 1e-9 * (1 + len));
    ASSERT_NEAR(out.x0 + out.x1, s.x0 + s.x1, 1e-9 * (1 + len));
    ASSERT_NEAR(out.y0 + out.y1, s.y0 + s.y1, 1e-9 * (1 + len));
    const double steps = std::atan2(out.y1 - out.y0, out.x1 - out.x0) / (std::numbers::pi / 4);
    ASSERT_NEAR(steps, std::round(steps), 1e-9);
  }
}

TEST_F(TransformGeometry, NecklacePullsTowardNearestBead) {
  auto t = of(TransformKind::kNecklace);
  t.bead_count = 5;
  t.bead_pull = 0.6;
  const double radius = 40.0;  // min(200, 120) / 3
  for (int i = 0; i < kSamples; ++i) {
    const Segment s = random_segment();
    const Segment out = std::get<Segment>(apply_line_transform(t, s, cv)[0]);
    // Inverting the pull recovers the bead, which must lie on the ring.
    const double bx = s.x0 + (out.x0 - s.x0) / 0.6;
    const double by = s.y0 + (out.y0 - s.y0) / 0.6;
    ASSERT_NEAR(std::hypot(bx - 100.0, by - 60.0), radius, 1e-6);
    double best = INFINITY;
    for (int k = 0; k < 5; ++k) {
      const double a = 2 * std::numbers::pi * k / 5;
      best = std::min(best, std::hypot(100 + radius * std::cos(a) - s.x0,
                                       60 + radius * std::sin(a) - s.y0));
    }
    ASSERT_NEAR(std::hypot(bx - s.x0, by - s.y0), best, 1e-6);
  }
}

// --- raster ops --------------------------------------------------------------

TEST(Fold, TriangularFold) {
  EXPECT_EQ(fold_unit(0.0), 0.0);
  EXPECT_EQ(fold_unit(0.25), 0.25);
  EXPECT_EQ(fold_unit(1.0), 1.0);
  EXPECT_EQ(fold_unit(1.5), 0.5);
  EXPECT_EQ(fold_unit(-0.25), 0.25);
  EXPECT_EQ(fold_unit(2.75), 0.75);
  EXPECT_EQ(fold_channel(1.0), 255);
  EXPECT_EQ(fold_channel(0.5), 128);
  EXPECT_EQ(fold_coordinate(0.5, 101), 50.0);
}

TEST(BoxBlur, RadiusZeroIsIdentity) {
  RasterImage img(5, 4);
  img.set(2, 1, {9, 200, 31});
  EXPECT_EQ(box_blur(img, 0), img);
}

TEST(BoxBlur, UniformImageUnchanged) {
  const RasterImage img(17, 9, {12, 34, 56});
  for (int r : {1, 2, 5, 20}) EXPECT_EQ(box_blur(img, r), img);
}

TEST(BoxBlur, ThreePixelHandExample) {
  RasterImage img(3, 1);
  img.set(1, 0, {255, 255, 255});
  const auto out = box_blur(img, 1);
  for (int x = 0; x < 3; ++x) EXPECT_EQ(out.at(x, 0), (Rgb{85, 85, 85})) << x;
}

TEST(BoxBlur, PreservesSumOnInteriorImages) {
  Rng rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    const int w = 24 + static_cast<int>(rng.below(20));
    const int h = 24 + static_cast<int>(rng.below(20));
    const int r = 1 + static_cast<int>(rng.below(3));
    RasterImage img(w, h);
    // Content stays r+1 pixels away from every edge.
    for (int y = r + 1; y < h - r - 1; ++y) {
      for (int x = r + 1; x < w - r - 1; ++x) {
        img.set(x, y, {static_cast<std::uint8_t>(rng.below(256)),
                       static_cast<std::uint8_t>(rng.below(256)),
                       static_cast<std::uint8_t>(rng.below(256))});
      }
    }
    const auto out = box_blur(img, r);
    for (int ch = 0; ch < 3; ++ch) {
      long long a = 0;
      long long b = 0;
      for (std::size_t i = ch; i < img.bytes().size(); i += 3) {
        a += img.bytes()[i];
        b += out.bytes()[i];
      }
      EXPECT_LE(std::llabs(a - b), static_cast<long long>(w) * h);
    }
  }
}

TEST(Coverage, EmptyAndFull) {
  const Rgb bg{10, 20, 30};
  EXPECT_EQ(coverage_score(RasterImage(20, 20, bg), bg), 0.0);
  EXPECT_EQ(coverage_score(RasterImage(20, 20, {10, 20, 39}), bg), 1.0);
  EXPECT_EQ(coverage_score(RasterImage(20, 20, {10, 20, 38}), bg), 0.0);
}

TEST(Coverage, QuarterWhite) {
  RasterImage img(10, 10);
  for (int i = 0; i < 25; ++i) img.set(i % 10, i / 10, {255, 255, 255});
  EXPECT_DOUBLE_EQ(coverage_score(img, {0, 0, 0}), 0.25);
}

TEST(Coverage, MonotoneUnderPainting) {
  Rng rng(3);
  const Rgb bg{100, 100, 100};
  RasterImage img(32, 32, bg);
  double prev = coverage_score(img, bg);
  for (int i = 0; i < 2000; ++i) {
    img.set(static_cast<int>(rng.below(32)), static_cast<int>(rng.below(32)),
            {static_cast<std::uint8_t>(rng.below(2) ? 0 : 255), 100, 100});
    const double now = coverage_score(img, bg);
    ASSERT_GE(now, prev);
    prev = now;
  }
}

// --- renderers ---------------------------------------------------------------

ParticleGenome constant_genome(double v) {
  ParticleGenome g;
  for (auto& t : g.init) t = c(v);
  for (auto& t : g.update) t = c(v);
  g.rng_seed = 1;
  return g;
}

TEST(RenderParticle, Deterministic) {
  CanvasSpec cv = canvas(48, 40);
  cv.particle_count = 50;
  cv.timesteps = 10;
  for (auto kind : {TransformKind::kIdentity, TransformKind::kOval, TransformKind::kPolar,
                    TransformKind::kNecklace}) {
    const auto g = random_genome(5);
    EXPECT_EQ(render_particle_image(g, cv, of(kind)), render_particle_image(g, cv, of(kind)));
  }
}

TEST(RenderParticle, ConstantZeroGenomeMakesOnePointCluster) {
  CanvasSpec cv = canvas(32, 32);
  cv.particle_count = 20;
  cv.timesteps = 3;
  cv.background = Rgb{40, 80, 120};
  const auto img = render_particle_image(constant_genome(0.0), cv, of(TransformKind::kIdentity));
  // Every particle sits at fold(0) = (0, 0) in color fold(0) = black.
  int changed = 0;
  for (int y = 0; y < 32; ++y) {
    for (int x = 0; x < 32; ++x) {
      if (!(img.at(x, y) == *cv.background)) {
        ++changed;
        EXPECT_LE(x, 3 * cv.blur_radius) << x << "," << y;
        EXPECT_LE(y, 3 * cv.blur_radius) << x << "," << y;
      }
    }
  }
  EXPECT_GT(changed, 0);
}

TEST(RenderParticle, SingleParticleHandComputedLine) {
  // i1 = 0.25, i2 = 0.5: start at (0.25 * 63, 0.5 * 63) = (15.75, 31.5).
  // u1 = f1 + 0.5, u2 = f2 + 1: end at (fold(0.75) * 63, fold(1.5) * 63)
  // = (47.25, 31.5). Color (fold(0.2), fold(0.6), fold(1)) * 255.
  ParticleGenome g = constant_genome(0.0);
  g.init[0] = c(0.25);
  g.init[1] = c(0.5);
  g.update[0] = E::binary(BinaryOp::kAdd, in(Var::kF1), c(0.5));
  g.update[1] = E::binary(BinaryOp::kAdd, in(Var::kF2), c(1.0));
  g.update[2] = c(0.2);
  g.update[3] = c(0.6);
  g.update[4] = c(1.0);
  CanvasSpec cv = canvas(64, 64);
  cv.particle_count = 1;
  cv.timesteps = 1;
  cv.blur_radius = 0;
  cv.background = Rgb{0, 0, 0};
  const auto img = render_particle_image(g, cv, of(TransformKind::kIdentity));
  const Rgb ink{51, 153, 255};
  // lround(15.75) = 16, lround(31.5) = 32, lround(47.25) = 47.
  for (int x = 0; x < 64; ++x) {
    for (int y = 0; y < 64; ++y) {
      const bool on = y == 32 && x >= 16 && x <= 47;
      ASSERT_EQ(img.at(x, y) == ink, on) << x << "," << y;
    }
  }
}

TEST(RenderParticle, LaterUpdatesSeeEarlierOnes) {
  // u2 reads f6, which u1 has just written this step.
  ParticleGenome g = constant_genome(0.0);
  g.update[0] = c(0.5);
  g.update[1] = in(Var::kF6);
  g.update[4] = c(1.0);
  CanvasSpec cv = canvas(33, 33);
  cv.particle_count = 1;
  cv.timesteps = 1;
  cv.blur_radius = 0;
  cv.background = Rgb{0, 0, 0};
  const auto img = render_particle_image(g, cv, of(TransformKind::kIdentity));
  EXPECT_EQ(img.at(16, 16), (Rgb{0, 0, 255}));
}

TEST(RenderCoordinate, ConstantZeroIsBlack) {
  const auto img = render_coordinate_image(*c(0), *c(0), *c(0), canvas(20, 16));
  EXPECT_EQ(img, RasterImage(20, 16));
}

TEST(RenderCoordinate, Ramps) {
  const auto img = render_coordinate_image(*in(Var::kX), *in(Var::kY), *c(0), canvas(32, 24));
  EXPECT_EQ(img.at(0, 0), (Rgb{0, 0, 0}));
  EXPECT_EQ(img.at(31, 23), (Rgb{255, 255, 0}));
  for (int x = 1; x < 32; ++x) EXPECT_GE(img.at(x, 5).r, img.at(x - 1, 5).r);
  for (int y = 1; y < 24; ++y) EXPECT_GE(img.at(7, y).g, img.at(7, y - 1).g);
  EXPECT_EQ(img, render_coordinate_image(*in(Var::kX), *in(Var::kY), *c(0), canvas(32, 24)));
}

TEST(RenderCoordinate, UnboundInputPropagates) {
  EXPECT_THROW(render_coordinate_image(*in(Var::kP), *c(0), *c(0), canvas(16, 16)), Error);
}

TEST(Canvas, Validation) {
  EXPECT_THROW(canvas(15, 100).validate(), Error);
  auto cv = canvas(16, 16);
  cv.particle_count = 0;
  EXPECT_THROW(cv.validate(), Error);
}

}  // namespace
}  // namespace obscurer::imagegen
