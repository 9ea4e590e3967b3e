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

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

#include "obscurer/common/rng.h"
#include "obscurer/imagegen/expr.h"

namespace obscurer::imagegen {

// Shape of randomly generated trees.
struct Grammar {
  int max_depth = 5;
  double leaf_weight = 1.0;
  double unary_weight = 1.0;
  double binary_weight = 1.6;
  double constant_probability = 0.3;  // share of leaves that are constants
  double constant_min = -2.0;
  double constant_max = 2.0;
  std::array<double, kUnaryOpCount> unary_op_weights{1, 1, 0.5, 0.5, 0.5, 1, 0.5, 1};
  std::array<double, kBinaryOpCount> binary_op_weights{1.5, 1.5, 1.5, 1, 1, 0.5, 0.5, 0.5};

  void validate() const;
};

inline constexpr std::array<Var, 1> kInitInputs = {Var::kP};
inline constexpr std::array<Var, 12> kUpdateInputs = {
    Var::kP,  Var::kT,  Var::kF1, Var::kF2, Var::kF3, Var::kF4,
    Var::kF5, Var::kF6, Var::kF7, Var::kF8, Var::kF9, Var::kF10};
inline constexpr std::array<Var, 2> kCoordinateInputs = {Var::kX, Var::kY};

// i1..i5 compute a particle's initial x, y, r, g, b from p; u1..u5 compute
// the same quantities at each timestep. Prior values are exposed as f1..f5
// (the initial i1..i5 outputs) and f6..f10 (the latest u1..u5 outputs).
struct ParticleGenome {
  std::array<ExprPtr, 5> init;
  std::array<ExprPtr, 5> update;
  std::uint64_t rng_seed = 0;

  bool satisfies_input_sets() const;
};

bool same_structure(const ParticleGenome& a, const ParticleGenome& b);

ExprPtr random_tree(Rng& rng, std::span<const Var> inputs, int max_depth,
                    const Grammar& grammar);

ParticleGenome random_genome(std::uint64_t seed, const Grammar& grammar = {});

// Each node is replaced, with probability `rate`, by a fresh random subtree
// that keeps the whole tree within grammar.max_depth.
ParticleGenome mutate_genome(const ParticleGenome& genome, std::uint64_t seed, double rate,
                             const Grammar& grammar = {});

// "seed <n>" then one "<name> <s-expression>" line per function.
std::string genome_to_text(const ParticleGenome& genome);
ParticleGenome parse_genome(std::string_view text);

}  // namespace obscurer::imagegen
