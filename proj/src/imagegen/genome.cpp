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

#include "obscurer/imagegen/genome.h"

#include <numeric>
#include <sstream>

#include "obscurer/common/error.h"

namespace obscurer::imagegen {
namespace {

template <std::size_t N>
std::size_t pick_weighted(Rng& rng, const std::array<double, N>& weights) {
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  double r = rng.uniform() * total;
  for (std::size_t i = 0; i < N; ++i) {
    if (r < weights[i]) return i;
    r -= weights[i];
  }
  return N - 1;
}

ExprPtr random_leaf(Rng& rng, std::span<const Var> inputs, const Grammar& g) {
  if (inputs.empty() || rng.chance(g.constant_probability)) {
    return Expr::constant(rng.uniform(g.constant_min, g.constant_max));
  }
  return Expr::input(inputs[rng.below(inputs.size())]);
}

ExprPtr mutate_tree(const ExprPtr& node, Rng& rng, std::span<const Var> inputs, int level,
                    double rate, const Grammar& g) {
  if (rng.chance(rate)) {
    return random_tree(rng, inputs, std::max(1, g.max_depth - level + 1), g);
  }
  switch (node->kind()) {
    case Expr::Kind::kConstant:
    case Expr::Kind::kInput:
      return node;
    case Expr::Kind::kUnary:
      return Expr::unary(node->unary_op(),
                         mutate_tree(node->left(), rng, inputs, level + 1, rate, g));
    case Expr::Kind::kBinary: {
      auto l = mutate_tree(node->left(), rng, inputs, level + 1, rate, g);
      auto r = mutate_tree(node->right(), rng, inputs, level + 1, rate, g);
      return Expr::binary(node->binary_op(), std::move(l), std::move(r));
    }
  }
  return node;
}

constexpr const char* kFunctionNames[10] = {"i1", "i2", "i3", "i4", "i5",
                                            "u1", "u2", "u3", "u4", "u5"};

}  // namespace

void Grammar::validate() const {
  if (max_depth < 1 || max_depth > kMaxExprDepth) {
    throw Error(ErrorCode::kInvalidArgument,
                "grammar max_depth must be in [1, " + std::to_string(kMaxExprDepth) + "]");
  }
  if (leaf_weight < 0 || unary_weight < 0 || binary_weight < 0 ||
      leaf_weight + unary_weight + binary_weight <= 0) {
    throw Error(ErrorCode::kInvalidArgument, "grammar node weights must be non-negative");
  }
  if (!(constant_min <= constant_max)) {
    throw Error(ErrorCode::kInvalidArgument, "grammar constant range is empty");
  }
}

bool ParticleGenome::satisfies_input_sets() const {
  for (const auto& e : init) {
    if (!e || !uses_only(*e, kInitInputs) || e->depth() > kMaxExprDepth) return false;
  }
  for (const auto& e : update) {
    if (!e || !uses_only(*e, kUpdateInputs) || e->depth() > kMaxExprDepth) return false;
  }
  return true;
}

bool same_structure(const ParticleGenome& a, const ParticleGenome& b) {
  if (a.rng_seed != b.rng_seed) return false;
  for (std::size_t i = 0; i < 5; ++i) {
    if (!same_structure(*a.init[i], *b.init[i])) return false;
    if (!same_structure(*a.update[i], *b.update[i])) return false;
  }
  return true;
}

ExprPtr random_tree(Rng& rng, std::span<const Var> inputs, int max_depth, const Grammar& g) {
  if (max_depth <= 1) return random_leaf(rng, inputs, g);
  const std::array<double, 3> kinds{g.leaf_weight, g.unary_weight, g.binary_weight};
  switch (pick_weighted(rng, kinds)) {
    case 0:
      return random_leaf(rng, inputs, g);
    case 1: {
      const auto op = static_cast<UnaryOp>(pick_weighted(rng, g.unary_op_weights));
      return Expr::unary(op, random_tree(rng, inputs, max_depth - 1, g));
    }
    default: {
      const auto op = static_cast<BinaryOp>(pick_weighted(rng, g.binary_op_weights));
      auto l = random_tree(rng, inputs, max_depth - 1, g);
      auto r = random_tree(rng, inputs, max_depth - 1, g);
      return Expr::binary(op, std::move(l), std::move(r));
    }
  }
}

ParticleGenome random_genome(std::uint64_t seed, const Grammar& grammar) {
  grammar.validate();
  Rng rng(seed);
  ParticleGenome genome;
  genome.rng_seed = seed;
  for (auto& e : genome.init) e = random_tree(rng, kInitInputs, grammar.max_depth, grammar);
  for (auto& e : genome.update) e = random_tree(rng, kUpdateInputs, grammar.max_depth, grammar);
  return genome;
}

ParticleGenome mutate_genome(const ParticleGenome& genome, std::uint64_t seed, double rate,
                             const Grammar& grammar) {
  grammar.validate();
  if (!(rate >= 0.0 && rate <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "mutation rate must be in [0, 1]");
  }
  Rng rng(seed);
  ParticleGenome out;
  out.rng_seed = genome.rng_seed;
  for (std::size_t i = 0; i < 5; ++i) {
    out.init[i] = mutate_tree(genome.init[i], rng, kInitInputs, 1, rate, grammar);
  }
  for (std::size_t i = 0; i < 5; ++i) {
    out.update[i] = mutate_tree(genome.update[i], rng, kUpdateInputs, 1, rate, grammar);
  }
  return out;
}

std::string genome_to_text(const ParticleGenome& genome) {
  std::string out = "seed " + std::to_string(genome.rng_seed) + "\n";
  for (std::size_t i = 0; i < 10; ++i) {
    const auto& e = i < 5 ? genome.init[i] : genome.update[i - 5];
    out += kFunctionNames[i];
    out += ' ';
    out += to_sexpr(*e);
    out += '\n';
  }
  return out;
}

ParticleGenome parse_genome(std::string_view text) {
  ParticleGenome genome;
  bool have_seed = false;
  std::array<bool, 10> seen{};
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto space = line.find(' ');
    if (space == std::string::npos) throw Error(ErrorCode::kParseError, "bad line: " + line);
    const std::string key = line.substr(0, space);
    const std::string rest = line.substr(space + 1);
    if (key == "seed") {
      genome.rng_seed = std::stoull(rest);
      have_seed = true;
      continue;
    }
    const auto it = std::find(std::begin(kFunctionNames), std::end(kFunctionNames), key);
    if (it == std::end(kFunctionNames)) throw Error(ErrorCode::kParseError, "unknown key " + key);
    const auto idx = static_cast<std::size_t>(it - std::begin(kFunctionNames));
    (idx < 5 ? genome.init[idx] : genome.update[idx - 5]) = parse_sexpr(rest);
    seen[idx] = true;
  }
  if (!have_seed || std::find(seen.begin(), seen.end(), false) != seen.end()) {
    throw Error(ErrorCode::kParseError, "genome text is missing entries");
  }
  if (!genome.satisfies_input_sets()) {
    throw Error(ErrorCode::kParseError, "genome references inputs outside its input sets");
  }
  return genome;
}

}  // namespace obscurer::imagegen
