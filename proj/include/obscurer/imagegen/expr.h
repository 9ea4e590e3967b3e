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
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace obscurer::imagegen {

// Input symbols available to expression trees. Particle functions see
// p, t and f1..f10; coordinate functions see x and y.
enum class Var : std::uint8_t {
  kP, kT, kX, kY,
  kF1, kF2, kF3, kF4, kF5, kF6, kF7, kF8, kF9, kF10,
};
inline constexpr std::size_t kVarCount = 14;

std::string_view var_name(Var v);
std::optional<Var> parse_var(std::string_view name);
inline Var prior_value(int k) { return static_cast<Var>(static_cast<int>(Var::kF1) + k - 1); }

enum class UnaryOp : std::uint8_t { kSin, kCos, kTan, kExp, kLog, kAbs, kSqrt, kNegate };
enum class BinaryOp : std::uint8_t { kAdd, kSub, kMul, kDiv, kMod, kPow, kMin, kMax };
inline constexpr std::size_t kUnaryOpCount = 8;
inline constexpr std::size_t kBinaryOpCount = 8;

std::string_view op_name(UnaryOp op);
std::string_view op_name(BinaryOp op);

class Expr;
using ExprPtr = std::shared_ptr<const Expr>;

// Immutable expression node; subtrees are shared between trees freely.
class Expr {
 public:
  enum class Kind : std::uint8_t { kConstant, kInput, kUnary, kBinary };

  static ExprPtr constant(double value);
  static ExprPtr input(Var v);
  static ExprPtr unary(UnaryOp op, ExprPtr child);
  static ExprPtr binary(BinaryOp op, ExprPtr left, ExprPtr right);

  Kind kind() const noexcept { return kind_; }
  double value() const noexcept { return value_; }
  Var var() const noexcept { return var_; }
  UnaryOp unary_op() const noexcept { return unary_; }
  BinaryOp binary_op() const noexcept { return binary_; }
  const ExprPtr& left() const noexcept { return left_; }
  const ExprPtr& right() const noexcept { return right_; }

  // A leaf has depth 1.
  int depth() const noexcept { return depth_; }
  std::size_t size() const;

 private:
  Expr() = default;

  Kind kind_ = Kind::kConstant;
  double value_ = 0.0;
  Var var_ = Var::kP;
  UnaryOp unary_ = UnaryOp::kSin;
  BinaryOp binary_ = BinaryOp::kAdd;
  ExprPtr left_;
  ExprPtr right_;
  int depth_ = 1;
};

inline constexpr int kMaxExprDepth = 12;

// Structural equality (constants compared bitwise).
bool same_structure(const Expr& a, const Expr& b);

// Variable bindings for evaluation.
class Env {
 public:
  Env& set(Var v, double value) {
    values_[static_cast<std::size_t>(v)] = value;
    bound_ |= 1u << static_cast<unsigned>(v);
    return *this;
  }
  bool bound(Var v) const noexcept { return (bound_ >> static_cast<unsigned>(v)) & 1u; }
  double get(Var v) const noexcept { return values_[static_cast<std::size_t>(v)]; }

 private:
  std::array<double, kVarCount> values_{};
  std::uint32_t bound_ = 0;
};

// Total evaluation: division by zero, log of a non-positive value, zero to
// a negative power and any non-finite intermediate all evaluate to 0.0.
// Throws kUnboundInput for an input missing from env.
double eval_expr(const Expr& e, const Env& env);

// Prefix s-expression, e.g. "(add (sin t) p)". Constants use the shortest
// decimal form that round-trips.
std::string to_sexpr(const Expr& e);
// Throws kParseError.
ExprPtr parse_sexpr(std::string_view text);

// Set of Var an expression may reference.
bool uses_only(const Expr& e, std::span<const Var> allowed);

}  // namespace obscurer::imagegen
