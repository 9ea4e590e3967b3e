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

#include <cmath>

#include "obscurer/imagegen/expr.h"

// Totalized primitive operations shared by the tree evaluator and the
// compiled program, so both produce the same bits.
namespace obscurer::imagegen::detail {

inline double finite_or_zero(double v) { return std::isfinite(v) ? v : 0.0; }

inline double apply(UnaryOp op, double a) {
  double r = 0.0;
  switch (op) {
    case UnaryOp::kSin: r = std::sin(a); break;
    case UnaryOp::kCos: r = std::cos(a); break;
    case UnaryOp::kTan: r = std::tan(a); break;
    case UnaryOp::kExp: r = std::exp(a); break;
    case UnaryOp::kLog: r = a > 0.0 ? std::log(a) : 0.0; break;
    case UnaryOp::kAbs: r = std::fabs(a); break;
    case UnaryOp::kSqrt: r = a >= 0.0 ? std::sqrt(a) : 0.0; break;
    case UnaryOp::kNegate: r = -a; break;
  }
  return finite_or_zero(r);
}

inline double apply(BinaryOp op, double a, double b) {
  double r = 0.0;
  switch (op) {
    case BinaryOp::kAdd: r = a + b; break;
    case BinaryOp::kSub: r = a - b; break;
    case BinaryOp::kMul: r = a * b; break;
    case BinaryOp::kDiv: r = b != 0.0 ? a / b : 0.0; break;
    case BinaryOp::kMod: r = b != 0.0 ? std::fmod(a, b) : 0.0; break;
    case BinaryOp::kPow: r = (a == 0.0 && b < 0.0) ? 0.0 : std::pow(a, b); break;
    case BinaryOp::kMin: r = std::fmin(a, b); break;
    case BinaryOp::kMax: r = std::fmax(a, b); break;
  }
  return finite_or_zero(r);
}

}  // namespace obscurer::imagegen::detail
