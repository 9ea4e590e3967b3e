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

#include <vector>

#include "obscurer/imagegen/expr.h"

namespace obscurer::imagegen {

// Flattened postfix form of an expression, evaluated on a small value
// stack. Semantics match eval_expr exactly; renderers use it in their
// inner loops.
class CompiledExpr {
 public:
  CompiledExpr() = default;
  explicit CompiledExpr(const Expr& e);

  double eval(const Env& env) const;

 private:
  struct Instr {
    Expr::Kind kind;
    std::uint8_t op;
    double value;
  };
  void emit(const Expr& e);

  std::vector<Instr> code_;
  std::size_t stack_depth_ = 0;
  mutable std::vector<double> stack_;
};

}  // namespace obscurer::imagegen
