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

#include "obscurer/imagegen/compiled_expr.h"

#include <algorithm>

#include "obscurer/common/error.h"
#include "obscurer/imagegen/ops.h"

namespace obscurer::imagegen {

CompiledExpr::CompiledExpr(const Expr& e) {
  emit(e);
  std::size_t depth = 0;
  for (const auto& ins : code_) {
    switch (ins.kind) {
      case Expr::Kind::kConstant:
      case Expr::Kind::kInput:
        stack_depth_ = std::max(stack_depth_, ++depth);
        break;
      case Expr::Kind::kUnary:
        break;
      case Expr::Kind::kBinary:
        --depth;
        break;
    }
  }
  stack_.resize(stack_depth_);
}

void CompiledExpr::emit(const Expr& e) {
  switch (e.kind()) {
    case Expr::Kind::kConstant:
      code_.push_back({e.kind(), 0, detail::finite_or_zero(e.value())});
      return;
    case Expr::Kind::kInput:
      code_.push_back({e.kind(), static_cast<std::uint8_t>(e.var()), 0.0});
      return;
    case Expr::Kind::kUnary:
      emit(*e.left());
      code_.push_back({e.kind(), static_cast<std::uint8_t>(e.unary_op()), 0.0});
      return;
    case Expr::Kind::kBinary:
      emit(*e.left());
      emit(*e.right());
      code_.push_back({e.kind(), static_cast<std::uint8_t>(e.binary_op()), 0.0});
      return;
  }
}

double CompiledExpr::eval(const Env& env) const {
  if (code_.empty()) return 0.0;
  double* sp = stack_.data();
  for (const auto& ins : code_) {
    switch (ins.kind) {
      case Expr::Kind::kConstant:
        *sp++ = ins.value;
        break;
      case Expr::Kind::kInput: {
        const auto v = static_cast<Var>(ins.op);
        if (!env.bound(v)) throw Error(ErrorCode::kUnboundInput, std::string(var_name(v)));
        *sp++ = detail::finite_or_zero(env.get(v));
        break;
      }
      case Expr::Kind::kUnary:
        sp[-1] = detail::apply(static_cast<UnaryOp>(ins.op), sp[-1]);
        break;
      case Expr::Kind::kBinary:
        --sp;
        sp[-1] = detail::apply(static_cast<BinaryOp>(ins.op), sp[-1], sp[0]);
        break;
    }
  }
  return sp[-1];
}

}  // namespace obscurer::imagegen
