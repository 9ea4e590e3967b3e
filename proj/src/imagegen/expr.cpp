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

#include "obscurer/imagegen/expr.h"

#include <algorithm>
#include <bit>
#include <cctype>
#include <charconv>
#include <cmath>

#include "obscurer/common/error.h"
#include "obscurer/imagegen/ops.h"

namespace obscurer::imagegen {
namespace {

constexpr std::string_view kVarNames[kVarCount] = {
    "p", "t", "x", "y", "f1", "f2", "f3", "f4", "f5", "f6", "f7", "f8", "f9", "f10"};
constexpr std::string_view kUnaryNames[kUnaryOpCount] = {"sin", "cos",  "tan",  "exp",
                                                         "log", "abs",  "sqrt", "neg"};
constexpr std::string_view kBinaryNames[kBinaryOpCount] = {"add", "sub", "mul", "div",
                                                           "mod", "pow", "min", "max"};

void append_number(std::string& out, double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, ptr);
}

void write_sexpr(const Expr& e, std::string& out) {
  switch (e.kind()) {
    case Expr::Kind::kConstant:
      append_number(out, e.value());
      return;
    case Expr::Kind::kInput:
      out += var_name(e.var());
      return;
    case Expr::Kind::kUnary:
      out += '(';
      out += op_name(e.unary_op());
      out += ' ';
      write_sexpr(*e.left(), out);
      out += ')';
      return;
    case Expr::Kind::kBinary:
      out += '(';
      out += op_name(e.binary_op());
      out += ' ';
      write_sexpr(*e.left(), out);
      out += ' ';
      write_sexpr(*e.right(), out);
      out += ')';
      return;
  }
}

class SexprParser {
 public:
  explicit SexprParser(std::string_view text) : text_(text) {}

  ExprPtr parse_all() {
    ExprPtr e = parse();
    skip_space();
    if (pos_ != text_.size()) fail("trailing input");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& why) const {
    throw Error(ErrorCode::kParseError, why + " at offset " + std::to_string(pos_));
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  std::string_view atom() {
    skip_space();
    const std::size_t start = pos_;
    while (pos_ < text_.size() && text_[pos_] != '(' && text_[pos_] != ')' &&
           !std::isspace(static_cast<unsigned char>(text_[pos_]))) {
      ++pos_;
    }
    if (start == pos_) fail("expected atom");
    return text_.substr(start, pos_ - start);
  }

  ExprPtr parse() {
    if (++depth_ > kMaxExprDepth) fail("expression deeper than " + std::to_string(kMaxExprDepth));
    skip_space();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    ExprPtr result;
    if (text_[pos_] == '(') {
      ++pos_;
      const std::string_view head = atom();
      const auto unary = std::find(std::begin(kUnaryNames), std::end(kUnaryNames), head);
      const auto binary = std::find(std::begin(kBinaryNames), std::end(kBinaryNames), head);
      if (unary != std::end(kUnaryNames)) {
        auto child = parse();
        result = Expr::unary(static_cast<UnaryOp>(unary - std::begin(kUnaryNames)), child);
      } else if (binary != std::end(kBinaryNames)) {
        auto l = parse();
        auto r = parse();
        result = Expr::binary(static_cast<BinaryOp>(binary - std::begin(kBinaryNames)), l, r);
      } else {
        fail("unknown operator '" + std::string(head) + "'");
      }
      skip_space();
      if (pos_ >= text_.size() || text_[pos_] != ')') fail("expected ')'");
      ++pos_;
    } else {
      const std::string_view tok = atom();
      if (auto v = parse_var(tok)) {
        result = Expr::input(*v);
      } else {
        double value = 0.0;
        const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
        if (ec != std::errc() || ptr != tok.data() + tok.size()) {
          fail("bad token '" + std::string(tok) + "'");
        }
        result = Expr::constant(value);
      }
    }
    --depth_;
    return result;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  int depth_ = 0;
};

}  // namespace

std::string_view var_name(Var v) { return kVarNames[static_cast<std::size_t>(v)]; }

std::optional<Var> parse_var(std::string_view name) {
  for (std::size_t i = 0; i < kVarCount; ++i) {
    if (kVarNames[i] == name) return static_cast<Var>(i);
  }
  return std::nullopt;
}

std::string_view op_name(UnaryOp op) { return kUnaryNames[static_cast<std::size_t>(op)]; }
std::string_view op_name(BinaryOp op) { return kBinaryNames[static_cast<std::size_t>(op)]; }

ExprPtr Expr::constant(double value) {
  auto e = std::shared_ptr<Expr>(new Expr());
  e->kind_ = Kind::kConstant;
  e->value_ = value;
  return e;
}

ExprPtr Expr::input(Var v) {
  auto e = std::shared_ptr<Expr>(new Expr());
  e->kind_ = Kind::kInput;
  e->var_ = v;
  return e;
}

ExprPtr Expr::unary(UnaryOp op, ExprPtr child) {
  if (!child) throw Error(ErrorCode::kInvalidArgument, "null child");
  auto e = std::shared_ptr<Expr>(new Expr());
  e->kind_ = Kind::kUnary;
  e->unary_ = op;
  e->depth_ = child->depth() + 1;
  e->left_ = std::move(child);
  return e;
}

ExprPtr Expr::binary(BinaryOp op, ExprPtr left, ExprPtr right) {
  if (!left || !right) throw Error(ErrorCode::kInvalidArgument, "null child");
  auto e = std::shared_ptr<Expr>(new Expr());
  e->kind_ = Kind::kBinary;
  e->binary_ = op;
  e->depth_ = std::max(left->depth(), right->depth()) + 1;
  e->left_ = std::move(left);
  e->right_ = std::move(right);
  return e;
}

std::size_t Expr::size() const {
  std::size_t n = 1;
  if (left_) n += left_->size();
  if (right_) n += right_->size();
  return n;
}

bool same_structure(const Expr& a, const Expr& b) {
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case Expr::Kind::kConstant:
      return std::bit_cast<std::uint64_t>(a.value()) == std::bit_cast<std::uint64_t>(b.value());
    case Expr::Kind::kInput:
      return a.var() == b.var();
    case Expr::Kind::kUnary:
      return a.unary_op() == b.unary_op() && same_structure(*a.left(), *b.left());
    case Expr::Kind::kBinary:
      return a.binary_op() == b.binary_op() && same_structure(*a.left(), *b.left()) &&
             same_structure(*a.right(), *b.right());
  }
  return false;
}

double eval_expr(const Expr& e, const Env& env) {
  switch (e.kind()) {
    case Expr::Kind::kConstant:
      return detail::finite_or_zero(e.value());
    case Expr::Kind::kInput:
      if (!env.bound(e.var())) {
        throw Error(ErrorCode::kUnboundInput, std::string(var_name(e.var())));
      }
      return detail::finite_or_zero(env.get(e.var()));
    case Expr::Kind::kUnary:
      return detail::apply(e.unary_op(), eval_expr(*e.left(), env));
    case Expr::Kind::kBinary: {
      const double l = eval_expr(*e.left(), env);
      const double r = eval_expr(*e.right(), env);
      return detail::apply(e.binary_op(), l, r);
    }
  }
  return 0.0;
}

std::string to_sexpr(const Expr& e) {
  std::string out;
  write_sexpr(e, out);
  return out;
}

ExprPtr parse_sexpr(std::string_view text) { return SexprParser(text).parse_all(); }

bool uses_only(const Expr& e, std::span<const Var> allowed) {
  switch (e.kind()) {
    case Expr::Kind::kConstant:
      return true;
    case Expr::Kind::kInput:
      return std::find(allowed.begin(), allowed.end(), e.var()) != allowed.end();
    case Expr::Kind::kUnary:
      return uses_only(*e.left(), allowed);
    case Expr::Kind::kBinary:
      return uses_only(*e.left(), allowed) && uses_only(*e.right(), allowed);
  }
  return false;
}

}  // namespace obscurer::imagegen
