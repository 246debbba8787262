//
// Copyright 2026 The Sheetc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#include "sheetc/common/errors.h"
#include "sheetc/formula/parser.h"
#include "sheetc/formula/typed.h"

namespace sheetc::formula {

Value EvalContext::Special(const TypedExpr& call) const {
  throw InternalError("no value available for " + call.name);
}

namespace {

// Three-valued logic: nullopt is UNKNOWN.
std::optional<bool> AsTruth(const Value& v) {
  if (IsNull(v)) return std::nullopt;
  return std::get<bool>(v);
}


}  // namespace

Value EvalBinary(BinaryOp op, const Value& lhs, const Value& rhs) {
  if (op == BinaryOp::kAnd) {
    auto l = AsTruth(lhs), r = AsTruth(rhs);
    if ((l && !*l) || (r && !*r)) return false;
    if (!l || !r) return Value{};
    return true;
  }
  if (op == BinaryOp::kOr) {
    auto l = AsTruth(lhs), r = AsTruth(rhs);
    if ((l && *l) || (r && *r)) return true;
    if (!l || !r) return Value{};
    return false;
  }
  if (IsNull(lhs) || IsNull(rhs)) return Value{};
  switch (op) {
    case BinaryOp::kAdd:
      return std::get<double>(lhs) + std::get<double>(rhs);
    case BinaryOp::kSub:
      return std::get<double>(lhs) - std::get<double>(rhs);
    case BinaryOp::kMul:
      return std::get<double>(lhs) * std::get<double>(rhs);
    case BinaryOp::kDiv: {
      double d = std::get<double>(rhs);
      if (d == 0) return Value{};
      return std::get<double>(lhs) / d;
    }
    case BinaryOp::kConcat:
      return std::get<std::string>(lhs) + std::get<std::string>(rhs);
    default:
      break;
  }
  auto c = CompareValues(lhs, rhs);
  switch (op) {
    case BinaryOp::kEq:
      return c == 0;
    case BinaryOp::kNe:
      return c != 0;
    case BinaryOp::kLt:
      return c < 0;
    case BinaryOp::kLe:
      return c <= 0;
    case BinaryOp::kGt:
      return c > 0;
    case BinaryOp::kGe:
      return c >= 0;
    default:
      break;
  }
  throw InternalError("unhandled binary operator");
}

Value Evaluate(const TypedExpr& e, const EvalContext& ctx) {
  if (e.is_error()) return Value{};
  switch (e.kind) {
    case Expr::Kind::kLiteral:
      return e.literal;
    case Expr::Kind::kColumnRef:
    case Expr::Kind::kParameterRef:
    case Expr::Kind::kLinkRef:
      return ctx.Ref(e);
    case Expr::Kind::kUnary: {
      Value v = Evaluate(e.args[0], ctx);
      if (IsNull(v)) return v;
      if (e.unary_op == UnaryOp::kNot) return !std::get<bool>(v);
      return -std::get<double>(v);
    }
    case Expr::Kind::kBinary:
      return EvalBinary(e.binary_op, Evaluate(e.args[0], ctx),
                        Evaluate(e.args[1], ctx));
    case Expr::Kind::kIf: {
      auto cond = AsTruth(Evaluate(e.args[0], ctx));
      if (cond && *cond) return Evaluate(e.args[1], ctx);
      if (e.args.size() == 3) return Evaluate(e.args[2], ctx);
      return Value{};
    }
    case Expr::Kind::kCall: {
      if (e.function->cls != FunctionClass::kSingleRow) return ctx.Special(e);
      std::vector<Value> args;
      args.reserve(e.args.size());
      for (const TypedExpr& a : e.args) args.push_back(Evaluate(a, ctx));
      return EvalSingleRowFunction(*e.function, args);
    }
  }
  return Value{};
}

namespace {

class NoRefs : public EvalContext {
 public:
  Value Ref(const TypedExpr& ref) const override {
    throw InternalError("constant folding reached reference " + ref.name);
  }
};

bool Foldable(const TypedExpr& e) {
  switch (e.kind) {
    case Expr::Kind::kUnary:
    case Expr::Kind::kBinary:
    case Expr::Kind::kIf:
      return true;
    case Expr::Kind::kCall:
      return e.function && e.function->cls == FunctionClass::kSingleRow;
    default:
      return false;
  }
}

}  // namespace

TypedExpr FoldConstants(const TypedExpr& expr) {
  if (expr.is_error()) return expr;
  TypedExpr out = expr;
  for (TypedExpr& a : out.args) a = FoldConstants(a);
  if (!Foldable(out)) return out;
  for (const TypedExpr& a : out.args) {
    if (a.kind != Expr::Kind::kLiteral) return out;
  }
  TypedExpr lit = TypedExpr::Literal(Evaluate(out, NoRefs()), out.type);
  lit.offset = out.offset;
  lit.length = out.length;
  return lit;
}

namespace {

// Reuses the untyped printer by rebuilding an Expr view of the tree.
ExprPtr ToExpr(const TypedExpr& e) {
  auto out = std::make_shared<Expr>();
  out->kind = e.kind;
  out->literal = e.literal;
  out->name = e.name;
  out->binary_op = e.binary_op;
  out->unary_op = e.unary_op;
  for (const TypedExpr& a : e.args) out->args.push_back(ToExpr(a));
  return out;
}

}  // namespace

std::string PrintTyped(const TypedExpr& expr) {
  if (expr.is_error() && expr.kind == Expr::Kind::kLiteral) return "#ERROR";
  return PrintFormula(*ToExpr(expr));
}

}  // namespace sheetc::formula
