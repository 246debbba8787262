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

#ifndef SHEETC_FORMULA_TYPED_H_
#define SHEETC_FORMULA_TYPED_H_

#include <functional>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "sheetc/common/value.h"
#include "sheetc/formula/ast.h"
#include "sheetc/formula/functions.h"

namespace sheetc::formula {

// What a bracketed name resolved to.
enum class RefKind {
  kColumn,  // worksheet column, `level` is its resident level
  kInput,   // input attribute (always base level); links resolve here too
};

// Typed, resolved formula tree. Parameters are bound to literals.
struct TypedExpr {
  Expr::Kind kind = Expr::Kind::kLiteral;
  ScalarType type = ScalarType::kError;
  Value literal;
  // Column name, input attribute id, or canonical function name.
  std::string name;
  RefKind ref_kind = RefKind::kColumn;
  int level = 0;
  BinaryOp binary_op = BinaryOp::kAdd;
  UnaryOp unary_op = UnaryOp::kNeg;
  const FunctionSig* function = nullptr;
  std::vector<TypedExpr> args;
  size_t offset = 0;
  size_t length = 0;

  bool is_error() const { return type == ScalarType::kError; }
  bool is_ref() const { return kind == Expr::Kind::kColumnRef; }
  bool is_call(FunctionClass cls) const {
    return kind == Expr::Kind::kCall && function && function->cls == cls;
  }

  static TypedExpr Literal(Value v, ScalarType type);
  static TypedExpr ErrorLiteral();
  static TypedExpr ColumnRef(std::string name, ScalarType type, int level);
  static TypedExpr InputRef(std::string id, ScalarType type);
};

bool SameTypedExpr(const TypedExpr& a, const TypedExpr& b);

struct RefInfo {
  RefKind kind = RefKind::kColumn;
  ScalarType type = ScalarType::kError;
  int level = 0;
  // Column name or input attribute id.
  std::string id;
  // Set for parameters: the reference becomes this literal.
  std::optional<Value> bound;
};

// Resolves a kColumnRef / kLinkRef node; nullopt means unknown name.
using Resolver = std::function<std::optional<RefInfo>(const Expr& ref)>;

struct Diagnostic {
  size_t offset = 0;
  size_t length = 0;
  std::string message;
  std::string severity = "error";
  std::string column;  // owning column or filter, when known
};

struct TypecheckResult {
  TypedExpr expr;
  std::vector<Diagnostic> diagnostics;
};

// Types every node. Unknown names, unknown functions, arity and type
// mismatches become Error-typed subtrees plus a diagnostic; any node with an
// Error operand is Error without a further diagnostic.
TypecheckResult Typecheck(const Expr& expr, const Resolver& resolver);

struct Usage {
  bool contains_aggregate = false;
  bool contains_window = false;
  // (column name, resident level) of every column reference.
  std::set<std::pair<std::string, int>> columns;
  std::set<std::string> inputs;
};

Usage Summarize(const TypedExpr& expr);

// Evaluates literal-only single-row subtrees. Error subtrees are preserved.
TypedExpr FoldConstants(const TypedExpr& expr);

// Run-time access for the scalar evaluator.
class EvalContext {
 public:
  virtual ~EvalContext() = default;
  // Value of a kColumnRef node (column or input attribute).
  virtual Value Ref(const TypedExpr& ref) const = 0;
  // Value of an aggregate or window call node, precomputed by the caller.
  virtual Value Special(const TypedExpr& call) const;
};

// Three-valued scalar evaluation with SQL NULL semantics. Error-typed nodes
// evaluate to NULL.
Value Evaluate(const TypedExpr& expr, const EvalContext& ctx);

// Binary operator on evaluated operands (shared with constant folding).
Value EvalBinary(BinaryOp op, const Value& lhs, const Value& rhs);

// Debug/explain rendering in formula syntax.
std::string PrintTyped(const TypedExpr& expr);

}  // namespace sheetc::formula

#endif  // SHEETC_FORMULA_TYPED_H_
