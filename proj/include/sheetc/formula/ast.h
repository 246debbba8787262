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

#ifndef SHEETC_FORMULA_AST_H_
#define SHEETC_FORMULA_AST_H_

#include <memory>
#include <string>
#include <vector>

#include "sheetc/common/value.h"

namespace sheetc::formula {

enum class BinaryOp {
  kAdd,
  kSub,
  kMul,
  kDiv,
  kConcat,
  kEq,
  kNe,
  kLt,
  kLe,
  kGt,
  kGe,
  kAnd,
  kOr,
};

enum class UnaryOp { kNeg, kNot };

std::string_view BinaryOpSymbol(BinaryOp op);
bool IsComparison(BinaryOp op);

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

// Untyped formula syntax tree, as produced by the parser. References are
// unresolved names.
struct Expr {
  enum class Kind {
    kLiteral,
    kColumnRef,     // [Name]
    kParameterRef,  // produced only by callers that build trees by hand
    kLinkRef,       // [path/.../attribute]
    kCall,
    kBinary,
    kUnary,
    kIf,
  };

  Kind kind = Kind::kLiteral;
  Value literal;
  std::string name;               // ref name, link attribute or function name
  std::vector<std::string> path;  // link path
  BinaryOp binary_op = BinaryOp::kAdd;
  UnaryOp unary_op = UnaryOp::kNeg;
  // kCall: arguments. kBinary: {lhs, rhs}. kUnary: {operand}.
  // kIf: {condition, then[, else]}.
  std::vector<ExprPtr> args;
  size_t offset = 0;
  size_t length = 0;

  static ExprPtr MakeLiteral(Value v);
  static ExprPtr MakeColumnRef(std::string name);
  static ExprPtr MakeCall(std::string function, std::vector<ExprPtr> args);
  static ExprPtr MakeBinary(BinaryOp op, ExprPtr lhs, ExprPtr rhs);
};

// Structural equality ignoring source positions.
bool SameExpr(const Expr& a, const Expr& b);

}  // namespace sheetc::formula

#endif  // SHEETC_FORMULA_AST_H_
