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

#include <algorithm>
#include <cctype>
#include <map>

#include "sheetc/formula/typed.h"

namespace sheetc::formula {

TypedExpr TypedExpr::Literal(Value v, ScalarType type) {
  TypedExpr e;
  e.kind = Expr::Kind::kLiteral;
  e.literal = std::move(v);
  e.type = type;
  return e;
}

TypedExpr TypedExpr::ErrorLiteral() {
  return Literal(Value{}, ScalarType::kError);
}

TypedExpr TypedExpr::ColumnRef(std::string name, ScalarType type, int level) {
  TypedExpr e;
  e.kind = Expr::Kind::kColumnRef;
  e.name = std::move(name);
  e.type = type;
  e.level = level;
  e.ref_kind = RefKind::kColumn;
  return e;
}

TypedExpr TypedExpr::InputRef(std::string id, ScalarType type) {
  TypedExpr e = ColumnRef(std::move(id), type, 0);
  e.ref_kind = RefKind::kInput;
  return e;
}

bool SameTypedExpr(const TypedExpr& a, const TypedExpr& b) {
  if (a.kind != b.kind || a.type != b.type || a.name != b.name ||
      a.args.size() != b.args.size()) {
    return false;
  }
  switch (a.kind) {
    case Expr::Kind::kLiteral:
      if (!SameValue(a.literal, b.literal)) return false;
      break;
    case Expr::Kind::kColumnRef:
      if (a.ref_kind != b.ref_kind || a.level != b.level) return false;
      break;
    case Expr::Kind::kBinary:
      if (a.binary_op != b.binary_op) return false;
      break;
    case Expr::Kind::kUnary:
      if (a.unary_op != b.unary_op) return false;
      break;
    default:
      break;
  }
  for (size_t i = 0; i < a.args.size(); ++i) {
    if (!SameTypedExpr(a.args[i], b.args[i])) return false;
  }
  return true;
}

namespace {

ScalarType LiteralType(const Value& v) {
  switch (v.index()) {
    case 1:
      return ScalarType::kLogical;
    case 2:
      return ScalarType::kNumber;
    case 3:
      return ScalarType::kText;
    case 4:
      return ScalarType::kDate;
    default:
      return ScalarType::kNumber;
  }
}

std::string TypeList(TypeMask mask) {
  std::string out;
  for (ScalarType t : {ScalarType::kLogical, ScalarType::kNumber,
                       ScalarType::kText, ScalarType::kDate}) {
    if (mask & Mask(t)) {
      if (!out.empty()) out += "|";
      out += ScalarTypeName(t);
    }
  }
  return out;
}

class Checker {
 public:
  explicit Checker(const Resolver& resolver) : resolver_(resolver) {}

  TypedExpr Check(const Expr& e) {
    TypedExpr out = CheckNode(e);
    out.offset = e.offset;
    out.length = e.length;
    return out;
  }

  std::vector<Diagnostic> TakeDiagnostics() { return std::move(diags_); }

 private:
  TypedExpr Fail(const Expr& at, std::string message, TypedExpr node) {
    diags_.push_back(Diagnostic{at.offset, at.length, std::move(message)});
    node.type = ScalarType::kError;
    return node;
  }

  static bool AnyError(const std::vector<TypedExpr>& args) {
    return std::any_of(args.begin(), args.end(),
                       [](const TypedExpr& a) { return a.is_error(); });
  }

  TypedExpr CheckNode(const Expr& e) {
    TypedExpr out;
    out.kind = e.kind;
    switch (e.kind) {
      case Expr::Kind::kLiteral:
        return TypedExpr::Literal(e.literal, LiteralType(e.literal));
      case Expr::Kind::kColumnRef:
      case Expr::Kind::kParameterRef:
      case Expr::Kind::kLinkRef:
        return CheckRef(e);
      case Expr::Kind::kUnary: {
        out.unary_op = e.unary_op;
        out.args.push_back(Check(*e.args[0]));
        if (AnyError(out.args)) return out;
        ScalarType want = e.unary_op == UnaryOp::kNot ? ScalarType::kLogical
                                                       : ScalarType::kNumber;
        if (out.args[0].type != want) {
          return Fail(e,
                      std::string(e.unary_op == UnaryOp::kNot ? "not" : "-") +
                          " expects " + std::string(ScalarTypeName(want)) +
                          ", got " +
                          std::string(ScalarTypeName(out.args[0].type)),
                      std::move(out));
        }
        out.type = want;
        return out;
      }
      case Expr::Kind::kBinary:
        return CheckBinary(e);
      case Expr::Kind::kIf:
        return CheckIf(e);
      case Expr::Kind::kCall:
        return CheckCall(e);
    }
    return out;
  }

  TypedExpr CheckRef(const Expr& e) {
    std::optional<RefInfo> info = resolver_(e);
    TypedExpr out;
    out.kind = Expr::Kind::kColumnRef;
    out.name = e.name;
    if (!info) {
      std::string shown = e.name;
      if (!e.path.empty()) {
        shown.clear();
        for (const std::string& p : e.path) shown += p + "/";
        shown += e.name;
      }
      return Fail(e, "unknown reference [" + shown + "]", std::move(out));
    }
    if (info->bound) {
      return TypedExpr::Literal(*info->bound, info->type);
    }
    out.name = info->id;
    out.ref_kind = info->kind;
    out.level = info->level;
    out.type = info->type;
    return out;
  }

  TypedExpr CheckBinary(const Expr& e) {
    TypedExpr out;
    out.kind = Expr::Kind::kBinary;
    out.binary_op = e.binary_op;
    out.args.push_back(Check(*e.args[0]));
    out.args.push_back(Check(*e.args[1]));
    if (AnyError(out.args)) return out;
    ScalarType l = out.args[0].type, r = out.args[1].type;
    auto mismatch = [&](std::string_view want) {
      return Fail(e,
                  "operator " + std::string(BinaryOpSymbol(e.binary_op)) +
                      " expects " + std::string(want) + ", got " +
                      std::string(ScalarTypeName(l)) + " and " +
                      std::string(ScalarTypeName(r)),
                  std::move(out));
    };
    switch (e.binary_op) {
      case BinaryOp::kAdd:
      case BinaryOp::kSub:
      case BinaryOp::kMul:
      case BinaryOp::kDiv:
        if (l != ScalarType::kNumber || r != ScalarType::kNumber) {
          return mismatch("Number operands");
        }
        out.type = ScalarType::kNumber;
        return out;
      case BinaryOp::kConcat:
        if (l != ScalarType::kText || r != ScalarType::kText) {
          return mismatch("Text operands");
        }
        out.type = ScalarType::kText;
        return out;
      case BinaryOp::kAnd:
      case BinaryOp::kOr:
        if (l != ScalarType::kLogical || r != ScalarType::kLogical) {
          return mismatch("Logical operands");
        }
        out.type = ScalarType::kLogical;
        return out;
      default:
        if (l != r) return mismatch("operands of the same type");
        out.type = ScalarType::kLogical;
        return out;
    }
  }

  TypedExpr CheckIf(const Expr& e) {
    TypedExpr out;
    out.kind = Expr::Kind::kIf;
    for (const ExprPtr& a : e.args) out.args.push_back(Check(*a));
    if (AnyError(out.args)) return out;
    if (out.args[0].type != ScalarType::kLogical) {
      return Fail(e, "If condition must be Logical", std::move(out));
    }
    if (out.args.size() == 3 && out.args[1].type != out.args[2].type) {
      return Fail(e, "If branches have different types", std::move(out));
    }
    out.type = out.args[1].type;
    return out;
  }

  TypedExpr CheckCall(const Expr& e) {
    TypedExpr out;
    out.kind = Expr::Kind::kCall;
    out.name = e.name;
    for (const ExprPtr& a : e.args) out.args.push_back(Check(*a));
    const FunctionSig* sig = LookupFunction(e.name);
    if (!sig) return Fail(e, "unknown function " + e.name, std::move(out));
    out.function = sig;
    out.name = sig->name;
    if (AnyError(out.args)) return out;

    size_t required = 0;
    bool variadic = false;
    for (const ArgSpec& a : sig->args) {
      if (!a.optional && !a.variadic) ++required;
      variadic |= a.variadic;
    }
    if (out.args.size() < required ||
        (!variadic && out.args.size() > sig->args.size())) {
      return Fail(e,
                  sig->name + " takes " + std::to_string(required) +
                      (variadic || sig->args.size() > required
                           ? " or more"
                           : "") +
                      " argument(s), got " + std::to_string(out.args.size()),
                  std::move(out));
    }
    std::map<int, ScalarType> groups;
    for (size_t i = 0; i < out.args.size(); ++i) {
      const ArgSpec& spec = sig->args[std::min(i, sig->args.size() - 1)];
      TypedExpr& arg = out.args[i];
      if (!(spec.types & Mask(arg.type))) {
        return Fail(*e.args[i],
                    sig->name + " argument " + std::to_string(i + 1) +
                        " expects " + TypeList(spec.types) + ", got " +
                        std::string(ScalarTypeName(arg.type)),
                    std::move(out));
      }
      if (spec.literal_only) {
        arg = FoldConstants(arg);
        if (arg.kind != Expr::Kind::kLiteral || IsNull(arg.literal)) {
          return Fail(*e.args[i],
                      sig->name + " argument " + std::to_string(i + 1) +
                          " must be a literal",
                      std::move(out));
        }
        if (!spec.allowed.empty()) {
          std::string lit = std::get<std::string>(arg.literal);
          std::string lower;
          for (char c : lit) lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
          if (std::find(spec.allowed.begin(), spec.allowed.end(), lower) ==
              spec.allowed.end()) {
            return Fail(*e.args[i],
                        sig->name + " does not accept \"" + lit + "\"",
                        std::move(out));
          }
        }
      }
      if (spec.unify_group >= 0) {
        auto [it, inserted] = groups.emplace(spec.unify_group, arg.type);
        if (!inserted && it->second != arg.type) {
          return Fail(e, sig->name + " arguments must share a type",
                      std::move(out));
        }
      }
    }
    out.type = sig->result_from_arg >= 0
                   ? out.args[static_cast<size_t>(sig->result_from_arg)].type
                   : sig->result;
    return out;
  }

  const Resolver& resolver_;
  std::vector<Diagnostic> diags_;
};

void Collect(const TypedExpr& e, Usage& usage) {
  if (e.kind == Expr::Kind::kColumnRef && !e.is_error()) {
    if (e.ref_kind == RefKind::kColumn) {
      usage.columns.emplace(e.name, e.level);
    } else {
      usage.inputs.insert(e.name);
    }
  }
  if (e.is_call(FunctionClass::kAggregate)) usage.contains_aggregate = true;
  if (e.is_call(FunctionClass::kWindow)) usage.contains_window = true;
  for (const TypedExpr& a : e.args) Collect(a, usage);
}

}  // namespace

TypecheckResult Typecheck(const Expr& expr, const Resolver& resolver) {
  Checker checker(resolver);
  TypecheckResult result;
  result.expr = checker.Check(expr);
  result.diagnostics = checker.TakeDiagnostics();
  return result;
}

Usage Summarize(const TypedExpr& expr) {
  Usage usage;
  Collect(expr, usage);
  return usage;
}

}  // namespace sheetc::formula
