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

#include <map>
#include <random>

#include "gtest/gtest.h"
#include "sheetc/common/errors.h"
#include "sheetc/formula/parser.h"
#include "sheetc/formula/typed.h"

namespace sheetc::formula {
namespace {

Resolver EnvResolver(std::map<std::string, std::pair<ScalarType, int>> env) {
  return [env](const Expr& e) -> std::optional<RefInfo> {
    auto it = env.find(e.name);
    if (it == env.end() || !e.path.empty()) return std::nullopt;
    RefInfo info;
    info.kind = RefKind::kColumn;
    info.type = it->second.first;
    info.level = it->second.second;
    info.id = e.name;
    return info;
  };
}

TypecheckResult Check(std::string_view text,
                      std::map<std::string, std::pair<ScalarType, int>> env) {
  return Typecheck(*ParseFormula(text), EnvResolver(std::move(env)));
}

TEST(ParseTest, SingleCall) {
  ExprPtr e = ParseFormula("Sum([sales])");
  ASSERT_EQ(e->kind, Expr::Kind::kCall);
  EXPECT_EQ(e->name, "Sum");
  ASSERT_EQ(e->args.size(), 1u);
  EXPECT_EQ(e->args[0]->kind, Expr::Kind::kColumnRef);
  EXPECT_EQ(e->args[0]->name, "sales");
}

TEST(ParseTest, DateDiffThreeArgs) {
  ExprPtr e = ParseFormula("DateDiff(\"month\",[Cohort],[Quarter])");
  ASSERT_EQ(e->args.size(), 3u);
  EXPECT_EQ(std::get<std::string>(e->args[0]->literal), "month");
}

TEST(ParseTest, NestedAggregateWindow) {
  ExprPtr e = ParseFormula("Sum([x] + Min([y] + Max(MovingAverage([z]))))");
  EXPECT_EQ(e->name, "Sum");
  const Expr& min = *e->args[0]->args[1];
  EXPECT_EQ(min.name, "Min");
  const Expr& max = *min.args[0]->args[1];
  EXPECT_EQ(max.name, "Max");
  EXPECT_EQ(max.args[0]->name, "MovingAverage");
}

TEST(ParseTest, Precedence) {
  EXPECT_EQ(PrintFormula(*ParseFormula("1 + 2 * 3 = 7 and not [a] or [b]")),
            "1 + 2 * 3 = 7 and not [a] or [b]");
  EXPECT_EQ(PrintFormula(*ParseFormula("(1 + 2) * 3")), "(1 + 2) * 3");
  EXPECT_EQ(PrintFormula(*ParseFormula("1 - (2 - 3)")), "1 - (2 - 3)");
}

TEST(ParseTest, LinkRef) {
  ExprPtr e = ParseFormula("[Planes/First Flight]");
  EXPECT_EQ(e->kind, Expr::Kind::kLinkRef);
  ASSERT_EQ(e->path.size(), 1u);
  EXPECT_EQ(e->path[0], "Planes");
  EXPECT_EQ(e->name, "First Flight");
}

TEST(ParseTest, ErrorOffset) {
  try {
    ParseFormula("1 + * 2");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.offset(), 4u);
    EXPECT_FALSE(e.expected().empty());
  }
  EXPECT_THROW(ParseFormula("Sum([a]"), ParseError);
  EXPECT_THROW(ParseFormula("\"open"), ParseError);
}

TEST(TypecheckTest, PercentOfTotal) {
  auto r = Check("[Sales] / [Sales - Sum]",
                 {{"Sales", {ScalarType::kNumber, 0}},
                  {"Sales - Sum", {ScalarType::kNumber, 1}}});
  EXPECT_EQ(r.expr.type, ScalarType::kNumber);
  EXPECT_TRUE(r.diagnostics.empty());
  Usage u = Summarize(r.expr);
  EXPECT_EQ(u.columns.size(), 2u);
  EXPECT_TRUE(u.columns.count({"Sales - Sum", 1}));
}

TEST(TypecheckTest, MismatchFloods) {
  auto r = Check("1 + \"a\"", {});
  EXPECT_EQ(r.expr.type, ScalarType::kError);
  EXPECT_EQ(r.diagnostics.size(), 1u);
  auto nested = Check("Round((1 + \"a\") * 2, 0) > 1", {});
  EXPECT_EQ(nested.expr.type, ScalarType::kError);
  EXPECT_EQ(nested.diagnostics.size(), 1u);
}

TEST(TypecheckTest, TwoArmIf) {
  auto r = Check("If([Cancelled], [Flight Date])",
                 {{"Cancelled", {ScalarType::kLogical, 0}},
                  {"Flight Date", {ScalarType::kDate, 0}}});
  EXPECT_EQ(r.expr.type, ScalarType::kDate);
}

TEST(TypecheckTest, UnknownNameAndFunction) {
  EXPECT_EQ(Check("[nope] + 1", {}).diagnostics.size(), 1u);
  EXPECT_EQ(Check("Frobnicate(1)", {}).expr.type, ScalarType::kError);
  EXPECT_EQ(Check("DateTrunc(\"fortnight\", Date(\"2020-01-01\"))", {})
                .expr.type,
            ScalarType::kError);
}

TEST(TypecheckTest, UsageMonotone) {
  auto r = Check("Round(Sum([x]), 2) + 1", {{"x", {ScalarType::kNumber, 0}}});
  EXPECT_TRUE(Summarize(r.expr).contains_aggregate);
  EXPECT_TRUE(Summarize(r.expr.args[0]).contains_aggregate);
  EXPECT_FALSE(Summarize(r.expr.args[1]).contains_aggregate);
}

TEST(FoldTest, Arithmetic) {
  TypedExpr f = FoldConstants(Check("1+2*3", {}).expr);
  ASSERT_EQ(f.kind, Expr::Kind::kLiteral);
  EXPECT_EQ(std::get<double>(f.literal), 7);
}

TEST(FoldTest, RoundDivision) {
  TypedExpr f = FoldConstants(Check("Round(1000/1000, 1)", {}).expr);
  ASSERT_EQ(f.kind, Expr::Kind::kLiteral);
  EXPECT_EQ(std::get<double>(f.literal), 1.0);
}

TEST(FoldTest, ReferencesUntouched) {
  TypedExpr e = Check("[x] + 0", {{"x", {ScalarType::kNumber, 0}}}).expr;
  TypedExpr f = FoldConstants(e);
  EXPECT_TRUE(SameTypedExpr(e, f));
}

TEST(FoldTest, NullSemantics) {
  auto fold = [](std::string_view t) {
    return FoldConstants(Check(t, {}).expr).literal;
  };
  EXPECT_TRUE(IsNull(fold("1 / 0")));
  EXPECT_EQ(std::get<bool>(fold("1/0 = 1 or true")), true);
  EXPECT_TRUE(IsNull(fold("1/0 = 1 or false")));
  EXPECT_EQ(std::get<bool>(fold("1/0 = 1 and false")), false);
  EXPECT_EQ(std::get<double>(fold("If(1/0 = 1, 1, 2)")), 2);
  EXPECT_EQ(std::get<double>(fold("Coalesce(1/0, 4)")), 4);
}

TEST(FoldTest, Dates) {
  auto fold = [](std::string_view t) {
    return FoldConstants(Check(t, {}).expr).literal;
  };
  EXPECT_EQ(std::get<double>(fold(
                "DateDiff(\"months\", Date(\"2020-01-31\"), Date(\"2020-03-01\"))")),
            2);
  EXPECT_EQ(FormatIsoDate(std::get<Date>(
                fold("DateTrunc(\"quarter\", Date(\"2020-08-15\"))"))),
            "2020-07-01");
}

// Random expression trees survive print then parse.
ExprPtr RandomExpr(std::mt19937& rng, int depth) {
  std::uniform_int_distribution<int> pick(0, depth <= 0 ? 2 : 6);
  switch (pick(rng)) {
    case 0:
      return Expr::MakeLiteral(static_cast<double>(rng() % 100));
    case 1:
      return Expr::MakeColumnRef("c" + std::to_string(rng() % 4));
    case 2:
      return Expr::MakeLiteral(std::string("s") + std::to_string(rng() % 3));
    case 3:
    case 4: {
      static const BinaryOp ops[] = {
          BinaryOp::kAdd, BinaryOp::kSub, BinaryOp::kMul, BinaryOp::kDiv,
          BinaryOp::kConcat, BinaryOp::kEq, BinaryOp::kLt, BinaryOp::kAnd,
          BinaryOp::kOr, BinaryOp::kNe};
      return Expr::MakeBinary(ops[rng() % 10], RandomExpr(rng, depth - 1),
                              RandomExpr(rng, depth - 1));
    }
    case 5: {
      auto e = std::make_shared<Expr>();
      e->kind = Expr::Kind::kUnary;
      e->unary_op = rng() % 2 ? UnaryOp::kNot : UnaryOp::kNeg;
      e->args = {RandomExpr(rng, depth - 1)};
      return e;
    }
    default:
      return Expr::MakeCall("Sum", {RandomExpr(rng, depth - 1)});
  }
}

TEST(RoundTripTest, PrintParse) {
  std::mt19937 rng(7);
  for (int i = 0; i < 500; ++i) {
    ExprPtr e = RandomExpr(rng, 4);
    std::string text = PrintFormula(*e);
    ExprPtr back = ParseFormula(text);
    ASSERT_TRUE(SameExpr(*e, *back)) << text << " vs " << PrintFormula(*back);
  }
}

}  // namespace
}  // namespace sheetc::formula
