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

#ifndef SHEETC_FORMULA_PARSER_H_
#define SHEETC_FORMULA_PARSER_H_

#include <string>
#include <string_view>

#include "sheetc/formula/ast.h"

namespace sheetc::formula {

// Grammar (EBNF):
//
//   formula    = or_expr ;
//   or_expr    = and_expr { "or" and_expr } ;
//   and_expr   = not_expr { "and" not_expr } ;
//   not_expr   = "not" not_expr | comparison ;
//   comparison = additive [ ( "=" | "!=" | "<>" | "<" | "<=" | ">" | ">=" )
//                           additive ] ;
//   additive   = term { ( "+" | "-" | "&" ) term } ;
//   term       = unary { ( "*" | "/" ) unary } ;
//   unary      = "-" unary | primary ;
//   primary    = number | string | "true" | "false" | reference
//              | identifier "(" [ formula { "," formula } ] ")"
//              | "(" formula ")" ;
//   reference  = "[" name { "/" name } "]" ;
//   string     = '"' { char | '\"' | '\\' } '"' ;
//
// Keywords are case-insensitive. `If(c, a[, b])` parses to an If node; a
// `-` directly before a number literal folds into a negative literal.
//
// Throws ParseError with the byte offset and expected-token set.
ExprPtr ParseFormula(std::string_view text);

// Prints a formula that ParseFormula maps back to a structurally equal tree.
std::string PrintFormula(const Expr& expr);

}  // namespace sheetc::formula

#endif  // SHEETC_FORMULA_PARSER_H_
