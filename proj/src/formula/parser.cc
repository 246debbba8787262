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

#include "sheetc/formula/parser.h"

#include <cctype>
#include <charconv>
#include <cstdlib>
#include <optional>

#include "sheetc/common/errors.h"

namespace sheetc::formula {
namespace {

enum class Tok {
  kEnd,
  kNumber,
  kString,
  kIdent,
  kRef,
  kLParen,
  kRParen,
  kComma,
  kPlus,
  kMinus,
  kStar,
  kSlash,
  kAmp,
  kEq,
  kNe,
  kLt,
  kLe,
  kGt,
  kGe,
};

struct Token {
  Tok kind = Tok::kEnd;
  std::string text;  // identifier, decoded string, or raw reference body
  double number = 0;
  size_t offset = 0;
  size_t length = 0;
};

std::string Lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {}

  Token Next() {
    while (pos_ < text_.size() &&
           std::isspace(static_cast<unsigned char>(text_[pos_]))) {
      ++pos_;
    }
    Token t;
    t.offset = pos_;
    if (pos_ >= text_.size()) return t;
    char c = text_[pos_];
    auto single = [&](Tok k, size_t n = 1) {
      t.kind = k;
      t.length = n;
      pos_ += n;
      return t;
    };
    switch (c) {
      case '(':
        return single(Tok::kLParen);
      case ')':
        return single(Tok::kRParen);
      case ',':
        return single(Tok::kComma);
      case '+':
        return single(Tok::kPlus);
      case '-':
        return single(Tok::kMinus);
      case '*':
        return single(Tok::kStar);
      case '/':
        return single(Tok::kSlash);
      case '&':
        return single(Tok::kAmp);
      case '=':
        return single(Tok::kEq);
      case '!':
        if (Peek(1) == '=') return single(Tok::kNe, 2);
        break;
      case '<':
        if (Peek(1) == '=') return single(Tok::kLe, 2);
        if (Peek(1) == '>') return single(Tok::kNe, 2);
        return single(Tok::kLt);
      case '>':
        if (Peek(1) == '=') return single(Tok::kGe, 2);
        return single(Tok::kGt);
      case '[': {
        size_t close = text_.find(']', pos_ + 1);
        if (close == std::string_view::npos) {
          throw ParseError("unterminated column reference", pos_, {"]"});
        }
        t.kind = Tok::kRef;
        t.text = std::string(text_.substr(pos_ + 1, close - pos_ - 1));
        t.length = close + 1 - pos_;
        pos_ = close + 1;
        return t;
      }
      case '"':
        return LexString(t);
      default:
        break;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        (c == '.' && std::isdigit(static_cast<unsigned char>(Peek(1))))) {
      return LexNumber(t);
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t start = pos_;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
              text_[pos_] == '_')) {
        ++pos_;
      }
      t.kind = Tok::kIdent;
      t.text = std::string(text_.substr(start, pos_ - start));
      t.length = pos_ - start;
      return t;
    }
    throw ParseError(std::string("unexpected character '") + c + "'", pos_,
                     {"expression"});
  }

 private:
  char Peek(size_t ahead) const {
    return pos_ + ahead < text_.size() ? text_[pos_ + ahead] : '\0';
  }

  Token LexString(Token& t) {
    size_t start = pos_++;
    std::string out;
    while (pos_ < text_.size() && text_[pos_] != '"') {
      if (text_[pos_] == '\\' && pos_ + 1 < text_.size()) ++pos_;
      out.push_back(text_[pos_++]);
    }
    if (pos_ >= text_.size()) {
      throw ParseError("unterminated string literal", start, {"\""});
    }
    ++pos_;
    t.kind = Tok::kString;
    t.text = std::move(out);
    t.length = pos_ - start;
    return t;
  }

  Token LexNumber(Token& t) {
    size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isdigit(static_cast<unsigned char>(text_[pos_])) ||
            text_[pos_] == '.')) {
      ++pos_;
    }
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      size_t save = pos_++;
      if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) {
        ++pos_;
      }
      if (pos_ < text_.size() &&
          std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        while (pos_ < text_.size() &&
               std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
          ++pos_;
        }
      } else {
        pos_ = save;
      }
    }
    std::string_view raw = text_.substr(start, pos_ - start);
    double value = 0;
    auto res = std::from_chars(raw.data(), raw.data() + raw.size(), value);
    if (res.ec != std::errc() || res.ptr != raw.data() + raw.size()) {
      throw ParseError("malformed number '" + std::string(raw) + "'", start,
                       {"number"});
    }
    t.kind = Tok::kNumber;
    t.number = value;
    t.length = raw.size();
    return t;
  }

  std::string_view text_;
  size_t pos_ = 0;
};

class Parser {
 public:
  explicit Parser(std::string_view text) : lexer_(text) { Advance(); }

  ExprPtr ParseAll() {
    ExprPtr e = ParseOr();
    if (cur_.kind != Tok::kEnd) Fail({"end of formula", "operator"});
    return e;
  }

 private:
  void Advance() { cur_ = lexer_.Next(); }

  bool IsKeyword(std::string_view kw) const {
    return cur_.kind == Tok::kIdent && Lower(cur_.text) == kw;
  }

  [[noreturn]] void Fail(std::vector<std::string> expected) const {
    std::string got = cur_.kind == Tok::kEnd ? "end of formula"
                                             : "'" + Describe(cur_) + "'";
    std::string msg = "unexpected " + got + ", expected ";
    for (size_t i = 0; i < expected.size(); ++i) {
      if (i) msg += " or ";
      msg += expected[i];
    }
    throw ParseError(msg, cur_.offset, std::move(expected));
  }

  static std::string Describe(const Token& t) {
    switch (t.kind) {
      case Tok::kNumber:
        return FormatNumber(t.number);
      case Tok::kString:
        return "\"" + t.text + "\"";
      case Tok::kIdent:
        return t.text;
      case Tok::kRef:
        return "[" + t.text + "]";
      case Tok::kLParen:
        return "(";
      case Tok::kRParen:
        return ")";
      case Tok::kComma:
        return ",";
      case Tok::kPlus:
        return "+";
      case Tok::kMinus:
        return "-";
      case Tok::kStar:
        return "*";
      case Tok::kSlash:
        return "/";
      case Tok::kAmp:
        return "&";
      case Tok::kEq:
        return "=";
      case Tok::kNe:
        return "!=";
      case Tok::kLt:
        return "<";
      case Tok::kLe:
        return "<=";
      case Tok::kGt:
        return ">";
      case Tok::kGe:
        return ">=";
      case Tok::kEnd:
        break;
    }
    return "end of formula";
  }

  static std::shared_ptr<Expr> Node(Expr::Kind kind, size_t offset,
                                    size_t end) {
    auto e = std::make_shared<Expr>();
    e->kind = kind;
    e->offset = offset;
    e->length = end > offset ? end - offset : 0;
    return e;
  }

  static size_t End(const ExprPtr& e) { return e->offset + e->length; }

  ExprPtr Binary(BinaryOp op, ExprPtr lhs, ExprPtr rhs) {
    auto e = Node(Expr::Kind::kBinary, lhs->offset, End(rhs));
    e->binary_op = op;
    e->args = {std::move(lhs), std::move(rhs)};
    return e;
  }

  ExprPtr ParseOr() {
    ExprPtr lhs = ParseAnd();
    while (IsKeyword("or")) {
      Advance();
      lhs = Binary(BinaryOp::kOr, lhs, ParseAnd());
    }
    return lhs;
  }

  ExprPtr ParseAnd() {
    ExprPtr lhs = ParseNot();
    while (IsKeyword("and")) {
      Advance();
      lhs = Binary(BinaryOp::kAnd, lhs, ParseNot());
    }
    return lhs;
  }

  ExprPtr ParseNot() {
    if (IsKeyword("not")) {
      size_t offset = cur_.offset;
      Advance();
      ExprPtr operand = ParseNot();
      auto e = Node(Expr::Kind::kUnary, offset, End(operand));
      e->unary_op = UnaryOp::kNot;
      e->args = {std::move(operand)};
      return e;
    }
    return ParseComparison();
  }

  ExprPtr ParseComparison() {
    ExprPtr lhs = ParseAdditive();
    std::optional<BinaryOp> op;
    switch (cur_.kind) {
      case Tok::kEq:
        op = BinaryOp::kEq;
        break;
      case Tok::kNe:
        op = BinaryOp::kNe;
        break;
      case Tok::kLt:
        op = BinaryOp::kLt;
        break;
      case Tok::kLe:
        op = BinaryOp::kLe;
        break;
      case Tok::kGt:
        op = BinaryOp::kGt;
        break;
      case Tok::kGe:
        op = BinaryOp::kGe;
        break;
      default:
        return lhs;
    }
    Advance();
    return Binary(*op, lhs, ParseAdditive());
  }

  ExprPtr ParseAdditive() {
    ExprPtr lhs = ParseTerm();
    for (;;) {
      BinaryOp op;
      if (cur_.kind == Tok::kPlus) {
        op = BinaryOp::kAdd;
      } else if (cur_.kind == Tok::kMinus) {
        op = BinaryOp::kSub;
      } else if (cur_.kind == Tok::kAmp) {
        op = BinaryOp::kConcat;
      } else {
        return lhs;
      }
      Advance();
      lhs = Binary(op, lhs, ParseTerm());
    }
  }

  ExprPtr ParseTerm() {
    ExprPtr lhs = ParseUnary();
    for (;;) {
      BinaryOp op;
      if (cur_.kind == Tok::kStar) {
        op = BinaryOp::kMul;
      } else if (cur_.kind == Tok::kSlash) {
        op = BinaryOp::kDiv;
      } else {
        return lhs;
      }
      Advance();
      lhs = Binary(op, lhs, ParseUnary());
    }
  }

  ExprPtr ParseUnary() {
    if (cur_.kind == Tok::kMinus) {
      size_t offset = cur_.offset;
      Advance();
      if (cur_.kind == Tok::kNumber) {
        auto e = Node(Expr::Kind::kLiteral, offset, cur_.offset + cur_.length);
        e->literal = -cur_.number;
        Advance();
        return e;
      }
      ExprPtr operand = ParseUnary();
      auto e = Node(Expr::Kind::kUnary, offset, End(operand));
      e->unary_op = UnaryOp::kNeg;
      e->args = {std::move(operand)};
      return e;
    }
    return ParsePrimary();
  }

  ExprPtr ParseReference(const Token& t) {
    std::vector<std::string> parts;
    size_t start = 0;
    for (;;) {
      size_t slash = t.text.find('/', start);
      parts.push_back(t.text.substr(start, slash - start));
      if (slash == std::string::npos) break;
      start = slash + 1;
    }
    for (const std::string& p : parts) {
      if (p.empty()) {
        throw ParseError("empty name in reference [" + t.text + "]", t.offset,
                         {"column name"});
      }
    }
    if (parts.size() == 1) {
      auto e = Node(Expr::Kind::kColumnRef, t.offset, t.offset + t.length);
      e->name = parts[0];
      return e;
    }
    auto e = Node(Expr::Kind::kLinkRef, t.offset, t.offset + t.length);
    e->name = parts.back();
    parts.pop_back();
    e->path = std::move(parts);
    return e;
  }

  ExprPtr ParsePrimary() {
    Token t = cur_;
    switch (t.kind) {
      case Tok::kNumber: {
        Advance();
        auto e = Node(Expr::Kind::kLiteral, t.offset, t.offset + t.length);
        e->literal = t.number;
        return e;
      }
      case Tok::kString: {
        Advance();
        auto e = Node(Expr::Kind::kLiteral, t.offset, t.offset + t.length);
        e->literal = t.text;
        return e;
      }
      case Tok::kRef:
        Advance();
        return ParseReference(t);
      case Tok::kLParen: {
        Advance();
        ExprPtr inner = ParseOr();
        if (cur_.kind != Tok::kRParen) Fail({"')'"});
        Advance();
        return inner;
      }
      case Tok::kIdent: {
        std::string lower = Lower(t.text);
        if (lower == "true" || lower == "false") {
          Advance();
          auto e = Node(Expr::Kind::kLiteral, t.offset, t.offset + t.length);
          e->literal = lower == "true";
          return e;
        }
        if (lower == "and" || lower == "or" || lower == "not") break;
        Advance();
        if (cur_.kind != Tok::kLParen) Fail({"'('"});
        Advance();
        std::vector<ExprPtr> args;
        if (cur_.kind != Tok::kRParen) {
          for (;;) {
            args.push_back(ParseOr());
            if (cur_.kind == Tok::kComma) {
              Advance();
              continue;
            }
            if (cur_.kind != Tok::kRParen) Fail({"','", "')'"});
            break;
          }
        }
        size_t end = cur_.offset + cur_.length;
        Advance();
        if (lower == "if") {
          if (args.size() < 2 || args.size() > 3) {
            throw ParseError("If takes 2 or 3 arguments", t.offset,
                             {"condition, value[, else]"});
          }
          auto e = Node(Expr::Kind::kIf, t.offset, end);
          e->args = std::move(args);
          return e;
        }
        auto e = Node(Expr::Kind::kCall, t.offset, end);
        e->name = t.text;
        e->args = std::move(args);
        return e;
      }
      default:
        break;
    }
    Fail({"number", "string", "[column]", "function call", "'('"});
  }

  Lexer lexer_;
  Token cur_;
};

// Binding strength used by the printer; mirrors the grammar levels.
int Precedence(const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::kBinary:
      switch (e.binary_op) {
        case BinaryOp::kOr:
          return 1;
        case BinaryOp::kAnd:
          return 2;
        case BinaryOp::kAdd:
        case BinaryOp::kSub:
        case BinaryOp::kConcat:
          return 5;
        case BinaryOp::kMul:
        case BinaryOp::kDiv:
          return 6;
        default:
          return 4;  // comparisons
      }
    case Expr::Kind::kUnary:
      return e.unary_op == UnaryOp::kNot ? 3 : 7;
    case Expr::Kind::kLiteral:
      // Negative literals print with a leading '-'.
      if (const double* d = std::get_if<double>(&e.literal); d && *d < 0) {
        return 7;
      }
      return 8;
    default:
      return 8;
  }
}

std::string QuoteString(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

void Print(const Expr& e, std::string& out);

void PrintChild(const Expr& child, bool parens, std::string& out) {
  if (parens) out.push_back('(');
  Print(child, out);
  if (parens) out.push_back(')');
}

void Print(const Expr& e, std::string& out) {
  switch (e.kind) {
    case Expr::Kind::kLiteral:
      switch (e.literal.index()) {
        case 0:
          out += "Null";
          return;
        case 1:
          out += std::get<bool>(e.literal) ? "True" : "False";
          return;
        case 2:
          out += FormatNumber(std::get<double>(e.literal));
          return;
        case 3:
          out += QuoteString(std::get<std::string>(e.literal));
          return;
        case 4:
          out += "Date(" + QuoteString(FormatIsoDate(std::get<Date>(e.literal))) + ")";
          return;
      }
      return;
    case Expr::Kind::kColumnRef:
    case Expr::Kind::kParameterRef:
      out += "[" + e.name + "]";
      return;
    case Expr::Kind::kLinkRef:
      out += "[";
      for (const std::string& p : e.path) out += p + "/";
      out += e.name + "]";
      return;
    case Expr::Kind::kCall:
    case Expr::Kind::kIf:
      out += e.kind == Expr::Kind::kIf ? "If" : e.name;
      out += "(";
      for (size_t i = 0; i < e.args.size(); ++i) {
        if (i) out += ", ";
        Print(*e.args[i], out);
      }
      out += ")";
      return;
    case Expr::Kind::kUnary: {
      const Expr& operand = *e.args[0];
      if (e.unary_op == UnaryOp::kNot) {
        out += "not ";
        PrintChild(operand, Precedence(operand) < 3, out);
      } else {
        out += "-";
        // A bare number after '-' would fold into a literal on re-parse.
        bool parens = Precedence(operand) < 7 ||
                      operand.kind == Expr::Kind::kLiteral;
        PrintChild(operand, parens, out);
      }
      return;
    }
    case Expr::Kind::kBinary: {
      int prec = Precedence(e);
      const Expr& lhs = *e.args[0];
      const Expr& rhs = *e.args[1];
      bool cmp = IsComparison(e.binary_op);
      PrintChild(lhs, cmp ? Precedence(lhs) <= prec : Precedence(lhs) < prec,
                 out);
      out += " ";
      out += BinaryOpSymbol(e.binary_op);
      out += " ";
      PrintChild(rhs, Precedence(rhs) <= prec, out);
      return;
    }
  }
}

}  // namespace

ExprPtr ParseFormula(std::string_view text) { return Parser(text).ParseAll(); }

std::string PrintFormula(const Expr& expr) {
  std::string out;
  Print(expr, out);
  return out;
}

}  // namespace sheetc::formula
