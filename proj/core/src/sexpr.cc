// Copyright 2026 The Uniparse Authors.
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

#include "uniparse/sexpr.h"

#include <algorithm>
#include <cctype>

#include "uniparse/text.h"

namespace uniparse {
namespace {

constexpr std::string_view kKeywords[] = {"JOIN", "AND", "COUNT", "ARGMAX", "ARGMIN",
                                          "R",    "LT",  "LE",    "GT",     "GE"};

bool IsKeyword(std::string_view atom) {
  return std::find(std::begin(kKeywords), std::end(kKeywords), atom) != std::end(kKeywords);
}

bool IsDelimiter(char c) {
  return std::isspace(static_cast<unsigned char>(c)) || c == '(' || c == ')' || c == '"';
}

struct Token {
  enum Kind { kOpen, kClose, kAtom, kQuoted, kEnd } kind = kEnd;
  std::string text;
  std::size_t offset = 0;
};

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {}

  Token Next() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    Token tok;
    tok.offset = pos_;
    if (pos_ >= text_.size()) return tok;
    char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      tok.kind = Token::kOpen;
      return tok;
    }
    if (c == ')') {
      ++pos_;
      tok.kind = Token::kClose;
      return tok;
    }
    if (c == '"') {
      ++pos_;
      tok.kind = Token::kQuoted;
      while (true) {
        if (pos_ >= text_.size()) throw ParseError("unterminated string literal", tok.offset);
        char d = text_[pos_++];
        if (d == '"') break;
        if (d == '\\') {
          if (pos_ >= text_.size()) throw ParseError("unterminated string literal", tok.offset);
          d = text_[pos_++];
        }
        tok.text.push_back(d);
      }
      return tok;
    }
    tok.kind = Token::kAtom;
    while (pos_ < text_.size() && !IsDelimiter(text_[pos_])) tok.text.push_back(text_[pos_++]);
    return tok;
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
};

class Parser {
 public:
  explicit Parser(std::string_view text) : lexer_(text) { Advance(); }

  SExpr ParseRoot() {
    if (tok_.kind == Token::kEnd) throw ParseError("empty S-expression", tok_.offset);
    SExpr expr = ParseExpr(/*at_root=*/true);
    if (tok_.kind != Token::kEnd) {
      throw ParseError(tok_.kind == Token::kClose ? "unbalanced ')'" : "trailing input",
                       tok_.offset);
    }
    return expr;
  }

 private:
  void Advance() { tok_ = lexer_.Next(); }

  void ExpectClose(std::string_view op) {
    if (tok_.kind == Token::kEnd)
      throw ParseError("unbalanced '(' in " + std::string(op), tok_.offset);
    if (tok_.kind != Token::kClose) {
      throw ParseError("wrong arity for " + std::string(op), tok_.offset);
    }
    Advance();
  }

  std::string ParseIdentifier(std::string_view what) {
    if (tok_.kind == Token::kEnd)
      throw ParseError("unbalanced '(': expected " + std::string(what), tok_.offset);
    if (tok_.kind != Token::kAtom || IsKeyword(tok_.text)) {
      throw ParseError("expected " + std::string(what), tok_.offset);
    }
    std::string id = tok_.text;
    Advance();
    return id;
  }

  SExpr ParseExpr(bool at_root) {
    if (tok_.kind == Token::kAtom) {
      return SExpr::Entity(ParseIdentifier("entity id"));
    }
    if (tok_.kind == Token::kEnd) throw ParseError("unexpected end of input", tok_.offset);
    if (tok_.kind != Token::kOpen) {
      throw ParseError(tok_.kind == Token::kClose ? "unbalanced ')'" : "unexpected string literal",
                       tok_.offset);
    }
    Advance();
    if (tok_.kind != Token::kAtom) throw ParseError("expected operator", tok_.offset);
    std::string op = tok_.text;
    std::size_t op_offset = tok_.offset;
    Advance();

    SExpr out;
    if (op == "JOIN") {
      bool reverse = false;
      std::string relation;
      if (tok_.kind == Token::kOpen) {
        Advance();
        if (tok_.kind != Token::kAtom || tok_.text != "R") {
          throw ParseError("only (R relation) may appear as a JOIN relation", tok_.offset);
        }
        Advance();
        relation = ParseIdentifier("relation id");
        ExpectClose("R");
        reverse = true;
      } else {
        relation = ParseIdentifier("relation id");
      }
      SExpr sub = ParseExpr(false);
      ExpectClose(op);
      out = SExpr::Join(std::move(relation), std::move(sub), reverse);
    } else if (op == "AND") {
      SExpr a = ParseExpr(false);
      SExpr b = ParseExpr(false);
      ExpectClose(op);
      out = SExpr::And(std::move(a), std::move(b));
    } else if (op == "COUNT") {
      if (!at_root) throw ParseError("COUNT is only allowed at the root", op_offset);
      SExpr sub = ParseExpr(false);
      ExpectClose(op);
      out = SExpr::Count(std::move(sub));
    } else if (op == "ARGMAX" || op == "ARGMIN") {
      SExpr sub = ParseExpr(false);
      std::string relation = ParseIdentifier("relation id");
      ExpectClose(op);
      out = op == "ARGMAX" ? SExpr::ArgMax(std::move(sub), std::move(relation))
                           : SExpr::ArgMin(std::move(sub), std::move(relation));
    } else if (op == "LT" || op == "LE" || op == "GT" || op == "GE") {
      CompareOp cmp = op == "LT"   ? CompareOp::kLt
                      : op == "LE" ? CompareOp::kLe
                      : op == "GT" ? CompareOp::kGt
                                   : CompareOp::kGe;
      std::string relation = ParseIdentifier("relation id");
      if (tok_.kind != Token::kAtom && tok_.kind != Token::kQuoted) {
        throw ParseError("expected literal", tok_.offset);
      }
      std::string literal = tok_.text;
      Advance();
      ExpectClose(op);
      out = SExpr::Compare(cmp, std::move(relation), std::move(literal));
    } else if (op == "R") {
      throw ParseError("(R relation) is only allowed as the first argument of JOIN", op_offset);
    } else {
      throw ParseError("unknown operator '" + op + "'", op_offset);
    }
    return out;
  }

  Lexer lexer_;
  Token tok_;
};

bool NeedsQuoting(std::string_view literal) {
  if (literal.empty()) return true;
  return std::any_of(literal.begin(), literal.end(),
                     [](char c) { return IsDelimiter(c) || c == '\\'; });
}

void Print(const SExpr& e, std::string& out) {
  switch (e.kind) {
    case SExprKind::kEntity:
      out += e.symbol;
      return;
    case SExprKind::kJoin:
      out += "(JOIN ";
      if (e.reverse) {
        out += "(R " + e.symbol + ")";
      } else {
        out += e.symbol;
      }
      out.push_back(' ');
      Print(e.args[0], out);
      out.push_back(')');
      return;
    case SExprKind::kAnd:
      out += "(AND ";
      Print(e.args[0], out);
      out.push_back(' ');
      Print(e.args[1], out);
      out.push_back(')');
      return;
    case SExprKind::kCount:
      out += "(COUNT ";
      Print(e.args[0], out);
      out.push_back(')');
      return;
    case SExprKind::kArgMax:
    case SExprKind::kArgMin:
      out += e.kind == SExprKind::kArgMax ? "(ARGMAX " : "(ARGMIN ";
      Print(e.args[0], out);
      out += " " + e.symbol + ")";
      return;
    case SExprKind::kCompare:
      out += "(" + std::string(CompareOpKeyword(e.op)) + " " + e.symbol + " ";
      if (NeedsQuoting(e.literal)) {
        out.push_back('"');
        for (char c : e.literal) {
          if (c == '"' || c == '\\') out.push_back('\\');
          out.push_back(c);
        }
        out.push_back('"');
      } else {
        out += e.literal;
      }
      out.push_back(')');
      return;
  }
}

void AddUnique(std::vector<Primitive>& out, Primitive p) {
  if (std::find(out.begin(), out.end(), p) == out.end()) out.push_back(std::move(p));
}

void Decompose(const SExpr& e, Decomposition& d) {
  switch (e.kind) {
    case SExprKind::kEntity:
      return;
    case SExprKind::kJoin: {
      d.operations.push_back("JOIN");
      if (e.reverse) d.operations.push_back("R");
      const SExpr& sub = e.args[0];
      Direction dir = e.reverse ? Direction::kOut : Direction::kIn;
      if (sub.kind == SExprKind::kEntity) {
        AddUnique(d.primitives, Primitive(FirstHop{sub.symbol, e.symbol, dir}));
      } else if (HopDepth(sub) == 1) {
        AddUnique(d.primitives, Primitive(SecondHop{e.symbol, dir}));
      }
      Decompose(sub, d);
      return;
    }
    case SExprKind::kAnd: {
      d.operations.push_back("AND");
      for (int i = 0; i < 2; ++i) {
        const SExpr& child = e.args[i];
        const SExpr& sibling = e.args[1 - i];
        if (child.kind == SExprKind::kCompare && HopDepth(sibling) == 1) {
          // The comparison reads an attribute of the sibling's members.
          d.operations.push_back(std::string(CompareOpKeyword(child.op)));
          AddUnique(d.primitives, Primitive(SecondHop{child.symbol, Direction::kOut}));
        } else {
          Decompose(child, d);
        }
      }
      return;
    }
    case SExprKind::kCount:
      d.operations.push_back("COUNT");
      Decompose(e.args[0], d);
      return;
    case SExprKind::kArgMax:
    case SExprKind::kArgMin:
      d.operations.push_back(e.kind == SExprKind::kArgMax ? "ARGMAX" : "ARGMIN");
      Decompose(e.args[0], d);
      if (HopDepth(e.args[0]) == 1) {
        AddUnique(d.primitives, Primitive(SecondHop{e.symbol, Direction::kOut}));
      }
      return;
    case SExprKind::kCompare:
      d.operations.push_back(std::string(CompareOpKeyword(e.op)));
      return;
  }
}

using ValueSet = std::set<Object>;

bool Satisfies(CompareOp op, int cmp) {
  switch (op) {
    case CompareOp::kLt: return cmp < 0;
    case CompareOp::kLe: return cmp <= 0;
    case CompareOp::kGt: return cmp > 0;
    case CompareOp::kGe: return cmp >= 0;
  }
  return false;
}

ValueSet Eval(const SExpr& e, const KnowledgeBase& kb) {
  switch (e.kind) {
    case SExprKind::kEntity:
      return {EntityObject(e.symbol)};
    case SExprKind::kJoin: {
      ValueSet sub = Eval(e.args[0], kb);
      ValueSet out;
      for (const Object& member : sub) {
        if (e.reverse) {
          if (!member.is_entity()) continue;
          for (const Edge& edge : kb.OutEdges(member.text)) {
            if (edge.relation == e.symbol) out.insert(edge.other);
          }
        } else {
          std::span<const Edge> edges =
              member.is_entity() ? kb.InEdges(member.text) : kb.LiteralInEdges(member);
          for (const Edge& edge : edges) {
            if (edge.relation == e.symbol) out.insert(edge.other);
          }
        }
      }
      return out;
    }
    case SExprKind::kAnd: {
      ValueSet a = Eval(e.args[0], kb);
      ValueSet b = Eval(e.args[1], kb);
      ValueSet out;
      std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::inserter(out, out.end()));
      return out;
    }
    case SExprKind::kCount:
      throw ExecutionError("COUNT is only allowed at the root");
    case SExprKind::kArgMax:
    case SExprKind::kArgMin: {
      ValueSet sub = Eval(e.args[0], kb);
      const std::string* best = nullptr;
      std::vector<std::pair<const Object*, const std::string*>> scored;
      for (const Object& member : sub) {
        if (!member.is_entity()) continue;
        for (const Edge& edge : kb.OutEdges(member.text)) {
          if (edge.relation != e.symbol || edge.other.is_entity()) continue;
          scored.emplace_back(&member, &edge.other.text);
          if (best == nullptr) {
            best = &edge.other.text;
          } else {
            int cmp = CompareLiteralText(edge.other.text, *best);
            if (e.kind == SExprKind::kArgMax ? cmp > 0 : cmp < 0) best = &edge.other.text;
          }
        }
      }
      ValueSet out;
      for (const auto& [member, value] : scored) {
        if (CompareLiteralText(*value, *best) == 0) out.insert(*member);
      }
      return out;
    }
    case SExprKind::kCompare: {
      ValueSet out;
      for (std::size_t idx : kb.RelationTriples(e.symbol)) {
        const Triple& t = kb.triples()[idx];
        if (t.object.is_entity()) continue;
        if (Satisfies(e.op, CompareLiteralText(t.object.text, e.literal))) {
          out.insert(EntityObject(t.subject));
        }
      }
      return out;
    }
  }
  return {};
}

}  // namespace

std::string_view CompareOpKeyword(CompareOp op) {
  switch (op) {
    case CompareOp::kLt: return "LT";
    case CompareOp::kLe: return "LE";
    case CompareOp::kGt: return "GT";
    case CompareOp::kGe: return "GE";
  }
  return "LT";
}

SExpr SExpr::Entity(std::string id) {
  SExpr e;
  e.kind = SExprKind::kEntity;
  e.symbol = std::move(id);
  return e;
}

SExpr SExpr::Join(std::string relation, SExpr sub, bool reverse) {
  SExpr e;
  e.kind = SExprKind::kJoin;
  e.symbol = std::move(relation);
  e.reverse = reverse;
  e.args.push_back(std::move(sub));
  return e;
}

SExpr SExpr::And(SExpr a, SExpr b) {
  SExpr e;
  e.kind = SExprKind::kAnd;
  e.args.push_back(std::move(a));
  e.args.push_back(std::move(b));
  return e;
}

SExpr SExpr::Count(SExpr sub) {
  SExpr e;
  e.kind = SExprKind::kCount;
  e.args.push_back(std::move(sub));
  return e;
}

SExpr SExpr::ArgMax(SExpr sub, std::string relation) {
  SExpr e;
  e.kind = SExprKind::kArgMax;
  e.symbol = std::move(relation);
  e.args.push_back(std::move(sub));
  return e;
}

SExpr SExpr::ArgMin(SExpr sub, std::string relation) {
  SExpr e = ArgMax(std::move(sub), std::move(relation));
  e.kind = SExprKind::kArgMin;
  return e;
}

SExpr SExpr::Compare(CompareOp op, std::string relation, std::string literal) {
  SExpr e;
  e.kind = SExprKind::kCompare;
  e.op = op;
  e.symbol = std::move(relation);
  e.literal = std::move(literal);
  return e;
}

SExpr ParseSExpr(std::string_view text) { return Parser(text).ParseRoot(); }

std::string PrintSExpr(const SExpr& expr) {
  std::string out;
  Print(expr, out);
  return out;
}

int HopDepth(const SExpr& e) {
  switch (e.kind) {
    case SExprKind::kEntity:
      return 0;
    case SExprKind::kJoin: {
      int d = HopDepth(e.args[0]);
      return d < 0 ? -1 : d + 1;
    }
    case SExprKind::kAnd:
      return std::max(HopDepth(e.args[0]), HopDepth(e.args[1]));
    case SExprKind::kCount:
    case SExprKind::kArgMax:
    case SExprKind::kArgMin:
      return HopDepth(e.args[0]);
    case SExprKind::kCompare:
      return -1;
  }
  return -1;
}

Decomposition DecomposeSExpr(const SExpr& expr) {
  Decomposition d;
  Decompose(expr, d);
  return d;
}

std::vector<std::string> AnswerStrings(const KbAnswer& answer) {
  if (answer.is_count) return {std::to_string(answer.count)};
  std::vector<std::string> out;
  for (const Object& o : answer.values) out.push_back(o.text);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

int CompareLiteralText(std::string_view a, std::string_view b) {
  std::optional<double> na = ParseNumber(a);
  std::optional<double> nb = ParseNumber(b);
  if (na && nb) return *na < *nb ? -1 : (*na > *nb ? 1 : 0);
  if (na || nb) {
    throw ExecutionError("cannot compare '" + std::string(a) + "' with '" + std::string(b) +
                         "': number versus string");
  }
  int c = a.compare(b);
  return c < 0 ? -1 : (c > 0 ? 1 : 0);
}

KbAnswer ExecuteSExpr(const SExpr& expr, const KnowledgeBase& kb) {
  KbAnswer answer;
  if (expr.kind == SExprKind::kCount) {
    answer.is_count = true;
    answer.count = static_cast<std::int64_t>(Eval(expr.args[0], kb).size());
    return answer;
  }
  answer.values = Eval(expr, kb);
  return answer;
}

}  // namespace uniparse
