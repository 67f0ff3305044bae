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

#include "uniparse/sql.h"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>

#include "uniparse/text.h"

namespace uniparse {
namespace {

// ---------------------------------------------------------------------------
// Lexer
// ---------------------------------------------------------------------------

constexpr std::string_view kReserved[] = {
    "SELECT", "FROM",   "WHERE", "GROUP",     "BY",     "HAVING", "ORDER",  "ASC",
    "DESC",   "LIMIT",  "JOIN",  "ON",        "AND",    "OR",     "NOT",    "IN",
    "LIKE",   "IS",     "NULL",  "BETWEEN",   "EXISTS", "UNION",  "INTERSECT", "EXCEPT",
    "AVG",    "COUNT",  "MAX",   "MIN",       "SUM",    "AS",     "DISTINCT", "OVER",
    "CASE",   "WHEN",   "THEN",  "END",       "INNER",  "LEFT",   "RIGHT",  "OUTER",
    "ALL",    "OFFSET", "PARTITION"};

bool IsReserved(std::string_view upper) {
  return std::find(std::begin(kReserved), std::end(kReserved), upper) != std::end(kReserved);
}

bool IsIdentStart(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool IsIdentChar(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '#';
}

struct Token {
  enum Kind { kIdent, kKeyword, kNumber, kString, kSymbol, kEnd } kind = kEnd;
  std::string text;  // keywords uppercased; strings unescaped
  std::size_t offset = 0;
};

std::vector<Token> Lex(std::string_view text) {
  std::vector<Token> tokens;
  std::size_t i = 0;
  while (true) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    Token tok;
    tok.offset = i;
    if (i >= text.size()) {
      tokens.push_back(tok);
      return tokens;
    }
    char c = text[i];
    bool negative_number = c == '-' && i + 1 < text.size() &&
                           std::isdigit(static_cast<unsigned char>(text[i + 1]));
    if (std::isdigit(static_cast<unsigned char>(c)) || negative_number) {
      std::size_t start = i++;
      while (i < text.size() &&
             (std::isdigit(static_cast<unsigned char>(text[i])) || text[i] == '.' ||
              text[i] == 'e' || text[i] == 'E' ||
              ((text[i] == '-' || text[i] == '+') && (text[i - 1] == 'e' || text[i - 1] == 'E')))) {
        ++i;
      }
      tok.kind = Token::kNumber;
      tok.text = std::string(text.substr(start, i - start));
      if (!ParseNumber(tok.text)) throw ParseError("malformed number '" + tok.text + "'", start);
    } else if (IsIdentStart(c)) {
      std::size_t start = i;
      while (i < text.size() && IsIdentChar(text[i])) ++i;
      std::string word(text.substr(start, i - start));
      std::string upper = ToUpper(word);
      if (IsReserved(upper)) {
        tok.kind = Token::kKeyword;
        tok.text = upper;
      } else {
        tok.kind = Token::kIdent;
        tok.text = word;
      }
    } else if (c == '\'' || c == '"') {
      char quote = c;
      ++i;
      tok.kind = Token::kString;
      while (true) {
        if (i >= text.size()) throw ParseError("unterminated string literal", tok.offset);
        if (text[i] == quote) {
          if (i + 1 < text.size() && text[i + 1] == quote) {
            tok.text.push_back(quote);
            i += 2;
            continue;
          }
          ++i;
          break;
        }
        tok.text.push_back(text[i++]);
      }
    } else {
      tok.kind = Token::kSymbol;
      std::string_view two = text.substr(i, 2);
      if (two == "!=" || two == "<>" || two == "<=" || two == ">=") {
        tok.text = two == "<>" ? "!=" : std::string(two);
        i += 2;
      } else if (std::string_view("(),.*=<>;").find(c) != std::string_view::npos) {
        tok.text = std::string(1, c);
        ++i;
      } else {
        throw ParseError(std::string("unexpected character '") + c + "'", i);
      }
    }
    tokens.push_back(std::move(tok));
  }
}

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

class Parser {
 public:
  explicit Parser(std::string_view text) : tokens_(Lex(text)) {}

  SqlQuery ParseStatement() {
    if (Peek().kind == Token::kEnd) throw ParseError("empty SQL text", 0);
    SqlQuery q = ParseQuery();
    if (IsSymbol(";")) Advance();
    ExpectEnd();
    return q;
  }

  Condition ParseSingleCondition() {
    Condition c = ParseCondition();
    ExpectEnd();
    return c;
  }

 private:
  const Token& Peek(std::size_t ahead = 0) const {
    return tokens_[std::min(pos_ + ahead, tokens_.size() - 1)];
  }
  void Advance() {
    if (pos_ + 1 < tokens_.size()) ++pos_;
  }
  bool IsKeyword(std::string_view kw, std::size_t ahead = 0) const {
    return Peek(ahead).kind == Token::kKeyword && Peek(ahead).text == kw;
  }
  bool IsSymbol(std::string_view s, std::size_t ahead = 0) const {
    return Peek(ahead).kind == Token::kSymbol && Peek(ahead).text == s;
  }
  bool AcceptKeyword(std::string_view kw) {
    if (!IsKeyword(kw)) return false;
    Advance();
    return true;
  }
  [[noreturn]] void Fail(const std::string& message) const {
    throw ParseError(message, Peek().offset);
  }
  std::string Describe(const Token& t) const {
    switch (t.kind) {
      case Token::kEnd: return "end of input";
      case Token::kString: return "string '" + t.text + "'";
      default: return "'" + t.text + "'";
    }
  }
  void ExpectKeyword(std::string_view kw) {
    if (!AcceptKeyword(kw)) Fail("expected " + std::string(kw) + ", found " + Describe(Peek()));
  }
  void ExpectSymbol(std::string_view s) {
    if (!IsSymbol(s)) Fail("expected '" + std::string(s) + "', found " + Describe(Peek()));
    Advance();
  }
  void ExpectEnd() {
    if (Peek().kind == Token::kEnd) return;
    RejectUnsupported();
    Fail("unexpected " + Describe(Peek()));
  }

  // Constructs outside the subset get a named error instead of a generic one.
  void RejectUnsupported() const {
    const Token& t = Peek();
    if (t.kind != Token::kKeyword) return;
    static const std::map<std::string, std::string> kNames = {
        {"DISTINCT", "DISTINCT"},       {"OVER", "window functions (OVER)"},
        {"PARTITION", "window functions (PARTITION BY)"},
        {"AS", "aliases (AS)"},         {"CASE", "CASE expressions"},
        {"INNER", "explicit join kinds"}, {"LEFT", "outer joins"},
        {"RIGHT", "outer joins"},       {"OUTER", "outer joins"},
        {"ALL", "set operations with ALL"}, {"OFFSET", "OFFSET"}};
    auto it = kNames.find(t.text);
    if (it != kNames.end()) throw ParseError("unsupported construct: " + it->second, t.offset);
  }

  std::string ParseIdentifier(std::string_view what) {
    RejectUnsupported();
    if (Peek().kind != Token::kIdent)
      Fail("expected " + std::string(what) + ", found " + Describe(Peek()));
    std::string id = Peek().text;
    Advance();
    return id;
  }

  ColumnRef ParseColumnRef() {
    if (IsSymbol("(")) {
      if (IsKeyword("SELECT", 1)) Fail("unsupported construct: subquery outside IN/EXISTS");
    }
    ColumnRef ref;
    ref.table = ParseIdentifier("table name");
    if (!IsSymbol(".")) Fail("column references must be qualified as table.column");
    Advance();
    ref.column = ParseIdentifier("column name");
    return ref;
  }

  std::optional<Aggregate> PeekAggregate() const {
    if (Peek().kind != Token::kKeyword || !IsSymbol("(", 1)) return std::nullopt;
    const std::string& t = Peek().text;
    if (t == "AVG") return Aggregate::kAvg;
    if (t == "COUNT") return Aggregate::kCount;
    if (t == "MAX") return Aggregate::kMax;
    if (t == "MIN") return Aggregate::kMin;
    if (t == "SUM") return Aggregate::kSum;
    return std::nullopt;
  }

  // [AGG(] column | * [)]
  std::pair<Aggregate, ColumnRef> ParseAggregatedColumn(bool allow_bare_star) {
    if (std::optional<Aggregate> agg = PeekAggregate()) {
      Advance();
      Advance();
      if (IsKeyword("DISTINCT")) RejectUnsupported();
      ColumnRef col;
      if (IsSymbol("*")) {
        if (*agg != Aggregate::kCount) Fail("only COUNT accepts *");
        Advance();
        col = ColumnRef::Star();
      } else {
        col = ParseColumnRef();
      }
      ExpectSymbol(")");
      if (IsKeyword("OVER")) RejectUnsupported();
      return {*agg, col};
    }
    if (IsSymbol("*")) {
      if (!allow_bare_star) Fail("unexpected '*'");
      Advance();
      return {Aggregate::kNone, ColumnRef::Star()};
    }
    return {Aggregate::kNone, ParseColumnRef()};
  }

  Value ParseLiteral() {
    const Token& t = Peek();
    Value v;
    if (t.kind == Token::kNumber) {
      v = *ParseNumber(t.text);
    } else if (t.kind == Token::kString) {
      v = t.text;
    } else if (t.kind == Token::kKeyword && t.text == "NULL") {
      v = std::monostate{};
    } else if (IsSymbol("(") && IsKeyword("SELECT", 1)) {
      Fail("unsupported construct: subquery outside IN/EXISTS");
    } else {
      Fail("expected literal, found " + Describe(t));
    }
    Advance();
    return v;
  }

  Box<SqlQuery> ParseSubquery() {
    ExpectSymbol("(");
    if (!IsKeyword("SELECT")) Fail("expected SELECT in subquery");
    SqlQuery q = ParseQuery();
    ExpectSymbol(")");
    return Box<SqlQuery>(std::move(q));
  }

  Condition ParseCondition() {
    Condition c;
    if (AcceptKeyword("EXISTS")) {
      c.op = CondOp::kExists;
      c.subquery = ParseSubquery();
      return c;
    }
    c.column = ParseColumnRef();
    const Token& t = Peek();
    if (t.kind == Token::kSymbol) {
      static const std::map<std::string, CondOp> kOps = {
          {"=", CondOp::kEq}, {"!=", CondOp::kNe}, {"<", CondOp::kLt},
          {">", CondOp::kGt}, {"<=", CondOp::kLe}, {">=", CondOp::kGe}};
      auto it = kOps.find(t.text);
      if (it == kOps.end()) Fail("expected conditional operator, found " + Describe(t));
      c.op = it->second;
      Advance();
      c.operands.push_back(ParseLiteral());
      return c;
    }
    bool negated = AcceptKeyword("NOT");
    if (AcceptKeyword("BETWEEN")) {
      c.op = negated ? CondOp::kNotBetween : CondOp::kBetween;
      c.operands.push_back(ParseLiteral());
      ExpectKeyword("AND");
      c.operands.push_back(ParseLiteral());
      return c;
    }
    if (AcceptKeyword("IN")) {
      c.op = negated ? CondOp::kNotIn : CondOp::kIn;
      if (IsSymbol("(") && IsKeyword("SELECT", 1)) {
        c.subquery = ParseSubquery();
        return c;
      }
      ExpectSymbol("(");
      c.operands.push_back(ParseLiteral());
      while (IsSymbol(",")) {
        Advance();
        c.operands.push_back(ParseLiteral());
      }
      ExpectSymbol(")");
      return c;
    }
    if (AcceptKeyword("LIKE")) {
      c.op = negated ? CondOp::kNotLike : CondOp::kLike;
      c.operands.push_back(ParseLiteral());
      if (!IsText(c.operands.back())) Fail("LIKE requires a string pattern");
      return c;
    }
    if (negated) Fail("expected BETWEEN, IN or LIKE after NOT");
    if (AcceptKeyword("IS")) {
      c.op = AcceptKeyword("NOT") ? CondOp::kIsNot : CondOp::kIs;
      ExpectKeyword("NULL");
      c.operands.push_back(std::monostate{});
      return c;
    }
    RejectUnsupported();
    Fail("expected conditional operator, found " + Describe(t));
  }

  BoolExpr ParsePrimaryBool() {
    if (IsSymbol("(") && !IsKeyword("SELECT", 1)) {
      Advance();
      BoolExpr e = ParseOr();
      ExpectSymbol(")");
      return e;
    }
    return BoolExpr::Leaf(ParseCondition());
  }

  BoolExpr ParseAnd() {
    BoolExpr e = ParsePrimaryBool();
    while (AcceptKeyword("AND")) e = BoolExpr::And(std::move(e), ParsePrimaryBool());
    return e;
  }

  BoolExpr ParseOr() {
    BoolExpr e = ParseAnd();
    while (AcceptKeyword("OR")) e = BoolExpr::Or(std::move(e), ParseAnd());
    return e;
  }

  CondOp ParseComparisonOp() {
    static const std::map<std::string, CondOp> kOps = {
        {"=", CondOp::kEq}, {"!=", CondOp::kNe}, {"<", CondOp::kLt},
        {">", CondOp::kGt}, {"<=", CondOp::kLe}, {">=", CondOp::kGe}};
    if (Peek().kind == Token::kSymbol) {
      auto it = kOps.find(Peek().text);
      if (it != kOps.end()) {
        Advance();
        return it->second;
      }
    }
    Fail("unsupported construct: HAVING beyond aggregate comparison");
  }

  SqlQuery ParseQuery() {
    SqlQuery q;
    ExpectKeyword("SELECT");
    if (IsKeyword("DISTINCT")) RejectUnsupported();
    do {
      if (!q.select.empty()) Advance();
      auto [agg, col] = ParseAggregatedColumn(/*allow_bare_star=*/true);
      q.select.push_back(SelectItem{agg, col});
    } while (IsSymbol(","));

    ExpectKeyword("FROM");
    if (IsSymbol("(")) Fail("unsupported construct: subquery outside IN/EXISTS");
    q.from = ParseIdentifier("table name");
    if (IsSymbol(",")) Fail("unsupported construct: comma joins (use JOIN ... ON)");
    while (true) {
      RejectUnsupported();
      if (!AcceptKeyword("JOIN")) break;
      JoinClause j;
      j.table = ParseIdentifier("table name");
      ExpectKeyword("ON");
      j.left = ParseColumnRef();
      ExpectSymbol("=");
      j.right = ParseColumnRef();
      q.joins.push_back(std::move(j));
    }

    if (AcceptKeyword("WHERE")) q.where = ParseOr();

    if (AcceptKeyword("GROUP")) {
      ExpectKeyword("BY");
      q.group_by.push_back(ParseColumnRef());
      while (IsSymbol(",")) {
        Advance();
        q.group_by.push_back(ParseColumnRef());
      }
    }
    if (AcceptKeyword("HAVING")) {
      if (!PeekAggregate()) Fail("unsupported construct: HAVING beyond aggregate comparison");
      Having h;
      std::tie(h.agg, h.column) = ParseAggregatedColumn(false);
      h.op = ParseComparisonOp();
      h.value = ParseLiteral();
      if (IsKeyword("AND") || IsKeyword("OR")) {
        Fail("unsupported construct: HAVING beyond aggregate comparison");
      }
      q.having = std::move(h);
    }
    if (AcceptKeyword("ORDER")) {
      ExpectKeyword("BY");
      OrderBy o;
      std::tie(o.agg, o.column) = ParseAggregatedColumn(false);
      if (AcceptKeyword("DESC")) {
        o.descending = true;
      } else {
        AcceptKeyword("ASC");
      }
      if (IsSymbol(",")) Fail("unsupported construct: multiple ORDER BY keys");
      q.order_by = std::move(o);
    }
    if (AcceptKeyword("LIMIT")) {
      const Token& t = Peek();
      std::optional<double> n = t.kind == Token::kNumber ? ParseNumber(t.text) : std::nullopt;
      if (!n || *n < 0 || *n != static_cast<double>(static_cast<std::int64_t>(*n))) {
        Fail("LIMIT expects a non-negative integer");
      }
      q.limit = static_cast<std::int64_t>(*n);
      Advance();
    }
    if (AcceptKeyword("UNION")) {
      q.set_op = SetOp::kUnion;
    } else if (AcceptKeyword("INTERSECT")) {
      q.set_op = SetOp::kIntersect;
    } else if (AcceptKeyword("EXCEPT")) {
      q.set_op = SetOp::kExcept;
    }
    if (q.set_op != SetOp::kNone) {
      RejectUnsupported();
      q.set_rhs = Box<SqlQuery>(ParseQuery());
    }
    return q;
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

// ---------------------------------------------------------------------------
// Printer
// ---------------------------------------------------------------------------

std::string PrintAggregated(Aggregate agg, const ColumnRef& col) {
  if (agg == Aggregate::kNone) return PrintColumnRef(col);
  return std::string(AggregateKeyword(agg)) + "(" + PrintColumnRef(col) + ")";
}

void PrintBool(const BoolExpr& e, std::string& out) {
  if (e.kind == BoolExpr::Kind::kLeaf) {
    out += PrintCondition(e.leaf);
    return;
  }
  for (std::size_t i = 0; i < 2; ++i) {
    const BoolExpr& child = e.children[i];
    bool parens = (child.kind == BoolExpr::Kind::kOr && e.kind == BoolExpr::Kind::kAnd) ||
                  (i == 1 && child.kind == e.kind);
    if (i == 1) out += e.kind == BoolExpr::Kind::kAnd ? " AND " : " OR ";
    if (parens) out.push_back('(');
    PrintBool(child, out);
    if (parens) out.push_back(')');
  }
}

// ---------------------------------------------------------------------------
// Decomposition
// ---------------------------------------------------------------------------

void AddUnique(std::vector<Primitive>& out, Primitive p) {
  if (std::find(out.begin(), out.end(), p) == out.end()) out.push_back(std::move(p));
}

void AddColumn(Decomposition& d, const ColumnRef& ref) {
  if (!ref.is_star()) AddUnique(d.primitives, Primitive(TbCl{ref.table, ref.column}));
}

void DecomposeQuery(const SqlQuery& q, Decomposition& d);

void DecomposeBool(const BoolExpr& e, Decomposition& d) {
  if (e.kind != BoolExpr::Kind::kLeaf) {
    d.operations.push_back(e.kind == BoolExpr::Kind::kAnd ? "AND" : "OR");
    DecomposeBool(e.children[0], d);
    DecomposeBool(e.children[1], d);
    return;
  }
  const Condition& c = e.leaf;
  if (c.subquery) {
    if (c.op == CondOp::kExists) {
      d.operations.push_back("EXISTS");
    } else {
      d.operations.push_back(std::string(CondOpKeyword(c.op)));
      AddColumn(d, c.column);
    }
    DecomposeQuery(*c.subquery, d);
    return;
  }
  AddUnique(d.primitives, Primitive(TbClVl{c.column.table, c.column.column,
                                           std::string(CondOpKeyword(c.op)),
                                           ConditionValueText(c)}));
}

void DecomposeQuery(const SqlQuery& q, Decomposition& d) {
  d.operations.push_back("SELECT");
  for (const SelectItem& item : q.select) {
    if (item.agg != Aggregate::kNone)
      d.operations.push_back(std::string(AggregateKeyword(item.agg)));
    AddColumn(d, item.column);
  }
  for (const JoinClause& j : q.joins) {
    d.operations.push_back("JOIN");
    AddColumn(d, j.left);
    AddColumn(d, j.right);
  }
  if (q.where) {
    d.operations.push_back("WHERE");
    DecomposeBool(*q.where, d);
  }
  if (!q.group_by.empty()) {
    d.operations.push_back("GROUP BY");
    for (const ColumnRef& c : q.group_by) AddColumn(d, c);
  }
  if (q.having) {
    d.operations.push_back("HAVING");
    d.operations.push_back(std::string(AggregateKeyword(q.having->agg)));
    AddColumn(d, q.having->column);
  }
  if (q.order_by) {
    d.operations.push_back("ORDER BY");
    if (q.order_by->agg != Aggregate::kNone) {
      d.operations.push_back(std::string(AggregateKeyword(q.order_by->agg)));
    }
    AddColumn(d, q.order_by->column);
  }
  if (q.limit) d.operations.push_back("LIMIT");
  if (q.set_op != SetOp::kNone) {
    d.operations.push_back(std::string(SetOpKeyword(q.set_op)));
    DecomposeQuery(*q.set_rhs, d);
  }
}

void CollectRefs(const SqlQuery& q, std::vector<ColumnRef>& out);

void CollectBoolRefs(const BoolExpr& e, std::vector<ColumnRef>& out) {
  if (e.kind != BoolExpr::Kind::kLeaf) {
    for (const BoolExpr& c : e.children) CollectBoolRefs(c, out);
    return;
  }
  if (e.leaf.op != CondOp::kExists) out.push_back(e.leaf.column);
  if (e.leaf.subquery) CollectRefs(*e.leaf.subquery, out);
}

void CollectRefs(const SqlQuery& q, std::vector<ColumnRef>& out) {
  for (const SelectItem& s : q.select) out.push_back(s.column);
  for (const JoinClause& j : q.joins) {
    out.push_back(j.left);
    out.push_back(j.right);
  }
  if (q.where) CollectBoolRefs(*q.where, out);
  for (const ColumnRef& c : q.group_by) out.push_back(c);
  if (q.having) out.push_back(q.having->column);
  if (q.order_by) out.push_back(q.order_by->column);
  if (q.set_rhs) CollectRefs(*q.set_rhs, out);
}

// ---------------------------------------------------------------------------
// Executor
// ---------------------------------------------------------------------------

// Column position inside a joined row: which scope table, which column.
struct Slot {
  std::size_t table = 0;
  std::size_t column = 0;
  ColumnType type = ColumnType::kText;
};

using JoinedRow = std::vector<const Row*>;

int CompareValues(const Value& a, const Value& b) {
  if (a.index() != b.index()) return a.index() < b.index() ? -1 : 1;
  if (IsNumber(a)) {
    double x = std::get<double>(a), y = std::get<double>(b);
    return x < y ? -1 : (x > y ? 1 : 0);
  }
  if (IsText(a)) {
    int c = std::get<std::string>(a).compare(std::get<std::string>(b));
    return c < 0 ? -1 : (c > 0 ? 1 : 0);
  }
  return 0;
}

class Executor {
 public:
  explicit Executor(const Database& db) : db_(db) {}

  ResultTable Run(const SqlQuery& q) {
    ResultTable left = RunSingle(q);
    if (q.set_op == SetOp::kNone) return left;
    ResultTable right = Run(*q.set_rhs);
    if (!left.empty() && !right.empty() && left.front().size() != right.front().size()) {
      throw ExecutionError("set operation over results with different column counts");
    }
    std::set<Row, RowLess> a(left.begin(), left.end());
    std::set<Row, RowLess> b(right.begin(), right.end());
    ResultTable out;
    switch (q.set_op) {
      case SetOp::kUnion:
        std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out), RowLess{});
        break;
      case SetOp::kIntersect:
        std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out),
                              RowLess{});
        break;
      case SetOp::kExcept:
        std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out),
                            RowLess{});
        break;
      case SetOp::kNone:
        break;
    }
    return out;
  }

 private:
  struct RowLess {
    bool operator()(const Row& a, const Row& b) const {
      for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) {
        int c = CompareValues(a[i], b[i]);
        if (c != 0) return c < 0;
      }
      return a.size() < b.size();
    }
  };

  struct Scope {
    std::vector<const Table*> tables;

    Slot Resolve(const ColumnRef& ref) const {
      for (std::size_t t = 0; t < tables.size(); ++t) {
        if (tables[t]->name != ref.table) continue;
        int c = tables[t]->ColumnIndex(ref.column);
        if (c < 0) {
          throw ExecutionError("unknown column " + ref.table + "." + ref.column);
        }
        return Slot{t, static_cast<std::size_t>(c), tables[t]->columns[c].type};
      }
      throw ExecutionError("table " + ref.table + " is not in the FROM clause");
    }
  };

  const Table& FindTable(const std::string& name) const {
    const Table* t = db_.FindTable(name);
    if (t == nullptr) throw ExecutionError("unknown table " + name);
    return *t;
  }

  static const Value& Get(const JoinedRow& row, const Slot& s) { return (*row[s.table])[s.column]; }

  // Static checks so that errors do not depend on which rows exist.
  void CheckOperandTypes(const Condition& c, const Slot& slot) const {
    for (const Value& v : c.operands) {
      if (IsNull(v)) continue;
      bool ok = slot.type == ColumnType::kNumber ? IsNumber(v) : IsText(v);
      if (!ok) {
        throw ExecutionError("type mismatch: " + PrintColumnRef(c.column) + " is " +
                             std::string(ColumnTypeName(slot.type)) + " but operand is " +
                             ValueToSqlLiteral(v));
      }
    }
    if ((c.op == CondOp::kLike || c.op == CondOp::kNotLike) && slot.type != ColumnType::kText) {
      throw ExecutionError("LIKE on number column " + PrintColumnRef(c.column));
    }
  }

  void CheckAggregate(Aggregate agg, const ColumnRef& col, const Scope& scope) const {
    if (col.is_star()) return;
    Slot s = scope.Resolve(col);
    if ((agg == Aggregate::kAvg || agg == Aggregate::kSum) && s.type != ColumnType::kNumber) {
      throw ExecutionError(std::string(AggregateKeyword(agg)) + " on text column " +
                           PrintColumnRef(col));
    }
  }

  const ResultTable& SubqueryResult(const SqlQuery& sub) {
    auto it = subquery_cache_.find(&sub);
    if (it != subquery_cache_.end()) return it->second;
    ResultTable r = Run(sub);
    return subquery_cache_.emplace(&sub, std::move(r)).first->second;
  }

  void CheckBool(const BoolExpr& e, const Scope& scope) {
    if (e.kind != BoolExpr::Kind::kLeaf) {
      for (const BoolExpr& c : e.children) CheckBool(c, scope);
      return;
    }
    const Condition& c = e.leaf;
    if (c.op == CondOp::kExists) {
      SubqueryResult(*c.subquery);
      return;
    }
    Slot slot = scope.Resolve(c.column);
    CheckOperandTypes(c, slot);
    if (c.subquery) {
      const ResultTable& r = SubqueryResult(*c.subquery);
      if (!c.subquery->select.empty() && c.subquery->select.size() != 1) {
        throw ExecutionError("IN subquery must select exactly one column");
      }
      for (const Row& row : r) {
        if (row.size() != 1) throw ExecutionError("IN subquery must select exactly one column");
      }
    }
  }

  bool EvalCondition(const Condition& c, const JoinedRow& row, const Scope& scope) {
    if (c.op == CondOp::kExists) return !SubqueryResult(*c.subquery).empty();
    const Value& v = Get(row, scope.Resolve(c.column));
    switch (c.op) {
      case CondOp::kIs: return IsNull(v);
      case CondOp::kIsNot: return !IsNull(v);
      default: break;
    }
    if (IsNull(v)) return false;
    auto cmp = [&](const Value& operand) { return CompareValues(v, operand); };
    switch (c.op) {
      case CondOp::kEq: return !IsNull(c.operands[0]) && cmp(c.operands[0]) == 0;
      case CondOp::kNe: return !IsNull(c.operands[0]) && cmp(c.operands[0]) != 0;
      case CondOp::kLt: return !IsNull(c.operands[0]) && cmp(c.operands[0]) < 0;
      case CondOp::kGt: return !IsNull(c.operands[0]) && cmp(c.operands[0]) > 0;
      case CondOp::kLe: return !IsNull(c.operands[0]) && cmp(c.operands[0]) <= 0;
      case CondOp::kGe: return !IsNull(c.operands[0]) && cmp(c.operands[0]) >= 0;
      case CondOp::kBetween:
      case CondOp::kNotBetween: {
        if (IsNull(c.operands[0]) || IsNull(c.operands[1])) return false;
        bool inside = cmp(c.operands[0]) >= 0 && cmp(c.operands[1]) <= 0;
        return c.op == CondOp::kBetween ? inside : !inside;
      }
      case CondOp::kIn:
      case CondOp::kNotIn: {
        bool found = false;
        if (c.subquery) {
          for (const Row& r : SubqueryResult(*c.subquery)) {
            if (!IsNull(r[0]) && CompareValues(v, r[0]) == 0) found = true;
          }
        } else {
          for (const Value& operand : c.operands) {
            if (!IsNull(operand) && cmp(operand) == 0) found = true;
          }
        }
        return c.op == CondOp::kIn ? found : !found;
      }
      case CondOp::kLike:
      case CondOp::kNotLike: {
        bool m = LikeMatch(std::get<std::string>(v), std::get<std::string>(c.operands[0]));
        return c.op == CondOp::kLike ? m : !m;
      }
      default:
        return false;
    }
  }

  bool EvalBool(const BoolExpr& e, const JoinedRow& row, const Scope& scope) {
    switch (e.kind) {
      case BoolExpr::Kind::kLeaf: return EvalCondition(e.leaf, row, scope);
      case BoolExpr::Kind::kAnd:
        return EvalBool(e.children[0], row, scope) && EvalBool(e.children[1], row, scope);
      case BoolExpr::Kind::kOr:
        return EvalBool(e.children[0], row, scope) || EvalBool(e.children[1], row, scope);
    }
    return false;
  }

  static Value Aggregate_(Aggregate agg, const ColumnRef& col,
                          const std::vector<const JoinedRow*>& rows, const Scope& scope) {
    if (agg == Aggregate::kCount && col.is_star()) return static_cast<double>(rows.size());
    Slot s = scope.Resolve(col);
    std::vector<const Value*> values;
    for (const JoinedRow* r : rows) {
      const Value& v = Get(*r, s);
      if (!IsNull(v)) values.push_back(&v);
    }
    switch (agg) {
      case Aggregate::kCount:
        return static_cast<double>(values.size());
      case Aggregate::kSum:
      case Aggregate::kAvg: {
        if (values.empty()) return std::monostate{};
        double sum = 0.0;
        for (const Value* v : values) sum += std::get<double>(*v);
        return agg == Aggregate::kSum ? sum : sum / static_cast<double>(values.size());
      }
      case Aggregate::kMax:
      case Aggregate::kMin: {
        if (values.empty()) return std::monostate{};
        const Value* best = values[0];
        for (const Value* v : values) {
          int c = CompareValues(*v, *best);
          if (agg == Aggregate::kMax ? c > 0 : c < 0) best = v;
        }
        return *best;
      }
      case Aggregate::kNone:
        break;
    }
    return std::monostate{};
  }

  static void AppendStar(const JoinedRow* row, const Scope& scope, Row& out) {
    for (std::size_t t = 0; t < scope.tables.size(); ++t) {
      for (std::size_t c = 0; c < scope.tables[t]->columns.size(); ++c) {
        out.push_back(row ? (*(*row)[t])[c] : Value{});
      }
    }
  }

  ResultTable RunSingle(const SqlQuery& q) {
    Scope scope;
    scope.tables.push_back(&FindTable(q.from));
    std::vector<JoinedRow> rows;
    for (const Row& r : scope.tables[0]->rows) rows.push_back({&r});

    for (const JoinClause& j : q.joins) {
      const Table& t = FindTable(j.table);
      for (const Table* existing : scope.tables) {
        if (existing->name == t.name) throw ExecutionError("table " + t.name + " joined twice");
      }
      scope.tables.push_back(&t);
      Slot left = scope.Resolve(j.left);
      Slot right = scope.Resolve(j.right);
      if (left.type != right.type) throw ExecutionError("join columns have different types");
      std::vector<JoinedRow> next;
      for (const JoinedRow& base : rows) {
        for (const Row& r : t.rows) {
          JoinedRow joined = base;
          joined.push_back(&r);
          const Value& a = Get(joined, left);
          const Value& b = Get(joined, right);
          if (!IsNull(a) && !IsNull(b) && CompareValues(a, b) == 0)
            next.push_back(std::move(joined));
        }
      }
      rows = std::move(next);
    }

    for (const SelectItem& item : q.select) {
      if (item.agg == Aggregate::kNone && item.column.is_star()) continue;
      if (item.agg != Aggregate::kNone) {
        CheckAggregate(item.agg, item.column, scope);
      } else {
        scope.Resolve(item.column);
      }
    }
    for (const ColumnRef& g : q.group_by) scope.Resolve(g);
    if (q.having) {
      CheckAggregate(q.having->agg, q.having->column, scope);
      if (!IsNull(q.having->value) && !IsNumber(q.having->value) &&
          (q.having->agg == Aggregate::kCount || q.having->agg == Aggregate::kSum ||
           q.having->agg == Aggregate::kAvg)) {
        throw ExecutionError("HAVING compares a numeric aggregate with text");
      }
    }
    if (q.order_by) {
      if (q.order_by->agg != Aggregate::kNone) {
        CheckAggregate(q.order_by->agg, q.order_by->column, scope);
      } else {
        scope.Resolve(q.order_by->column);
      }
    }
    if (q.where) CheckBool(*q.where, scope);

    std::vector<JoinedRow> filtered;
    for (JoinedRow& r : rows) {
      if (!q.where || EvalBool(*q.where, r, scope)) filtered.push_back(std::move(r));
    }

    bool grouped = !q.group_by.empty() || q.having ||
                   (q.order_by && q.order_by->agg != Aggregate::kNone) ||
                   std::any_of(q.select.begin(), q.select.end(),
                               [](const SelectItem& s) { return s.agg != Aggregate::kNone; });

    // Each output unit is a group of joined rows; ungrouped queries use
    // singleton groups.
    std::vector<std::vector<const JoinedRow*>> groups;
    if (!grouped) {
      for (const JoinedRow& r : filtered) groups.push_back({&r});
    } else if (q.group_by.empty()) {
      groups.emplace_back();
      for (const JoinedRow& r : filtered) groups.back().push_back(&r);
    } else {
      std::vector<Slot> key_slots;
      for (const ColumnRef& g : q.group_by) key_slots.push_back(scope.Resolve(g));
      std::map<Row, std::size_t, RowLess> index;
      for (const JoinedRow& r : filtered) {
        Row key;
        for (const Slot& s : key_slots) key.push_back(Get(r, s));
        auto [it, inserted] = index.emplace(std::move(key), groups.size());
        if (inserted) groups.emplace_back();
        groups[it->second].push_back(&r);
      }
    }

    if (q.having) {
      std::vector<std::vector<const JoinedRow*>> kept;
      for (auto& g : groups) {
        Value v = Aggregate_(q.having->agg, q.having->column, g, scope);
        if (IsNull(v) || IsNull(q.having->value)) continue;
        int c = CompareValues(v, q.having->value);
        bool ok = false;
        switch (q.having->op) {
          case CondOp::kEq: ok = c == 0; break;
          case CondOp::kNe: ok = c != 0; break;
          case CondOp::kLt: ok = c < 0; break;
          case CondOp::kGt: ok = c > 0; break;
          case CondOp::kLe: ok = c <= 0; break;
          case CondOp::kGe: ok = c >= 0; break;
          default: break;
        }
        if (ok) kept.push_back(std::move(g));
      }
      groups = std::move(kept);
    }

    if (q.order_by) {
      const OrderBy& o = *q.order_by;
      std::vector<std::pair<Value, std::size_t>> keys;
      for (std::size_t i = 0; i < groups.size(); ++i) {
        Value key;
        if (o.agg != Aggregate::kNone) {
          key = Aggregate_(o.agg, o.column, groups[i], scope);
        } else if (!groups[i].empty()) {
          key = Get(*groups[i].front(), scope.Resolve(o.column));
        }
        keys.emplace_back(std::move(key), i);
      }
      // Nulls sort last ascending and first descending, i.e. nulls compare
      // greater than every value.
      std::stable_sort(keys.begin(), keys.end(), [&](const auto& a, const auto& b) {
        bool an = IsNull(a.first), bn = IsNull(b.first);
        if (an || bn) return o.descending ? (an && !bn) : (!an && bn);
        int c = CompareValues(a.first, b.first);
        return o.descending ? c > 0 : c < 0;
      });
      std::vector<std::vector<const JoinedRow*>> sorted;
      for (const auto& k : keys) sorted.push_back(std::move(groups[k.second]));
      groups = std::move(sorted);
    }

    if (q.limit && groups.size() > static_cast<std::size_t>(*q.limit)) {
      groups.resize(static_cast<std::size_t>(*q.limit));
    }

    ResultTable out;
    for (const auto& g : groups) {
      Row row;
      const JoinedRow* first = g.empty() ? nullptr : g.front();
      for (const SelectItem& item : q.select) {
        if (item.agg != Aggregate::kNone) {
          row.push_back(Aggregate_(item.agg, item.column, g, scope));
        } else if (item.column.is_star()) {
          AppendStar(first, scope, row);
        } else {
          row.push_back(first ? Get(*first, scope.Resolve(item.column)) : Value{});
        }
      }
      out.push_back(std::move(row));
    }
    return out;
  }

  const Database& db_;
  std::map<const SqlQuery*, ResultTable> subquery_cache_;
};

bool LikeImpl(std::string_view t, std::string_view p) {
  // dp[j]: pattern prefix of length j matches current text prefix.
  std::vector<char> dp(p.size() + 1, 0), next(p.size() + 1, 0);
  dp[0] = 1;
  for (std::size_t j = 1; j <= p.size(); ++j) dp[j] = dp[j - 1] && p[j - 1] == '%';
  for (std::size_t i = 1; i <= t.size(); ++i) {
    next[0] = 0;
    for (std::size_t j = 1; j <= p.size(); ++j) {
      char pc = p[j - 1];
      if (pc == '%') {
        next[j] = next[j - 1] || dp[j];
      } else {
        next[j] = dp[j - 1] && (pc == '_' || pc == t[i - 1]);
      }
    }
    std::swap(dp, next);
  }
  return dp[p.size()] != 0;
}

}  // namespace

std::string_view AggregateKeyword(Aggregate agg) {
  switch (agg) {
    case Aggregate::kNone: return "";
    case Aggregate::kAvg: return "AVG";
    case Aggregate::kCount: return "COUNT";
    case Aggregate::kMax: return "MAX";
    case Aggregate::kMin: return "MIN";
    case Aggregate::kSum: return "SUM";
  }
  return "";
}

std::string_view CondOpKeyword(CondOp op) {
  switch (op) {
    case CondOp::kEq: return "=";
    case CondOp::kNe: return "!=";
    case CondOp::kLt: return "<";
    case CondOp::kGt: return ">";
    case CondOp::kLe: return "<=";
    case CondOp::kGe: return ">=";
    case CondOp::kBetween: return "BETWEEN";
    case CondOp::kNotBetween: return "NOT BETWEEN";
    case CondOp::kIn: return "IN";
    case CondOp::kNotIn: return "NOT IN";
    case CondOp::kLike: return "LIKE";
    case CondOp::kNotLike: return "NOT LIKE";
    case CondOp::kIs: return "IS";
    case CondOp::kIsNot: return "IS NOT";
    case CondOp::kExists: return "EXISTS";
  }
  return "";
}

std::string_view SetOpKeyword(SetOp op) {
  switch (op) {
    case SetOp::kNone: return "";
    case SetOp::kUnion: return "UNION";
    case SetOp::kIntersect: return "INTERSECT";
    case SetOp::kExcept: return "EXCEPT";
  }
  return "";
}

std::string PrintColumnRef(const ColumnRef& ref) {
  if (ref.is_star()) return "*";
  return ref.table + "." + ref.column;
}

BoolExpr BoolExpr::Leaf(Condition c) {
  BoolExpr e;
  e.leaf = std::move(c);
  return e;
}

BoolExpr BoolExpr::And(BoolExpr a, BoolExpr b) {
  BoolExpr e;
  e.kind = Kind::kAnd;
  e.children.push_back(std::move(a));
  e.children.push_back(std::move(b));
  return e;
}

BoolExpr BoolExpr::Or(BoolExpr a, BoolExpr b) {
  BoolExpr e = And(std::move(a), std::move(b));
  e.kind = Kind::kOr;
  return e;
}

SqlQuery ParseSql(std::string_view text) { return Parser(text).ParseStatement(); }

Condition ParseSqlCondition(std::string_view text) { return Parser(text).ParseSingleCondition(); }

std::string ConditionValueText(const Condition& c) {
  switch (c.op) {
    case CondOp::kBetween:
    case CondOp::kNotBetween:
      return ValueToSqlLiteral(c.operands[0]) + " AND " + ValueToSqlLiteral(c.operands[1]);
    case CondOp::kIn:
    case CondOp::kNotIn: {
      if (c.subquery) return "(" + PrintSql(*c.subquery) + ")";
      std::string out = "(";
      for (std::size_t i = 0; i < c.operands.size(); ++i) {
        if (i > 0) out += ", ";
        out += ValueToSqlLiteral(c.operands[i]);
      }
      return out + ")";
    }
    case CondOp::kExists:
      return "(" + PrintSql(*c.subquery) + ")";
    default:
      return c.operands.empty() ? std::string() : ValueToSqlLiteral(c.operands[0]);
  }
}

std::string PrintCondition(const Condition& c) {
  if (c.op == CondOp::kExists) return "EXISTS " + ConditionValueText(c);
  return PrintColumnRef(c.column) + " " + std::string(CondOpKeyword(c.op)) + " " +
         ConditionValueText(c);
}

std::string PrintBoolExpr(const BoolExpr& expr) {
  std::string out;
  PrintBool(expr, out);
  return out;
}

std::string PrintSql(const SqlQuery& q) {
  std::string out = "SELECT ";
  for (std::size_t i = 0; i < q.select.size(); ++i) {
    if (i > 0) out += ", ";
    out += PrintAggregated(q.select[i].agg, q.select[i].column);
  }
  out += " FROM " + q.from;
  for (const JoinClause& j : q.joins) {
    out += " JOIN " + j.table + " ON " + PrintColumnRef(j.left) + " = " + PrintColumnRef(j.right);
  }
  if (q.where) out += " WHERE " + PrintBoolExpr(*q.where);
  if (!q.group_by.empty()) {
    out += " GROUP BY ";
    for (std::size_t i = 0; i < q.group_by.size(); ++i) {
      if (i > 0) out += ", ";
      out += PrintColumnRef(q.group_by[i]);
    }
  }
  if (q.having) {
    out += " HAVING " + PrintAggregated(q.having->agg, q.having->column) + " " +
           std::string(CondOpKeyword(q.having->op)) + " " + ValueToSqlLiteral(q.having->value);
  }
  if (q.order_by) {
    out += " ORDER BY " + PrintAggregated(q.order_by->agg, q.order_by->column) +
           (q.order_by->descending ? " DESC" : " ASC");
  }
  if (q.limit) out += " LIMIT " + std::to_string(*q.limit);
  if (q.set_op != SetOp::kNone) {
    out += " " + std::string(SetOpKeyword(q.set_op)) + " " + PrintSql(*q.set_rhs);
  }
  return out;
}

Decomposition DecomposeSql(const SqlQuery& query) {
  Decomposition d;
  DecomposeQuery(query, d);
  return d;
}

std::vector<ColumnRef> CollectColumnRefs(const SqlQuery& query) {
  std::vector<ColumnRef> refs;
  CollectRefs(query, refs);
  std::vector<ColumnRef> out;
  for (ColumnRef& r : refs) {
    if (r.is_star()) continue;
    if (std::find(out.begin(), out.end(), r) == out.end()) out.push_back(std::move(r));
  }
  return out;
}

ResultTable ExecuteSql(const SqlQuery& query, const Database& db) {
  return Executor(db).Run(query);
}

bool LikeMatch(std::string_view text, std::string_view pattern) {
  return LikeImpl(ToLower(text), ToLower(pattern));
}

std::vector<std::string> ResultStrings(const ResultTable& table) {
  std::vector<std::string> out;
  for (const Row& row : table) {
    std::string s;
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i > 0) s += " | ";
      s += ValueToString(row[i]);
    }
    out.push_back(std::move(s));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace uniparse
