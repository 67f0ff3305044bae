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

#include "random_instances.h"

#include <algorithm>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace uniparse::testing {
namespace {

template <typename T>
const T& Pick(Rng& rng, const std::vector<T>& items) {
  return items[rng.Index(items.size())];
}

bool Chance(Rng& rng, double p) { return rng.Unit() < p; }

const std::vector<std::string> kEntityRelations = {"r0", "r1", "r2", "r3"};
const std::vector<std::string> kIntRelations = {"n0", "n1"};
const std::vector<std::string> kWords = {"alpha", "beta", "gamma"};

std::string EntityId(Rng& rng) { return "e" + std::to_string(rng.Index(10)); }

CompareOp RandomCompareOp(Rng& rng) {
  static const std::vector<CompareOp> kOps = {CompareOp::kLt, CompareOp::kLe, CompareOp::kGt,
                                              CompareOp::kGe};
  return Pick(rng, kOps);
}

SExpr KbExpr(Rng& rng, int depth) {
  if (depth == 0 || Chance(rng, 0.2)) return SExpr::Entity(EntityId(rng));
  switch (rng.Index(8)) {
    case 0:
    case 1:
    case 2: {
      std::vector<std::string> rels = kEntityRelations;
      if (Chance(rng, 0.3)) rels = {"n0", "n1", "s0"};
      return SExpr::Join(Pick(rng, rels), KbExpr(rng, depth - 1), Chance(rng, 0.4));
    }
    case 3:
      return SExpr::And(KbExpr(rng, depth - 1), KbExpr(rng, depth - 1));
    case 4:
    case 5: {
      std::string rel = Chance(rng, 0.8) ? Pick(rng, kIntRelations) : std::string("s0");
      SExpr sub = KbExpr(rng, depth - 1);
      return Chance(rng, 0.5) ? SExpr::ArgMax(std::move(sub), rel)
                              : SExpr::ArgMin(std::move(sub), rel);
    }
    default: {
      if (Chance(rng, 0.15)) {
        // Mixed pairs: a number against strings, or a word against numbers.
        return Chance(rng, 0.5) ? SExpr::Compare(RandomCompareOp(rng), "s0", "5")
                                : SExpr::Compare(RandomCompareOp(rng), "n0", "beta");
      }
      if (Chance(rng, 0.2)) {
        return SExpr::Compare(RandomCompareOp(rng), "s0", Pick(rng, kWords));
      }
      return SExpr::Compare(RandomCompareOp(rng), Pick(rng, kIntRelations),
                            std::to_string(rng.Index(21)));
    }
  }
}

const std::vector<std::string> kAstSymbols = {
    "m.0abc",  "film.film.directed_by", "people.person.nationality", "r1", "x_y.z",
    "Azeotrope", "e.42", "common.topic.alias"};
const std::vector<std::string> kAstLiterals = {"1990", "3.5", "-2", "hello world", "say \"hi\"",
                                               "2001-05-04", "a\\b", "(paren)", "0"};

SExpr AstExpr(Rng& rng, int depth) {
  if (depth == 0 || Chance(rng, 0.15)) return SExpr::Entity(Pick(rng, kAstSymbols));
  switch (rng.Index(5)) {
    case 0:
    case 1:
      return SExpr::Join(Pick(rng, kAstSymbols), AstExpr(rng, depth - 1), Chance(rng, 0.5));
    case 2:
      return SExpr::And(AstExpr(rng, depth - 1), AstExpr(rng, depth - 1));
    case 3:
      return Chance(rng, 0.5) ? SExpr::ArgMax(AstExpr(rng, depth - 1), Pick(rng, kAstSymbols))
                              : SExpr::ArgMin(AstExpr(rng, depth - 1), Pick(rng, kAstSymbols));
    default:
      return SExpr::Compare(RandomCompareOp(rng), Pick(rng, kAstSymbols), Pick(rng, kAstLiterals));
  }
}

// ---------------------------------------------------------------------------
// SQL
// ---------------------------------------------------------------------------

const std::vector<std::string> kTexts = {"x", "y", "zz", "Ab", "a_b", "x%"};
const std::vector<std::string> kPatterns = {"x%", "%b", "_", "a\\_b", "%", "Z%", "a_b"};

Value RandomNumber(Rng& rng) { return static_cast<double>(rng.Index(6)); }

struct Col {
  std::string table;
  std::string column;
  ColumnType type;
  ColumnRef ref() const { return {table, column}; }
};

std::vector<Col> ColumnsOf(const Table& t) {
  std::vector<Col> out;
  for (const Column& c : t.columns) out.push_back({t.name, c.name, c.type});
  return out;
}

class SqlGen {
 public:
  SqlGen(Rng& rng, const Database& db) : rng_(rng), db_(db) {}

  SqlQuery Query(int depth) {
    SqlQuery q = Single(depth);
    if (depth > 0 && Chance(rng_, 0.15) && q.group_by.empty() && !q.order_by) {
      std::size_t width = q.select.size();
      bool star = q.select.size() == 1 && q.select[0].column.is_star() &&
                  q.select[0].agg == Aggregate::kNone;
      if (!star) {
        static const std::vector<SetOp> kOps = {SetOp::kUnion, SetOp::kIntersect, SetOp::kExcept};
        q.set_op = Pick(rng_, kOps);
        q.set_rhs = Box<SqlQuery>(Plain(width, depth - 1));
      }
    }
    return q;
  }

 private:
  // FROM plus up to one join, returning the columns in scope.
  std::vector<Col> From(SqlQuery& q) {
    const std::size_t n = db_.tables().size();
    const std::size_t ti = rng_.Index(n);
    const Table& t = db_.tables()[ti];
    q.from = t.name;
    std::vector<Col> scope = ColumnsOf(t);
    if (n > 1 && Chance(rng_, 0.35)) {
      // Rarely the same table twice, which both executors reject.
      std::size_t ui = Chance(rng_, 0.05) ? ti : (ti + 1 + rng_.Index(n - 1)) % n;
      const Table* u = &db_.tables()[ui];
      std::vector<Col> other = ColumnsOf(*u);
      static const std::vector<std::pair<std::string, std::string>> kKeys = {
          {"id", "id"}, {"a", "c"}, {"c", "id"}, {"b", "b"}, {"id", "b"}};
      auto [l, r] = Pick(rng_, kKeys);
      JoinClause j{u->name, {t.name, l}, {u->name, r}};
      if (Chance(rng_, 0.5)) std::swap(j.left, j.right);
      q.joins.push_back(j);
      scope.insert(scope.end(), other.begin(), other.end());
    }
    return scope;
  }

  Col AnyCol(const std::vector<Col>& scope) { return Pick(rng_, scope); }

  Col ColOfType(const std::vector<Col>& scope, ColumnType type) {
    std::vector<Col> fit;
    for (const Col& c : scope) {
      if (c.type == type) fit.push_back(c);
    }
    return fit.empty() ? AnyCol(scope) : Pick(rng_, fit);
  }

  Value LiteralFor(ColumnType type) {
    if (Chance(rng_, 0.03))
      return type == ColumnType::kText ? RandomNumber(rng_) : Value(std::string("x"));
    return type == ColumnType::kNumber ? RandomNumber(rng_) : Value(Pick(rng_, kTexts));
  }

  Condition Leaf(const std::vector<Col>& scope, int depth) {
    Col col = AnyCol(scope);
    Condition c;
    c.column = col.ref();
    std::size_t kind = rng_.Index(depth > 0 ? 12 : 10);
    switch (kind) {
      case 0:
      case 1:
      case 2: {
        static const std::vector<CondOp> kOps = {CondOp::kEq, CondOp::kNe, CondOp::kLt,
                                                 CondOp::kGt, CondOp::kLe, CondOp::kGe};
        c.op = Pick(rng_, kOps);
        c.operands = {LiteralFor(col.type)};
        if (Chance(rng_, 0.03)) c.operands = {Value{}};
        break;
      }
      case 3:
        c.op = Chance(rng_, 0.5) ? CondOp::kBetween : CondOp::kNotBetween;
        c.operands = {LiteralFor(col.type), LiteralFor(col.type)};
        break;
      case 4:
        c.op = Chance(rng_, 0.5) ? CondOp::kIn : CondOp::kNotIn;
        for (std::size_t i = 0, n = 1 + rng_.Index(3); i < n; ++i) {
          c.operands.push_back(LiteralFor(col.type));
        }
        break;
      case 5:
        if (col.type == ColumnType::kText || Chance(rng_, 0.05)) {
          c.op = Chance(rng_, 0.5) ? CondOp::kLike : CondOp::kNotLike;
          c.operands = {Value(Pick(rng_, kPatterns))};
          break;
        }
        [[fallthrough]];
      case 6:
        c.op = Chance(rng_, 0.5) ? CondOp::kIs : CondOp::kIsNot;
        c.operands = {Value{}};
        break;
      case 7:
      case 8:
      case 9: {
        c.op = CondOp::kEq;
        c.operands = {LiteralFor(col.type)};
        break;
      }
      case 10: {
        c.op = Chance(rng_, 0.5) ? CondOp::kIn : CondOp::kNotIn;
        SqlQuery sub;
        std::vector<Col> sub_scope = From(sub);
        Col pick = Chance(rng_, 0.9) ? ColOfType(sub_scope, col.type) : AnyCol(sub_scope);
        sub.select = {SelectItem{Aggregate::kNone, pick.ref()}};
        if (Chance(rng_, 0.5)) sub.where = Bool(sub_scope, depth - 1, 1);
        c.subquery = Box<SqlQuery>(std::move(sub));
        break;
      }
      default: {
        c = Condition{};
        c.op = CondOp::kExists;
        c.subquery = Box<SqlQuery>(Plain(1, depth - 1));
        break;
      }
    }
    return c;
  }

  BoolExpr Bool(const std::vector<Col>& scope, int depth, int levels) {
    if (levels == 0 || Chance(rng_, 0.5)) return BoolExpr::Leaf(Leaf(scope, depth));
    BoolExpr a = Bool(scope, depth, levels - 1);
    BoolExpr b = Bool(scope, depth, levels - 1);
    return Chance(rng_, 0.5) ? BoolExpr::And(std::move(a), std::move(b))
                             : BoolExpr::Or(std::move(a), std::move(b));
  }

  Aggregate AggFor(ColumnType type) {
    static const std::vector<Aggregate> kNumeric = {Aggregate::kAvg, Aggregate::kCount,
                                                    Aggregate::kMax, Aggregate::kMin,
                                                    Aggregate::kSum};
    static const std::vector<Aggregate> kText = {Aggregate::kCount, Aggregate::kMax,
                                                 Aggregate::kMin};
    if (Chance(rng_, 0.03)) return Aggregate::kSum;
    return Pick(rng_, type == ColumnType::kNumber ? kNumeric : kText);
  }

  SelectItem AggItem(const std::vector<Col>& scope) {
    if (Chance(rng_, 0.3)) return {Aggregate::kCount, ColumnRef::Star()};
    Col c = AnyCol(scope);
    return {AggFor(c.type), c.ref()};
  }

  // Unaggregated query with exactly `width` projected columns.
  SqlQuery Plain(std::size_t width, int depth) {
    SqlQuery q;
    std::vector<Col> scope = From(q);
    for (std::size_t i = 0; i < width; ++i)
      q.select.push_back({Aggregate::kNone, AnyCol(scope).ref()});
    if (Chance(rng_, 0.6)) q.where = Bool(scope, depth, 1);
    return q;
  }

  SqlQuery Single(int depth) {
    SqlQuery q;
    std::vector<Col> scope = From(q);
    std::size_t mode = rng_.Index(3);
    if (mode == 0) {
      if (Chance(rng_, 0.15)) {
        q.select = {{Aggregate::kNone, ColumnRef::Star()}};
      } else {
        for (std::size_t i = 0, n = 1 + rng_.Index(2); i < n; ++i) {
          q.select.push_back({Aggregate::kNone, AnyCol(scope).ref()});
        }
      }
    } else if (mode == 1) {
      for (std::size_t i = 0, n = 1 + rng_.Index(2); i < n; ++i) q.select.push_back(AggItem(scope));
    } else {
      Col g = AnyCol(scope);
      q.group_by = {g.ref()};
      q.select = {{Aggregate::kNone, g.ref()}, AggItem(scope)};
      if (Chance(rng_, 0.4)) {
        Having h;
        SelectItem item = AggItem(scope);
        h.agg = item.agg;
        h.column = item.column;
        static const std::vector<CondOp> kOps = {CondOp::kEq, CondOp::kNe, CondOp::kLt,
                                                 CondOp::kGt, CondOp::kLe, CondOp::kGe};
        h.op = Pick(rng_, kOps);
        h.value = RandomNumber(rng_);
        q.having = h;
      }
    }
    if (Chance(rng_, 0.6)) q.where = Bool(scope, depth, 2);
    if (mode != 1 && Chance(rng_, 0.4)) {
      OrderBy o;
      if (mode == 2 && Chance(rng_, 0.6)) {
        SelectItem item = AggItem(scope);
        o.agg = item.agg;
        o.column = item.column;
      } else {
        o.column = AnyCol(scope).ref();
      }
      o.descending = Chance(rng_, 0.5);
      q.order_by = o;
      if (Chance(rng_, 0.6)) q.limit = static_cast<std::int64_t>(rng_.Index(4));
    }
    return q;
  }

  Rng& rng_;
  const Database& db_;
};

// Schema-free AST generation.
class SqlAstGen {
 public:
  explicit SqlAstGen(Rng& rng) : rng_(rng) {}

  SqlQuery Query(int depth) {
    SqlQuery q;
    if (Chance(rng_, 0.1)) {
      q.select = {{Aggregate::kNone, ColumnRef::Star()}};
    } else {
      for (std::size_t i = 0, n = 1 + rng_.Index(3); i < n; ++i) q.select.push_back(Item(true));
    }
    q.from = Table();
    for (std::size_t i = 0, n = rng_.Index(3); i < n; ++i) {
      q.joins.push_back({Table(), Ref(), Ref()});
    }
    if (Chance(rng_, 0.6)) q.where = Bool(depth, 3);
    if (Chance(rng_, 0.3)) {
      for (std::size_t i = 0, n = 1 + rng_.Index(2); i < n; ++i) q.group_by.push_back(Ref());
      if (Chance(rng_, 0.5)) {
        Having h;
        SelectItem item = Item(false);
        h.agg = item.agg == Aggregate::kNone ? Aggregate::kMax : item.agg;
        h.column = item.agg == Aggregate::kNone ? Ref() : item.column;
        static const std::vector<CondOp> kOps = {CondOp::kEq, CondOp::kNe, CondOp::kLt,
                                                 CondOp::kGt, CondOp::kLe, CondOp::kGe};
        h.op = Pick(rng_, kOps);
        h.value = Literal();
        q.having = h;
      }
    }
    if (Chance(rng_, 0.3)) {
      SelectItem item = Item(false);
      q.order_by = OrderBy{item.agg, item.column, Chance(rng_, 0.5)};
    }
    if (Chance(rng_, 0.2)) q.limit = static_cast<std::int64_t>(rng_.Index(100));
    if (depth > 0 && Chance(rng_, 0.2)) {
      static const std::vector<SetOp> kOps = {SetOp::kUnion, SetOp::kIntersect, SetOp::kExcept};
      q.set_op = Pick(rng_, kOps);
      q.set_rhs = Box<SqlQuery>(Query(depth - 1));
    }
    return q;
  }

 private:
  std::string Table() {
    static const std::vector<std::string> kTables = {"head", "department", "t_1", "Singer"};
    return Pick(rng_, kTables);
  }

  ColumnRef Ref() {
    static const std::vector<std::string> kColumns = {"age", "name", "Song_Name", "id", "x2"};
    return {Table(), Pick(rng_, kColumns)};
  }

  SelectItem Item(bool allow_star) {
    static const std::vector<Aggregate> kAggs = {Aggregate::kAvg, Aggregate::kCount,
                                                 Aggregate::kMax, Aggregate::kMin,
                                                 Aggregate::kSum};
    if (Chance(rng_, 0.15)) return {Aggregate::kCount, ColumnRef::Star()};
    if (allow_star && Chance(rng_, 0.05)) return {Aggregate::kNone, ColumnRef::Star()};
    if (Chance(rng_, 0.4)) return {Pick(rng_, kAggs), Ref()};
    return {Aggregate::kNone, Ref()};
  }

  Value Literal() {
    switch (rng_.Index(6)) {
      case 0: return Value{};
      case 1: return static_cast<double>(rng_.Index(1000)) / 4.0;
      case 2: return -static_cast<double>(rng_.Index(50));
      case 3: return std::string("it's");
      case 4: return std::string(Chance(rng_, 0.5) ? "SELECT" : "a b, c");
      default: return Pick(rng_, kTexts);
    }
  }

  Value Operand() {
    Value v = Literal();
    return IsNull(v) ? Value(1.0) : v;
  }

  Condition Leaf(int depth) {
    Condition c;
    c.column = Ref();
    switch (rng_.Index(depth > 0 ? 9 : 7)) {
      case 0: {
        static const std::vector<CondOp> kOps = {CondOp::kEq, CondOp::kNe, CondOp::kLt,
                                                 CondOp::kGt, CondOp::kLe, CondOp::kGe};
        c.op = Pick(rng_, kOps);
        c.operands = {Literal()};
        break;
      }
      case 1:
        c.op = Chance(rng_, 0.5) ? CondOp::kBetween : CondOp::kNotBetween;
        c.operands = {Operand(), Operand()};
        break;
      case 2:
        c.op = Chance(rng_, 0.5) ? CondOp::kIn : CondOp::kNotIn;
        for (std::size_t i = 0, n = 1 + rng_.Index(3); i < n; ++i) c.operands.push_back(Literal());
        break;
      case 3:
        c.op = Chance(rng_, 0.5) ? CondOp::kLike : CondOp::kNotLike;
        c.operands = {Value(Pick(rng_, kPatterns))};
        break;
      case 4:
        c.op = Chance(rng_, 0.5) ? CondOp::kIs : CondOp::kIsNot;
        c.operands = {Value{}};
        break;
      case 5:
      case 6:
        c.op = CondOp::kEq;
        c.operands = {Operand()};
        break;
      case 7:
        c.op = Chance(rng_, 0.5) ? CondOp::kIn : CondOp::kNotIn;
        c.subquery = Box<SqlQuery>(Query(depth - 1));
        break;
      default:
        c = Condition{};
        c.op = CondOp::kExists;
        c.subquery = Box<SqlQuery>(Query(depth - 1));
        break;
    }
    return c;
  }

  BoolExpr Bool(int depth, int levels) {
    if (levels == 0 || Chance(rng_, 0.4)) return BoolExpr::Leaf(Leaf(depth));
    BoolExpr a = Bool(depth, levels - 1);
    BoolExpr b = Bool(depth, levels - 1);
    return Chance(rng_, 0.5) ? BoolExpr::And(std::move(a), std::move(b))
                             : BoolExpr::Or(std::move(a), std::move(b));
  }

  Rng& rng_;
};

}  // namespace

KnowledgeBase RandomKnowledgeBase(Rng& rng, std::size_t max_triples) {
  std::vector<Triple> triples;
  std::size_t n = rng.Index(max_triples + 1);
  for (std::size_t i = 0; i < n; ++i) {
    Triple t;
    t.subject = EntityId(rng);
    std::size_t kind = rng.Index(10);
    if (kind < 6) {
      t.relation = Pick(rng, kEntityRelations);
      t.object = EntityObject(EntityId(rng));
    } else if (kind < 9) {
      t.relation = Pick(rng, kIntRelations);
      t.object = Object{ObjectKind::kInt, std::to_string(rng.Index(21))};
    } else {
      t.relation = "s0";
      t.object = Object{ObjectKind::kString, Pick(rng, kWords)};
    }
    triples.push_back(std::move(t));
  }
  std::map<std::string, std::string, std::less<>> names;
  for (int i = 0; i < 10; ++i) {
    if (Chance(rng, 0.7)) names["e" + std::to_string(i)] = "entity " + std::to_string(i);
  }
  return KnowledgeBase(std::move(triples), std::move(names));
}

SExpr RandomSExpr(Rng& rng, const KnowledgeBase& /*kb*/, int max_depth) {
  if (max_depth > 0 && Chance(rng, 0.2)) return SExpr::Count(KbExpr(rng, max_depth - 1));
  return KbExpr(rng, max_depth);
}

SExpr RandomSExprAst(Rng& rng, int max_depth) {
  if (max_depth > 0 && Chance(rng, 0.2)) return SExpr::Count(AstExpr(rng, max_depth - 1));
  return AstExpr(rng, max_depth);
}

Database RandomDatabase(Rng& rng, std::size_t max_tables, std::size_t max_rows) {
  std::vector<Table> tables;
  std::size_t n = 1 + rng.Index(max_tables);
  for (std::size_t t = 0; t < n; ++t) {
    Table table;
    table.name = "t" + std::to_string(t);
    table.columns = {{"id", ColumnType::kNumber},
                     {"a", ColumnType::kNumber},
                     {"b", ColumnType::kText},
                     {"c", ColumnType::kNumber}};
    std::size_t rows = rng.Index(max_rows + 1);
    for (std::size_t r = 0; r < rows; ++r) {
      Row row;
      row.push_back(static_cast<double>(rng.Index(8)));
      row.push_back(Chance(rng, 0.1) ? Value{} : RandomNumber(rng));
      row.push_back(Chance(rng, 0.1) ? Value{} : Value(Pick(rng, kTexts)));
      row.push_back(Chance(rng, 0.1) ? Value{} : RandomNumber(rng));
      table.rows.push_back(std::move(row));
    }
    tables.push_back(std::move(table));
  }
  return Database("random", std::move(tables));
}

SqlQuery RandomSqlQuery(Rng& rng, const Database& db, int depth) {
  return SqlGen(rng, db).Query(depth);
}

SqlQuery RandomSqlAst(Rng& rng, int depth) { return SqlAstGen(rng).Query(depth); }

std::vector<Row> SortedRows(std::vector<Row> rows) {
  std::sort(rows.begin(), rows.end());
  return rows;
}

}  // namespace uniparse::testing
