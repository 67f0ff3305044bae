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

#ifndef UNIPARSE_SQL_H_
#define UNIPARSE_SQL_H_

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "uniparse/datamodel.h"
#include "uniparse/sexpr.h"

namespace uniparse {

// Heap slot with value semantics: deep copy and deep equality. Used for the
// recursive parts of the SQL AST. May be empty.
template <typename T>
class Box {
 public:
  Box() = default;
  Box(T value) : ptr_(std::make_unique<T>(std::move(value))) {}  // NOLINT
  Box(const Box& other) : ptr_(other.ptr_ ? std::make_unique<T>(*other.ptr_) : nullptr) {}
  Box(Box&&) noexcept = default;
  Box& operator=(const Box& other) {
    if (this != &other) ptr_ = other.ptr_ ? std::make_unique<T>(*other.ptr_) : nullptr;
    return *this;
  }
  Box& operator=(Box&&) noexcept = default;

  explicit operator bool() const { return ptr_ != nullptr; }
  const T& operator*() const { return *ptr_; }
  const T* operator->() const { return ptr_.get(); }
  const T* get() const { return ptr_.get(); }

  friend bool operator==(const Box& a, const Box& b) {
    if (!a.ptr_ || !b.ptr_) return !a.ptr_ && !b.ptr_;
    return *a.ptr_ == *b.ptr_;
  }

 private:
  std::unique_ptr<T> ptr_;
};

enum class Aggregate { kNone, kAvg, kCount, kMax, kMin, kSum };

enum class CondOp {
  kEq, kNe, kLt, kGt, kLe, kGe,
  kBetween, kNotBetween,
  kIn, kNotIn,
  kLike, kNotLike,
  kIs, kIsNot,
  kExists,
};

enum class SetOp { kNone, kUnion, kIntersect, kExcept };

std::string_view AggregateKeyword(Aggregate agg);
std::string_view CondOpKeyword(CondOp op);  // "=", "NOT BETWEEN", ...
std::string_view SetOpKeyword(SetOp op);

// table.column, or "*" with an empty table.
struct ColumnRef {
  std::string table;
  std::string column;

  bool is_star() const { return column == "*"; }
  static ColumnRef Star() { return {"", "*"}; }
  friend auto operator<=>(const ColumnRef&, const ColumnRef&) = default;
};

std::string PrintColumnRef(const ColumnRef& ref);

struct SelectItem {
  Aggregate agg = Aggregate::kNone;
  ColumnRef column;

  friend bool operator==(const SelectItem&, const SelectItem&) = default;
};

// JOIN table ON left = right
struct JoinClause {
  std::string table;
  ColumnRef left;
  ColumnRef right;

  friend bool operator==(const JoinClause&, const JoinClause&) = default;
};

struct SqlQuery;

// A WHERE leaf. BETWEEN carries two operands, IN a list (or a subquery),
// IS / IS NOT a single NULL, EXISTS only a subquery and no column.
struct Condition {
  ColumnRef column;
  CondOp op = CondOp::kEq;
  std::vector<Value> operands;
  Box<SqlQuery> subquery;

  friend bool operator==(const Condition&, const Condition&) = default;
};

// Binary and/or tree; parsing is left-associative with AND binding tighter.
struct BoolExpr {
  enum class Kind { kLeaf, kAnd, kOr };
  Kind kind = Kind::kLeaf;
  Condition leaf;
  std::vector<BoolExpr> children;

  static BoolExpr Leaf(Condition c);
  static BoolExpr And(BoolExpr a, BoolExpr b);
  static BoolExpr Or(BoolExpr a, BoolExpr b);

  friend bool operator==(const BoolExpr&, const BoolExpr&) = default;
};

// HAVING <agg>(column) <op> literal
struct Having {
  Aggregate agg = Aggregate::kCount;
  ColumnRef column;
  CondOp op = CondOp::kGt;
  Value value;

  friend bool operator==(const Having&, const Having&) = default;
};

struct OrderBy {
  Aggregate agg = Aggregate::kNone;
  ColumnRef column;
  bool descending = false;

  friend bool operator==(const OrderBy&, const OrderBy&) = default;
};

struct SqlQuery {
  std::vector<SelectItem> select;
  std::string from;
  std::vector<JoinClause> joins;
  std::optional<BoolExpr> where;
  std::vector<ColumnRef> group_by;
  std::optional<Having> having;
  std::optional<OrderBy> order_by;
  std::optional<std::int64_t> limit;
  SetOp set_op = SetOp::kNone;
  Box<SqlQuery> set_rhs;

  friend bool operator==(const SqlQuery&, const SqlQuery&) = default;
};

// Throws ParseError naming the unsupported construct or the unexpected token.
SqlQuery ParseSql(std::string_view text);
// A single WHERE leaf such as "head.age > 56".
Condition ParseSqlCondition(std::string_view text);

// Canonical uppercase-keyword, single-space form.
std::string PrintSql(const SqlQuery& query);
std::string PrintCondition(const Condition& condition);
std::string PrintBoolExpr(const BoolExpr& expr);

// Operand text of a condition as carried by a TbClVl primitive:
// "56", "'Kyle'", "1 AND 5", "(1, 2)", "NULL".
std::string ConditionValueText(const Condition& condition);

Decomposition DecomposeSql(const SqlQuery& query);

// Every table.column referenced anywhere in the query, subqueries included.
std::vector<ColumnRef> CollectColumnRefs(const SqlQuery& query);

using ResultTable = std::vector<Row>;

// Throws ExecutionError on unresolvable references and type mismatches.
ResultTable ExecuteSql(const SqlQuery& query, const Database& db);

// Case-insensitive LIKE with % and _ wildcards.
bool LikeMatch(std::string_view text, std::string_view pattern);

// Sorted, de-duplicated row strings (cells joined by " | ").
std::vector<std::string> ResultStrings(const ResultTable& table);

}  // namespace uniparse

#endif  // UNIPARSE_SQL_H_
