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

#include "uniparse/oracle.h"

#include <algorithm>
#include <optional>
#include <regex>

#include "uniparse/error.h"
#include "uniparse/text.h"

namespace uniparse::oracle {
namespace {

// ---------------------------------------------------------------------------
// Knowledge base
// ---------------------------------------------------------------------------

std::vector<std::string> Frontier(const FirstHop& hop, const KnowledgeBase& kb) {
  std::vector<std::string> out;
  for (const Triple& t : kb.triples()) {
    if (t.relation != hop.relation || !t.object.is_entity()) continue;
    if (hop.direction == Direction::kOut && t.subject == hop.entity) out.push_back(t.object.text);
    if (hop.direction == Direction::kIn && t.object.text == hop.entity) out.push_back(t.subject);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// Second hops leaving `x`, where `hop` is how we got there.
std::vector<SecondHop> HopsFrom(const std::string& x, const FirstHop& hop, const KnowledgeBase& kb,
                                const TraversalOptions& options) {
  // The arrival triple seen from x points back at the anchor.
  auto is_arrival = [&](const Triple& t, Direction d) {
    if (t.relation != hop.relation || !t.object.is_entity()) return false;
    if (hop.direction == Direction::kOut) {
      return d == Direction::kIn && t.subject == hop.entity && t.object.text == x;
    }
    return d == Direction::kOut && t.subject == x && t.object.text == hop.entity;
  };
  std::size_t arrivals = 0;
  std::vector<SecondHop> out;
  for (const Triple& t : kb.triples()) {
    for (Direction d : {Direction::kOut, Direction::kIn}) {
      bool touches = d == Direction::kOut ? t.subject == x
                                          : (t.object.is_entity() && t.object.text == x);
      if (!touches) continue;
      if (is_arrival(t, d)) {
        ++arrivals;
        if (!options.allow_backtrack && arrivals == 1) continue;
      }
      out.push_back({t.relation, d});
    }
  }
  return out;
}

SExpr FirstHopForm(const FirstHop& hop) {
  return SExpr::Join(hop.relation, SExpr::Entity(hop.entity), hop.direction == Direction::kOut);
}

using ObjectSet = std::set<Object>;

bool IsNumberText(const std::string& s) { return ParseNumber(s).has_value(); }

// Orders two literals; throws when exactly one is numeric.
int Order(const std::string& a, const std::string& b) {
  bool na = IsNumberText(a), nb = IsNumberText(b);
  if (na != nb) throw ExecutionError("mixed literal comparison");
  if (na) {
    double x = *ParseNumber(a), y = *ParseNumber(b);
    return x < y ? -1 : (x > y ? 1 : 0);
  }
  return a < b ? -1 : (a > b ? 1 : 0);
}

ObjectSet Denote(const SExpr& e, const KnowledgeBase& kb) {
  ObjectSet out;
  switch (e.kind) {
    case SExprKind::kEntity:
      out.insert(EntityObject(e.symbol));
      return out;
    case SExprKind::kJoin: {
      ObjectSet sub = Denote(e.args[0], kb);
      for (const Triple& t : kb.triples()) {
        if (t.relation != e.symbol) continue;
        if (e.reverse) {
          if (sub.count(EntityObject(t.subject)) > 0) out.insert(t.object);
        } else if (sub.count(t.object) > 0) {
          out.insert(EntityObject(t.subject));
        }
      }
      return out;
    }
    case SExprKind::kAnd: {
      ObjectSet a = Denote(e.args[0], kb);
      ObjectSet b = Denote(e.args[1], kb);
      for (const Object& o : a) {
        if (b.count(o) > 0) out.insert(o);
      }
      return out;
    }
    case SExprKind::kCount:
      throw ExecutionError("nested COUNT");
    case SExprKind::kArgMax:
    case SExprKind::kArgMin: {
      ObjectSet sub = Denote(e.args[0], kb);
      std::vector<std::pair<std::string, std::string>> pairs;  // (subject, value)
      for (const Triple& t : kb.triples()) {
        if (t.relation == e.symbol && !t.object.is_entity() &&
            sub.count(EntityObject(t.subject)) > 0) {
          pairs.emplace_back(t.subject, t.object.text);
        }
      }
      if (pairs.empty()) return out;
      std::string best = pairs[0].second;
      for (const auto& p : pairs) {
        int c = Order(p.second, best);
        if ((e.kind == SExprKind::kArgMax && c > 0) || (e.kind == SExprKind::kArgMin && c < 0)) {
          best = p.second;
        }
      }
      for (const auto& p : pairs) {
        if (Order(p.second, best) == 0) out.insert(EntityObject(p.first));
      }
      return out;
    }
    case SExprKind::kCompare: {
      for (const Triple& t : kb.triples()) {
        if (t.relation != e.symbol || t.object.is_entity()) continue;
        int c = Order(t.object.text, e.literal);
        bool keep = (e.op == CompareOp::kLt && c < 0) || (e.op == CompareOp::kLe && c <= 0) ||
                    (e.op == CompareOp::kGt && c > 0) || (e.op == CompareOp::kGe && c >= 0);
        if (keep) out.insert(EntityObject(t.subject));
      }
      return out;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Database
// ---------------------------------------------------------------------------

// null < number < text
int Cmp(const Value& a, const Value& b) {
  auto rank = [](const Value& v) { return IsNull(v) ? 0 : (IsNumber(v) ? 1 : 2); };
  if (rank(a) != rank(b)) return rank(a) < rank(b) ? -1 : 1;
  if (IsNumber(a)) {
    double x = std::get<double>(a), y = std::get<double>(b);
    return x < y ? -1 : (x > y ? 1 : 0);
  }
  if (IsText(a)) {
    const std::string& x = std::get<std::string>(a);
    const std::string& y = std::get<std::string>(b);
    return x < y ? -1 : (x > y ? 1 : 0);
  }
  return 0;
}

bool RowLess(const Row& a, const Row& b) {
  for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) {
    int c = Cmp(a[i], b[i]);
    if (c != 0) return c < 0;
  }
  return a.size() < b.size();
}

bool RowEqual(const Row& a, const Row& b) { return !RowLess(a, b) && !RowLess(b, a); }

bool Like(const std::string& text, const std::string& pattern) {
  std::string re;
  for (char ch : pattern) {
    if (ch == '%') {
      re += "[\\s\\S]*";
    } else if (ch == '_') {
      re += "[\\s\\S]";
    } else if (std::isalnum(static_cast<unsigned char>(ch))) {
      re += ch;
    } else {
      re += '\\';
      re += ch;
    }
  }
  return std::regex_match(text, std::regex(re, std::regex::icase));
}

// A flat row over the concatenated columns of every table in scope.
struct Frame {
  std::vector<const Table*> tables;
  std::vector<std::size_t> offsets;

  // Flat index and type; throws when unresolvable.
  std::pair<std::size_t, ColumnType> Find(const ColumnRef& ref, std::size_t visible) const {
    for (std::size_t t = 0; t < visible; ++t) {
      if (tables[t]->name != ref.table) continue;
      for (std::size_t c = 0; c < tables[t]->columns.size(); ++c) {
        if (tables[t]->columns[c].name == ref.column) {
          return {offsets[t] + c, tables[t]->columns[c].type};
        }
      }
      throw ExecutionError("no such column");
    }
    throw ExecutionError("table not in scope");
  }
  std::pair<std::size_t, ColumnType> Find(const ColumnRef& ref) const {
    return Find(ref, tables.size());
  }
  std::size_t width() const {
    return tables.empty() ? 0 : offsets.back() + tables.back()->columns.size();
  }
};

class BruteSql {
 public:
  explicit BruteSql(const Database& db) : db_(db) {}

  ResultTable Run(const SqlQuery& q) {
    ResultTable left = Single(q);
    if (q.set_op == SetOp::kNone) return left;
    ResultTable right = Run(*q.set_rhs);
    if (!left.empty() && !right.empty() && left[0].size() != right[0].size()) {
      throw ExecutionError("set operation width mismatch");
    }
    auto normalize = [](ResultTable t) {
      std::sort(t.begin(), t.end(), RowLess);
      t.erase(std::unique(t.begin(), t.end(), RowEqual), t.end());
      return t;
    };
    left = normalize(std::move(left));
    right = normalize(std::move(right));
    auto contains = [](const ResultTable& t, const Row& r) {
      return std::any_of(t.begin(), t.end(), [&](const Row& x) { return RowEqual(x, r); });
    };
    ResultTable out;
    if (q.set_op == SetOp::kUnion) {
      out = left;
      out.insert(out.end(), right.begin(), right.end());
      return normalize(std::move(out));
    }
    for (const Row& r : left) {
      bool in_right = contains(right, r);
      if ((q.set_op == SetOp::kIntersect) == in_right) out.push_back(r);
    }
    return out;
  }

 private:
  const Table& Lookup(const std::string& name) const {
    for (const Table& t : db_.tables()) {
      if (t.name == name) return t;
    }
    throw ExecutionError("no such table");
  }

  void ValidateAggregate(Aggregate agg, const ColumnRef& col, const Frame& f) const {
    if (col.is_star()) return;
    ColumnType type = f.Find(col).second;
    if ((agg == Aggregate::kAvg || agg == Aggregate::kSum) && type != ColumnType::kNumber) {
      throw ExecutionError("numeric aggregate on text");
    }
  }

  void ValidateBool(const BoolExpr& e, const Frame& f) {
    if (e.kind != BoolExpr::Kind::kLeaf) {
      for (const BoolExpr& c : e.children) ValidateBool(c, f);
      return;
    }
    const Condition& c = e.leaf;
    if (c.op == CondOp::kExists) {
      Run(*c.subquery);
      return;
    }
    ColumnType type = f.Find(c.column).second;
    for (const Value& v : c.operands) {
      if (IsNull(v)) continue;
      if ((type == ColumnType::kNumber) != IsNumber(v)) throw ExecutionError("operand type");
    }
    if ((c.op == CondOp::kLike || c.op == CondOp::kNotLike) && type != ColumnType::kText) {
      throw ExecutionError("LIKE on number");
    }
    if (c.subquery) {
      ResultTable r = Run(*c.subquery);
      if (c.subquery->select.size() > 1) throw ExecutionError("IN width");
      for (const Row& row : r) {
        if (row.size() != 1) throw ExecutionError("IN width");
      }
    }
  }

  bool Test(const Condition& c, const Row& row, const Frame& f) {
    if (c.op == CondOp::kExists) return !Run(*c.subquery).empty();
    const Value& v = row[f.Find(c.column).first];
    if (c.op == CondOp::kIs) return IsNull(v);
    if (c.op == CondOp::kIsNot) return !IsNull(v);
    if (IsNull(v)) return false;
    if (c.op == CondOp::kIn || c.op == CondOp::kNotIn) {
      std::vector<Value> candidates = c.operands;
      if (c.subquery) {
        for (const Row& r : Run(*c.subquery)) candidates.push_back(r[0]);
      }
      bool found = false;
      for (const Value& x : candidates) found = found || (!IsNull(x) && Cmp(v, x) == 0);
      return c.op == CondOp::kIn ? found : !found;
    }
    for (const Value& x : c.operands) {
      if (IsNull(x)) return false;
    }
    switch (c.op) {
      case CondOp::kEq: return Cmp(v, c.operands[0]) == 0;
      case CondOp::kNe: return Cmp(v, c.operands[0]) != 0;
      case CondOp::kLt: return Cmp(v, c.operands[0]) < 0;
      case CondOp::kGt: return Cmp(v, c.operands[0]) > 0;
      case CondOp::kLe: return Cmp(v, c.operands[0]) <= 0;
      case CondOp::kGe: return Cmp(v, c.operands[0]) >= 0;
      case CondOp::kBetween:
        return Cmp(v, c.operands[0]) >= 0 && Cmp(v, c.operands[1]) <= 0;
      case CondOp::kNotBetween:
        return !(Cmp(v, c.operands[0]) >= 0 && Cmp(v, c.operands[1]) <= 0);
      case CondOp::kLike:
        return Like(std::get<std::string>(v), std::get<std::string>(c.operands[0]));
      case CondOp::kNotLike:
        return !Like(std::get<std::string>(v), std::get<std::string>(c.operands[0]));
      default:
        return false;
    }
  }

  bool Holds(const BoolExpr& e, const Row& row, const Frame& f) {
    if (e.kind == BoolExpr::Kind::kLeaf) return Test(e.leaf, row, f);
    bool a = Holds(e.children[0], row, f);
    bool b = Holds(e.children[1], row, f);
    return e.kind == BoolExpr::Kind::kAnd ? (a && b) : (a || b);
  }

  static Value Fold(Aggregate agg, const ColumnRef& col, const std::vector<Row>& rows,
                    const Frame& f) {
    if (col.is_star()) return static_cast<double>(rows.size());
    std::size_t idx = f.Find(col).first;
    std::vector<Value> present;
    for (const Row& r : rows) {
      if (!IsNull(r[idx])) present.push_back(r[idx]);
    }
    if (agg == Aggregate::kCount) return static_cast<double>(present.size());
    if (present.empty()) return std::monostate{};
    if (agg == Aggregate::kSum || agg == Aggregate::kAvg) {
      double total = 0.0;
      for (const Value& v : present) total += std::get<double>(v);
      return agg == Aggregate::kSum ? total : total / static_cast<double>(present.size());
    }
    Value best = present[0];
    for (const Value& v : present) {
      int c = Cmp(v, best);
      if ((agg == Aggregate::kMax && c > 0) || (agg == Aggregate::kMin && c < 0)) best = v;
    }
    return best;
  }

  ResultTable Single(const SqlQuery& q) {
    Frame f;
    std::vector<std::string> names = {q.from};
    for (const JoinClause& j : q.joins) names.push_back(j.table);
    for (std::size_t i = 0; i < names.size(); ++i) {
      for (std::size_t k = 0; k < i; ++k) {
        if (names[k] == names[i]) throw ExecutionError("duplicate table");
      }
      f.offsets.push_back(f.width());
      f.tables.push_back(&Lookup(names[i]));
    }
    // ON clauses may only see the tables joined so far.
    for (std::size_t i = 0; i < q.joins.size(); ++i) {
      ColumnType a = f.Find(q.joins[i].left, i + 2).second;
      ColumnType b = f.Find(q.joins[i].right, i + 2).second;
      if (a != b) throw ExecutionError("join type mismatch");
    }
    for (const SelectItem& s : q.select) {
      if (s.agg != Aggregate::kNone) {
        ValidateAggregate(s.agg, s.column, f);
      } else if (!s.column.is_star()) {
        f.Find(s.column);
      }
    }
    for (const ColumnRef& g : q.group_by) f.Find(g);
    if (q.having) {
      ValidateAggregate(q.having->agg, q.having->column, f);
      bool numeric_agg = q.having->agg == Aggregate::kCount || q.having->agg == Aggregate::kSum ||
                         q.having->agg == Aggregate::kAvg;
      if (numeric_agg && IsText(q.having->value)) throw ExecutionError("HAVING type");
    }
    if (q.order_by) {
      if (q.order_by->agg != Aggregate::kNone) {
        ValidateAggregate(q.order_by->agg, q.order_by->column, f);
      } else {
        f.Find(q.order_by->column);
      }
    }
    if (q.where) ValidateBool(*q.where, f);

    // Full cross product, then every filter.
    std::vector<Row> product = {Row{}};
    for (const Table* t : f.tables) {
      std::vector<Row> next;
      for (const Row& base : product) {
        for (const Row& r : t->rows) {
          Row joined = base;
          joined.insert(joined.end(), r.begin(), r.end());
          next.push_back(std::move(joined));
        }
      }
      product = std::move(next);
    }
    std::vector<Row> rows;
    for (const Row& r : product) {
      bool keep = true;
      for (const JoinClause& j : q.joins) {
        const Value& a = r[f.Find(j.left).first];
        const Value& b = r[f.Find(j.right).first];
        keep = keep && !IsNull(a) && !IsNull(b) && Cmp(a, b) == 0;
      }
      if (keep && q.where) keep = Holds(*q.where, r, f);
      if (keep) rows.push_back(r);
    }

    bool aggregated = std::any_of(q.select.begin(), q.select.end(),
                                  [](const SelectItem& s) { return s.agg != Aggregate::kNone; });
    bool grouped = aggregated || !q.group_by.empty() || q.having.has_value() ||
                   (q.order_by && q.order_by->agg != Aggregate::kNone);
    std::vector<std::vector<Row>> groups;
    if (!grouped) {
      for (const Row& r : rows) groups.push_back({r});
    } else if (q.group_by.empty()) {
      groups.push_back(rows);
    } else {
      std::vector<Row> keys;
      for (const Row& r : rows) {
        Row key;
        for (const ColumnRef& g : q.group_by) key.push_back(r[f.Find(g).first]);
        std::size_t i = 0;
        while (i < keys.size() && !RowEqual(keys[i], key)) ++i;
        if (i == keys.size()) {
          keys.push_back(key);
          groups.emplace_back();
        }
        groups[i].push_back(r);
      }
    }

    if (q.having) {
      std::vector<std::vector<Row>> kept;
      for (auto& g : groups) {
        Value v = Fold(q.having->agg, q.having->column, g, f);
        const Value& rhs = q.having->value;
        if (IsNull(v) || IsNull(rhs)) continue;
        int c = Cmp(v, rhs);
        CondOp op = q.having->op;
        bool ok = (op == CondOp::kEq && c == 0) || (op == CondOp::kNe && c != 0) ||
                  (op == CondOp::kLt && c < 0) || (op == CondOp::kGt && c > 0) ||
                  (op == CondOp::kLe && c <= 0) || (op == CondOp::kGe && c >= 0);
        if (ok) kept.push_back(std::move(g));
      }
      groups = std::move(kept);
    }

    if (q.order_by) {
      const OrderBy& o = *q.order_by;
      std::vector<Value> keys;
      for (const auto& g : groups) {
        if (o.agg != Aggregate::kNone) {
          keys.push_back(Fold(o.agg, o.column, g, f));
        } else {
          keys.push_back(g.empty() ? Value{} : g[0][f.Find(o.column).first]);
        }
      }
      // Insertion sort: stable by construction. Nulls rank above everything.
      auto before = [&](const Value& a, const Value& b) {
        if (IsNull(a) || IsNull(b)) return o.descending ? IsNull(a) && !IsNull(b)
                                                        : !IsNull(a) && IsNull(b);
        return o.descending ? Cmp(a, b) > 0 : Cmp(a, b) < 0;
      };
      std::vector<std::size_t> order;
      for (std::size_t i = 0; i < groups.size(); ++i) {
        std::size_t pos = order.size();
        while (pos > 0 && before(keys[i], keys[order[pos - 1]])) --pos;
        order.insert(order.begin() + static_cast<std::ptrdiff_t>(pos), i);
      }
      std::vector<std::vector<Row>> sorted;
      for (std::size_t i : order) sorted.push_back(groups[i]);
      groups = std::move(sorted);
    }
    if (q.limit) {
      std::size_t n = static_cast<std::size_t>(std::max<std::int64_t>(*q.limit, 0));
      if (groups.size() > n) groups.resize(n);
    }

    ResultTable out;
    for (const auto& g : groups) {
      Row row;
      for (const SelectItem& s : q.select) {
        if (s.agg != Aggregate::kNone) {
          row.push_back(Fold(s.agg, s.column, g, f));
        } else if (s.column.is_star()) {
          for (std::size_t i = 0; i < f.width(); ++i) row.push_back(g.empty() ? Value{} : g[0][i]);
        } else {
          row.push_back(g.empty() ? Value{} : g[0][f.Find(s.column).first]);
        }
      }
      out.push_back(std::move(row));
    }
    return out;
  }

  const Database& db_;
};

}  // namespace

std::set<SecondHop> ReachableSecondHops(const std::vector<FirstHop>& first_hops,
                                        const KnowledgeBase& kb, const TraversalOptions& options) {
  std::set<SecondHop> out;
  for (const FirstHop& hop : first_hops) {
    for (const std::string& x : Frontier(hop, kb)) {
      for (const SecondHop& s : HopsFrom(x, hop, kb, options)) out.insert(s);
    }
  }
  return out;
}

std::vector<SExpr> EnumerateLogicalFormsKb(const std::vector<std::string>& linked,
                                           const KnowledgeBase& kb, int depth,
                                           const TraversalOptions& options) {
  std::vector<SExpr> out;
  std::set<std::string> seen;
  auto add = [&](SExpr e) {
    if (seen.insert(PrintSExpr(e)).second) out.push_back(std::move(e));
  };
  for (const std::string& e : linked) {
    std::vector<FirstHop> hops;
    for (const Triple& t : kb.triples()) {
      if (t.subject == e) hops.push_back({e, t.relation, Direction::kOut});
      if (t.object.is_entity() && t.object.text == e)
        hops.push_back({e, t.relation, Direction::kIn});
    }
    for (const FirstHop& hop : hops) {
      SExpr one = FirstHopForm(hop);
      add(one);
      if (depth < 2) continue;
      for (const std::string& x : Frontier(hop, kb)) {
        for (const SecondHop& s : HopsFrom(x, hop, kb, options)) {
          add(SExpr::Join(s.relation, one, s.direction == Direction::kOut));
        }
      }
    }
  }
  return out;
}

std::vector<SqlQuery> EnumerateLogicalFormsDb(const Database& db,
                                              const std::vector<TbClVl>& conditions) {
  std::vector<SqlQuery> out;
  for (const Table& t : db.tables()) {
    std::vector<std::optional<BoolExpr>> wheres = {std::nullopt};
    for (const TbClVl& v : conditions) {
      if (v.table != t.name) continue;
      try {
        wheres.push_back(BoolExpr::Leaf(
            ParseSqlCondition(v.table + "." + v.column + " " + v.op + " " + v.value)));
      } catch (const ParseError&) {
      }
    }
    for (const Column& c : t.columns) {
      std::vector<Aggregate> aggs = {Aggregate::kNone, Aggregate::kCount, Aggregate::kMax,
                                     Aggregate::kMin};
      if (c.type == ColumnType::kNumber) {
        aggs.push_back(Aggregate::kAvg);
        aggs.push_back(Aggregate::kSum);
      }
      for (Aggregate agg : aggs) {
        for (const auto& where : wheres) {
          SqlQuery q;
          q.select = {{agg, {t.name, c.name}}};
          q.from = t.name;
          q.where = where;
          out.push_back(std::move(q));
        }
      }
    }
  }
  return out;
}

KbAnswer BruteExecuteSExpr(const SExpr& expr, const KnowledgeBase& kb) {
  KbAnswer a;
  if (expr.kind == SExprKind::kCount) {
    a.is_count = true;
    a.count = static_cast<std::int64_t>(Denote(expr.args[0], kb).size());
  } else {
    a.values = Denote(expr, kb);
  }
  return a;
}

ResultTable BruteExecuteSql(const SqlQuery& query, const Database& db) {
  return BruteSql(db).Run(query);
}

}  // namespace uniparse::oracle
