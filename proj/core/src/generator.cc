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

#include "uniparse/generator.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include "json.hpp"
#include "uniparse/text.h"
#include "uniparse/triggers.h"

namespace uniparse {
namespace {

using nlohmann::json;

constexpr std::size_t kNoMention = std::numeric_limits<std::size_t>::max();

std::string StripQuotes(std::string_view literal) {
  if (literal.size() >= 2 && literal.front() == '\'' && literal.back() == '\'') {
    return std::string(literal.substr(1, literal.size() - 2));
  }
  return std::string(literal);
}

// A supplied primitive as used by a composition.
struct Used {
  Category category = Category::kFirstHop;
  std::size_t rank = 0;
  double score = 0.0;
  double gap = 0.0;  // score minus the best score in its category
  // Fractions of the primitive's tail / value tokens found in the question.
  double lex_tail = 0.0;
  double lex_value = 0.0;
  std::vector<std::string> hits;  // primitive tokens present in the question
};

double Coverage(const std::vector<std::string>& tokens, const std::vector<std::string>& sorted) {
  if (tokens.empty()) return 0.0;
  std::size_t hits = 0;
  for (const std::string& t : tokens) hits += std::binary_search(sorted.begin(), sorted.end(), t);
  return static_cast<double>(hits) / static_cast<double>(tokens.size());
}

struct State {
  std::optional<SExpr> sexpr;
  SqlQuery sql;
  std::vector<Used> used;
  std::vector<std::size_t> first_hops;  // KB: indices of first hops used
  std::vector<std::string> tokens;      // structure tokens
  FeatureMap extra;                     // real-valued structure features
  std::string key;
  bool complete = true;
  FeatureMap features;
  double score = 0.0;
};

// Question-side context shared by both grammars.
class QuestionContext {
 public:
  explicit QuestionContext(std::string_view question)
      : triggers_(DetectTriggers(question)),
        numbers_(ExtractNumbers(question)),
        view_(MakeQuestionView(question)) {
    for (const std::string& t : Tokenize(question)) {
      std::optional<double> n = ParseNumber(t);
      tokens_.push_back(n ? FormatNumber(*n) : Singularize(t));
    }
  }

  const TriggerSet& triggers() const { return triggers_; }
  const std::vector<std::string>& numbers() const { return numbers_; }
  const QuestionView& view() const { return view_; }

  // Index of the first question token shared with the phrase.
  std::size_t MentionPosition(std::string_view phrase) const {
    std::vector<std::string> words;
    for (const std::string& t : Tokenize(phrase)) {
      std::optional<double> n = ParseNumber(t);
      words.push_back(n ? FormatNumber(*n) : Singularize(t));
    }
    for (std::size_t i = 0; i < tokens_.size(); ++i) {
      if (IsStopword(tokens_[i])) continue;
      if (std::find(words.begin(), words.end(), tokens_[i]) != words.end()) return i;
    }
    return kNoMention;
  }

 private:
  TriggerSet triggers_;
  std::vector<std::string> numbers_;
  std::vector<std::string> tokens_;
  QuestionView view_;
};

std::vector<Used> MakeUsed(const std::vector<ScoredPrimitive>& list, Category c,
                           const QuestionContext& q, const KnowledgeBase* kb) {
  std::vector<Used> out;
  double best = -std::numeric_limits<double>::infinity();
  for (const ScoredPrimitive& p : list) best = std::max(best, p.score);
  for (std::size_t i = 0; i < list.size(); ++i) {
    PrimitiveView v = MakePrimitiveView(list[i].primitive, kb);
    const std::vector<std::string>& content = q.view().content;
    Used u{c, i, list[i].score, list[i].score - best, Coverage(v.tail, content),
           Coverage(v.value, content), {}};
    std::set_intersection(v.all.begin(), v.all.end(), content.begin(), content.end(),
                          std::back_inserter(u.hits));
    out.push_back(std::move(u));
  }
  return out;
}

FeatureMap ComputeFeatures(const State& s, const QuestionContext& q, bool position_features) {
  FeatureMap f = s.extra;
  // How much of the question the composition accounts for.
  std::set<std::string> covered;
  std::size_t hits = 0;
  for (const Used& u : s.used) {
    covered.insert(u.hits.begin(), u.hits.end());
    hits += u.hits.size();
  }
  std::size_t content = q.view().content.size();
  f["coverage"] =
      content == 0 ? 0.0 : static_cast<double>(covered.size()) / static_cast<double>(content);
  f["redundant"] = static_cast<double>(hits - covered.size());
  for (const Used& u : s.used) {
    std::string cat(CategoryName(u.category));
    f["rank_score:" + cat] += u.score;
    f["rank_gap:" + cat] += u.gap;
    f["count:" + cat] += 1.0;
    f["lex_tail:" + cat] += u.lex_tail;
    f["lex_value:" + cat] += u.lex_value;
    if (position_features) {
      f["position:" + cat] += 1.0 / (1.0 + static_cast<double>(u.rank));
      if (u.rank == 0) f["top:" + cat] += 1.0;
    }
  }
  for (const std::string& t : s.tokens) {
    f["op:" + t] += 1.0;
    for (int i = 0; i < kNumTriggers; ++i) {
      if (q.triggers().test(i)) {
        f["trigger:" + std::string(TriggerName(static_cast<Trigger>(i))) + "&" + t] += 1.0;
      }
    }
  }
  return f;
}

// Each grammar builds states level by level; every level may pass states
// through unchanged.
class Grammar {
 public:
  virtual ~Grammar() = default;
  virtual int levels() const = 0;
  virtual std::vector<State> Initial() = 0;
  virtual std::vector<State> Expand(int level, const std::vector<State>& beam) = 0;
  // Keys the gold form's partial states carry at each level, or nullopt
  // when the gold does not fit the grammar's shapes.
  virtual std::optional<std::vector<std::vector<std::string>>> GoldKeys(
      const LogicalForm& gold) const = 0;
  virtual LogicalForm ToForm(const State& s) const = 0;
};

// ---------------------------------------------------------------------------
// KB grammar: depth-1 hops, second-hop extensions, AND / comparison, then a
// COUNT / ARGMAX / ARGMIN wrapper.
// ---------------------------------------------------------------------------

class KbGrammar : public Grammar {
 public:
  KbGrammar(const QuestionContext& q, const RankedPrimitives& primitives, const KnowledgeBase& kb,
            const TraversalOptions& traversal)
      : q_(q),
        first_(primitives.of(Category::kFirstHop)),
        second_(primitives.of(Category::kSecondHop)),
        first_used_(MakeUsed(first_, Category::kFirstHop, q, &kb)),
        second_used_(MakeUsed(second_, Category::kSecondHop, q, &kb)) {
    for (const ScoredPrimitive& f : first_) {
      const FirstHop& hop = f.primitive.as<FirstHop>();
      std::vector<SecondHop> reach = ReachableSecondHops(hop, kb, traversal);
      reachable_.emplace_back(reach.begin(), reach.end());
      std::set<std::string> numeric;
      for (const std::string& x : FirstHopFrontier(hop, kb)) {
        for (const Edge& e : kb.OutEdges(x)) {
          if (e.other.is_numeric()) numeric.insert(e.relation);
        }
      }
      numeric_out_.push_back(std::move(numeric));
      const std::string* name = kb.Name(hop.entity);
      mention_.push_back(q_.MentionPosition(name != nullptr ? *name : hop.entity));
    }
  }

  int levels() const override { return 4; }

  std::vector<State> Initial() override {
    std::vector<State> out;
    for (std::size_t i = 0; i < first_.size(); ++i) {
      const FirstHop& hop = first_[i].primitive.as<FirstHop>();
      State s;
      s.sexpr = SExpr::Join(hop.relation, SExpr::Entity(hop.entity),
                            hop.direction == Direction::kOut);
      s.used = {first_used_[i]};
      s.first_hops = {i};
      s.tokens = {"hop1"};
      out.push_back(Finish(std::move(s)));
    }
    return out;
  }

  std::vector<State> Expand(int level, const std::vector<State>& beam) override {
    std::vector<State> out(beam.begin(), beam.end());
    if (level == 1) {
      for (const State& b : beam) {
        if (b.first_hops.size() != 1 || HopDepth(*b.sexpr) != 1) continue;
        std::size_t fi = b.first_hops[0];
        for (std::size_t j = 0; j < second_.size(); ++j) {
          const SecondHop& s2 = second_[j].primitive.as<SecondHop>();
          if (reachable_[fi].count(s2) == 0) continue;
          State s = b;
          s.sexpr = SExpr::Join(s2.relation, *b.sexpr, s2.direction == Direction::kOut);
          s.used.push_back(second_used_[j]);
          s.tokens = {"hop2"};
          const FirstHop& f = first_[fi].primitive.as<FirstHop>();
          if (f.relation == s2.relation) s.tokens.push_back("hop2_same_relation");
          out.push_back(Finish(std::move(s)));
        }
      }
    } else if (level == 2) {
      for (std::size_t a = 0; a < beam.size(); ++a) {
        for (std::size_t b = a + 1; b < beam.size(); ++b) {
          if (beam[a].first_hops == beam[b].first_hops) continue;
          const State* x = &beam[a];
          const State* y = &beam[b];
          if (std::make_pair(mention_[y->first_hops[0]], y->key) <
              std::make_pair(mention_[x->first_hops[0]], x->key)) {
            std::swap(x, y);
          }
          State s;
          s.sexpr = SExpr::And(*x->sexpr, *y->sexpr);
          s.used = x->used;
          s.used.insert(s.used.end(), y->used.begin(), y->used.end());
          s.first_hops = x->first_hops;
          s.first_hops.insert(s.first_hops.end(), y->first_hops.begin(), y->first_hops.end());
          s.tokens = x->tokens;
          s.tokens.insert(s.tokens.end(), y->tokens.begin(), y->tokens.end());
          s.tokens.push_back("and");
          out.push_back(Finish(std::move(s)));
        }
      }
      static constexpr CompareOp kOps[] = {CompareOp::kGt, CompareOp::kGe, CompareOp::kLt,
                                           CompareOp::kLe};
      for (const State& b : beam) {
        if (b.first_hops.size() != 1 || HopDepth(*b.sexpr) != 1) continue;
        for (std::size_t j = 0; j < second_.size(); ++j) {
          const SecondHop& s2 = second_[j].primitive.as<SecondHop>();
          if (s2.direction != Direction::kOut) continue;
          if (numeric_out_[b.first_hops[0]].count(s2.relation) == 0) continue;
          for (const std::string& number : q_.numbers()) {
            for (CompareOp op : kOps) {
              State s = b;
              s.sexpr = SExpr::And(*b.sexpr, SExpr::Compare(op, s2.relation, number));
              s.used.push_back(second_used_[j]);
              s.tokens.push_back("compare:" + std::string(CompareOpKeyword(op)));
              out.push_back(Finish(std::move(s)));
            }
          }
        }
      }
    } else if (level == 3) {
      for (const State& b : beam) {
        State c = b;
        c.sexpr = SExpr::Count(*b.sexpr);
        c.tokens.push_back("count");
        out.push_back(Finish(std::move(c)));
        if (HopDepth(*b.sexpr) != 1) continue;
        for (std::size_t j = 0; j < second_.size(); ++j) {
          const SecondHop& s2 = second_[j].primitive.as<SecondHop>();
          if (s2.direction != Direction::kOut) continue;
          bool numeric = std::any_of(b.first_hops.begin(), b.first_hops.end(), [&](std::size_t fi) {
            return numeric_out_[fi].count(s2.relation) > 0;
          });
          if (!numeric) continue;
          for (bool max : {true, false}) {
            State s = b;
            s.sexpr = max ? SExpr::ArgMax(*b.sexpr, s2.relation)
                          : SExpr::ArgMin(*b.sexpr, s2.relation);
            s.used.push_back(second_used_[j]);
            s.tokens.push_back(max ? "argmax" : "argmin");
            out.push_back(Finish(std::move(s)));
          }
        }
      }
    }
    return out;
  }

  std::optional<std::vector<std::vector<std::string>>> GoldKeys(
      const LogicalForm& gold) const override {
    const SExpr* root = std::get_if<SExpr>(&gold);
    if (root == nullptr) return std::nullopt;
    const SExpr* inner = root;
    if (root->kind == SExprKind::kCount || root->kind == SExprKind::kArgMax ||
        root->kind == SExprKind::kArgMin) {
      inner = &root->args[0];
    }
    std::vector<const SExpr*> branches;
    if (inner->kind == SExprKind::kAnd) {
      for (const SExpr& child : inner->args) {
        if (child.kind != SExprKind::kCompare) branches.push_back(&child);
      }
    } else {
      branches.push_back(inner);
    }
    std::vector<std::vector<std::string>> keys(4);
    for (const SExpr* b : branches) {
      const SExpr* base = b;
      if (b->kind == SExprKind::kJoin && b->args[0].kind == SExprKind::kJoin) base = &b->args[0];
      if (base->kind != SExprKind::kJoin || base->args[0].kind != SExprKind::kEntity) {
        return std::nullopt;
      }
      keys[0].push_back(PrintSExpr(*base));
      keys[1].push_back(PrintSExpr(*b));
    }
    keys[2].push_back(PrintSExpr(*inner));
    keys[3].push_back(PrintSExpr(*root));
    return keys;
  }

  LogicalForm ToForm(const State& s) const override { return *s.sexpr; }

 private:
  State Finish(State s) const {
    s.key = PrintSExpr(*s.sexpr);
    return s;
  }

  const QuestionContext& q_;
  const std::vector<ScoredPrimitive>& first_;
  const std::vector<ScoredPrimitive>& second_;
  std::vector<Used> first_used_;
  std::vector<Used> second_used_;
  std::vector<std::set<SecondHop>> reachable_;
  std::vector<std::set<std::string>> numeric_out_;
  std::vector<std::size_t> mention_;
};

// ---------------------------------------------------------------------------
// DB grammar: FROM, SELECT (with GROUP BY), WHERE, ORDER BY / LIMIT, set
// operation.
// ---------------------------------------------------------------------------

class DbGrammar : public Grammar {
 public:
  DbGrammar(const QuestionContext& q, const RankedPrimitives& primitives, const Database& db,
            const GeneratorConfig& config)
      : q_(q), db_(db), config_(config) {
    const auto& cols = primitives.of(Category::kTbCl);
    const auto& vals = primitives.of(Category::kTbClVl);
    std::vector<Used> col_used = MakeUsed(cols, Category::kTbCl, q, nullptr);
    std::vector<Used> val_used = MakeUsed(vals, Category::kTbClVl, q, nullptr);
    for (std::size_t i = 0; i < cols.size(); ++i) {
      const TbCl& c = cols[i].primitive.as<TbCl>();
      const Table* t = db.FindTable(c.table);
      if (t == nullptr || t->ColumnIndex(c.column) < 0) continue;
      columns_.push_back({c, t->columns[t->ColumnIndex(c.column)].type, col_used[i],
                          q.MentionPosition(c.column)});
    }
    for (std::size_t i = 0; i < vals.size(); ++i) {
      const TbClVl& v = vals[i].primitive.as<TbClVl>();
      const Table* t = db.FindTable(v.table);
      if (t == nullptr || t->ColumnIndex(v.column) < 0) continue;
      Condition cond;
      try {
        cond = ParseSqlCondition(v.table + "." + v.column + " " + v.op + " " + v.value);
      } catch (const ParseError&) {
        continue;
      }
      conditions_.push_back(
          {std::move(cond), v, val_used[i], q.MentionPosition(StripQuotes(v.value))});
    }
    for (const ColumnChoice& c : columns_) AddTable(c.ref.table);
    for (const ConditionChoice& c : conditions_) AddTable(c.ref.table);
  }

  int levels() const override { return 5; }

  std::vector<State> Initial() override {
    std::vector<State> out;
    for (const std::string& t : tables_) {
      State s;
      s.sql.from = t;
      s.tokens = {"from"};
      s.complete = false;
      out.push_back(Finish(std::move(s)));
    }
    if (config_.max_tables < 2) return out;
    for (const std::string& t1 : tables_) {
      for (const std::string& t2 : tables_) {
        if (t1 == t2) continue;
        for (const ColumnChoice& a : columns_) {
          if (a.ref.table != t1) continue;
          for (const ColumnChoice& b : columns_) {
            if (b.ref.table != t2 || a.type != b.type || !JoinCompatible(a.ref, b.ref)) continue;
            State s;
            s.sql.from = t1;
            s.sql.joins.push_back({t2, {t1, a.ref.column}, {t2, b.ref.column}});
            s.used = {a.used, b.used};
            s.tokens = {"join"};
            s.complete = false;
            out.push_back(Finish(std::move(s)));
          }
        }
      }
    }
    return out;
  }

  std::vector<State> Expand(int level, const std::vector<State>& beam) override {
    std::vector<State> out;
    if (level != 2) out.assign(beam.begin(), beam.end());
    for (const State& b : beam) {
      switch (level) {
        case 1: ExpandWhere(b, out); break;
        case 2: ExpandSelect(b, out); break;
        case 3: ExpandOrder(b, out); break;
        case 4: ExpandSetOp(b, out); break;
        default: break;
      }
    }
    return out;
  }

  std::optional<std::vector<std::vector<std::string>>> GoldKeys(
      const LogicalForm& gold) const override {
    const SqlQuery* q = std::get_if<SqlQuery>(&gold);
    if (q == nullptr) return std::nullopt;
    SqlQuery partial;
    partial.from = q->from;
    partial.joins = q->joins;
    std::vector<std::vector<std::string>> keys(5);
    keys[0].push_back(FromKey(partial));
    partial.where = q->where;
    keys[1].push_back(FromKey(partial));
    partial.select = q->select;
    partial.group_by = q->group_by;
    keys[2].push_back(PrintSql(partial));
    partial.order_by = q->order_by;
    partial.limit = q->limit;
    keys[3].push_back(PrintSql(partial));
    keys[4].push_back(PrintSql(*q));
    return keys;
  }

  LogicalForm ToForm(const State& s) const override { return s.sql; }

 private:
  struct ColumnChoice {
    TbCl ref;
    ColumnType type;
    Used used;
    std::size_t mention;
  };
  struct ConditionChoice {
    Condition condition;
    TbClVl ref;
    Used used;
    std::size_t mention;
  };

  void AddTable(const std::string& t) {
    if (std::find(tables_.begin(), tables_.end(), t) == tables_.end()) tables_.push_back(t);
  }

  // Shared key columns, or a <table>_id column pointing at that table's id.
  static bool JoinCompatible(const TbCl& a, const TbCl& b) {
    const std::string ca = ToLower(a.column);
    const std::string cb = ToLower(b.column);
    if (ca == cb) return ca.size() > 3 && ca.compare(ca.size() - 3, 3, "_id") == 0;
    return (ca == ToLower(b.table) + "_id" && cb == "id") ||
           (cb == ToLower(a.table) + "_id" && ca == "id");
  }

  // Key of a state that has no SELECT list yet.
  static std::string FromKey(const SqlQuery& q) {
    std::string key = "FROM " + q.from;
    for (const JoinClause& j : q.joins) {
      key += " JOIN " + j.table + " ON " + PrintColumnRef(j.left) + " = " + PrintColumnRef(j.right);
    }
    if (q.where) key += " WHERE " + PrintBoolExpr(*q.where);
    return key;
  }

  State Finish(State s) const {
    s.key = s.sql.select.empty() ? FromKey(s.sql) : PrintSql(s.sql);
    s.complete = !s.sql.select.empty();
    return s;
  }

  bool InScope(const State& s, const std::string& table) const {
    if (s.sql.from == table) return true;
    return std::any_of(s.sql.joins.begin(), s.sql.joins.end(),
                       [&](const JoinClause& j) { return j.table == table; });
  }

  // Relations between the SELECT list, the WHERE columns and the joins.
  void AddSelectTokens(State& s) const {
    std::set<std::string> select_tables;
    std::set<ColumnRef> select_columns;
    for (const SelectItem& item : s.sql.select) {
      if (item.column.is_star()) continue;
      select_tables.insert(item.column.table);
      select_columns.insert(item.column);
    }
    std::set<std::string> where_tables;
    if (s.sql.where) {
      std::vector<const BoolExpr*> stack = {&*s.sql.where};
      while (!stack.empty()) {
        const BoolExpr* e = stack.back();
        stack.pop_back();
        if (e->kind != BoolExpr::Kind::kLeaf) {
          for (const BoolExpr& c : e->children) stack.push_back(&c);
          continue;
        }
        where_tables.insert(e->leaf.column.table);
        if (select_columns.count(e->leaf.column) > 0) s.tokens.push_back("where_on_select");
      }
    }
    if (s.sql.joins.empty()) return;
    if (select_tables.count(s.sql.from) > 0) s.tokens.push_back("join_select_on_from");
    bool split = std::any_of(where_tables.begin(), where_tables.end(),
                             [&](const std::string& t) { return select_tables.count(t) == 0; });
    if (split) s.tokens.push_back("join_where_elsewhere");
    for (const JoinClause& j : s.sql.joins) {
      if (select_tables.count(j.table) == 0 && where_tables.count(j.table) == 0) {
        s.tokens.push_back("join_idle_table");
      }
    }
  }

  void ExpandSelect(const State& b, std::vector<State>& out) const {
    auto emit = [&](State s) {
      AddSelectTokens(s);
      out.push_back(Finish(std::move(s)));
    };
    {
      State s = b;
      s.sql.select = {{Aggregate::kCount, ColumnRef::Star()}};
      s.tokens.push_back("select:count_star");
      emit(std::move(s));
    }
    std::vector<const ColumnChoice*> scope;
    for (const ColumnChoice& c : columns_) {
      if (InScope(b, c.ref.table)) scope.push_back(&c);
    }
    for (const ColumnChoice* c : scope) {
      ColumnRef ref{c->ref.table, c->ref.column};
      std::string type = c->type == ColumnType::kNumber ? "number" : "text";
      {
        State s = b;
        s.sql.select = {{Aggregate::kNone, ref}};
        s.used.push_back(c->used);
        s.tokens.push_back("select:column");
        s.tokens.push_back("select_type:" + type);
        emit(std::move(s));
      }
      std::vector<Aggregate> aggs = {Aggregate::kCount, Aggregate::kMax, Aggregate::kMin};
      if (c->type == ColumnType::kNumber) {
        aggs.push_back(Aggregate::kAvg);
        aggs.push_back(Aggregate::kSum);
      }
      for (Aggregate agg : aggs) {
        State s = b;
        s.sql.select = {{agg, ref}};
        s.used.push_back(c->used);
        s.tokens.push_back("select:" + ToLower(AggregateKeyword(agg)));
        s.tokens.push_back("select_type:" + type);
        emit(std::move(s));
      }
      {
        State s = b;
        s.sql.select = {{Aggregate::kNone, ref}, {Aggregate::kCount, ColumnRef::Star()}};
        s.sql.group_by = {ref};
        s.used.push_back(c->used);
        s.tokens.push_back("select:group_count");
        emit(std::move(s));
      }
      {
        State s = b;
        s.sql.select = {{Aggregate::kNone, ref}};
        s.sql.group_by = {ref};
        s.used.push_back(c->used);
        s.tokens.push_back("select:group");
        emit(std::move(s));
      }
    }
    for (std::size_t i = 0; i < scope.size(); ++i) {
      for (std::size_t j = i + 1; j < scope.size(); ++j) {
        const ColumnChoice* x = scope[i];
        const ColumnChoice* y = scope[j];
        if (std::make_pair(y->mention, y->ref) < std::make_pair(x->mention, x->ref))
          std::swap(x, y);
        State s = b;
        s.sql.select = {{Aggregate::kNone, {x->ref.table, x->ref.column}},
                        {Aggregate::kNone, {y->ref.table, y->ref.column}}};
        s.used.push_back(x->used);
        s.used.push_back(y->used);
        s.tokens.push_back("select:two");
        emit(std::move(s));
      }
    }
  }

  void ExpandWhere(const State& b, std::vector<State>& out) const {
    std::vector<const ConditionChoice*> scope;
    for (const ConditionChoice& c : conditions_) {
      if (InScope(b, c.ref.table)) scope.push_back(&c);
    }
    std::sort(scope.begin(), scope.end(), [](const ConditionChoice* x, const ConditionChoice* y) {
      return std::make_pair(x->mention, x->ref) < std::make_pair(y->mention, y->ref);
    });
    std::size_t n = scope.size();
    std::size_t cap = std::min(config_.max_conditions, n);
    // Subsets as increasing index lists, size 1..cap.
    std::vector<std::vector<std::size_t>> subsets;
    std::vector<std::size_t> current;
    auto recurse = [&](auto&& self, std::size_t start) -> void {
      if (!current.empty()) subsets.push_back(current);
      if (current.size() == cap) return;
      for (std::size_t i = start; i < n; ++i) {
        current.push_back(i);
        self(self, i + 1);
        current.pop_back();
      }
    };
    recurse(recurse, 0);
    for (const std::vector<std::size_t>& subset : subsets) {
      std::set<std::pair<std::string, std::string>> keys;
      bool distinct = true;
      for (std::size_t i : subset) {
        distinct &= keys.insert({scope[i]->ref.column, scope[i]->ref.op}).second;
      }
      if (!distinct) continue;
      for (bool use_or : {false, true}) {
        if (use_or && subset.size() != 2) continue;
        State s = b;
        std::optional<BoolExpr> where;
        for (std::size_t i : subset) {
          const ConditionChoice& c = *scope[i];
          BoolExpr leaf = BoolExpr::Leaf(c.condition);
          if (!where) {
            where = std::move(leaf);
          } else if (use_or) {
            where = BoolExpr::Or(std::move(*where), std::move(leaf));
          } else {
            where = BoolExpr::And(std::move(*where), std::move(leaf));
          }
          s.used.push_back(c.used);
          s.tokens.push_back("where_op:" + c.ref.op);
        }
        s.sql.where = std::move(where);
        s.tokens.push_back("where:" + std::to_string(subset.size()));
        if (use_or) s.tokens.push_back("or");
        out.push_back(Finish(std::move(s)));
      }
    }
  }

  void ExpandOrder(const State& b, std::vector<State>& out) const {
    bool aggregated = std::any_of(b.sql.select.begin(), b.sql.select.end(),
                                  [](const SelectItem& s) { return s.agg != Aggregate::kNone; });
    std::vector<std::int64_t> limits = {1};
    for (const std::string& n : q_.numbers()) {
      std::optional<double> v = ParseNumber(n);
      if (v && *v >= 2 && *v <= 100 && *v == std::floor(*v))
        limits.push_back(static_cast<std::int64_t>(*v));
    }
    if (!b.sql.group_by.empty()) {
      for (bool desc : {true, false}) {
        State s = b;
        s.sql.order_by = OrderBy{Aggregate::kCount, ColumnRef::Star(), desc};
        s.sql.limit = 1;
        s.tokens.push_back(desc ? "order:count_desc" : "order:count_asc");
        s.tokens.push_back("limit:1");
        out.push_back(Finish(std::move(s)));
      }
      return;
    }
    if (aggregated) return;
    for (const ColumnChoice& c : columns_) {
      if (!InScope(b, c.ref.table)) continue;
      for (bool desc : {false, true}) {
        for (std::optional<std::int64_t> limit :
             std::vector<std::optional<std::int64_t>>{std::nullopt, limits[0]}) {
          std::vector<std::optional<std::int64_t>> options = {limit};
          if (limit) {
            for (std::size_t i = 1; i < limits.size(); ++i) options.push_back(limits[i]);
          }
          for (const std::optional<std::int64_t>& lim : options) {
            State s = b;
            s.sql.order_by = OrderBy{Aggregate::kNone, {c.ref.table, c.ref.column}, desc};
            s.sql.limit = lim;
            s.used.push_back(c.used);
            s.tokens.push_back(desc ? "order:desc" : "order:asc");
            if (lim) s.tokens.push_back(*lim == 1 ? "limit:1" : "limit:n");
            for (const SelectItem& item : s.sql.select) {
              if (item.column.table == c.ref.table && item.column.column == c.ref.column) {
                s.tokens.push_back("order_on_select");
              }
            }
            out.push_back(Finish(std::move(s)));
          }
        }
      }
    }
  }

  void ExpandSetOp(const State& b, std::vector<State>& out) const {
    if (!config_.set_ops || b.sql.order_by || !b.sql.group_by.empty() || !b.sql.joins.empty() ||
        !b.sql.where || b.sql.where->kind != BoolExpr::Kind::kLeaf) {
      return;
    }
    if (std::any_of(b.sql.select.begin(), b.sql.select.end(),
                    [](const SelectItem& s) { return s.agg != Aggregate::kNone; })) {
      return;
    }
    const Condition& left = b.sql.where->leaf;
    for (const ConditionChoice& c : conditions_) {
      if (c.ref.table != b.sql.from || c.condition == left) continue;
      for (SetOp op : {SetOp::kUnion, SetOp::kIntersect, SetOp::kExcept}) {
        State s = b;
        SqlQuery rhs;
        rhs.select = b.sql.select;
        rhs.from = b.sql.from;
        rhs.where = BoolExpr::Leaf(c.condition);
        s.sql.set_op = op;
        s.sql.set_rhs = Box<SqlQuery>(std::move(rhs));
        s.used.push_back(c.used);
        s.tokens.push_back("setop:" + ToLower(SetOpKeyword(op)));
        out.push_back(Finish(std::move(s)));
      }
    }
  }

  const QuestionContext& q_;
  const Database& db_;
  const GeneratorConfig& config_;
  std::vector<ColumnChoice> columns_;
  std::vector<ConditionChoice> conditions_;
  std::vector<std::string> tables_;
};

// ---------------------------------------------------------------------------
// Beam search
// ---------------------------------------------------------------------------

bool Better(const State& a, const State& b) {
  if (a.score != b.score) return a.score > b.score;
  return a.key < b.key;
}

class Search {
 public:
  Search(Grammar& grammar, const QuestionContext& q, const CompositionScorer& scorer,
         bool position_features)
      : grammar_(grammar), q_(q), scorer_(scorer), position_features_(position_features) {}

  void Score(State& s) const {
    s.features = ComputeFeatures(s, q_, position_features_);
    s.score = scorer_.Score(s.features);
  }

  // Dedupe by key, sort best first, keep `width`.
  std::vector<State> Prune(std::vector<State> states, std::size_t width) const {
    for (State& s : states) Score(s);
    std::sort(states.begin(), states.end(), Better);
    std::vector<State> out;
    std::set<std::string> seen;
    for (State& s : states) {
      if (out.size() == width) break;
      if (seen.insert(s.key).second) out.push_back(std::move(s));
    }
    return out;
  }

  std::vector<State> Level(int level, const std::vector<State>& beam, std::size_t width) const {
    if (level == 0) return Prune(grammar_.Initial(), width);
    return Prune(grammar_.Expand(level, beam), width);
  }

  // Keeps only states whose key is wanted; nullopt if any key is missing.
  static std::optional<std::vector<State>> Select(std::vector<State> states,
                                                  const std::vector<std::string>& keys) {
    std::vector<State> out;
    for (const std::string& k : keys) {
      auto it =
          std::find_if(states.begin(), states.end(), [&](const State& s) { return s.key == k; });
      if (it == states.end()) return std::nullopt;
      if (std::none_of(out.begin(), out.end(), [&](const State& s) { return s.key == k; })) {
        out.push_back(*it);
      }
    }
    return out;
  }

  // Gold partial states per level, or nullopt when the gold is unreachable.
  std::optional<std::vector<std::vector<State>>> ForceDecode(const LogicalForm& gold) const {
    auto keys = grammar_.GoldKeys(gold);
    if (!keys) return std::nullopt;
    std::vector<std::vector<State>> levels;
    std::vector<State> beam;
    for (int level = 0; level < grammar_.levels(); ++level) {
      std::vector<State> expanded = level == 0 ? grammar_.Initial() : grammar_.Expand(level, beam);
      std::optional<std::vector<State>> kept = Select(std::move(expanded), (*keys)[level]);
      if (!kept) return std::nullopt;
      for (State& s : *kept) Score(s);
      beam = *kept;
      levels.push_back(std::move(*kept));
    }
    return levels;
  }

  Grammar& grammar() { return grammar_; }

 private:
  Grammar& grammar_;
  const QuestionContext& q_;
  const CompositionScorer& scorer_;
  bool position_features_;
};

std::unique_ptr<Grammar> MakeGrammar(const QuestionContext& q, const RankedPrimitives& primitives,
                                     Modality modality, const Stores& stores,
                                     const GeneratorConfig& config) {
  if (modality == Modality::kKb) {
    if (stores.kb == nullptr) throw Error("KB composition needs a knowledge base");
    return std::make_unique<KbGrammar>(q, primitives, *stores.kb, config.traversal);
  }
  if (stores.db == nullptr) throw Error("DB composition needs a database");
  return std::make_unique<DbGrammar>(q, primitives, *stores.db, config);
}

std::vector<State> RunBeam(Search& search, int levels, std::size_t width) {
  std::vector<State> beam;
  for (int level = 0; level < levels; ++level) beam = search.Level(level, beam, width);
  return beam;
}

Modality ModalityOf(const LogicalForm& form) {
  return std::holds_alternative<SqlQuery>(form) ? Modality::kDb : Modality::kKb;
}

void AddScaled(FeatureMap& w, const FeatureMap& f, double scale) {
  for (const auto& [name, value] : f) w[name] += scale * value;
}

std::uint64_t Mix(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  std::uint64_t x = seed ^ (a * 0x9E3779B97F4A7C15ULL) ^ (b * 0xC2B2AE3D27D4EB4FULL);
  x ^= x >> 31;
  x *= 0xBF58476D1CE4E5B9ULL;
  x ^= x >> 27;
  return x;
}

}  // namespace

// ---------------------------------------------------------------------------
// Public API
// ---------------------------------------------------------------------------

RankedPrimitives ShufflePrimitives(const RankedPrimitives& primitives, std::uint64_t seed) {
  RankedPrimitives out = primitives;
  Rng rng(seed);
  for (auto& list : out.lists) rng.Shuffle(list);
  return out;
}

RankedPrimitives ReversePrimitives(const RankedPrimitives& primitives) {
  RankedPrimitives out = primitives;
  for (auto& list : out.lists) std::reverse(list.begin(), list.end());
  return out;
}

std::string LinearizeInput(std::string_view question, const RankedPrimitives& primitives,
                           Modality modality, std::optional<std::uint64_t> shuffle_seed) {
  RankedPrimitives p = shuffle_seed ? ShufflePrimitives(primitives, *shuffle_seed) : primitives;
  auto join = [](const std::vector<ScoredPrimitive>& list) {
    std::string out;
    for (std::size_t i = 0; i < list.size(); ++i) {
      if (i > 0) out += ", ";
      out += list[i].primitive.surface();
    }
    return out;
  };
  std::string out = "[" + std::string(question) + ";";
  if (modality == Modality::kKb) {
    out += " <|second_hop|> " + join(p.of(Category::kSecondHop));
    out += " ; <|first_hop|> " + join(p.of(Category::kFirstHop));
    return out + "]";
  }
  std::vector<std::string> tables;
  std::map<std::string, std::vector<std::string>> items;
  auto add = [&](const std::string& table, std::string item) {
    if (items.find(table) == items.end()) tables.push_back(table);
    items[table].push_back(std::move(item));
  };
  for (const ScoredPrimitive& s : p.of(Category::kTbCl)) {
    const TbCl& c = s.primitive.as<TbCl>();
    add(c.table, c.column);
  }
  for (const ScoredPrimitive& s : p.of(Category::kTbClVl)) {
    const TbClVl& v = s.primitive.as<TbClVl>();
    add(v.table, v.column + " " + v.op + " " + v.value);
  }
  for (const std::string& t : tables) {
    out += " |" + t + "| ";
    const std::vector<std::string>& list = items[t];
    for (std::size_t i = 0; i < list.size(); ++i) {
      if (i > 0) out += ", ";
      out += list[i];
    }
  }
  return out + "]";
}

double CompositionScorer::Score(const FeatureMap& features) const {
  double s = 0.0;
  for (const auto& [name, value] : features) {
    auto it = weights_.find(name);
    if (it != weights_.end()) s += it->second * value;
  }
  return s;
}

double CompositionScorer::weight(std::string_view name) const {
  auto it = weights_.find(name);
  return it == weights_.end() ? 0.0 : it->second;
}

std::string CompositionScorer::ToJson() const {
  json j;
  j["format"] = "uniparse-composer";
  j["version"] = 1;
  json w = json::object();
  for (const auto& [name, value] : weights_) {
    if (value != 0.0) w[name] = value;
  }
  j["weights"] = std::move(w);
  return j.dump(2) + "\n";
}

CompositionScorer CompositionScorer::FromJson(std::string_view text) {
  try {
    json j = json::parse(text);
    if (j.at("format") != "uniparse-composer") throw Error("not a composition scorer");
    CompositionScorer s;
    for (const auto& [name, value] : j.at("weights").items())
      s.weights_[name] = value.get<double>();
    return s;
  } catch (const json::exception& e) {
    throw Error(std::string("malformed composition scorer: ") + e.what());
  }
}

std::vector<Candidate> ComposeCandidates(std::string_view question,
                                         const RankedPrimitives& primitives, Modality modality,
                                         const Stores& stores, const CompositionScorer& scorer,
                                         const GeneratorConfig& config) {
  QuestionContext q(question);
  std::unique_ptr<Grammar> grammar = MakeGrammar(q, primitives, modality, stores, config);
  Search search(*grammar, q, scorer, /*position_features=*/false);
  std::vector<State> beam = RunBeam(search, grammar->levels(), std::max(config.beam, config.k));
  std::vector<Candidate> out;
  for (State& s : beam) {
    if (!s.complete) continue;
    if (out.size() == config.k) break;
    Candidate c;
    c.form = grammar->ToForm(s);
    c.text = s.key;
    c.score = s.score;
    c.used = DecomposeLogicalForm(c.form).primitives;
    c.features = std::move(s.features);
    out.push_back(std::move(c));
  }
  return out;
}

bool IsComposable(const LogicalForm& gold, const RankedPrimitives& primitives,
                  std::string_view question, const Stores& stores, const GeneratorConfig& config) {
  QuestionContext q(question);
  std::unique_ptr<Grammar> grammar = MakeGrammar(q, primitives, ModalityOf(gold), stores, config);
  CompositionScorer none;
  Search search(*grammar, q, none, config.position_features);
  return search.ForceDecode(gold).has_value();
}

CompositionScorer TrainCompositionScorer(const std::vector<ComposerExample>& corpus,
                                         const Stores& stores, const GeneratorConfig& config,
                                         const CompositionScorer& initial,
                                         ComposerTrainingReport* report) {
  ComposerTrainingReport local;
  local.examples = corpus.size();
  std::vector<std::size_t> trainable;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const ComposerExample& ex = corpus[i];
    if (IsNoAnswer(ex.gold) ||
        !IsComposable(ex.gold, ex.primitives, ex.question.text, stores, config)) {
      ++local.unreachable;
    } else {
      trainable.push_back(i);
    }
  }
  if (trainable.empty()) throw Error("no composable gold form in the training corpus");

  CompositionScorer scorer = initial;
  // Averaged weights generalize better than the last iterate.
  FeatureMap drift;  // summed offsets from the initial weights
  double steps = 0.0;
  Rng rng(config.seed);
  const double lr = config.learning_rate;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    rng.Shuffle(trainable);
    std::size_t correct = 0;
    for (std::size_t idx : trainable) {
      const ComposerExample& ex = corpus[idx];
      RankedPrimitives prims =
          config.shuffle_augmentation
              ? ShufflePrimitives(ex.primitives,
                                  Mix(config.seed, static_cast<std::uint64_t>(epoch), idx))
              : ex.primitives;
      QuestionContext q(ex.question.text);
      std::unique_ptr<Grammar> grammar = MakeGrammar(q, prims, ModalityOf(ex.gold), stores, config);
      Search search(*grammar, q, scorer, config.position_features);
      std::optional<std::vector<std::vector<State>>> gold = search.ForceDecode(ex.gold);
      if (!gold) continue;  // position-independent, so only on a changed grammar

      std::vector<State> beam;
      bool early = false;
      for (int level = 0; level < grammar->levels() && !early; ++level) {
        beam = search.Level(level, beam, config.beam);
        for (const State& g : (*gold)[level]) {
          bool present = std::any_of(beam.begin(), beam.end(),
                                     [&](const State& s) { return s.key == g.key; });
          if (present) continue;
          const State* rival = nullptr;
          for (const State& s : beam) {
            bool is_gold = std::any_of((*gold)[level].begin(), (*gold)[level].end(),
                                       [&](const State& x) { return x.key == s.key; });
            if (!is_gold) {
              rival = &s;
              break;
            }
          }
          if (rival != nullptr) {
            AddScaled(scorer.mutable_weights(), g.features, lr);
            AddScaled(scorer.mutable_weights(), rival->features, -lr);
          }
          early = true;
        }
      }
      if (!early) {
        const State& g = gold->back().front();
        std::vector<const State*> violators;
        for (const State& s : beam) {
          if (!s.complete || s.key == g.key) continue;
          if (s.score > g.score - config.margin) violators.push_back(&s);
          if (violators.size() == config.max_violations) break;
        }
        if (!beam.empty() && beam.front().key == g.key) ++correct;
        if (!violators.empty()) {
          double scale = lr / static_cast<double>(violators.size());
          for (const State* v : violators) {
            AddScaled(scorer.mutable_weights(), g.features, scale);
            AddScaled(scorer.mutable_weights(), v->features, -scale);
          }
        }
      }
      for (const auto& [name, value] : scorer.weights())
        drift[name] += value - initial.weight(name);
      steps += 1.0;
    }
    local.epoch_accuracy.push_back(static_cast<double>(correct) /
                                   static_cast<double>(trainable.size()));
  }
  CompositionScorer averaged = initial;
  for (const auto& [name, value] : drift) {
    if (value == 0.0) continue;
    double w = initial.weight(name) + value / steps;
    if (w != 0.0) {
      averaged.mutable_weights()[name] = w;
    } else {
      averaged.mutable_weights().erase(name);
    }
  }
  if (report != nullptr) *report = std::move(local);
  return averaged;
}

LogicalForm FallbackForm(const RankedPrimitives& primitives, Modality modality,
                         const Stores& stores, const TraversalOptions& traversal) {
  auto executes_non_empty = [&](const LogicalForm& f) {
    try {
      return ExecuteLogicalForm(f, stores).non_empty;
    } catch (const ExecutionError&) {
      return false;
    }
  };
  auto executes = [&](const LogicalForm& f) {
    try {
      ExecuteLogicalForm(f, stores);
      return true;
    } catch (const ExecutionError&) {
      return false;
    }
  };
  if (modality == Modality::kKb) {
    const auto& firsts = primitives.of(Category::kFirstHop);
    if (firsts.empty() || stores.kb == nullptr) return NoAnswer{};
    const FirstHop& hop = firsts.front().primitive.as<FirstHop>();
    SExpr one =
        SExpr::Join(hop.relation, SExpr::Entity(hop.entity), hop.direction == Direction::kOut);
    if (executes_non_empty(one)) return one;
    std::vector<SecondHop> reach = ReachableSecondHops(hop, *stores.kb, traversal);
    for (const ScoredPrimitive& s : primitives.of(Category::kSecondHop)) {
      const SecondHop& s2 = s.primitive.as<SecondHop>();
      if (std::find(reach.begin(), reach.end(), s2) == reach.end()) continue;
      SExpr two = SExpr::Join(s2.relation, one, s2.direction == Direction::kOut);
      if (executes_non_empty(two)) return two;
      break;
    }
    return one;
  }
  if (stores.db == nullptr) return NoAnswer{};
  std::optional<ColumnRef> column;
  const auto& cols = primitives.of(Category::kTbCl);
  const auto& vals = primitives.of(Category::kTbClVl);
  for (const ScoredPrimitive& c : cols) {
    const TbCl& ref = c.primitive.as<TbCl>();
    const Table* t = stores.db->FindTable(ref.table);
    if (t != nullptr && t->ColumnIndex(ref.column) >= 0) {
      column = ColumnRef{ref.table, ref.column};
      break;
    }
  }
  if (!column) {
    for (const ScoredPrimitive& v : vals) {
      const TbClVl& ref = v.primitive.as<TbClVl>();
      const Table* t = stores.db->FindTable(ref.table);
      if (t != nullptr && t->ColumnIndex(ref.column) >= 0) {
        column = ColumnRef{ref.table, ref.column};
        break;
      }
    }
  }
  if (!column) return NoAnswer{};
  SqlQuery q;
  q.select = {{Aggregate::kNone, *column}};
  q.from = column->table;
  if (!vals.empty()) {
    const TbClVl& v = vals.front().primitive.as<TbClVl>();
    if (v.table == q.from) {
      try {
        SqlQuery filtered = q;
        filtered.where = BoolExpr::Leaf(
            ParseSqlCondition(v.table + "." + v.column + " " + v.op + " " + v.value));
        if (executes_non_empty(filtered)) return filtered;
      } catch (const ParseError&) {
      }
    }
  }
  if (!executes(q)) return NoAnswer{};
  return q;
}

Inference ExecutionAugmentedInfer(const std::vector<Candidate>& candidates, const Stores& stores,
                                  const RankedPrimitives& primitives, Modality modality,
                                  const TraversalOptions& traversal) {
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    try {
      Execution e = ExecuteLogicalForm(candidates[i].form, stores);
      if (e.non_empty) return {candidates[i].form, std::move(e), static_cast<int>(i)};
    } catch (const ExecutionError&) {
    }
  }
  Inference out;
  out.form = FallbackForm(primitives, modality, stores, traversal);
  try {
    out.execution = ExecuteLogicalForm(out.form, stores);
  } catch (const ExecutionError&) {
    out.form = NoAnswer{};
    out.execution = {};
  }
  return out;
}

std::string PredictionToJson(const PredictionRecord& r) {
  json candidates = json::array();
  for (const auto& [form, score] : r.candidates) {
    candidates.push_back({{"form", form}, {"score", score}});
  }
  json j = {{"id", r.id}, {"candidates", std::move(candidates)}, {"final", r.final_form},
            {"answers", r.answers}};
  return j.dump();
}

PredictionRecord PredictionFromJson(std::string_view line) {
  try {
    json j = json::parse(line);
    PredictionRecord r;
    r.id = j.at("id").get<std::string>();
    for (const json& c : j.at("candidates")) {
      r.candidates.emplace_back(c.at("form").get<std::string>(), c.at("score").get<double>());
    }
    r.final_form = j.at("final").get<std::string>();
    r.answers = j.at("answers").get<std::vector<std::string>>();
    return r;
  } catch (const json::exception& e) {
    throw Error(std::string("malformed prediction record: ") + e.what());
  }
}

}  // namespace uniparse
