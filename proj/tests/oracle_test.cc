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

#include <gtest/gtest.h>

#include <set>
#include <string>
#include <vector>

#include "pipeline.h"
#include "printers.h"
#include "random_instances.h"
#include "uniparse/enumerator.h"
#include "uniparse/error.h"

namespace uniparse {
namespace {

using testing::RandomDatabase;
using testing::RandomKnowledgeBase;
using testing::RandomSExpr;
using testing::RandomSqlQuery;
using testing::SortedRows;

KnowledgeBase StarKb(std::size_t n, std::size_t m) {
  return cli::StarKnowledgeBase({n, m});
}

TEST(OracleKb, StarCountsFivePlusThirtyFive) {
  KnowledgeBase kb = StarKb(5, 7);
  std::vector<SExpr> forms = oracle::EnumerateLogicalFormsKb({"e0"}, kb);
  std::size_t depth1 = 0, depth2 = 0;
  for (const SExpr& f : forms) (HopDepth(f) == 1 ? depth1 : depth2)++;
  EXPECT_EQ(depth1, 5u);
  EXPECT_EQ(depth2, 35u);
}

TEST(OracleKb, StarThirtyByForty) {
  KnowledgeBase kb = StarKb(30, 40);
  EXPECT_EQ(oracle::EnumerateLogicalFormsKb({"e0"}, kb).size(), 30u + 1200u);
}

TEST(OracleKb, SingleTriple) {
  KnowledgeBase kb({{"e1", "r1", EntityObject("e2")}});
  std::vector<SExpr> strict = oracle::EnumerateLogicalFormsKb({"e1"}, kb);
  ASSERT_EQ(strict.size(), 1u);
  EXPECT_EQ(PrintSExpr(strict[0]), "(JOIN (R r1) e1)");

  TraversalOptions loose;
  loose.allow_backtrack = true;
  std::vector<SExpr> all = oracle::EnumerateLogicalFormsKb({"e1"}, kb, 2, loose);
  ASSERT_EQ(all.size(), 2u);
  EXPECT_EQ(PrintSExpr(all[1]), "(JOIN r1 (JOIN (R r1) e1))");
}

TEST(OracleKb, NoLinkedEntities) {
  EXPECT_TRUE(oracle::EnumerateLogicalFormsKb({}, StarKb(3, 3)).empty());
}

TEST(OracleKb, FormCountIsFirstHopsPlusFanOut) {
  // Unique relation labels: each first hop contributes itself plus one form
  // per second hop beyond it.
  KnowledgeBase kb({{"a", "p", EntityObject("b")},
                    {"a", "q", EntityObject("c")},
                    {"b", "x", EntityObject("d")},
                    {"b", "y", EntityObject("e")},
                    {"c", "z", Object{ObjectKind::kInt, "4"}}});
  EnumerationResult prims = EnumerateKbPrimitives(Question{}, kb, {"a"});
  std::size_t expected = 0;
  for (const Primitive& p : prims.of(Category::kFirstHop)) {
    expected += 1 + ReachableSecondHops(p.as<FirstHop>(), kb).size();
  }
  EXPECT_EQ(oracle::EnumerateLogicalFormsKb({"a"}, kb).size(), expected);
  EXPECT_GE(expected, prims.count(Category::kFirstHop));
}

TEST(OracleKb, EmptyKbDenotesNothing) {
  KnowledgeBase kb;
  EXPECT_TRUE(oracle::BruteExecuteSExpr(ParseSExpr("(JOIN r e1)"), kb).empty());
  EXPECT_TRUE(oracle::BruteExecuteSExpr(ParseSExpr("(JOIN (R r) e1)"), kb).empty());
}

TEST(OracleKb, AndOfSelf) {
  Rng rng(11);
  KnowledgeBase kb = RandomKnowledgeBase(rng);
  SExpr s = ParseSExpr("(JOIN (R r0) e1)");
  EXPECT_EQ(oracle::BruteExecuteSExpr(SExpr::And(s, s), kb), oracle::BruteExecuteSExpr(s, kb));
}

// Runs both executors; equal answers or both raising count as agreement.
template <typename Fast, typename Brute>
::testing::AssertionResult Agree(Fast fast, Brute brute, bool* raised) {
  std::optional<decltype(fast())> a, b;
  std::string ea, eb;
  try {
    a = fast();
  } catch (const ExecutionError& e) {
    ea = e.what();
  }
  try {
    b = brute();
  } catch (const ExecutionError& e) {
    eb = e.what();
  }
  *raised = !a.has_value();
  if (a.has_value() != b.has_value()) {
    return ::testing::AssertionFailure() << "only one side raised: '" << ea << "' / '" << eb << "'";
  }
  if (a && !(*a == *b)) return ::testing::AssertionFailure() << "different results";
  return ::testing::AssertionSuccess();
}

TEST(OracleKb, DifferentialSample) {
  Rng rng(2024);
  std::size_t raised_total = 0;
  for (int i = 0; i < 200; ++i) {
    KnowledgeBase kb = RandomKnowledgeBase(rng);
    SExpr expr = RandomSExpr(rng, kb, 3);
    bool raised = false;
    EXPECT_TRUE(Agree([&] { return ExecuteSExpr(expr, kb); },
                      [&] { return oracle::BruteExecuteSExpr(expr, kb); }, &raised))
        << PrintSExpr(expr);
    raised_total += raised;
  }
  EXPECT_LT(raised_total, 100u);
}

TEST(OracleSql, StarSelectReturnsAllRows) {
  Rng rng(5);
  Database db = RandomDatabase(rng, 1, 10);
  ResultTable r = oracle::BruteExecuteSql(ParseSql("SELECT * FROM t0"), db);
  EXPECT_EQ(r.size(), db.tables()[0].rows.size());
}

TEST(OracleSql, UnsatisfiableConditionIsEmpty) {
  Rng rng(5);
  Database db = RandomDatabase(rng, 1, 10);
  EXPECT_TRUE(
      oracle::BruteExecuteSql(ParseSql("SELECT t0.a FROM t0 WHERE t0.id > 100"), db).empty());
}

TEST(OracleSql, DifferentialSample) {
  Rng rng(77);
  std::size_t raised_total = 0;
  for (int i = 0; i < 200; ++i) {
    Database db = RandomDatabase(rng);
    SqlQuery q = RandomSqlQuery(rng, db, 1);
    bool raised = false;
    bool ordered = q.order_by.has_value() && q.set_op == SetOp::kNone;
    auto fast = [&] {
      ResultTable r = ExecuteSql(q, db);
      return ordered ? r : SortedRows(r);
    };
    auto brute = [&] {
      ResultTable r = oracle::BruteExecuteSql(q, db);
      return ordered ? r : SortedRows(r);
    };
    EXPECT_TRUE(Agree(fast, brute, &raised)) << PrintSql(q);
    raised_total += raised;
  }
  EXPECT_LT(raised_total, 100u);
}

TEST(OracleSql, LogicalFormEnumeration) {
  Database db("d", {Table{"head",
                          {{"name", ColumnType::kText}, {"age", ColumnType::kNumber}},
                          {{std::string("Kyle"), 61.0}}}});
  std::vector<SqlQuery> none = oracle::EnumerateLogicalFormsDb(db, {});
  // name: plain, COUNT, MAX, MIN; age adds AVG and SUM.
  EXPECT_EQ(none.size(), 4u + 6u);
  std::vector<SqlQuery> with = oracle::EnumerateLogicalFormsDb(db, {{"head", "age", ">", "56"}});
  EXPECT_EQ(with.size(), 2u * (4u + 6u));
}

TEST(OracleReachability, MatchesEnumeratorOnRandomKbs) {
  Rng rng(3);
  for (int i = 0; i < 50; ++i) {
    KnowledgeBase kb = RandomKnowledgeBase(rng, 30);
    std::vector<FirstHop> firsts;
    EnumerationResult r = EnumerateKbPrimitives(Question{}, kb, {"e" + std::to_string(i % 10)});
    for (const Primitive& p : r.of(Category::kFirstHop)) firsts.push_back(p.as<FirstHop>());
    std::set<SecondHop> fast;
    for (const FirstHop& f : firsts) {
      for (const SecondHop& s : ReachableSecondHops(f, kb)) fast.insert(s);
    }
    EXPECT_EQ(fast, oracle::ReachableSecondHops(firsts, kb));
  }
}

}  // namespace
}  // namespace uniparse
