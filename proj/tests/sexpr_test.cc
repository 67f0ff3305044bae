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

#include <gtest/gtest.h>

#include <set>
#include <string>
#include <vector>

#include "printers.h"
#include "random_instances.h"
#include "uniparse/error.h"

namespace uniparse {
namespace {

std::vector<std::string> Surfaces(const Decomposition& d) {
  std::vector<std::string> out;
  for (const Primitive& p : d.primitives) out.push_back(p.surface());
  return out;
}

TEST(ParseSExpr, SingleJoin) {
  EXPECT_EQ(ParseSExpr("(JOIN r1 e1)"), SExpr::Join("r1", SExpr::Entity("e1")));
}

TEST(ParseSExpr, AndWithReverse) {
  SExpr e = ParseSExpr("(AND (JOIN r1 e1) (JOIN (R r2) e2))");
  ASSERT_EQ(e.kind, SExprKind::kAnd);
  EXPECT_FALSE(e.args[0].reverse);
  EXPECT_TRUE(e.args[1].reverse);
  EXPECT_EQ(e.args[1].symbol, "r2");
}

TEST(ParseSExpr, CountOverNestedJoinsReprints) {
  SExpr e = ParseSExpr("(COUNT   (JOIN r1\n(JOIN r2 e1)))");
  EXPECT_EQ(e.kind, SExprKind::kCount);
  EXPECT_EQ(PrintSExpr(e), "(COUNT (JOIN r1 (JOIN r2 e1)))");
}

TEST(ParseSExpr, ErrorsCarryOffsets) {
  struct Case {
    std::string text;
    std::size_t offset;
  };
  for (const Case& c : std::vector<Case>{{"(JOIN r1 e1", 11},
                                         {"(FOO r1 e1)", 1},
                                         {"(JOIN r1)", 8},
                                         {"(JOIN r1 e1) x", 13},
                                         {"(AND (COUNT e1) e2)", 6}}) {
    try {
      ParseSExpr(c.text);
      ADD_FAILURE() << c.text;
    } catch (const ParseError& e) {
      EXPECT_EQ(e.offset(), c.offset) << c.text << ": " << e.what();
    }
  }
}

TEST(PrintSExpr, Basics) {
  EXPECT_EQ(PrintSExpr(SExpr::Entity("e1")), "e1");
  EXPECT_EQ(PrintSExpr(SExpr::Join("r1", SExpr::Entity("e1"))), "(JOIN r1 e1)");
  EXPECT_EQ(PrintSExpr(SExpr::Compare(CompareOp::kGe, "r", "hello world")),
            "(GE r \"hello world\")");
}

TEST(SExprProperties, RoundTrip) {
  Rng rng(42);
  for (int i = 0; i < 2000; ++i) {
    SExpr ast = testing::RandomSExprAst(rng);
    std::string printed = PrintSExpr(ast);
    SExpr back = ParseSExpr(printed);
    ASSERT_EQ(back, ast) << printed;
    EXPECT_EQ(PrintSExpr(back), printed);
  }
}

TEST(DecomposeSExpr, Examples) {
  Decomposition a = DecomposeSExpr(ParseSExpr("(JOIN r1 e1)"));
  EXPECT_EQ(a.primitives,
            (std::vector<Primitive>{Primitive(FirstHop{"e1", "r1", Direction::kIn})}));
  EXPECT_EQ(a.operations, (std::vector<std::string>{"JOIN"}));

  Decomposition b = DecomposeSExpr(ParseSExpr("(JOIN r2 (JOIN r1 e1))"));
  EXPECT_EQ(std::set<Primitive>(b.primitives.begin(), b.primitives.end()),
            (std::set<Primitive>{Primitive(FirstHop{"e1", "r1", Direction::kIn}),
                                 Primitive(SecondHop{"r2", Direction::kIn})}));
  EXPECT_EQ(b.primitives.size(), 2u);
  EXPECT_EQ(b.operations, (std::vector<std::string>{"JOIN", "JOIN"}));

  Decomposition c = DecomposeSExpr(ParseSExpr("(COUNT (AND (JOIN r1 e1) (JOIN r3 e2)))"));
  EXPECT_EQ(Surfaces(c).size(), 2u);
  for (const Primitive& p : c.primitives) EXPECT_EQ(p.category(), Category::kFirstHop);
  EXPECT_EQ(c.operations, (std::vector<std::string>{"COUNT", "AND", "JOIN", "JOIN"}));

  Decomposition d = DecomposeSExpr(ParseSExpr("(JOIN (R r1) e1)"));
  EXPECT_EQ(d.primitives,
            (std::vector<Primitive>{Primitive(FirstHop{"e1", "r1", Direction::kOut})}));
  EXPECT_EQ(d.operations, (std::vector<std::string>{"JOIN", "R"}));
}

int CountJoins(const SExpr& e) {
  int n = e.kind == SExprKind::kJoin ? 1 : 0;
  for (const SExpr& a : e.args) n += CountJoins(a);
  return n;
}

TEST(DecomposeSExpr, PrimitivesBoundedByJoins) {
  Rng rng(8);
  for (int i = 0; i < 500; ++i) {
    SExpr e = testing::RandomSExprAst(rng);
    Decomposition d = DecomposeSExpr(e);
    std::size_t hops = 0;
    for (const Primitive& p : d.primitives) {
      hops += p.category() == Category::kFirstHop || p.category() == Category::kSecondHop;
    }
    // ARGMAX/ARGMIN/comparison attributes add hops without JOIN nodes.
    int extra = 0;
    std::vector<const SExpr*> stack = {&e};
    while (!stack.empty()) {
      const SExpr* x = stack.back();
      stack.pop_back();
      if (x->kind == SExprKind::kArgMax || x->kind == SExprKind::kArgMin ||
          x->kind == SExprKind::kCompare) {
        ++extra;
      }
      for (const SExpr& a : x->args) stack.push_back(&a);
    }
    EXPECT_LE(hops, static_cast<std::size_t>(CountJoins(e) + extra)) << PrintSExpr(e);
  }
}

TEST(DecomposeSExpr, JoinOnlyFormsStayWithinJoinCount) {
  for (const char* text : {"(JOIN r1 e1)", "(JOIN r2 (JOIN (R r1) e1))",
                           "(AND (JOIN r1 e1) (JOIN r2 (JOIN r3 e2)))",
                           "(COUNT (JOIN (R r2) (JOIN r1 e1)))"}) {
    SExpr e = ParseSExpr(text);
    EXPECT_LE(DecomposeSExpr(e).primitives.size(), static_cast<std::size_t>(CountJoins(e)));
  }
}

KnowledgeBase FilmKb() {
  return KnowledgeBase({{"f1", "directed_by", EntityObject("d1")},
                        {"f2", "directed_by", EntityObject("d1")},
                        {"f3", "directed_by", EntityObject("d2")},
                        {"f1", "runtime", Object{ObjectKind::kInt, "120"}},
                        {"f2", "runtime", Object{ObjectKind::kInt, "120"}},
                        {"f3", "runtime", Object{ObjectKind::kInt, "95"}},
                        {"f1", "title", Object{ObjectKind::kString, "Azeotrope"}}});
}

std::set<std::string> Values(const KbAnswer& a) {
  std::set<std::string> out;
  for (const Object& o : a.values) out.insert(o.text);
  return out;
}

TEST(ExecuteSExpr, OneTripleJoin) {
  KnowledgeBase kb({{"e1", "r1", EntityObject("e2")}});
  EXPECT_EQ(Values(ExecuteSExpr(ParseSExpr("(JOIN r1 e2)"), kb)), (std::set<std::string>{"e1"}));
  EXPECT_EQ(Values(ExecuteSExpr(ParseSExpr("(JOIN (R r1) e1)"), kb)),
            (std::set<std::string>{"e2"}));
}

TEST(ExecuteSExpr, Operators) {
  KnowledgeBase kb = FilmKb();
  EXPECT_EQ(ExecuteSExpr(ParseSExpr("(COUNT (JOIN directed_by d1))"), kb).count, 2);
  EXPECT_EQ(Values(ExecuteSExpr(ParseSExpr("(ARGMAX (JOIN directed_by d1) runtime)"), kb)),
            (std::set<std::string>{"f1", "f2"}));
  EXPECT_EQ(Values(ExecuteSExpr(ParseSExpr("(ARGMIN (JOIN (R directed_by) f1) runtime)"), kb)),
            (std::set<std::string>{}));
  EXPECT_EQ(Values(ExecuteSExpr(ParseSExpr("(LT runtime 100)"), kb)),
            (std::set<std::string>{"f3"}));
  EXPECT_EQ(Values(ExecuteSExpr(ParseSExpr("(AND (JOIN directed_by d1) (GE runtime 120))"), kb)),
            (std::set<std::string>{"f1", "f2"}));
  EXPECT_THROW(ExecuteSExpr(ParseSExpr("(GT title 5)"), kb), ExecutionError);
}

TEST(SExprProperties, AndIsIdempotentAndCommutative) {
  Rng rng(21);
  for (int i = 0; i < 300; ++i) {
    KnowledgeBase kb = testing::RandomKnowledgeBase(rng);
    SExpr a = testing::RandomSExpr(rng, kb, 2);
    SExpr b = testing::RandomSExpr(rng, kb, 2);
    if (a.kind == SExprKind::kCount || b.kind == SExprKind::kCount) continue;
    try {
      KbAnswer sa = ExecuteSExpr(a, kb);
      EXPECT_EQ(ExecuteSExpr(SExpr::And(a, a), kb), sa);
      EXPECT_EQ(ExecuteSExpr(SExpr::And(a, b), kb), ExecuteSExpr(SExpr::And(b, a), kb));
    } catch (const ExecutionError&) {
    }
  }
}

TEST(SExprProperties, JoinDistributesOverUnion) {
  Rng rng(22);
  for (int i = 0; i < 300; ++i) {
    KnowledgeBase kb = testing::RandomKnowledgeBase(rng);
    SExpr s = testing::RandomSExpr(rng, kb, 2);
    if (s.kind == SExprKind::kCount) continue;
    for (bool reverse : {false, true}) {
      try {
        KbAnswer whole = ExecuteSExpr(SExpr::Join("r0", s, reverse), kb);
        std::set<Object> parts;
        for (const Object& x : ExecuteSExpr(s, kb).values) {
          if (!x.is_entity()) continue;
          KbAnswer one = ExecuteSExpr(SExpr::Join("r0", SExpr::Entity(x.text), reverse), kb);
          parts.insert(one.values.begin(), one.values.end());
        }
        EXPECT_EQ(whole.values, parts) << PrintSExpr(s);
      } catch (const ExecutionError&) {
      }
    }
  }
}

TEST(HopDepth, Values) {
  EXPECT_EQ(HopDepth(ParseSExpr("e1")), 0);
  EXPECT_EQ(HopDepth(ParseSExpr("(JOIN r1 (JOIN r2 e1))")), 2);
  EXPECT_EQ(HopDepth(ParseSExpr("(AND (JOIN r1 e1) (JOIN r1 (JOIN r2 e1)))")), 2);
  EXPECT_EQ(HopDepth(ParseSExpr("(LT r 5)")), -1);
}

}  // namespace
}  // namespace uniparse
