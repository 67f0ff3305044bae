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


#include "uniparse/enumerator.h"

#include <gtest/gtest.h>

#include <set>
#include <string>
#include <vector>

#include "pipeline.h"
#include "printers.h"
#include "random_instances.h"

namespace uniparse {
namespace {

Question Ask(std::string text) {
  Question q;
  q.id = "q";
  q.text = std::move(text);
  return q;
}

Primitive Hop1(std::string e, std::string r, Direction d) {
  return Primitive(FirstHop{std::move(e), std::move(r), d});
}

Primitive Hop2(std::string r, Direction d) { return Primitive(SecondHop{std::move(r), d}); }

TEST(LinkEntities, ExplicitMentionsPassThrough) {
  KnowledgeBase kb({{"e1", "r", EntityObject("e2")}}, {{"e1", "e7"}});
  Question q = Ask("who is e1");
  q.entity_mentions = std::vector<std::string>{"e7"};
  EXPECT_EQ(LinkEntities(q, kb), (std::vector<std::string>{"e7"}));
}

TEST(LinkEntities, ExactNameScoresOne) {
  KnowledgeBase kb({{"m.1", "r", EntityObject("m.2")}}, {{"m.1", "Azeotrope"}, {"m.2", "Company"}});
  std::vector<LinkedEntity> links = FuzzyLinkEntities("what is an Azeotrope?", kb);
  ASSERT_EQ(links.size(), 1u);
  EXPECT_EQ(links[0].id, "m.1");
  EXPECT_DOUBLE_EQ(links[0].similarity, 1.0);
  EXPECT_EQ(LinkEntities(Ask("what is an Azeotrope?"), kb), (std::vector<std::string>{"m.1"}));
}

TEST(LinkEntities, FuzzyOrdering) {
  KnowledgeBase kb({{"a", "r", EntityObject("b")}}, {{"a", "department head"}, {"b", "company"}});
  std::vector<LinkedEntity> links =
      FuzzyLinkEntities("How many heads of departments are older than 56?", kb);
  ASSERT_EQ(links.size(), 1u);
  EXPECT_EQ(links[0].id, "a");
  EXPECT_GE(links[0].similarity, 0.85);
}

TEST(EnumerateKb, StarIsAdditive) {
  KnowledgeBase kb = cli::StarKnowledgeBase({5, 7});
  EnumerationResult r = EnumerateKbPrimitives(Question{}, kb, {"e0"});
  EXPECT_EQ(r.count(Category::kFirstHop), 5u);
  EXPECT_EQ(r.count(Category::kSecondHop), 7u);
  EXPECT_EQ(r.total(), 12u);
}

TEST(EnumerateKb, AdditiveAcrossFanOuts) {
  for (std::size_t n : {1, 3, 8}) {
    for (std::size_t m : {1, 4, 9}) {
      EnumerationResult r =
          EnumerateKbPrimitives(Question{}, cli::StarKnowledgeBase({n, m}), {"e0"});
      EXPECT_EQ(r.total(), n + m) << n << "x" << m;
    }
  }
}

TEST(EnumerateKb, NoLinkedEntities) {
  EXPECT_EQ(EnumerateKbPrimitives(Question{}, cli::StarKnowledgeBase({3, 3}), {}).total(), 0u);
}

TEST(EnumerateKb, SingleTriple) {
  KnowledgeBase kb({{"e1", "r1", EntityObject("e2")}});
  EnumerationResult strict = EnumerateKbPrimitives(Question{}, kb, {"e1"});
  EXPECT_EQ(strict.of(Category::kFirstHop),
            (std::vector<Primitive>{Hop1("e1", "r1", Direction::kOut)}));
  EXPECT_TRUE(strict.of(Category::kSecondHop).empty());

  TraversalOptions loose;
  loose.allow_backtrack = true;
  EnumerationResult r = EnumerateKbPrimitives(Question{}, kb, {"e1"}, loose);
  EXPECT_EQ(r.of(Category::kFirstHop), (std::vector<Primitive>{Hop1("e1", "r1", Direction::kOut)}));
  EXPECT_TRUE(r.Contains(Hop2("r1", Direction::kIn)));
}

TEST(EnumerateKb, AnchorsAreLinked) {
  Rng rng(8);
  for (int i = 0; i < 100; ++i) {
    KnowledgeBase kb = testing::RandomKnowledgeBase(rng);
    std::vector<std::string> linked = {"e" + std::to_string(i % 10), "e" + std::to_string(i % 7)};
    EnumerationResult r = EnumerateKbPrimitives(Question{}, kb, linked);
    for (const Primitive& p : r.of(Category::kFirstHop)) {
      const std::string& anchor = p.as<FirstHop>().entity;
      EXPECT_TRUE(anchor == linked[0] || anchor == linked[1]) << anchor;
    }
    EXPECT_EQ(r, EnumerateKbPrimitives(Question{}, kb, linked));
    for (Category c : {Category::kFirstHop, Category::kSecondHop}) {
      std::set<Primitive> unique(r.of(c).begin(), r.of(c).end());
      EXPECT_EQ(unique.size(), r.count(c));
    }
  }
}

Database HeadDb() {
  return Database("d", {Table{"head",
                              {{"name", ColumnType::kText}, {"age", ColumnType::kNumber}},
                              {{std::string("Kyle"), 61.0}, {std::string("Tiger"), 52.0}}}});
}

TEST(EnumerateDb, SchemaOnly) {
  Database db("d", {Table{"t1", {{"a", ColumnType::kText}, {"b", ColumnType::kText}}, {}},
                    Table{"t2",
                          {{"c", ColumnType::kText}, {"d", ColumnType::kNumber},
                           {"e", ColumnType::kText}},
                          {}}});
  EnumerationResult r = EnumerateDbPrimitives(Ask("list everything"), db);
  EXPECT_EQ(r.count(Category::kTbCl), 5u);
  EXPECT_EQ(r.count(Category::kTbClVl), 0u);
}

TEST(EnumerateDb, NumbersPairWithNumericColumns) {
  EnumerationResult r =
      EnumerateDbPrimitives(Ask("How many heads of departments are older than 56?"), HeadDb());
  EXPECT_TRUE(r.Contains(Primitive(TbClVl{"head", "age", ">", "56"})));
  EXPECT_FALSE(r.Contains(Primitive(TbClVl{"head", "name", ">", "56"})));
  std::size_t numeric = 0;
  for (const Primitive& p : r.of(Category::kTbClVl)) numeric += p.as<TbClVl>().value == "56";
  EXPECT_EQ(numeric, 5u);
}

TEST(EnumerateDb, CellValueMatch) {
  EnumerationResult r = EnumerateDbPrimitives(Ask("How old is Kyle?"), HeadDb());
  EXPECT_TRUE(r.Contains(Primitive(TbClVl{"head", "name", "=", "'Kyle'"})));
  EXPECT_FALSE(r.Contains(Primitive(TbClVl{"head", "name", "=", "'Tiger'"})));
}

TEST(SupplementColumnNames, Examples) {
  Database db("d", {Table{"player",
                          {{"name", ColumnType::kText}, {"pick#", ColumnType::kNumber},
                           {"round", ColumnType::kText}},
                          {{std::string("Kyle"), 7.0, std::string("3rd")},
                           {std::string("Ann"), Value{}, std::string("1st")}}}});
  std::vector<Primitive> got = SupplementColumnNames(db, {{"player", "name", "=", "'Kyle'"}});
  EXPECT_EQ(got, (std::vector<Primitive>{Primitive(TbClVl{"player", "pick#", "=", "7"}),
                                         Primitive(TbClVl{"player", "round", "=", "'3rd'"})}));
  EXPECT_TRUE(SupplementColumnNames(db, {}).empty());
  EXPECT_EQ(SupplementColumnNames(db, {{"player", "name", "=", "'Ann'"}}),
            (std::vector<Primitive>{Primitive(TbClVl{"player", "round", "=", "'1st'"})}));
}

TEST(EnumerateDb, RandomProperties) {
  Rng rng(17);
  const std::vector<std::string> words = {"alpha", "beta", "gamma", "delta", "list", "3", "of"};
  EnumeratorConfig plain;
  plain.supplement_columns = false;
  for (int i = 0; i < 100; ++i) {
    Database db = testing::RandomDatabase(rng);
    std::string text;
    for (int w = 0; w < 5; ++w) text += words[rng.Index(words.size())] + " ";
    EnumerationResult r = EnumerateDbPrimitives(Ask(text), db, plain);

    std::size_t columns = 0;
    for (const Table& t : db.tables()) columns += t.columns.size();
    EXPECT_EQ(r.count(Category::kTbCl), columns);
    EXPECT_EQ(r, EnumerateDbPrimitives(Ask(text), db, plain));

    for (const Primitive& p : r.of(Category::kTbClVl)) {
      const TbClVl& v = p.as<TbClVl>();
      if (v.value.empty() || v.value.front() != '\'') continue;
      const Table* t = db.FindTable(v.table);
      ASSERT_NE(t, nullptr);
      int ci = t->ColumnIndex(v.column);
      ASSERT_GE(ci, 0);
      bool found = false;
      for (const Row& row : t->rows) found = found || ValueToSqlLiteral(row[ci]) == v.value;
      EXPECT_TRUE(found) << p.surface();
    }
  }
}

TEST(EnumerationJson, RoundTrip) {
  Rng rng(4);
  KnowledgeBase kb = testing::RandomKnowledgeBase(rng);
  EnumerationResult kb_result = EnumerateKbPrimitives(Question{}, kb, {"e1", "e2"});
  std::string id;
  EXPECT_EQ(EnumerationFromJson(EnumerationToJson("k1", kb_result), &id), kb_result);
  EXPECT_EQ(id, "k1");

  EnumerationResult db_result = EnumerateDbPrimitives(Ask("Kyle over 56"), HeadDb());
  EXPECT_EQ(EnumerationFromJson(EnumerationToJson("d1", db_result)), db_result);
}

}  // namespace
}  // namespace uniparse
