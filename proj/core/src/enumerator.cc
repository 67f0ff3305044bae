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

#include <algorithm>
#include <map>

#include "json.hpp"
#include "uniparse/text.h"

namespace uniparse {
namespace {

using nlohmann::json;

// Normalized question n-grams, computed once per question.
class PhraseIndex {
 public:
  PhraseIndex(std::string_view text, int max_ngram) {
    std::set<std::string> unique;
    for (const std::string& gram : WordNGrams(text, max_ngram)) {
      std::string g = NormalizePhrase(gram);
      if (!g.empty() && unique.insert(g).second) grams_.push_back(std::move(g));
    }
  }

  double Best(std::string_view name) const {
    std::string target = NormalizePhrase(name);
    if (target.empty()) return 0.0;
    double best = 0.0;
    for (const std::string& g : grams_) {
      // The ratio is bounded by the shorter length over the longer one.
      double bound = static_cast<double>(std::min(g.size(), target.size())) /
                     static_cast<double>(std::max(g.size(), target.size()));
      if (bound <= best) continue;
      double sim = static_cast<double>(LongestCommonSubstring(g, target)) /
                   static_cast<double>(std::max(g.size(), target.size()));
      best = std::max(best, sim);
      if (best >= 1.0) break;
    }
    return best;
  }

 private:
  std::vector<std::string> grams_;
};

Direction Opposite(Direction d) { return d == Direction::kOut ? Direction::kIn : Direction::kOut; }

json PrimitiveToJson(const Primitive& p) {
  return std::visit(
      [](const auto& v) -> json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, FirstHop>) {
          return {{"entity", v.entity}, {"relation", v.relation},
                  {"direction", DirectionName(v.direction)}};
        } else if constexpr (std::is_same_v<T, SecondHop>) {
          return {{"relation", v.relation}, {"direction", DirectionName(v.direction)}};
        } else if constexpr (std::is_same_v<T, TbCl>) {
          return {{"table", v.table}, {"column", v.column}};
        } else {
          return {{"table", v.table}, {"column", v.column}, {"op", v.op}, {"value", v.value}};
        }
      },
      p.payload());
}

Direction DirectionFromJson(const json& j) {
  std::string d = j.at("direction").get<std::string>();
  if (d == "out") return Direction::kOut;
  if (d == "in") return Direction::kIn;
  throw Error("unknown direction '" + d + "'");
}

Primitive PrimitiveFromJson(Category c, const json& j) {
  switch (c) {
    case Category::kFirstHop:
      return Primitive(FirstHop{j.at("entity").get<std::string>(),
                                j.at("relation").get<std::string>(), DirectionFromJson(j)});
    case Category::kSecondHop:
      return Primitive(SecondHop{j.at("relation").get<std::string>(), DirectionFromJson(j)});
    case Category::kTbCl:
      return Primitive(TbCl{j.at("table").get<std::string>(), j.at("column").get<std::string>()});
    case Category::kTbClVl:
      return Primitive(TbClVl{j.at("table").get<std::string>(), j.at("column").get<std::string>(),
                              j.at("op").get<std::string>(), j.at("value").get<std::string>()});
  }
  throw Error("unknown category");
}

}  // namespace

bool EnumerationResult::Add(Primitive p) {
  if (!seen_.insert(p).second) return false;
  lists_[static_cast<int>(p.category())].push_back(std::move(p));
  return true;
}

std::size_t EnumerationResult::total() const {
  std::size_t n = 0;
  for (const auto& l : lists_) n += l.size();
  return n;
}

std::vector<LinkedEntity> FuzzyLinkEntities(std::string_view text, const KnowledgeBase& kb,
                                            double threshold, int max_ngram) {
  PhraseIndex index(text, max_ngram);
  std::vector<LinkedEntity> out;
  for (const auto& [id, name] : kb.names()) {
    double sim = index.Best(name);
    if (sim >= threshold) out.push_back({id, sim});
  }
  std::stable_sort(out.begin(), out.end(), [](const LinkedEntity& a, const LinkedEntity& b) {
    return a.similarity > b.similarity;
  });
  return out;
}

std::vector<std::string> LinkEntities(const Question& question, const KnowledgeBase& kb,
                                      const EnumeratorConfig& config) {
  if (question.entity_mentions) return *question.entity_mentions;
  std::vector<std::string> ids;
  for (const LinkedEntity& e :
       FuzzyLinkEntities(question.text, kb, config.entity_threshold, config.max_ngram)) {
    ids.push_back(e.id);
  }
  return ids;
}

std::vector<std::string> FirstHopFrontier(const FirstHop& hop, const KnowledgeBase& kb) {
  std::vector<std::string> out;
  for (const Edge& e : kb.Edges(hop.entity, hop.direction)) {
    if (e.relation == hop.relation && e.other.is_entity()) out.push_back(e.other.text);
  }
  return out;
}

std::vector<SecondHop> ReachableSecondHops(const FirstHop& hop, const KnowledgeBase& kb,
                                           const TraversalOptions& options) {
  std::vector<SecondHop> out;
  std::set<SecondHop> seen;
  Edge arrival{hop.relation, EntityObject(hop.entity)};
  Direction back = Opposite(hop.direction);
  for (const std::string& x : FirstHopFrontier(hop, kb)) {
    for (Direction d : {Direction::kOut, Direction::kIn}) {
      bool skipped_arrival = false;
      for (const Edge& e : kb.Edges(x, d)) {
        // Skip the single edge we arrived along; parallel duplicates remain.
        if (!options.allow_backtrack && !skipped_arrival && d == back && e == arrival) {
          skipped_arrival = true;
          continue;
        }
        SecondHop s{e.relation, d};
        if (seen.insert(s).second) out.push_back(std::move(s));
      }
    }
  }
  return out;
}

EnumerationResult EnumerateKbPrimitives(const Question& /*question*/, const KnowledgeBase& kb,
                                        const std::vector<std::string>& linked,
                                        const TraversalOptions& options) {
  EnumerationResult result;
  std::vector<FirstHop> first_hops;
  for (const std::string& entity : linked) {
    for (Direction d : {Direction::kOut, Direction::kIn}) {
      for (const Edge& e : kb.Edges(entity, d)) {
        FirstHop hop{entity, e.relation, d};
        if (result.Add(Primitive(hop))) first_hops.push_back(std::move(hop));
      }
    }
  }
  for (const FirstHop& hop : first_hops) {
    for (SecondHop& s : ReachableSecondHops(hop, kb, options)) result.Add(Primitive(std::move(s)));
  }
  return result;
}

EnumerationResult EnumerateDbPrimitives(const Question& question, const Database& db,
                                        const EnumeratorConfig& config) {
  EnumerationResult result;
  for (const Table& t : db.tables()) {
    for (const Column& c : t.columns) result.Add(Primitive(TbCl{t.name, c.name}));
  }

  PhraseIndex index(question.text, config.max_ngram);
  std::vector<TbClVl> matched;
  for (const Table& t : db.tables()) {
    for (std::size_t ci = 0; ci < t.columns.size(); ++ci) {
      if (t.columns[ci].type != ColumnType::kText) continue;
      std::map<std::string, bool, std::less<>> verdicts;
      for (const Row& row : t.rows) {
        const Value& v = row[ci];
        if (!IsText(v)) continue;
        const std::string& cell = std::get<std::string>(v);
        auto it = verdicts.find(cell);
        if (it == verdicts.end()) {
          it = verdicts.emplace(cell, index.Best(cell) >= config.value_threshold).first;
        }
        if (!it->second) continue;
        TbClVl hit{t.name, t.columns[ci].name, "=", ValueToSqlLiteral(v)};
        if (result.Add(Primitive(hit))) matched.push_back(std::move(hit));
      }
    }
  }

  for (const std::string& number : ExtractNumbers(question.text)) {
    for (const Table& t : db.tables()) {
      for (const Column& c : t.columns) {
        if (c.type != ColumnType::kNumber) continue;
        for (const std::string& op : config.numeric_ops) {
          result.Add(Primitive(TbClVl{t.name, c.name, op, number}));
        }
      }
    }
  }

  if (config.supplement_columns) {
    for (Primitive& p : SupplementColumnNames(db, matched)) result.Add(std::move(p));
  }
  return result;
}

std::vector<Primitive> SupplementColumnNames(const Database& db,
                                             const std::vector<TbClVl>& matched) {
  std::vector<Primitive> out;
  std::set<Primitive> seen;
  for (const TbClVl& m : matched) {
    const Table* t = db.FindTable(m.table);
    if (t == nullptr) continue;
    int ci = t->ColumnIndex(m.column);
    if (ci < 0) continue;
    for (const Row& row : t->rows) {
      if (ValueToSqlLiteral(row[ci]) != m.value || IsNull(row[ci])) continue;
      for (std::size_t j = 0; j < t->columns.size(); ++j) {
        if (static_cast<int>(j) == ci || IsNull(row[j])) continue;
        Primitive p(TbClVl{t->name, t->columns[j].name, "=", ValueToSqlLiteral(row[j])});
        if (seen.insert(p).second) out.push_back(std::move(p));
      }
    }
  }
  return out;
}

std::string EnumerationToJson(std::string_view question_id, const EnumerationResult& result) {
  json prims = json::object();
  for (int c = 0; c < kNumCategories; ++c) {
    Category cat = static_cast<Category>(c);
    json list = json::array();
    for (const Primitive& p : result.of(cat)) list.push_back(PrimitiveToJson(p));
    prims[std::string(CategoryName(cat))] = std::move(list);
  }
  json j = {{"id", question_id}, {"primitives", std::move(prims)}};
  return j.dump();
}

EnumerationResult EnumerationFromJson(std::string_view line, std::string* question_id) {
  try {
    json j = json::parse(line);
    if (question_id != nullptr) *question_id = j.at("id").get<std::string>();
    EnumerationResult result;
    for (const auto& [name, list] : j.at("primitives").items()) {
      std::optional<Category> cat = ParseCategory(name);
      if (!cat) throw Error("unknown primitive category '" + name + "'");
      for (const json& item : list) result.Add(PrimitiveFromJson(*cat, item));
    }
    return result;
  } catch (const json::exception& e) {
    throw Error(std::string("malformed enumeration record: ") + e.what());
  }
}

}  // namespace uniparse
