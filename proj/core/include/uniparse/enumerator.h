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

#ifndef UNIPARSE_ENUMERATOR_H_
#define UNIPARSE_ENUMERATOR_H_

#include <array>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "uniparse/datamodel.h"

namespace uniparse {

struct TraversalOptions {
  // When false, the second hop may not walk straight back along the triple
  // the first hop arrived by.
  bool allow_backtrack = false;
};

struct EnumeratorConfig {
  double entity_threshold = 0.85;
  double value_threshold = 0.85;
  int max_ngram = 5;
  // Operators paired with every number found in the question.
  std::vector<std::string> numeric_ops = {"=", ">", "<", ">=", "<="};
  bool supplement_columns = true;
  TraversalOptions traversal;
};

class EnumerationResult {
 public:
  // Appends unless an equal payload is already present. Returns whether it
  // was added.
  bool Add(Primitive p);

  const std::vector<Primitive>& of(Category c) const { return lists_[static_cast<int>(c)]; }
  std::size_t count(Category c) const { return of(c).size(); }
  std::size_t total() const;
  bool Contains(const Primitive& p) const { return seen_.count(p) > 0; }

  friend bool operator==(const EnumerationResult& a, const EnumerationResult& b) {
    return a.lists_ == b.lists_;
  }

 private:
  std::array<std::vector<Primitive>, kNumCategories> lists_;
  std::set<Primitive> seen_;
};

struct LinkedEntity {
  std::string id;
  double similarity = 0.0;
};

// Entities whose display name fuzzy-matches some question n-gram, best first
// (ties by id).
std::vector<LinkedEntity> FuzzyLinkEntities(std::string_view text, const KnowledgeBase& kb,
                                            double threshold = 0.85, int max_ngram = 5);

// The question's explicit mentions when present, otherwise the fuzzy links.
std::vector<std::string> LinkEntities(const Question& question, const KnowledgeBase& kb,
                                      const EnumeratorConfig& config = {});

// Entities reached by following a first hop from its anchor.
std::vector<std::string> FirstHopFrontier(const FirstHop& hop, const KnowledgeBase& kb);

// Every (relation, direction) available one hop beyond the first hop's
// frontier, in first-seen order. Only entity frontier members are expanded.
std::vector<SecondHop> ReachableSecondHops(const FirstHop& hop, const KnowledgeBase& kb,
                                           const TraversalOptions& options = {});

EnumerationResult EnumerateKbPrimitives(const Question& question, const KnowledgeBase& kb,
                                        const std::vector<std::string>& linked,
                                        const TraversalOptions& options = {});

EnumerationResult EnumerateDbPrimitives(const Question& question, const Database& db,
                                        const EnumeratorConfig& config = {});

// Companion "=" primitives for the other non-null cells of each matched row.
std::vector<Primitive> SupplementColumnNames(const Database& db,
                                             const std::vector<TbClVl>& matched);

// One JSON object per line: {"id": ..., "primitives": {"<category>": [...]}}.
std::string EnumerationToJson(std::string_view question_id, const EnumerationResult& result);
EnumerationResult EnumerationFromJson(std::string_view line, std::string* question_id = nullptr);

}  // namespace uniparse

#endif  // UNIPARSE_ENUMERATOR_H_
