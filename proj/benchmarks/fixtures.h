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


#ifndef UNIPARSE_BENCHMARKS_FIXTURES_H_
#define UNIPARSE_BENCHMARKS_FIXTURES_H_

#include <filesystem>
#include <string>
#include <vector>

#include "uniparse/datamodel.h"

namespace uniparse::bench {

// e0 -r_i-> l_i for i < first; l_i -q_j-> o_i_j for j < second.
inline KnowledgeBase StarKb(int first, int second) {
  std::vector<Triple> triples;
  for (int i = 0; i < first; ++i) {
    std::string leaf = "l" + std::to_string(i);
    triples.push_back({"e0", "r" + std::to_string(i), EntityObject(leaf)});
    for (int j = 0; j < second; ++j) {
      triples.push_back({leaf, "q" + std::to_string(j),
                         EntityObject("o" + std::to_string(i) + "_" + std::to_string(j))});
    }
  }
  return KnowledgeBase(std::move(triples));
}

inline const Database& ToyDb() {
  static const Database db = [] {
    std::filesystem::path dir = std::filesystem::path(UNIPARSE_DATA_DIR) / "toy_db";
    return LoadDatabase(dir / "schema.json", dir / "rows");
  }();
  return db;
}

inline const std::vector<Question>& ToyDbQuestions() {
  static const std::vector<Question> q =
      LoadQuestions(std::filesystem::path(UNIPARSE_DATA_DIR) / "toy_db" / "test.jsonl");
  return q;
}

}  // namespace uniparse::bench

#endif  // UNIPARSE_BENCHMARKS_FIXTURES_H_
