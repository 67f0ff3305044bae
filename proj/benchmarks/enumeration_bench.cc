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


#include <benchmark/benchmark.h>

#include "fixtures.h"
#include "uniparse/enumerator.h"
#include "uniparse/oracle.h"

namespace uniparse::bench {
namespace {

// Primitive enumeration grows with N + M; the path enumerator with N * M.
void BM_EnumerateKbPrimitives(benchmark::State& state) {
  KnowledgeBase kb = StarKb(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
  for (auto _ : state) benchmark::DoNotOptimize(EnumerateKbPrimitives(Question{}, kb, {"e0"}));
}
BENCHMARK(BM_EnumerateKbPrimitives)->Args({5, 7})->Args({30, 40})->Args({100, 100});

void BM_EnumerateKbLogicalForms(benchmark::State& state) {
  KnowledgeBase kb = StarKb(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
  for (auto _ : state) benchmark::DoNotOptimize(oracle::EnumerateLogicalFormsKb({"e0"}, kb));
}
BENCHMARK(BM_EnumerateKbLogicalForms)->Args({5, 7})->Args({30, 40})->Args({100, 100});

void BM_EnumerateDbPrimitives(benchmark::State& state) {
  for (auto _ : state) {
    for (const Question& q : ToyDbQuestions()) {
      benchmark::DoNotOptimize(EnumerateDbPrimitives(q, ToyDb()));
    }
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(ToyDbQuestions().size()));
}
BENCHMARK(BM_EnumerateDbPrimitives);

void BM_FuzzyLinkEntities(benchmark::State& state) {
  std::vector<Triple> triples;
  std::map<std::string, std::string, std::less<>> names;
  for (int i = 0; i < state.range(0); ++i) {
    std::string id = "m." + std::to_string(i);
    triples.push_back({id, "r", EntityObject("m.0")});
    names[id] = "entity number " + std::to_string(i);
  }
  KnowledgeBase kb(std::move(triples), std::move(names));
  for (auto _ : state) {
    benchmark::DoNotOptimize(FuzzyLinkEntities("who founded entity number 42 and when", kb));
  }
}
BENCHMARK(BM_FuzzyLinkEntities)->Arg(100)->Arg(1000);

}  // namespace
}  // namespace uniparse::bench
