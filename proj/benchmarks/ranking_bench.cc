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
#include "uniparse/ranker.h"
#include "uniparse/sql.h"

namespace uniparse::bench {
namespace {

std::vector<RankerQuestion> ToyRankerCorpus() {
  std::vector<RankerQuestion> corpus;
  for (const Question& q : ToyDbQuestions()) {
    RankerQuestion rq;
    rq.question = q;
    rq.pool = EnumerateDbPrimitives(q, ToyDb());
    if (q.gold) rq.gold = DecomposeSql(ParseSql(*q.gold)).primitives;
    corpus.push_back(std::move(rq));
  }
  return corpus;
}

void BM_Featurize(benchmark::State& state) {
  RankerModel model;
  const Question& q = ToyDbQuestions().front();
  EnumerationResult pool = EnumerateDbPrimitives(q, ToyDb());
  for (auto _ : state) {
    for (const Primitive& p : pool.of(Category::kTbCl)) {
      benchmark::DoNotOptimize(Featurize(model, q, p, Category::kTbCl));
    }
  }
}
BENCHMARK(BM_Featurize);

void BM_RankTopK(benchmark::State& state) {
  std::vector<RankerQuestion> corpus = ToyRankerCorpus();
  RankerConfig config;
  config.epochs = 1;
  RankerModel model = TrainRanker(corpus, config);
  TopK k{0, 0, 15, 5};
  for (auto _ : state) {
    for (const RankerQuestion& rq : corpus) {
      benchmark::DoNotOptimize(RankTopK(model, rq.question, rq.pool, k));
    }
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(corpus.size()));
}
BENCHMARK(BM_RankTopK);

void BM_TrainRankerEpoch(benchmark::State& state) {
  std::vector<RankerQuestion> corpus = ToyRankerCorpus();
  RankerConfig config;
  config.epochs = 1;
  config.negatives = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(TrainRanker(corpus, config));
}
BENCHMARK(BM_TrainRankerEpoch)->Arg(8)->Arg(48)->Unit(benchmark::kMillisecond);

void BM_ContrastiveLossGradient(benchmark::State& state) {
  std::vector<double> negatives(static_cast<std::size_t>(state.range(0)));
  for (std::size_t i = 0; i < negatives.size(); ++i) negatives[i] = static_cast<double>(i % 7) - 3;
  for (auto _ : state) benchmark::DoNotOptimize(ContrastiveLossGradient(0.5, negatives));
}
BENCHMARK(BM_ContrastiveLossGradient)->Arg(96);

}  // namespace
}  // namespace uniparse::bench
