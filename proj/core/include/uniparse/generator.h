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

#ifndef UNIPARSE_GENERATOR_H_
#define UNIPARSE_GENERATOR_H_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "uniparse/datamodel.h"
#include "uniparse/enumerator.h"
#include "uniparse/logical_form.h"
#include "uniparse/ranker.h"

namespace uniparse {

// "[X; <|second_hop|> s1, s2 ; <|first_hop|> f1]" for KB input and
// "[X; |table| col, col op value |table2| ...]" for DB input. With a seed,
// each category is permuted first (see ShufflePrimitives).
std::string LinearizeInput(std::string_view question, const RankedPrimitives& primitives,
                           Modality modality, std::optional<std::uint64_t> shuffle_seed = {});

// Deterministic within-category permutation.
RankedPrimitives ShufflePrimitives(const RankedPrimitives& primitives, std::uint64_t seed);

// Reverses each category list.
RankedPrimitives ReversePrimitives(const RankedPrimitives& primitives);

using FeatureMap = std::map<std::string, double, std::less<>>;

// Linear scorer over named composition features.
class CompositionScorer {
 public:
  double Score(const FeatureMap& features) const;
  double weight(std::string_view name) const;
  const FeatureMap& weights() const { return weights_; }
  FeatureMap& mutable_weights() { return weights_; }

  std::string ToJson() const;
  static CompositionScorer FromJson(std::string_view text);

  friend bool operator==(const CompositionScorer&, const CompositionScorer&) = default;

 private:
  FeatureMap weights_;
};

struct GeneratorConfig {
  std::size_t beam = 20;
  std::size_t k = 10;
  // Rank-position features, seen during training only. They stand in for the
  // order the primitives are presented in, so they are what shuffle
  // augmentation regularizes; inference ignores them, which keeps the
  // candidate set independent of that order.
  bool position_features = true;
  // DB grammar caps.
  std::size_t max_tables = 2;
  std::size_t max_conditions = 3;
  bool set_ops = true;
  TraversalOptions traversal;
  // Scorer training.
  int epochs = 30;
  double learning_rate = 0.1;
  double margin = 1.0;
  std::size_t max_violations = 5;
  bool shuffle_augmentation = true;
  std::uint64_t seed = 0;
};

struct Candidate {
  LogicalForm form;
  std::string text;  // canonical print
  double score = 0.0;
  std::vector<Primitive> used;
  FeatureMap features;
};

// Grammar-constrained beam search over compositions of the supplied
// primitives, scored without rank-position features. Second hops must be
// reachable from the first hop they extend. Returns at most config.k complete
// forms, best first, ties broken by the canonical print.
std::vector<Candidate> ComposeCandidates(std::string_view question,
                                         const RankedPrimitives& primitives, Modality modality,
                                         const Stores& stores, const CompositionScorer& scorer,
                                         const GeneratorConfig& config);

struct ComposerExample {
  Question question;
  RankedPrimitives primitives;
  LogicalForm gold;
};

struct ComposerTrainingReport {
  std::size_t examples = 0;
  std::size_t unreachable = 0;  // gold not composable from the supplied primitives
  std::vector<double> epoch_accuracy;  // top-1 exact match during each epoch
};

// Early-update beam training with a pairwise hinge on the final beam.
// Throws Error when no gold form is composable.
CompositionScorer TrainCompositionScorer(const std::vector<ComposerExample>& corpus,
                                         const Stores& stores, const GeneratorConfig& config,
                                         const CompositionScorer& initial = {},
                                         ComposerTrainingReport* report = nullptr);

// Whether the gold form can be produced from these primitives at all.
bool IsComposable(const LogicalForm& gold, const RankedPrimitives& primitives,
                  std::string_view question, const Stores& stores, const GeneratorConfig& config);

// KB: (JOIN r e) from the top first hop, or the two-hop form over the first
// reachable second hop when the one-hop form is empty. DB: SELECT t.c FROM t
// from the top TbCl, with the top TbClVl as WHERE when it keeps the result
// non-empty. NO_ANSWER when nothing applies. Always executes.
LogicalForm FallbackForm(const RankedPrimitives& primitives, Modality modality,
                         const Stores& stores, const TraversalOptions& traversal = {});

struct Inference {
  LogicalForm form;
  Execution execution;
  int chosen = -1;  // candidate index, -1 for the fallback
};

// First candidate that executes to a non-empty answer, else the fallback.
Inference ExecutionAugmentedInfer(const std::vector<Candidate>& candidates, const Stores& stores,
                                  const RankedPrimitives& primitives, Modality modality,
                                  const TraversalOptions& traversal = {});

struct PredictionRecord {
  std::string id;
  std::vector<std::pair<std::string, double>> candidates;
  std::string final_form;
  std::vector<std::string> answers;
};

std::string PredictionToJson(const PredictionRecord& record);
PredictionRecord PredictionFromJson(std::string_view line);

}  // namespace uniparse

#endif  // UNIPARSE_GENERATOR_H_
