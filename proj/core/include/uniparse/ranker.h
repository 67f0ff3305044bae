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

#ifndef UNIPARSE_RANKER_H_
#define UNIPARSE_RANKER_H_

#include <array>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "uniparse/datamodel.h"
#include "uniparse/enumerator.h"
#include "uniparse/text.h"
#include "uniparse/triggers.h"

namespace uniparse {

// Lexical features shared by every category.
enum class BaseFeature {
  kOverlapCount,
  kIdfOverlap,
  kCharTrigramJaccard,
  kLengthRatio,
  kNumericCopresence,
  kHeadOverlap,
  kTailOverlap,
  kValueOverlap,
  kTailComplete,
  kOpAgreement,
  kDirectionOut,
  kTailIdfOverlap,
};

inline constexpr int kNumBaseFeatures = 12;

std::string_view BaseFeatureName(BaseFeature f);

// Layout: base block, then (with category conditioning) a category one-hot
// and one copy of the base block per category, zero outside the primitive's
// own category.
std::size_t FeatureLength(bool category_conditioning);
std::vector<std::string> FeatureNames(bool category_conditioning);

class RankerModel {
 public:
  RankerModel() : RankerModel(true) {}
  explicit RankerModel(bool category_conditioning)
      : category_conditioning_(category_conditioning),
        weights_(FeatureLength(category_conditioning), 0.0) {}

  bool category_conditioning() const { return category_conditioning_; }
  const std::vector<double>& weights() const { return weights_; }
  std::vector<double>& mutable_weights() { return weights_; }
  double bias() const { return bias_; }
  void set_bias(double b) { bias_ = b; }

  // Inverse document frequency over training question texts.
  void FitIdf(const std::vector<std::string_view>& documents);
  double Idf(std::string_view token) const;
  const std::map<std::string, double, std::less<>>& idf() const { return idf_; }

  std::string ToJson() const;
  static RankerModel FromJson(std::string_view text);

  friend bool operator==(const RankerModel&, const RankerModel&) = default;

 private:
  bool category_conditioning_ = true;
  std::vector<double> weights_;
  double bias_ = 0.0;
  std::map<std::string, double, std::less<>> idf_;
  double unseen_idf_ = 1.0;
};

// Question-side data computed once and reused for every primitive.
struct QuestionView {
  std::vector<std::string> content;  // sorted unique content tokens
  std::vector<std::string> numbers;  // sorted unique canonical numbers
  std::vector<std::string> trigrams; // sorted unique character 3-grams
  std::size_t token_count = 0;
  std::string comparison;            // SuggestedComparison of the text
};

QuestionView MakeQuestionView(std::string_view text);

// Display text used for lexical matching: relation ids are split into
// domain and final segment, FirstHop entities use their display name when
// the KB has one.
struct PrimitiveView {
  std::vector<std::string> head;
  std::vector<std::string> tail;
  std::vector<std::string> value;
  std::vector<std::string> all;  // sorted unique union
  std::vector<std::string> numbers;
  std::vector<std::string> trigrams;
  std::size_t token_count = 0;
};

PrimitiveView MakePrimitiveView(const Primitive& p, const KnowledgeBase* kb = nullptr);

std::vector<double> Featurize(const RankerModel& model, const QuestionView& q,
                              const Primitive& p, const PrimitiveView& view, Category cat);
std::vector<double> Featurize(const RankerModel& model, const Question& question,
                              const Primitive& p, Category cat,
                              const KnowledgeBase* kb = nullptr);

// Dot product plus bias. Throws Error when the lengths differ.
double ScoreFeatures(const RankerModel& model, std::span<const double> features);
double Score(const RankerModel& model, const Question& question, const Primitive& p,
             Category cat, const KnowledgeBase* kb = nullptr);

// -log softmax of the positive against itself and the negatives. Throws
// Error when there are no negatives.
double ContrastiveLoss(double positive, std::span<const double> negatives);
// d loss / d score, positive first then negatives in order.
std::vector<double> ContrastiveLossGradient(double positive, std::span<const double> negatives);

enum class NegativeStrategy { kRandom, kHard };

std::string_view NegativeStrategyName(NegativeStrategy s);

struct NegativeContext {
  const Primitive* gold = nullptr;
  // Same-category candidates, gold possibly included.
  const std::vector<Primitive>* pool = nullptr;
  // Needed for SecondHop hard negatives only.
  const KnowledgeBase* kb = nullptr;
  std::vector<FirstHop> gold_first_hops;
  TraversalOptions traversal;
};

// Whether `candidate` is a hard negative for the context's gold primitive:
// same anchor (FirstHop), reachable from a gold first hop (SecondHop), same
// table (TbCl), or same table and column (TbClVl).
bool IsHardNegative(const NegativeContext& context, const Primitive& candidate);

// Without replacement; hard candidates first, padded at random. Never
// returns the gold primitive.
std::vector<Primitive> SampleNegatives(NegativeStrategy strategy, const NegativeContext& context,
                                       std::size_t k, Rng& rng);

// A question with its enumerated pool and gold primitives.
struct RankerQuestion {
  Question question;
  EnumerationResult pool;
  std::vector<Primitive> gold;
};

struct TrainingExample {
  std::size_t question = 0;  // index into the corpus
  Primitive positive;
  std::vector<Primitive> negatives;
  Category category = Category::kFirstHop;
};

// Adds every pool candidate that scores at least as high as the positive.
std::vector<TrainingExample> BootstrapNegatives(const RankerModel& model,
                                                std::vector<TrainingExample> examples,
                                                const std::vector<RankerQuestion>& corpus,
                                                const KnowledgeBase* kb = nullptr);

struct RankerConfig {
  int epochs = 3;
  double learning_rate = 0.05;
  std::size_t negatives = 96;
  NegativeStrategy strategy = NegativeStrategy::kHard;
  int bootstrap_every = 1;  // 0 disables bootstrapping
  bool category_conditioning = true;
  std::uint64_t seed = 0;
  TraversalOptions traversal;
};

struct TrainingReport {
  std::vector<double> epoch_loss;
  std::size_t examples = 0;
  std::size_t gold_primitives = 0;
  std::size_t unenumerable = 0;  // gold primitives missing from their pool

  double coverage() const {
    return gold_primitives == 0 ? 0.0
                                : 1.0 - static_cast<double>(unenumerable) /
                                            static_cast<double>(gold_primitives);
  }
};

// Throws Error when no gold primitive can be trained on.
RankerModel TrainRanker(const std::vector<RankerQuestion>& corpus, const RankerConfig& config,
                        const KnowledgeBase* kb = nullptr, TrainingReport* report = nullptr);

struct ScoredPrimitive {
  Primitive primitive;
  double score = 0.0;
};

struct RankedPrimitives {
  std::array<std::vector<ScoredPrimitive>, kNumCategories> lists;

  std::vector<ScoredPrimitive>& of(Category c) { return lists[static_cast<int>(c)]; }
  const std::vector<ScoredPrimitive>& of(Category c) const { return lists[static_cast<int>(c)]; }
  std::size_t total() const;
};

using TopK = std::array<std::size_t, kNumCategories>;

// Descending score, ties in enumeration order, truncated per category.
RankedPrimitives RankTopK(const RankerModel& model, const Question& question,
                          const EnumerationResult& enumeration, const TopK& k,
                          const KnowledgeBase* kb = nullptr);

// Keeps the second hops that some retained first hop can reach; order kept.
std::vector<ScoredPrimitive> FilterReachable(const std::vector<ScoredPrimitive>& first,
                                             const std::vector<ScoredPrimitive>& second,
                                             const KnowledgeBase& kb,
                                             const TraversalOptions& options = {});

enum class RecallMode { kAllMustHit, kPerPrimitive };

struct RecallRow {
  std::string config;
  std::size_t k = 0;
  double recall = 0.0;
};

// Recall@k over questions with at least one gold primitive. All-must-hit
// counts a question when every gold primitive is within the top k of its
// category; per-primitive counts gold primitives individually.
std::vector<RecallRow> RankerRecallReport(const RankerModel& model,
                                          const std::vector<RankerQuestion>& corpus,
                                          const std::vector<std::size_t>& ks,
                                          std::string_view config_name,
                                          RecallMode mode = RecallMode::kAllMustHit,
                                          const KnowledgeBase* kb = nullptr);

std::string RecallCsv(const std::vector<RecallRow>& rows);

}  // namespace uniparse

#endif  // UNIPARSE_RANKER_H_
