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

#include "uniparse/ranker.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <set>

#include "json.hpp"

namespace uniparse {
namespace {

using nlohmann::json;

std::vector<std::string> SortedUnique(std::vector<std::string> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

std::vector<std::string> Intersect(const std::vector<std::string>& a,
                                   const std::vector<std::string>& b) {
  std::vector<std::string> out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

std::vector<std::string> CharTrigrams(std::string_view text) {
  std::string padded = " " + ToLower(text) + " ";
  std::vector<std::string> grams;
  for (std::size_t i = 0; i + 3 <= padded.size(); ++i) grams.push_back(padded.substr(i, 3));
  return SortedUnique(std::move(grams));
}

std::vector<std::string> NumberTokens(const std::vector<std::string>& tokens) {
  std::vector<std::string> out;
  for (const std::string& t : tokens) {
    if (std::optional<double> v = ParseNumber(t)) out.push_back(FormatNumber(*v));
  }
  return SortedUnique(std::move(out));
}

// Fraction of `part` present in the sorted question tokens.
double Coverage(const std::vector<std::string>& part, const std::vector<std::string>& question) {
  if (part.empty()) return 0.0;
  std::size_t hit = 0;
  for (const std::string& t : part) hit += std::binary_search(question.begin(), question.end(), t);
  return static_cast<double>(hit) / static_cast<double>(part.size());
}

double IdfCoverage(const RankerModel& model, const std::vector<std::string>& part,
                   const std::vector<std::string>& question) {
  double total = 0.0, hit = 0.0;
  for (const std::string& t : part) {
    double w = model.Idf(t);
    total += w;
    if (std::binary_search(question.begin(), question.end(), t)) hit += w;
  }
  return total > 0.0 ? hit / total : 0.0;
}

void SplitRelation(std::string_view relation, PrimitiveView& view) {
  std::size_t dot = relation.rfind('.');
  if (dot == std::string_view::npos) {
    view.tail = ContentTokens(relation);
  } else {
    view.head = ContentTokens(relation.substr(0, dot));
    view.tail = ContentTokens(relation.substr(dot + 1));
  }
}

std::string StripQuotes(std::string_view literal) {
  if (literal.size() >= 2 && literal.front() == '\'' && literal.back() == '\'') {
    return std::string(literal.substr(1, literal.size() - 2));
  }
  return std::string(literal);
}

// Indices sorted by descending score; equal scores keep their order.
std::vector<std::size_t> RankIndices(const std::vector<double>& scores) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  return order;
}

// Feature rows for one question's pool, per category, aligned with the pool.
struct PoolFeatures {
  std::array<std::vector<std::vector<double>>, kNumCategories> rows;
};

PoolFeatures FeaturizePool(const RankerModel& model, const RankerQuestion& rq,
                           const KnowledgeBase* kb) {
  QuestionView q = MakeQuestionView(rq.question.text);
  PoolFeatures out;
  for (int c = 0; c < kNumCategories; ++c) {
    Category cat = static_cast<Category>(c);
    for (const Primitive& p : rq.pool.of(cat)) {
      out.rows[c].push_back(Featurize(model, q, p, MakePrimitiveView(p, kb), cat));
    }
  }
  return out;
}

std::vector<FirstHop> GoldFirstHops(const RankerQuestion& rq) {
  std::vector<FirstHop> out;
  for (const Primitive& g : rq.gold) {
    if (g.category() == Category::kFirstHop) out.push_back(g.as<FirstHop>());
  }
  return out;
}

std::size_t IndexOf(const std::vector<Primitive>& pool, const Primitive& p) {
  auto it = std::find(pool.begin(), pool.end(), p);
  return static_cast<std::size_t>(it - pool.begin());
}

// Pool indices of sampled negatives.
std::vector<std::size_t> SampleNegativeIndices(NegativeStrategy strategy,
                                               const NegativeContext& context, std::size_t k,
                                               Rng& rng) {
  const std::vector<Primitive>& pool = *context.pool;
  std::vector<std::size_t> hard, rest;
  for (std::size_t i = 0; i < pool.size(); ++i) {
    if (pool[i] == *context.gold) continue;
    if (strategy == NegativeStrategy::kHard && IsHardNegative(context, pool[i])) {
      hard.push_back(i);
    } else {
      rest.push_back(i);
    }
  }
  rng.Shuffle(hard);
  rng.Shuffle(rest);
  std::vector<std::size_t> out;
  for (std::size_t i : hard) {
    if (out.size() == k) return out;
    out.push_back(i);
  }
  for (std::size_t i : rest) {
    if (out.size() == k) return out;
    out.push_back(i);
  }
  return out;
}

double Dot(const std::vector<double>& w, const std::vector<double>& f) {
  double s = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) s += w[i] * f[i];
  return s;
}

}  // namespace

std::string_view BaseFeatureName(BaseFeature f) {
  static constexpr std::string_view kNames[kNumBaseFeatures] = {
      "overlap_count", "idf_overlap",  "char3_jaccard", "length_ratio",
      "numeric_copresence", "head_overlap", "tail_overlap", "value_overlap",
      "tail_complete", "op_agreement", "direction_out", "tail_idf_overlap"};
  return kNames[static_cast<int>(f)];
}

std::size_t FeatureLength(bool category_conditioning) {
  return category_conditioning ? kNumBaseFeatures + kNumCategories * (1 + kNumBaseFeatures)
                               : kNumBaseFeatures;
}

std::vector<std::string> FeatureNames(bool category_conditioning) {
  std::vector<std::string> names;
  for (int f = 0; f < kNumBaseFeatures; ++f) {
    names.emplace_back(BaseFeatureName(static_cast<BaseFeature>(f)));
  }
  if (!category_conditioning) return names;
  for (int c = 0; c < kNumCategories; ++c) {
    names.push_back("category:" + std::string(CategoryName(static_cast<Category>(c))));
  }
  for (int c = 0; c < kNumCategories; ++c) {
    for (int f = 0; f < kNumBaseFeatures; ++f) {
      names.push_back(std::string(CategoryName(static_cast<Category>(c))) + ":" +
                      std::string(BaseFeatureName(static_cast<BaseFeature>(f))));
    }
  }
  return names;
}

void RankerModel::FitIdf(const std::vector<std::string_view>& documents) {
  std::map<std::string, std::size_t, std::less<>> df;
  for (std::string_view doc : documents) {
    for (const std::string& t : SortedUnique(ContentTokens(doc))) ++df[t];
  }
  double n = static_cast<double>(documents.size());
  idf_.clear();
  for (const auto& [token, count] : df) {
    idf_[token] = std::log((n + 1.0) / (static_cast<double>(count) + 1.0)) + 1.0;
  }
  unseen_idf_ = std::log(n + 1.0) + 1.0;
}

double RankerModel::Idf(std::string_view token) const {
  auto it = idf_.find(token);
  return it == idf_.end() ? unseen_idf_ : it->second;
}

std::string RankerModel::ToJson() const {
  json j;
  j["format"] = "uniparse-ranker";
  j["version"] = 1;
  j["category_conditioning"] = category_conditioning_;
  j["features"] = FeatureNames(category_conditioning_);
  j["weights"] = weights_;
  j["bias"] = bias_;
  j["idf"] = idf_;
  j["unseen_idf"] = unseen_idf_;
  return j.dump(2) + "\n";
}

RankerModel RankerModel::FromJson(std::string_view text) {
  try {
    json j = json::parse(text);
    if (j.at("format") != "uniparse-ranker") throw Error("not a ranker model");
    RankerModel m(j.at("category_conditioning").get<bool>());
    std::vector<double> w = j.at("weights").get<std::vector<double>>();
    if (w.size() != m.weights_.size()) {
      throw Error("ranker model has " + std::to_string(w.size()) + " weights, expected " +
                  std::to_string(m.weights_.size()));
    }
    m.weights_ = std::move(w);
    m.bias_ = j.at("bias").get<double>();
    for (const auto& [token, value] : j.at("idf").items()) m.idf_[token] = value.get<double>();
    m.unseen_idf_ = j.at("unseen_idf").get<double>();
    return m;
  } catch (const json::exception& e) {
    throw Error(std::string("malformed ranker model: ") + e.what());
  }
}

QuestionView MakeQuestionView(std::string_view text) {
  QuestionView q;
  std::vector<std::string> tokens = Tokenize(text);
  q.token_count = tokens.size();
  q.numbers = NumberTokens(tokens);
  q.content = SortedUnique(ContentTokens(text));
  q.trigrams = CharTrigrams(text);
  q.comparison = SuggestedComparison(DetectTriggers(text));
  return q;
}

PrimitiveView MakePrimitiveView(const Primitive& p, const KnowledgeBase* kb) {
  PrimitiveView v;
  std::string natural;
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, FirstHop>) {
          SplitRelation(x.relation, v);
          const std::string* name = kb != nullptr ? kb->Name(x.entity) : nullptr;
          v.value = ContentTokens(name != nullptr ? *name : x.entity);
        } else if constexpr (std::is_same_v<T, SecondHop>) {
          SplitRelation(x.relation, v);
        } else if constexpr (std::is_same_v<T, TbCl>) {
          v.head = ContentTokens(x.table);
          v.tail = ContentTokens(x.column);
        } else {
          v.head = ContentTokens(x.table);
          v.tail = ContentTokens(x.column);
          v.value = ContentTokens(StripQuotes(x.value));
        }
      },
      p.payload());
  std::vector<std::string> all = v.head;
  all.insert(all.end(), v.tail.begin(), v.tail.end());
  all.insert(all.end(), v.value.begin(), v.value.end());
  v.token_count = all.size();
  v.numbers = NumberTokens(all);
  v.all = SortedUnique(std::move(all));
  v.head = SortedUnique(std::move(v.head));
  v.tail = SortedUnique(std::move(v.tail));
  v.value = SortedUnique(std::move(v.value));
  v.trigrams = CharTrigrams(p.surface());
  return v;
}

std::vector<double> Featurize(const RankerModel& model, const QuestionView& q, const Primitive& p,
                              const PrimitiveView& v, Category cat) {
  std::array<double, kNumBaseFeatures> base{};
  auto set = [&](BaseFeature f, double value) { base[static_cast<int>(f)] = value; };

  std::vector<std::string> shared = Intersect(q.content, v.all);
  set(BaseFeature::kOverlapCount, static_cast<double>(shared.size()));
  set(BaseFeature::kIdfOverlap, IdfCoverage(model, v.all, q.content));

  std::size_t common = Intersect(q.trigrams, v.trigrams).size();
  std::size_t united = q.trigrams.size() + v.trigrams.size() - common;
  set(BaseFeature::kCharTrigramJaccard,
      united == 0 ? 0.0 : static_cast<double>(common) / static_cast<double>(united));

  std::size_t lo = std::min(q.token_count, v.token_count);
  std::size_t hi = std::max(q.token_count, v.token_count);
  set(BaseFeature::kLengthRatio, hi == 0 ? 0.0 : static_cast<double>(lo) / static_cast<double>(hi));
  set(BaseFeature::kNumericCopresence, Intersect(q.numbers, v.numbers).empty() ? 0.0 : 1.0);
  set(BaseFeature::kHeadOverlap, Coverage(v.head, q.content));
  set(BaseFeature::kTailOverlap, Coverage(v.tail, q.content));
  set(BaseFeature::kValueOverlap, Coverage(v.value, q.content));
  set(BaseFeature::kTailComplete,
      !v.tail.empty() && Coverage(v.tail, q.content) == 1.0 ? 1.0 : 0.0);
  if (p.category() == Category::kTbClVl) {
    set(BaseFeature::kOpAgreement, p.as<TbClVl>().op == q.comparison ? 1.0 : 0.0);
  }
  if (p.category() == Category::kFirstHop) {
    set(BaseFeature::kDirectionOut, p.as<FirstHop>().direction == Direction::kOut ? 1.0 : 0.0);
  } else if (p.category() == Category::kSecondHop) {
    set(BaseFeature::kDirectionOut, p.as<SecondHop>().direction == Direction::kOut ? 1.0 : 0.0);
  }
  set(BaseFeature::kTailIdfOverlap, IdfCoverage(model, v.tail, q.content));

  std::vector<double> out(FeatureLength(model.category_conditioning()), 0.0);
  std::copy(base.begin(), base.end(), out.begin());
  if (model.category_conditioning()) {
    int c = static_cast<int>(cat);
    out[kNumBaseFeatures + c] = 1.0;
    std::size_t block = kNumBaseFeatures + kNumCategories + c * kNumBaseFeatures;
    std::copy(base.begin(), base.end(), out.begin() + static_cast<std::ptrdiff_t>(block));
  }
  return out;
}

std::vector<double> Featurize(const RankerModel& model, const Question& question,
                              const Primitive& p, Category cat, const KnowledgeBase* kb) {
  return Featurize(model, MakeQuestionView(question.text), p, MakePrimitiveView(p, kb), cat);
}

double ScoreFeatures(const RankerModel& model, std::span<const double> features) {
  const std::vector<double>& w = model.weights();
  if (features.size() != w.size()) {
    throw Error("feature length " + std::to_string(features.size()) +
                " does not match model length " + std::to_string(w.size()));
  }
  double s = model.bias();
  for (std::size_t i = 0; i < w.size(); ++i) s += w[i] * features[i];
  return s;
}

double Score(const RankerModel& model, const Question& question, const Primitive& p, Category cat,
             const KnowledgeBase* kb) {
  return ScoreFeatures(model, Featurize(model, question, p, cat, kb));
}

double ContrastiveLoss(double positive, std::span<const double> negatives) {
  if (negatives.empty()) throw Error("contrastive loss needs at least one negative");
  double m = positive;
  for (double s : negatives) m = std::max(m, s);
  double z = std::exp(positive - m);
  for (double s : negatives) z += std::exp(s - m);
  return std::max(0.0, m + std::log(z) - positive);
}

std::vector<double> ContrastiveLossGradient(double positive, std::span<const double> negatives) {
  if (negatives.empty()) throw Error("contrastive loss needs at least one negative");
  double m = positive;
  for (double s : negatives) m = std::max(m, s);
  std::vector<double> g;
  g.reserve(negatives.size() + 1);
  g.push_back(std::exp(positive - m));
  for (double s : negatives) g.push_back(std::exp(s - m));
  double z = std::accumulate(g.begin(), g.end(), 0.0);
  for (double& x : g) x /= z;
  g[0] -= 1.0;
  return g;
}

std::string_view NegativeStrategyName(NegativeStrategy s) {
  return s == NegativeStrategy::kHard ? "hard" : "random";
}

bool IsHardNegative(const NegativeContext& context, const Primitive& candidate) {
  const Primitive& gold = *context.gold;
  if (candidate == gold || candidate.category() != gold.category()) return false;
  switch (gold.category()) {
    case Category::kFirstHop:
      return candidate.as<FirstHop>().entity == gold.as<FirstHop>().entity;
    case Category::kSecondHop: {
      if (context.kb == nullptr) return false;
      const SecondHop& s = candidate.as<SecondHop>();
      for (const FirstHop& f : context.gold_first_hops) {
        for (const SecondHop& r : ReachableSecondHops(f, *context.kb, context.traversal)) {
          if (r == s) return true;
        }
      }
      return false;
    }
    case Category::kTbCl:
      return candidate.as<TbCl>().table == gold.as<TbCl>().table;
    case Category::kTbClVl:
      return candidate.as<TbClVl>().table == gold.as<TbClVl>().table &&
             candidate.as<TbClVl>().column == gold.as<TbClVl>().column;
  }
  return false;
}

std::vector<Primitive> SampleNegatives(NegativeStrategy strategy, const NegativeContext& context,
                                       std::size_t k, Rng& rng) {
  std::vector<Primitive> out;
  if (context.pool == nullptr || context.gold == nullptr) return out;
  for (std::size_t i : SampleNegativeIndices(strategy, context, k, rng)) {
    out.push_back((*context.pool)[i]);
  }
  return out;
}

std::vector<TrainingExample> BootstrapNegatives(const RankerModel& model,
                                                std::vector<TrainingExample> examples,
                                                const std::vector<RankerQuestion>& corpus,
                                                const KnowledgeBase* kb) {
  for (TrainingExample& ex : examples) {
    const RankerQuestion& rq = corpus.at(ex.question);
    QuestionView q = MakeQuestionView(rq.question.text);
    auto score = [&](const Primitive& p) {
      return ScoreFeatures(model, Featurize(model, q, p, MakePrimitiveView(p, kb), ex.category));
    };
    double positive = score(ex.positive);
    for (const Primitive& p : rq.pool.of(ex.category)) {
      if (p == ex.positive) continue;
      if (std::find(ex.negatives.begin(), ex.negatives.end(), p) != ex.negatives.end()) continue;
      if (score(p) >= positive) ex.negatives.push_back(p);
    }
  }
  return examples;
}

RankerModel TrainRanker(const std::vector<RankerQuestion>& corpus, const RankerConfig& config,
                        const KnowledgeBase* kb, TrainingReport* report) {
  RankerModel model(config.category_conditioning);
  std::vector<std::string_view> docs;
  for (const RankerQuestion& rq : corpus) docs.push_back(rq.question.text);
  model.FitIdf(docs);

  struct Example {
    std::size_t question;
    Category category;
    std::size_t positive;  // pool index
    std::set<std::size_t> bootstrapped;
    NegativeContext context;
  };

  TrainingReport local;
  std::vector<PoolFeatures> features;
  std::vector<std::vector<FirstHop>> gold_first_hops;
  features.reserve(corpus.size());
  for (const RankerQuestion& rq : corpus) {
    features.push_back(FeaturizePool(model, rq, kb));
    gold_first_hops.push_back(GoldFirstHops(rq));
  }
  std::vector<Example> examples;
  for (std::size_t qi = 0; qi < corpus.size(); ++qi) {
    const RankerQuestion& rq = corpus[qi];
    for (const Primitive& g : rq.gold) {
      ++local.gold_primitives;
      const std::vector<Primitive>& pool = rq.pool.of(g.category());
      std::size_t idx = IndexOf(pool, g);
      if (idx == pool.size()) {
        ++local.unenumerable;
        continue;
      }
      if (pool.size() < 2) continue;  // nothing to contrast against
      Example ex{qi, g.category(), idx, {}, {}};
      ex.context.gold = &pool[idx];
      ex.context.pool = &pool;
      ex.context.kb = kb;
      ex.context.gold_first_hops = gold_first_hops[qi];
      ex.context.traversal = config.traversal;
      examples.push_back(std::move(ex));
    }
  }
  local.examples = examples.size();
  if (examples.empty())
    throw Error("no trainable ranker example: every gold primitive is unenumerable");

  Rng rng(config.seed);
  std::vector<double>& w = model.mutable_weights();
  std::vector<std::size_t> order(examples.size());
  std::iota(order.begin(), order.end(), 0);
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    rng.Shuffle(order);
    double total_loss = 0.0;
    for (std::size_t oi : order) {
      Example& ex = examples[oi];
      const auto& rows = features[ex.question].rows[static_cast<int>(ex.category)];
      std::vector<std::size_t> negs =
          SampleNegativeIndices(config.strategy, ex.context, config.negatives, rng);
      for (std::size_t b : ex.bootstrapped) {
        if (std::find(negs.begin(), negs.end(), b) == negs.end()) negs.push_back(b);
      }
      double pos = Dot(w, rows[ex.positive]);
      std::vector<double> neg_scores;
      neg_scores.reserve(negs.size());
      for (std::size_t n : negs) neg_scores.push_back(Dot(w, rows[n]));
      total_loss += ContrastiveLoss(pos, neg_scores);
      std::vector<double> grad = ContrastiveLossGradient(pos, neg_scores);
      const double lr = config.learning_rate;
      for (std::size_t i = 0; i < w.size(); ++i) {
        double g = grad[0] * rows[ex.positive][i];
        for (std::size_t j = 0; j < negs.size(); ++j) g += grad[j + 1] * rows[negs[j]][i];
        w[i] -= lr * g;
      }
    }
    local.epoch_loss.push_back(total_loss / static_cast<double>(examples.size()));

    if (config.bootstrap_every > 0 && epoch % config.bootstrap_every == 0 &&
        epoch < config.epochs) {
      for (Example& ex : examples) {
        const auto& rows = features[ex.question].rows[static_cast<int>(ex.category)];
        double pos = Dot(w, rows[ex.positive]);
        for (std::size_t i = 0; i < rows.size(); ++i) {
          if (i != ex.positive && Dot(w, rows[i]) >= pos) ex.bootstrapped.insert(i);
        }
      }
    }
  }
  if (report != nullptr) *report = std::move(local);
  return model;
}

std::size_t RankedPrimitives::total() const {
  std::size_t n = 0;
  for (const auto& l : lists) n += l.size();
  return n;
}

RankedPrimitives RankTopK(const RankerModel& model, const Question& question,
                          const EnumerationResult& enumeration, const TopK& k,
                          const KnowledgeBase* kb) {
  QuestionView q = MakeQuestionView(question.text);
  RankedPrimitives out;
  for (int c = 0; c < kNumCategories; ++c) {
    Category cat = static_cast<Category>(c);
    const std::vector<Primitive>& pool = enumeration.of(cat);
    std::vector<double> scores;
    scores.reserve(pool.size());
    for (const Primitive& p : pool) {
      scores.push_back(ScoreFeatures(model, Featurize(model, q, p, MakePrimitiveView(p, kb), cat)));
    }
    for (std::size_t i : RankIndices(scores)) {
      if (out.lists[c].size() == k[c]) break;
      out.lists[c].push_back({pool[i], scores[i]});
    }
  }
  return out;
}

std::vector<ScoredPrimitive> FilterReachable(const std::vector<ScoredPrimitive>& first,
                                             const std::vector<ScoredPrimitive>& second,
                                             const KnowledgeBase& kb,
                                             const TraversalOptions& options) {
  std::set<SecondHop> reachable;
  for (const ScoredPrimitive& f : first) {
    if (f.primitive.category() != Category::kFirstHop) continue;
    for (SecondHop& s : ReachableSecondHops(f.primitive.as<FirstHop>(), kb, options)) {
      reachable.insert(std::move(s));
    }
  }
  std::vector<ScoredPrimitive> out;
  for (const ScoredPrimitive& s : second) {
    if (s.primitive.category() == Category::kSecondHop &&
        reachable.count(s.primitive.as<SecondHop>()) > 0) {
      out.push_back(s);
    }
  }
  return out;
}

std::vector<RecallRow> RankerRecallReport(const RankerModel& model,
                                          const std::vector<RankerQuestion>& corpus,
                                          const std::vector<std::size_t>& ks,
                                          std::string_view config_name, RecallMode mode,
                                          const KnowledgeBase* kb) {
  // Rank position of every gold primitive; max() when it was not enumerated.
  constexpr std::size_t kMissing = std::numeric_limits<std::size_t>::max();
  std::vector<std::vector<std::size_t>> positions;
  for (const RankerQuestion& rq : corpus) {
    if (rq.gold.empty()) continue;
    QuestionView q = MakeQuestionView(rq.question.text);
    std::array<std::vector<std::size_t>, kNumCategories> rank_of;
    std::array<bool, kNumCategories> ranked{};
    std::vector<std::size_t> pos;
    for (const Primitive& g : rq.gold) {
      int c = static_cast<int>(g.category());
      const std::vector<Primitive>& pool = rq.pool.of(g.category());
      if (!ranked[c]) {
        std::vector<double> scores;
        for (const Primitive& p : pool) {
          scores.push_back(ScoreFeatures(
              model, Featurize(model, q, p, MakePrimitiveView(p, kb), g.category())));
        }
        std::vector<std::size_t> order = RankIndices(scores);
        rank_of[c].assign(pool.size(), 0);
        for (std::size_t r = 0; r < order.size(); ++r) rank_of[c][order[r]] = r;
        ranked[c] = true;
      }
      std::size_t idx = IndexOf(pool, g);
      pos.push_back(idx == pool.size() ? kMissing : rank_of[c][idx]);
    }
    positions.push_back(std::move(pos));
  }

  std::string name(config_name);
  if (mode == RecallMode::kPerPrimitive) name += ":per-primitive";
  std::vector<RecallRow> rows;
  for (std::size_t k : ks) {
    double hits = 0.0, total = 0.0;
    for (const std::vector<std::size_t>& pos : positions) {
      if (mode == RecallMode::kAllMustHit) {
        total += 1.0;
        hits += std::all_of(pos.begin(), pos.end(), [&](std::size_t p) { return p < k; });
      } else {
        for (std::size_t p : pos) {
          total += 1.0;
          hits += p < k;
        }
      }
    }
    rows.push_back({name, k, total == 0.0 ? 0.0 : hits / total});
  }
  return rows;
}

std::string RecallCsv(const std::vector<RecallRow>& rows) {
  std::string out = "config,k,recall\n";
  for (const RecallRow& r : rows) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6f", r.recall);
    out += r.config + "," + std::to_string(r.k) + "," + buf + "\n";
  }
  return out;
}

}  // namespace uniparse
