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

#include "pipeline.h"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "uniparse/error.h"
#include "uniparse/oracle.h"
#include "uniparse/text.h"

namespace uniparse::cli {
namespace {

using nlohmann::json;

void CheckKeys(const json& j, std::string_view where, const std::set<std::string>& allowed) {
  if (!j.is_object()) throw Error(std::string(where) + " must be an object");
  for (const auto& [key, value] : j.items()) {
    if (allowed.count(key) == 0)
      throw Error("unknown config key " + std::string(where) + "." + key);
  }
}

fs::path Resolve(const fs::path& base, const json& value) {
  fs::path p = value.get<std::string>();
  return p.is_absolute() || base.empty() ? p : base / p;
}

template <typename T>
void Read(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

std::string Format(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

class Log {
 public:
  explicit Log(const fs::path& run_dir) {
    fs::create_directories(run_dir);
    out_.open(run_dir / "log.txt", std::ios::app);
  }
  void operator()(const std::string& line) {
    out_ << line << "\n";
    std::cerr << line << "\n";
  }

 private:
  std::ofstream out_;
};

void RequireExists(const fs::path& p, std::string_view what) {
  if (p.empty() || !fs::exists(p)) {
    throw Error(std::string(what) + " not found: " + p.string());
  }
}

std::vector<Question> LoadSplit(const fs::path& path, std::string_view what) {
  RequireExists(path, what);
  std::vector<Question> qs = LoadQuestions(path);
  std::sort(qs.begin(), qs.end(), [](const Question& a, const Question& b) { return a.id < b.id; });
  return qs;
}

Models LoadModels(const PipelineConfig& config) {
  fs::path dir = config.run_dir / "models";
  RequireExists(dir / "ranker.json", "ranker model");
  RequireExists(dir / "composer.json", "composition scorer");
  return {RankerModel::FromJson(ReadFile(dir / "ranker.json")),
          CompositionScorer::FromJson(ReadFile(dir / "composer.json"))};
}

std::vector<std::string> GoldAnswers(const Question& q, const Stores& stores) {
  if (q.answers) {
    std::vector<std::string> a = *q.answers;
    std::sort(a.begin(), a.end());
    a.erase(std::unique(a.begin(), a.end()), a.end());
    return a;
  }
  if (!q.gold) return {};
  return ExecuteLogicalForm(ParseLogicalForm(*q.gold, q.modality), stores).answers;
}

}  // namespace

void PipelineConfig::ApplySeed(std::uint64_t s) {
  seed = s;
  ranker.seed = s;
  generator.seed = s;
}

PipelineConfig DefaultConfig(Modality modality) {
  PipelineConfig c;
  c.modality = modality;
  c.dataset = std::string(ModalityName(modality));
  if (modality == Modality::kKb) {
    c.ranker.negatives = 96;
    c.ranker.bootstrap_every = 1;
    c.top_k = {10, 10, 0, 0};
  } else {
    c.ranker.negatives = 48;
    c.ranker.bootstrap_every = 2;
    c.top_k = {0, 0, 15, 5};
  }
  return c;
}

PipelineConfig ParsePipelineConfig(std::string_view json_text, const fs::path& base_dir) {
  try {
    json j = json::parse(json_text);
    CheckKeys(j, "config",
              {"modality", "dataset", "kb", "db", "train", "test", "run_dir", "seed", "threads",
               "enumerator", "ranker", "generator", "bench"});
    std::optional<Modality> modality = ParseModality(j.at("modality").get<std::string>());
    if (!modality) throw Error("modality must be kb or db");
    PipelineConfig c = DefaultConfig(*modality);
    Read(j, "dataset", c.dataset);
    if (j.contains("kb")) {
      CheckKeys(j["kb"], "kb", {"triples", "names"});
      if (j["kb"].contains("triples")) c.kb_triples = Resolve(base_dir, j["kb"]["triples"]);
      if (j["kb"].contains("names")) c.kb_names = Resolve(base_dir, j["kb"]["names"]);
    }
    if (j.contains("db")) {
      CheckKeys(j["db"], "db", {"schema", "rows"});
      if (j["db"].contains("schema")) c.db_schema = Resolve(base_dir, j["db"]["schema"]);
      if (j["db"].contains("rows")) c.db_rows = Resolve(base_dir, j["db"]["rows"]);
    }
    if (j.contains("train")) c.train = Resolve(base_dir, j["train"]);
    if (j.contains("test")) c.test = Resolve(base_dir, j["test"]);
    c.run_dir = j.contains("run_dir") ? Resolve(base_dir, j["run_dir"]) : base_dir / "run";
    if (j.contains("seed")) c.ApplySeed(j["seed"].get<std::uint64_t>());
    Read(j, "threads", c.threads);

    if (j.contains("enumerator")) {
      const json& e = j["enumerator"];
      CheckKeys(e, "enumerator", {"entity_threshold", "value_threshold", "max_ngram",
                                  "supplement_columns", "allow_backtrack"});
      Read(e, "entity_threshold", c.enumerator.entity_threshold);
      Read(e, "value_threshold", c.enumerator.value_threshold);
      Read(e, "max_ngram", c.enumerator.max_ngram);
      Read(e, "supplement_columns", c.enumerator.supplement_columns);
      Read(e, "allow_backtrack", c.enumerator.traversal.allow_backtrack);
    }
    c.ranker.traversal = c.enumerator.traversal;
    c.generator.traversal = c.enumerator.traversal;

    if (j.contains("ranker")) {
      const json& r = j["ranker"];
      CheckKeys(r, "ranker", {"epochs", "learning_rate", "negatives", "strategy", "bootstrap_every",
                              "category_conditioning", "top_k"});
      Read(r, "epochs", c.ranker.epochs);
      Read(r, "learning_rate", c.ranker.learning_rate);
      Read(r, "negatives", c.ranker.negatives);
      Read(r, "bootstrap_every", c.ranker.bootstrap_every);
      Read(r, "category_conditioning", c.ranker.category_conditioning);
      if (r.contains("strategy")) {
        std::string s = r["strategy"].get<std::string>();
        if (s == "hard") {
          c.ranker.strategy = NegativeStrategy::kHard;
        } else if (s == "random") {
          c.ranker.strategy = NegativeStrategy::kRandom;
        } else {
          throw Error("ranker.strategy must be hard or random");
        }
      }
      if (r.contains("top_k")) {
        for (const auto& [name, value] : r["top_k"].items()) {
          std::optional<Category> cat = ParseCategory(name);
          if (!cat) throw Error("unknown category in ranker.top_k: " + name);
          c.top_k[static_cast<int>(*cat)] = value.get<std::size_t>();
        }
      }
    }
    if (j.contains("generator")) {
      const json& g = j["generator"];
      CheckKeys(g, "generator", {"beam", "k", "position_features", "max_tables", "max_conditions",
                                 "set_ops", "epochs", "learning_rate", "margin", "max_violations",
                                 "shuffle_augmentation"});
      Read(g, "beam", c.generator.beam);
      Read(g, "k", c.generator.k);
      Read(g, "position_features", c.generator.position_features);
      Read(g, "max_tables", c.generator.max_tables);
      Read(g, "max_conditions", c.generator.max_conditions);
      Read(g, "set_ops", c.generator.set_ops);
      Read(g, "epochs", c.generator.epochs);
      Read(g, "learning_rate", c.generator.learning_rate);
      Read(g, "margin", c.generator.margin);
      Read(g, "max_violations", c.generator.max_violations);
      Read(g, "shuffle_augmentation", c.generator.shuffle_augmentation);
    }
    if (j.contains("bench")) {
      CheckKeys(j["bench"], "bench", {"star"});
      if (j["bench"].contains("star")) {
        for (const json& s : j["bench"]["star"]) {
          c.bench_star.push_back({s.at(0).get<std::size_t>(), s.at(1).get<std::size_t>()});
        }
      }
    }
    return c;
  } catch (const json::exception& e) {
    throw Error(std::string("malformed config: ") + e.what());
  }
}

PipelineConfig LoadPipelineConfig(const fs::path& path) {
  RequireExists(path, "config");
  return ParsePipelineConfig(ReadFile(path), path.parent_path());
}

Workspace::Workspace(const PipelineConfig& config) {
  if (config.modality == Modality::kKb) {
    RequireExists(config.kb_triples, "KB triples");
    std::optional<fs::path> names;
    if (!config.kb_names.empty()) {
      RequireExists(config.kb_names, "KB names");
      names = config.kb_names;
    }
    kb_ = LoadKnowledgeBase(config.kb_triples, names);
  } else {
    RequireExists(config.db_schema, "DB schema");
    RequireExists(config.db_rows, "DB rows directory");
    db_ = LoadDatabase(config.db_schema, config.db_rows);
  }
}

void ParallelFor(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& fn) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, n);
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex mu;
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(mu);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (std::thread& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

EnumerationResult EnumerateQuestion(const PipelineConfig& config, const Workspace& ws,
                                    const Question& question) {
  if (question.modality != config.modality) {
    throw Error("question " + question.id + " has modality " +
                std::string(ModalityName(question.modality)));
  }
  if (config.modality == Modality::kKb) {
    std::vector<std::string> linked = LinkEntities(question, ws.kb(), config.enumerator);
    return EnumerateKbPrimitives(question, ws.kb(), linked, config.enumerator.traversal);
  }
  return EnumerateDbPrimitives(question, ws.db(), config.enumerator);
}

RankedPrimitives RankQuestion(const PipelineConfig& config, const Workspace& ws,
                              const RankerModel& model, const Question& question,
                              const EnumerationResult& pool) {
  const KnowledgeBase* kb = ws.kb_or_null(config.modality);
  RankedPrimitives ranked = RankTopK(model, question, pool, config.top_k, kb);
  if (kb != nullptr) {
    ranked.of(Category::kSecondHop) =
        FilterReachable(ranked.of(Category::kFirstHop), ranked.of(Category::kSecondHop), *kb,
                        config.enumerator.traversal);
  }
  return ranked;
}

std::vector<RankerQuestion> BuildRankerCorpus(const PipelineConfig& config, const Workspace& ws,
                                              const std::vector<Question>& questions) {
  std::vector<RankerQuestion> corpus(questions.size());
  ParallelFor(questions.size(), config.threads, [&](std::size_t i) {
    corpus[i].question = questions[i];
    corpus[i].pool = EnumerateQuestion(config, ws, questions[i]);
    if (questions[i].gold) {
      corpus[i].gold =
          DecomposeLogicalForm(ParseLogicalForm(*questions[i].gold, questions[i].modality))
              .primitives;
    }
  });
  return corpus;
}

TrainResult TrainModels(const PipelineConfig& config, const Workspace& ws,
                        const std::vector<Question>& train) {
  std::vector<std::string> missing;
  for (const Question& q : train) {
    if (!q.gold) missing.push_back(q.id);
  }
  if (!missing.empty()) {
    std::string ids;
    for (const std::string& id : missing) ids += (ids.empty() ? "" : ", ") + id;
    throw Error("training questions without a gold form: " + ids);
  }

  std::vector<RankerQuestion> corpus = BuildRankerCorpus(config, ws, train);
  std::vector<LogicalForm> golds(train.size());
  for (std::size_t i = 0; i < train.size(); ++i) {
    golds[i] = ParseLogicalForm(*train[i].gold, train[i].modality);
  }

  TrainResult result;
  const KnowledgeBase* kb = ws.kb_or_null(config.modality);
  result.models.ranker = TrainRanker(corpus, config.ranker, kb, &result.ranker_report);

  std::vector<ComposerExample> examples(train.size());
  ParallelFor(train.size(), config.threads, [&](std::size_t i) {
    examples[i].question = train[i];
    examples[i].primitives =
        RankQuestion(config, ws, result.models.ranker, train[i], corpus[i].pool);
    examples[i].gold = golds[i];
  });
  result.models.composer = TrainCompositionScorer(examples, ws.stores(), config.generator, {},
                                                  &result.composer_report);

  std::vector<PredictionRecord> predictions = Predict(config, ws, result.models, train);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < train.size(); ++i) {
    if (predictions[i].final_form == PrintLogicalForm(golds[i])) ++hits;
  }
  result.train_exact_match = train.empty() ? 0.0 : static_cast<double>(hits) / train.size();
  return result;
}

std::vector<PredictionRecord> Predict(const PipelineConfig& config, const Workspace& ws,
                                      const Models& models, const std::vector<Question>& questions,
                                      InferOrder order) {
  std::vector<PredictionRecord> out(questions.size());
  Stores stores = ws.stores();
  ParallelFor(questions.size(), config.threads, [&](std::size_t i) {
    const Question& q = questions[i];
    EnumerationResult pool = EnumerateQuestion(config, ws, q);
    RankedPrimitives ranked = RankQuestion(config, ws, models.ranker, q, pool);
    if (order == InferOrder::kReversed) ranked = ReversePrimitives(ranked);
    std::vector<Candidate> candidates = ComposeCandidates(q.text, ranked, config.modality, stores,
                                                          models.composer, config.generator);
    Inference inf = ExecutionAugmentedInfer(candidates, stores, ranked, config.modality,
                                            config.enumerator.traversal);
    PredictionRecord& r = out[i];
    r.id = q.id;
    for (const Candidate& c : candidates) r.candidates.emplace_back(c.text, c.score);
    r.final_form = PrintLogicalForm(inf.form);
    r.answers = inf.execution.answers;
  });
  std::stable_sort(
      out.begin(), out.end(),
      [](const PredictionRecord& a, const PredictionRecord& b) { return a.id < b.id; });
  return out;
}

double AnswerF1(const std::vector<std::string>& predicted, const std::vector<std::string>& gold) {
  std::set<std::string> p(predicted.begin(), predicted.end());
  std::set<std::string> g(gold.begin(), gold.end());
  if (p.empty() && g.empty()) return 1.0;
  std::size_t common = 0;
  for (const std::string& x : p) common += g.count(x);
  if (common == 0) return 0.0;
  double precision = static_cast<double>(common) / p.size();
  double recall = static_cast<double>(common) / g.size();
  return 2 * precision * recall / (precision + recall);
}

EvalReport Evaluate(const std::vector<PredictionRecord>& predictions,
                    const std::vector<Question>& gold, const Stores& stores) {
  std::map<std::string, const Question*> by_id;
  for (const Question& q : gold) by_id[q.id] = &q;
  std::set<std::string> predicted_ids;
  for (const PredictionRecord& p : predictions) predicted_ids.insert(p.id);
  if (predicted_ids.size() != predictions.size() || predicted_ids.size() != by_id.size() ||
      !std::equal(predicted_ids.begin(), predicted_ids.end(), by_id.begin(),
                  [](const std::string& a, const auto& b) { return a == b.first; })) {
    throw Error("prediction ids do not match the gold question ids");
  }
  EvalReport report;
  double candidates = 0.0;
  for (const PredictionRecord& p : predictions) {
    const Question& q = *by_id.at(p.id);
    QuestionScore s;
    s.id = p.id;
    if (q.gold) {
      s.exact_match = CanonicalizeLogicalForm(p.final_form, q.modality) ==
                      CanonicalizeLogicalForm(*q.gold, q.modality);
    }
    s.f1 = AnswerF1(p.answers, GoldAnswers(q, stores));
    report.exact_match += s.exact_match ? 1.0 : 0.0;
    report.f1 += s.f1;
    candidates += static_cast<double>(p.candidates.size());
    report.questions.push_back(std::move(s));
  }
  std::sort(report.questions.begin(), report.questions.end(),
            [](const QuestionScore& a, const QuestionScore& b) { return a.id < b.id; });
  if (!predictions.empty()) {
    double n = static_cast<double>(predictions.size());
    report.exact_match /= n;
    report.f1 /= n;
    report.mean_candidates = candidates / n;
  }
  return report;
}

std::string EvalCsv(const EvalReport& report) {
  std::string out = "id,exact_match,f1\n";
  for (const QuestionScore& q : report.questions) {
    out += q.id + "," + (q.exact_match ? "1" : "0") + "," + Format(q.f1) + "\n";
  }
  out += "mean," + Format(report.exact_match) + "," + Format(report.f1) + "\n";
  return out;
}

std::size_t BenchRow::total() const {
  std::size_t n = 0;
  for (std::size_t c : primitives) n += c;
  return n;
}

KnowledgeBase StarKnowledgeBase(const StarSpec& spec) {
  std::vector<Triple> triples;
  std::map<std::string, std::string, std::less<>> names = {{"e0", "star center"}};
  for (std::size_t i = 0; i < spec.first; ++i) {
    std::string leaf = "leaf" + std::to_string(i);
    triples.push_back({"e0", "star.r" + std::to_string(i), EntityObject(leaf)});
    for (std::size_t j = 0; j < spec.second; ++j) {
      triples.push_back({leaf, "star.q" + std::to_string(j),
                         EntityObject("o" + std::to_string(i) + "_" + std::to_string(j))});
    }
  }
  return KnowledgeBase(std::move(triples), std::move(names));
}

BenchRow BenchStar(const StarSpec& spec, const TraversalOptions& traversal) {
  KnowledgeBase kb = StarKnowledgeBase(spec);
  Question q;
  q.id = "star_" + std::to_string(spec.first) + "x" + std::to_string(spec.second);
  q.text = "what is around the star center";
  q.entity_mentions = std::vector<std::string>{"e0"};
  EnumerationResult pool = EnumerateKbPrimitives(q, kb, {"e0"}, traversal);
  BenchRow row;
  row.dataset = "star";
  row.question = q.id;
  row.logical_forms = oracle::EnumerateLogicalFormsKb({"e0"}, kb, 2, traversal).size();
  for (int c = 0; c < kNumCategories; ++c) row.primitives[c] = pool.count(static_cast<Category>(c));
  return row;
}

std::vector<BenchRow> BenchCorpus(const PipelineConfig& config, const Workspace& ws,
                                  const std::vector<Question>& questions) {
  std::vector<BenchRow> rows(questions.size());
  ParallelFor(questions.size(), config.threads, [&](std::size_t i) {
    const Question& q = questions[i];
    EnumerationResult pool = EnumerateQuestion(config, ws, q);
    BenchRow& row = rows[i];
    row.dataset = config.dataset;
    row.question = q.id;
    for (int c = 0; c < kNumCategories; ++c)
      row.primitives[c] = pool.count(static_cast<Category>(c));
    if (config.modality == Modality::kKb) {
      std::vector<std::string> linked = LinkEntities(q, ws.kb(), config.enumerator);
      row.logical_forms =
          oracle::EnumerateLogicalFormsKb(linked, ws.kb(), 2, config.enumerator.traversal).size();
    } else {
      std::vector<TbClVl> conditions;
      for (const Primitive& p : pool.of(Category::kTbClVl)) conditions.push_back(p.as<TbClVl>());
      row.logical_forms = oracle::EnumerateLogicalFormsDb(ws.db(), conditions).size();
    }
  });
  return rows;
}

std::string BenchCsv(const std::vector<BenchRow>& rows) {
  std::string out = "dataset,question,LF";
  for (int c = 0; c < kNumCategories; ++c)
    out += "," + std::string(CategoryName(static_cast<Category>(c)));
  out += ",primitives\n";
  auto line = [&](const std::string& dataset, const std::string& question, double lf,
                  const std::array<double, kNumCategories>& cats, double total, bool mean) {
    auto num = [&](double v) {
      return mean ? Format(v) : std::to_string(static_cast<std::size_t>(v));
    };
    out += dataset + "," + question + "," + num(lf);
    for (double v : cats) out += "," + num(v);
    out += "," + num(total) + "\n";
  };
  std::vector<std::string> order;
  std::map<std::string, std::vector<const BenchRow*>> groups;
  for (const BenchRow& r : rows) {
    if (groups.find(r.dataset) == groups.end()) order.push_back(r.dataset);
    groups[r.dataset].push_back(&r);
  }
  for (const std::string& d : order) {
    double lf = 0.0, total = 0.0;
    std::array<double, kNumCategories> cats{};
    for (const BenchRow* r : groups[d]) {
      std::array<double, kNumCategories> mine{};
      for (int c = 0; c < kNumCategories; ++c) {
        mine[c] = static_cast<double>(r->primitives[c]);
        cats[c] += mine[c];
      }
      line(d, r->question, static_cast<double>(r->logical_forms), mine,
           static_cast<double>(r->total()), false);
      lf += static_cast<double>(r->logical_forms);
      total += static_cast<double>(r->total());
    }
    double n = static_cast<double>(groups[d].size());
    for (double& v : cats) v /= n;
    line(d, "mean", lf / n, cats, total / n, true);
  }
  return out;
}

int CmdTrain(const PipelineConfig& config) {
  if (!config.seed) throw Error("train requires a seed (config \"seed\" or --seed)");
  Log log(config.run_dir);
  Workspace ws(config);
  std::vector<Question> train = LoadSplit(config.train, "training questions");
  TrainResult r = TrainModels(config, ws, train);
  fs::create_directories(config.run_dir / "models");
  WriteFile(config.run_dir / "models" / "ranker.json", r.models.ranker.ToJson());
  WriteFile(config.run_dir / "models" / "composer.json", r.models.composer.ToJson());
  log("train " + config.dataset + " seed=" + std::to_string(*config.seed) +
      " questions=" + std::to_string(train.size()));
  for (std::size_t e = 0; e < r.ranker_report.epoch_loss.size(); ++e) {
    log("ranker epoch " + std::to_string(e + 1) + " loss=" + Format(r.ranker_report.epoch_loss[e]));
  }
  log("ranker gold coverage=" + Format(r.ranker_report.coverage()));
  for (std::size_t e = 0; e < r.composer_report.epoch_accuracy.size(); ++e) {
    log("composer epoch " + std::to_string(e + 1) +
        " accuracy=" + Format(r.composer_report.epoch_accuracy[e]));
  }
  log("composer unreachable golds=" + std::to_string(r.composer_report.unreachable));
  log("train exact match=" + Format(r.train_exact_match));
  return 0;
}

int CmdInfer(const PipelineConfig& config) {
  Log log(config.run_dir);
  Workspace ws(config);
  Models models = LoadModels(config);
  std::vector<Question> test = LoadSplit(config.test, "test questions");
  std::vector<PredictionRecord> predictions = Predict(config, ws, models, test);
  std::string out;
  for (const PredictionRecord& p : predictions) out += PredictionToJson(p) + "\n";
  WriteFile(config.run_dir / "predictions.jsonl", out);
  std::size_t no_answer = 0;
  for (const PredictionRecord& p : predictions) no_answer += p.final_form == kNoAnswerText;
  log("infer " + config.dataset + " questions=" + std::to_string(predictions.size()) +
      " no_answer=" + std::to_string(no_answer));
  return 0;
}

int CmdEval(const PipelineConfig& config, const std::optional<fs::path>& predictions_path) {
  Log log(config.run_dir);
  Workspace ws(config);
  fs::path path = predictions_path.value_or(config.run_dir / "predictions.jsonl");
  RequireExists(path, "predictions");
  std::vector<PredictionRecord> predictions;
  std::istringstream in(ReadFile(path));
  for (std::string line; std::getline(in, line);) {
    if (!line.empty()) predictions.push_back(PredictionFromJson(line));
  }
  std::vector<Question> test = LoadSplit(config.test, "test questions");
  EvalReport report = Evaluate(predictions, test, ws.stores());
  std::size_t covered = 0, with_gold = 0;
  for (const Question& q : test) {
    if (!q.gold) continue;
    ++with_gold;
    EnumerationResult pool = EnumerateQuestion(config, ws, q);
    bool all = true;
    for (const Primitive& p :
         DecomposeLogicalForm(ParseLogicalForm(*q.gold, q.modality)).primitives) {
      all = all && pool.Contains(p);
    }
    covered += all;
  }
  report.coverage = with_gold == 0 ? 0.0 : static_cast<double>(covered) / with_gold;
  WriteFile(config.run_dir / "report.csv", EvalCsv(report));
  std::string summary = "eval " + config.dataset + " EM=" + Format(report.exact_match) +
                        " F1=" + Format(report.f1) + " coverage=" + Format(report.coverage) +
                        " mean_candidates=" + Format(report.mean_candidates);
  log(summary);
  std::cout << summary << "\n";
  return 0;
}

int CmdBench(const PipelineConfig& config) {
  Log log(config.run_dir);
  std::vector<BenchRow> rows;
  for (const StarSpec& s : config.bench_star)
    rows.push_back(BenchStar(s, config.enumerator.traversal));
  if (!config.test.empty()) {
    Workspace ws(config);
    std::vector<Question> test = LoadSplit(config.test, "test questions");
    auto start = std::chrono::steady_clock::now();
    std::vector<BenchRow> corpus = BenchCorpus(config, ws, test);
    double seconds = 0.0;
    fs::path ranker_path = config.run_dir / "models" / "ranker.json";
    if (fs::exists(ranker_path)) {
      RankerModel model = RankerModel::FromJson(ReadFile(ranker_path));
      start = std::chrono::steady_clock::now();
      for (const Question& q : test)
        RankQuestion(config, ws, model, q, EnumerateQuestion(config, ws, q));
    }
    seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    log("bench " + config.dataset + " enumerate+rank seconds=" + Format(seconds));
    rows.insert(rows.end(), corpus.begin(), corpus.end());
  }
  std::string csv = BenchCsv(rows);
  WriteFile(config.run_dir / "bench.csv", csv);
  std::cout << csv;
  return 0;
}

std::string ReadFile(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void WriteFile(const fs::path& path, std::string_view content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out << content;
}

}  // namespace uniparse::cli
