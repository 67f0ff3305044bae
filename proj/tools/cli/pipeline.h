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

#ifndef UNIPARSE_TOOLS_PIPELINE_H_
#define UNIPARSE_TOOLS_PIPELINE_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "uniparse/datamodel.h"
#include "uniparse/enumerator.h"
#include "uniparse/generator.h"
#include "uniparse/logical_form.h"
#include "uniparse/ranker.h"

namespace uniparse::cli {

namespace fs = std::filesystem;

struct StarSpec {
  std::size_t first = 0;   // anchor fan-out
  std::size_t second = 0;  // fan-out of every leaf
};

// One JSON document. Relative paths resolve against the config's directory.
struct PipelineConfig {
  Modality modality = Modality::kKb;
  std::string dataset;  // label used in reports
  fs::path kb_triples;
  fs::path kb_names;
  fs::path db_schema;
  fs::path db_rows;
  fs::path train;
  fs::path test;
  fs::path run_dir;
  std::optional<std::uint64_t> seed;
  std::size_t threads = 0;  // 0: hardware concurrency

  EnumeratorConfig enumerator;
  RankerConfig ranker;
  TopK top_k{};
  GeneratorConfig generator;

  std::vector<StarSpec> bench_star;

  // Applies `seed` to every component that consumes randomness.
  void ApplySeed(std::uint64_t s);
};

PipelineConfig DefaultConfig(Modality modality);
PipelineConfig ParsePipelineConfig(std::string_view json_text, const fs::path& base_dir = {});
PipelineConfig LoadPipelineConfig(const fs::path& path);

// Stores named by a config, loaded once.
class Workspace {
 public:
  explicit Workspace(const PipelineConfig& config);
  Workspace(KnowledgeBase kb, Database db) : kb_(std::move(kb)), db_(std::move(db)) {}

  const KnowledgeBase& kb() const { return kb_; }
  const Database& db() const { return db_; }
  Stores stores() const { return {&kb_, &db_}; }
  const KnowledgeBase* kb_or_null(Modality m) const { return m == Modality::kKb ? &kb_ : nullptr; }

 private:
  KnowledgeBase kb_;
  Database db_;
};

// Runs fn(i) for i in [0, n) on a pool of `threads` workers.
void ParallelFor(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& fn);

EnumerationResult EnumerateQuestion(const PipelineConfig& config, const Workspace& ws,
                                    const Question& question);

// Top-k per category; KB second hops are then restricted to those reachable
// from the retained first hops.
RankedPrimitives RankQuestion(const PipelineConfig& config, const Workspace& ws,
                              const RankerModel& model, const Question& question,
                              const EnumerationResult& pool);

// Enumerated pools with the decomposed gold primitives, one per question.
std::vector<RankerQuestion> BuildRankerCorpus(const PipelineConfig& config, const Workspace& ws,
                                              const std::vector<Question>& questions);

struct Models {
  RankerModel ranker;
  CompositionScorer composer;
};

struct TrainResult {
  Models models;
  TrainingReport ranker_report;
  ComposerTrainingReport composer_report;
  double train_exact_match = 0.0;
};

// Throws Error listing the ids of training questions without a gold form.
TrainResult TrainModels(const PipelineConfig& config, const Workspace& ws,
                        const std::vector<Question>& train);

enum class InferOrder { kRanker, kReversed };

std::vector<PredictionRecord> Predict(const PipelineConfig& config, const Workspace& ws,
                                      const Models& models, const std::vector<Question>& questions,
                                      InferOrder order = InferOrder::kRanker);

struct QuestionScore {
  std::string id;
  bool exact_match = false;
  double f1 = 0.0;
};

struct EvalReport {
  double exact_match = 0.0;
  double f1 = 0.0;
  std::vector<QuestionScore> questions;  // sorted by id
  double coverage = 0.0;                 // questions whose gold primitives were all enumerated
  double mean_candidates = 0.0;
};

// Set F1 of predicted against gold answers; two empty sets score 1.
double AnswerF1(const std::vector<std::string>& predicted, const std::vector<std::string>& gold);

// Gold answers come from the question, or from executing its gold form.
// Throws Error when the id sets differ.
EvalReport Evaluate(const std::vector<PredictionRecord>& predictions,
                    const std::vector<Question>& gold, const Stores& stores);

std::string EvalCsv(const EvalReport& report);

struct BenchRow {
  std::string dataset;
  std::string question;
  std::size_t logical_forms = 0;
  std::array<std::size_t, kNumCategories> primitives{};
  std::size_t total() const;
};

// Star graph: e0 -r_i-> leaf_i for i < first, leaf_i -q_j-> o_i_j for j < second.
KnowledgeBase StarKnowledgeBase(const StarSpec& spec);
BenchRow BenchStar(const StarSpec& spec, const TraversalOptions& traversal = {});

std::vector<BenchRow> BenchCorpus(const PipelineConfig& config, const Workspace& ws,
                                  const std::vector<Question>& questions);

// Per-question rows followed by one "mean" row per dataset.
std::string BenchCsv(const std::vector<BenchRow>& rows);

// Subcommands. Each writes into config.run_dir and returns a process exit code.
int CmdTrain(const PipelineConfig& config);
int CmdInfer(const PipelineConfig& config);
int CmdEval(const PipelineConfig& config, const std::optional<fs::path>& predictions);
int CmdBench(const PipelineConfig& config);

std::string ReadFile(const fs::path& path);
void WriteFile(const fs::path& path, std::string_view content);

}  // namespace uniparse::cli

#endif  // UNIPARSE_TOOLS_PIPELINE_H_
