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


// Acceptance run: one PASS/FAIL line per criterion on stdout, details after
// the colon. Pipeline logging goes to stderr and the run directories.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "pipeline.h"
#include "random_instances.h"
#include "uniparse/error.h"
#include "uniparse/oracle.h"

namespace uniparse {
namespace {

namespace fs = std::filesystem;
using cli::PipelineConfig;
using cli::Workspace;

// Pinned tolerances and budgets.
constexpr double kReductionBudgetSeconds = 10.0;
constexpr int kDifferentialTrials = 1000;
constexpr double kDifferentialBudgetSeconds = 60.0;
constexpr int kRoundTripTrials = 10000;
constexpr double kLn2Tolerance = 1e-9;
constexpr int kGradientVectors = 100;
constexpr double kGradientRelativeError = 1e-6;
// Relative error is taken against max(|analytic|, floor) so components that
// are numerically zero do not divide by zero.
constexpr double kGradientFloor = 1e-2;
constexpr double kFiniteDifferenceStep = 1e-5;
constexpr int kRecallSeeds = 5;
constexpr double kRecallBudgetSeconds = 300.0;
constexpr double kMinExactMatch = 0.9;
constexpr double kMinAnswerF1 = 0.95;
constexpr double kToyBudgetSeconds = 300.0;
constexpr int kReachabilityTrials = 500;
constexpr double kMaxReversedRelativeDrop = 0.05;

struct Result {
  bool pass = false;
  std::string detail;
};

double Seconds(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string Fixed(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

fs::path DataDir(const std::string& name) { return fs::path(UNIPARSE_DATA_DIR) / name; }

PipelineConfig LoadCorpus(const std::string& name, const fs::path& run_dir) {
  PipelineConfig config = cli::LoadPipelineConfig(DataDir(name) / "config.json");
  config.run_dir = run_dir;
  return config;
}

// 1 ------------------------------------------------------------------------

Result SearchSpaceReduction() {
  auto start = std::chrono::steady_clock::now();
  Result r{true, ""};
  for (std::size_t n : {5, 30}) {
    for (std::size_t m : {7, 40}) {
      cli::BenchRow row = cli::BenchStar({n, m});
      bool ok = row.total() == n + m && row.logical_forms == n + n * m;
      r.pass = r.pass && ok;
      r.detail += "star " + std::to_string(n) + "x" + std::to_string(m) + " " +
                  std::to_string(row.total()) + " vs " + std::to_string(row.logical_forms) + "; ";
    }
  }
  PipelineConfig config = LoadCorpus("toy_db", {});
  Workspace ws(config);
  std::vector<cli::BenchRow> rows = cli::BenchCorpus(config, ws, LoadQuestions(config.test));
  std::vector<Question> train = LoadQuestions(config.train);
  std::vector<cli::BenchRow> more = cli::BenchCorpus(config, ws, train);
  rows.insert(rows.end(), more.begin(), more.end());
  std::size_t below = 0;
  for (const cli::BenchRow& row : rows) below += row.total() < row.logical_forms;
  r.pass = r.pass && !rows.empty() && below == rows.size();
  double elapsed = Seconds(start);
  r.pass = r.pass && elapsed < kReductionBudgetSeconds;
  r.detail += "toy_db primitives < LFs on " + std::to_string(below) + "/" +
              std::to_string(rows.size()) + " questions; " + Fixed(elapsed, 2) + "s";
  return r;
}

// 2 ------------------------------------------------------------------------

template <typename T>
std::optional<T> Attempt(const std::function<T()>& fn) {
  try {
    return fn();
  } catch (const ExecutionError&) {
    return std::nullopt;
  }
}

Result ExecutorCorrectness() {
  auto start = std::chrono::steady_clock::now();
  Rng rng(20240601);
  int kb_mismatch = 0, kb_raised = 0;
  for (int i = 0; i < kDifferentialTrials; ++i) {
    KnowledgeBase kb = testing::RandomKnowledgeBase(rng, 50);
    SExpr e = testing::RandomSExpr(rng, kb, 3);
    auto fast = Attempt<KbAnswer>([&] { return ExecuteSExpr(e, kb); });
    auto brute = Attempt<KbAnswer>([&] { return oracle::BruteExecuteSExpr(e, kb); });
    kb_raised += !fast.has_value();
    kb_mismatch += fast != brute;
  }
  int sql_mismatch = 0, sql_raised = 0;
  for (int i = 0; i < kDifferentialTrials; ++i) {
    Database db = testing::RandomDatabase(rng, 3, 20);
    SqlQuery q = testing::RandomSqlQuery(rng, db, 1);
    bool ordered = q.order_by.has_value() && q.set_op == SetOp::kNone;
    auto normalize = [&](ResultTable t) { return ordered ? t : testing::SortedRows(std::move(t)); };
    auto fast = Attempt<ResultTable>([&] { return normalize(ExecuteSql(q, db)); });
    auto brute = Attempt<ResultTable>([&] { return normalize(oracle::BruteExecuteSql(q, db)); });
    sql_raised += !fast.has_value();
    sql_mismatch += fast != brute;
  }
  double elapsed = Seconds(start);
  Result r;
  r.pass = kb_mismatch == 0 && sql_mismatch == 0 && elapsed < kDifferentialBudgetSeconds;
  r.detail = "sexpr " + std::to_string(kb_mismatch) + " mismatches (" + std::to_string(kb_raised) +
             " raised on both sides), sql " + std::to_string(sql_mismatch) + " mismatches (" +
             std::to_string(sql_raised) + " raised); " + Fixed(elapsed, 2) + "s";
  return r;
}

// 3 ------------------------------------------------------------------------

Result RoundTrips() {
  Rng rng(77);
  int sexpr_fail = 0, sql_fail = 0;
  for (int i = 0; i < kRoundTripTrials; ++i) {
    SExpr e = testing::RandomSExprAst(rng);
    try {
      sexpr_fail += !(ParseSExpr(PrintSExpr(e)) == e);
    } catch (const ParseError&) {
      ++sexpr_fail;
    }
    SqlQuery q = testing::RandomSqlAst(rng);
    try {
      sql_fail += !(ParseSql(PrintSql(q)) == q);
    } catch (const ParseError&) {
      ++sql_fail;
    }
  }
  return {sexpr_fail == 0 && sql_fail == 0,
          "sexpr " + std::to_string(sexpr_fail) + "/" + std::to_string(kRoundTripTrials) +
              " failures, sql " + std::to_string(sql_fail) + "/" +
              std::to_string(kRoundTripTrials) + " failures"};
}

// 4 ------------------------------------------------------------------------

Result ContrastiveLossChecks() {
  std::vector<double> tie = {0.3};
  double uniform = ContrastiveLoss(0.3, tie);
  bool ln2 = std::abs(uniform - std::log(2.0)) <= kLn2Tolerance;

  Rng rng(4);
  double worst = 0.0;
  for (int v = 0; v < kGradientVectors; ++v) {
    std::size_t n = 1 + rng.Index(99);
    double pos = rng.Unit() * 10 - 5;
    std::vector<double> neg(n);
    for (double& s : neg) s = rng.Unit() * 10 - 5;
    std::vector<double> grad = ContrastiveLossGradient(pos, neg);
    for (std::size_t i = 0; i <= n; ++i) {
      auto at = [&](double delta) {
        double p = pos;
        std::vector<double> shifted = neg;
        (i == 0 ? p : shifted[i - 1]) += delta;
        return ContrastiveLoss(p, shifted);
      };
      double fd = (at(kFiniteDifferenceStep) - at(-kFiniteDifferenceStep)) /
                  (2 * kFiniteDifferenceStep);
      double rel = std::abs(fd - grad[i]) / std::max(std::abs(grad[i]), kGradientFloor);
      worst = std::max(worst, rel);
    }
  }
  char buf[160];
  std::snprintf(buf, sizeof(buf), "|loss - ln 2| = %.3g; worst gradient relative error %.3g",
                std::abs(uniform - std::log(2.0)), worst);
  return {ln2 && worst <= kGradientRelativeError, buf};
}

// 5 ------------------------------------------------------------------------

Result HardNegativesHelp() {
  auto start = std::chrono::steady_clock::now();
  PipelineConfig config = LoadCorpus("adversarial", {});
  Workspace ws(config);
  std::vector<RankerQuestion> train =
      cli::BuildRankerCorpus(config, ws, LoadQuestions(config.train));
  std::vector<RankerQuestion> test = cli::BuildRankerCorpus(config, ws, LoadQuestions(config.test));

  struct Arm {
    const char* name;
    NegativeStrategy strategy;
    bool cg;
    double recall[3] = {0, 0, 0};
  };
  std::vector<Arm> arms = {{"hard+cg", NegativeStrategy::kHard, true},
                           {"hard-cg", NegativeStrategy::kHard, false},
                           {"random+cg", NegativeStrategy::kRandom, true}};
  for (int seed = 1; seed <= kRecallSeeds; ++seed) {
    for (Arm& arm : arms) {
      RankerConfig rc = config.ranker;
      rc.seed = static_cast<std::uint64_t>(seed);
      rc.strategy = arm.strategy;
      rc.category_conditioning = arm.cg;
      RankerModel model = TrainRanker(train, rc);
      std::vector<RecallRow> rows = RankerRecallReport(model, test, {1, 3, 5}, arm.name);
      for (int k = 0; k < 3; ++k) arm.recall[k] += rows[k].recall / kRecallSeeds;
    }
  }
  const Arm& hard = arms[0];
  const Arm& nocg = arms[1];
  const Arm& random = arms[2];
  bool hn = hard.recall[0] >= random.recall[0];
  bool cg = true;
  for (int k = 0; k < 3; ++k) cg = cg && hard.recall[k] >= nocg.recall[k];
  double elapsed = Seconds(start);
  Result r;
  r.pass = hn && cg && elapsed < kRecallBudgetSeconds;
  for (const Arm& arm : arms) {
    r.detail += std::string(arm.name) + " r@1/3/5 " + Fixed(arm.recall[0]) + "/" +
                Fixed(arm.recall[1]) + "/" + Fixed(arm.recall[2]) + "; ";
  }
  r.detail += Fixed(elapsed, 1) + "s";
  return r;
}

// 6, 7, 9 ------------------------------------------------------------------

struct CorpusRun {
  std::string name;
  std::size_t outputs = 0;
  std::size_t failed = 0;  // final forms that do not execute
  std::size_t fallbacks = 0;
  std::optional<cli::EvalReport> eval;
  std::optional<cli::EvalReport> reversed;
  double seconds = 0.0;
};

bool AllCandidatesEmpty(const PredictionRecord& p, Modality m, const Stores& stores) {
  for (const auto& [text, score] : p.candidates) {
    try {
      if (ExecuteLogicalForm(ParseLogicalForm(text, m), stores).non_empty) return false;
    } catch (const Error&) {
    }
  }
  return true;
}

void CheckOutputs(const PipelineConfig& config, const Workspace& ws,
                  const std::vector<PredictionRecord>& predictions, CorpusRun* run) {
  for (const PredictionRecord& p : predictions) {
    ++run->outputs;
    try {
      ExecuteLogicalForm(ParseLogicalForm(p.final_form, config.modality), ws.stores());
    } catch (const Error&) {
      ++run->failed;
    }
    run->fallbacks += AllCandidatesEmpty(p, config.modality, ws.stores());
  }
}

// Trains on the corpus's own split (or `models_from` when it has none) and
// predicts on every question it has.
CorpusRun RunCorpus(const std::string& name, const fs::path& work_dir, bool evaluate,
                    const std::string& models_from = "") {
  auto start = std::chrono::steady_clock::now();
  CorpusRun run;
  run.name = name;
  PipelineConfig config = LoadCorpus(name, work_dir / name);
  Workspace ws(config);
  cli::Models models;
  if (models_from.empty()) {
    models = cli::TrainModels(config, ws, LoadQuestions(config.train)).models;
  } else {
    PipelineConfig source = LoadCorpus(models_from, work_dir / models_from);
    Workspace source_ws(source);
    models = cli::TrainModels(source, source_ws, LoadQuestions(source.train)).models;
  }
  std::vector<Question> test = LoadQuestions(config.test);
  std::vector<PredictionRecord> predictions = cli::Predict(config, ws, models, test);
  CheckOutputs(config, ws, predictions, &run);
  if (!config.train.empty()) {
    CheckOutputs(config, ws, cli::Predict(config, ws, models, LoadQuestions(config.train)), &run);
  }
  if (evaluate) {
    run.eval = cli::Evaluate(predictions, test, ws.stores());
    run.reversed = cli::Evaluate(cli::Predict(config, ws, models, test, cli::InferOrder::kReversed),
                                 test, ws.stores());
  }
  run.seconds = Seconds(start);
  return run;
}

Result Totality(const std::vector<CorpusRun>& runs) {
  Result r{true, ""};
  for (const CorpusRun& run : runs) {
    r.pass = r.pass && run.failed == 0 && run.outputs > 0;
    r.detail += run.name + " " + std::to_string(run.outputs - run.failed) + "/" +
                std::to_string(run.outputs) + " execute, " + std::to_string(run.fallbacks) +
                " via fallback; ";
    if (run.name == "fallback") r.pass = r.pass && run.fallbacks == run.outputs;
  }
  return r;
}

Result ToyAccuracy(const std::vector<CorpusRun>& runs) {
  Result r{true, ""};
  for (const CorpusRun& run : runs) {
    if (run.name != "toy_kb" && run.name != "toy_db") continue;
    bool ok = run.eval && run.eval->exact_match >= kMinExactMatch && run.eval->f1 >= kMinAnswerF1 &&
              run.seconds < kToyBudgetSeconds;
    r.pass = r.pass && ok;
    r.detail += run.name + " EM " + Fixed(run.eval->exact_match) + " F1 " + Fixed(run.eval->f1) +
                " in " + Fixed(run.seconds, 1) + "s; ";
  }
  return r;
}

Result ShuffleRobustness(const std::vector<CorpusRun>& runs) {
  Result r{true, ""};
  for (const CorpusRun& run : runs) {
    if (run.name != "toy_kb" && run.name != "toy_db") continue;
    double base = run.eval->exact_match;
    double rev = run.reversed->exact_match;
    double drop = base > 0 ? (base - rev) / base : (rev < base ? 1.0 : 0.0);
    r.pass = r.pass && drop < kMaxReversedRelativeDrop;
    r.detail += run.name + " EM " + Fixed(base) + " -> reversed " + Fixed(rev) +
                " (relative drop " + Fixed(drop) + "); ";
  }
  return r;
}

// 8 ------------------------------------------------------------------------

Result Reachability() {
  Rng rng(8080);
  int agree = 0;
  for (int trial = 0; trial < kReachabilityTrials; ++trial) {
    KnowledgeBase kb = testing::RandomKnowledgeBase(rng, 1 + rng.Index(50));
    std::vector<std::string> linked = {"e" + std::to_string(rng.Index(10))};
    if (rng.Unit() < 0.5) linked.push_back("e" + std::to_string(rng.Index(10)));
    TraversalOptions options;
    options.allow_backtrack = rng.Unit() < 0.5;
    EnumerationResult pool = EnumerateKbPrimitives(Question{}, kb, linked, options);

    std::vector<ScoredPrimitive> first;
    std::vector<FirstHop> retained;
    for (const Primitive& p : pool.of(Category::kFirstHop)) {
      if (rng.Unit() < 0.5) continue;
      first.push_back({p, 0.0});
      retained.push_back(p.as<FirstHop>());
    }
    std::vector<ScoredPrimitive> second;
    for (const char* rel : {"r0", "r1", "r2", "r3", "n0", "n1", "s0", "absent"}) {
      for (Direction d : {Direction::kOut, Direction::kIn}) {
        second.push_back({Primitive(SecondHop{rel, d}), 0.0});
      }
    }
    std::set<SecondHop> kept;
    for (const ScoredPrimitive& s : FilterReachable(first, second, kb, options)) {
      kept.insert(s.primitive.as<SecondHop>());
    }
    agree += kept == oracle::ReachableSecondHops(retained, kb, options);
  }
  return {agree == kReachabilityTrials,
          std::to_string(agree) + "/" + std::to_string(kReachabilityTrials) + " trials agree"};
}

// 10 -----------------------------------------------------------------------

Result Determinism(const fs::path& work_dir) {
  Result r{true, ""};
  for (const std::string name : {"toy_kb", "toy_db"}) {
    std::vector<std::string> files[2];
    for (int run = 0; run < 2; ++run) {
      fs::path dir = work_dir / ("determinism_" + name + "_" + std::to_string(run));
      fs::remove_all(dir);
      PipelineConfig config = LoadCorpus(name, dir);
      int code = cli::CmdTrain(config);
      code = code == 0 ? cli::CmdInfer(config) : code;
      if (code != 0) {
        r.pass = false;
        r.detail += name + " run " + std::to_string(run) + " exited " + std::to_string(code) + "; ";
        continue;
      }
      for (const char* f : {"models/ranker.json", "models/composer.json", "predictions.jsonl"}) {
        files[run].push_back(cli::ReadFile(dir / f));
      }
    }
    bool same = files[0].size() == 3 && files[0] == files[1];
    r.pass = r.pass && same;
    r.detail += name + (same ? " identical" : " differs") + "; ";
  }
  return r;
}

void Report(int number, const char* title, const Result& r, bool* all) {
  std::string detail = r.detail;
  while (!detail.empty() && (detail.back() == ' ' || detail.back() == ';')) detail.pop_back();
  std::printf("%s %d %s: %s\n", r.pass ? "PASS" : "FAIL", number, title, detail.c_str());
  std::fflush(stdout);
  *all = *all && r.pass;
}

Result Guard(const std::function<Result()>& fn) {
  try {
    return fn();
  } catch (const std::exception& e) {
    return {false, std::string("raised: ") + e.what()};
  }
}

}  // namespace
}  // namespace uniparse

int main(int argc, char** argv) {
  namespace fs = std::filesystem;
  using namespace uniparse;
  fs::path work_dir = fs::temp_directory_path() / "uniparse_acceptance";
  for (int i = 1; i < argc; ++i) {
    std::string arg = argv[i];
    if (arg == "--work-dir" && i + 1 < argc) {
      work_dir = argv[++i];
    } else {
      std::fprintf(stderr, "usage: %s [--work-dir DIR]\n", argv[0]);
      return 2;
    }
  }
  fs::remove_all(work_dir);
  fs::create_directories(work_dir);

  bool all = true;
  Report(1, "search-space reduction", Guard(SearchSpaceReduction), &all);
  Report(2, "executor differential", Guard(ExecutorCorrectness), &all);
  Report(3, "grammar round trips", Guard(RoundTrips), &all);
  Report(4, "contrastive loss", Guard(ContrastiveLossChecks), &all);
  Report(5, "hard negatives and category conditioning", Guard(HardNegativesHelp), &all);

  std::vector<CorpusRun> runs;
  Result corpora = Guard([&] {
    runs.push_back(RunCorpus("toy_kb", work_dir, true));
    runs.push_back(RunCorpus("toy_db", work_dir, true));
    runs.push_back(RunCorpus("adversarial", work_dir, false));
    runs.push_back(RunCorpus("fallback", work_dir, false, "toy_db"));
    return Result{true, ""};
  });
  if (!corpora.pass) {
    Report(6, "end-to-end totality", corpora, &all);
    Report(7, "toy accuracy", corpora, &all);
  } else {
    Report(6, "end-to-end totality", Totality(runs), &all);
    Report(7, "toy accuracy", ToyAccuracy(runs), &all);
  }
  Report(8, "reachability filtering", Guard(Reachability), &all);
  Report(9, "shuffle robustness", corpora.pass ? ShuffleRobustness(runs) : corpora, &all);
  Report(10, "determinism", Guard([&] { return Determinism(work_dir); }), &all);
  return all ? 0 : 1;
}
