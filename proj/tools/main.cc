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

#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "pipeline.h"
#include "uniparse/error.h"

int main(int argc, char** argv) {
  namespace cli = uniparse::cli;
  CLI::App app{"uniparse: enumerate, rank and compose logical forms over a KB or a database"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> predictions;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "pipeline config JSON")->required();
    sub->add_option("--seed", seed, "overrides the config seed");
  };
  CLI::App* train = app.add_subcommand("train", "train the ranker and the composition scorer");
  CLI::App* infer = app.add_subcommand("infer", "predict logical forms for the test split");
  CLI::App* eval = app.add_subcommand("eval", "score predictions against the test split");
  CLI::App* bench = app.add_subcommand("bench", "count primitives against exhaustive enumeration");
  for (CLI::App* sub : {train, infer, eval, bench}) add_common(sub);
  eval->add_option("--predictions", predictions, "predictions JSONL (default: run dir)");

  CLI11_PARSE(app, argc, argv);

  try {
    cli::PipelineConfig config = cli::LoadPipelineConfig(config_path);
    if (seed) config.ApplySeed(*seed);
    if (train->parsed()) return cli::CmdTrain(config);
    if (infer->parsed()) return cli::CmdInfer(config);
    if (eval->parsed()) {
      return cli::CmdEval(config, predictions ? std::optional<cli::fs::path>(*predictions)
                                              : std::nullopt);
    }
    if (bench->parsed()) return cli::CmdBench(config);
  } catch (const uniparse::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
