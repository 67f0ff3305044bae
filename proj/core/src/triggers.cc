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

#include "uniparse/triggers.h"

#include <utility>
#include <vector>

#include "uniparse/text.h"

namespace uniparse {
namespace {

struct Cue {
  std::vector<std::string_view> words;
  Trigger trigger;
};

// Longest phrases first.
const std::vector<Cue>& Cues() {
  static const std::vector<Cue> kCues = {
      {{"no", "more", "than"}, Trigger::kAtMost},
      {{"no", "less", "than"}, Trigger::kAtLeast},
      {{"no", "fewer", "than"}, Trigger::kAtLeast},
      {{"how", "many"}, Trigger::kCount},
      {{"number", "of"}, Trigger::kCount},
      {{"at", "least"}, Trigger::kAtLeast},
      {{"or", "more"}, Trigger::kAtLeast},
      {{"at", "most"}, Trigger::kAtMost},
      {{"or", "less"}, Trigger::kAtMost},
      {{"or", "fewer"}, Trigger::kAtMost},
      {{"but", "not"}, Trigger::kExcept},
      {{"sorted", "by"}, Trigger::kOrder},
      {{"ordered", "by"}, Trigger::kOrder},
      {{"order", "of"}, Trigger::kOrder},
      {{"count"}, Trigger::kCount},
      {{"most"}, Trigger::kMost},
      {{"highest"}, Trigger::kMost},
      {{"largest"}, Trigger::kMost},
      {{"biggest"}, Trigger::kMost},
      {{"oldest"}, Trigger::kMost},
      {{"latest"}, Trigger::kMost},
      {{"maximum"}, Trigger::kMost},
      {{"longest"}, Trigger::kMost},
      {{"tallest"}, Trigger::kMost},
      {{"greatest"}, Trigger::kMost},
      {{"heaviest"}, Trigger::kMost},
      {{"least"}, Trigger::kLeast},
      {{"lowest"}, Trigger::kLeast},
      {{"smallest"}, Trigger::kLeast},
      {{"youngest"}, Trigger::kLeast},
      {{"earliest"}, Trigger::kLeast},
      {{"minimum"}, Trigger::kLeast},
      {{"fewest"}, Trigger::kLeast},
      {{"shortest"}, Trigger::kLeast},
      {{"cheapest"}, Trigger::kLeast},
      {{"lightest"}, Trigger::kLeast},
      {{"more"}, Trigger::kMore},
      {{"greater"}, Trigger::kMore},
      {{"older"}, Trigger::kMore},
      {{"larger"}, Trigger::kMore},
      {{"higher"}, Trigger::kMore},
      {{"bigger"}, Trigger::kMore},
      {{"taller"}, Trigger::kMore},
      {{"heavier"}, Trigger::kMore},
      {{"longer"}, Trigger::kMore},
      {{"later"}, Trigger::kMore},
      {{"above"}, Trigger::kMore},
      {{"over"}, Trigger::kMore},
      {{"after"}, Trigger::kMore},
      {{"exceeding"}, Trigger::kMore},
      {{"less"}, Trigger::kLess},
      {{"fewer"}, Trigger::kLess},
      {{"younger"}, Trigger::kLess},
      {{"smaller"}, Trigger::kLess},
      {{"lower"}, Trigger::kLess},
      {{"shorter"}, Trigger::kLess},
      {{"earlier"}, Trigger::kLess},
      {{"cheaper"}, Trigger::kLess},
      {{"lighter"}, Trigger::kLess},
      {{"below"}, Trigger::kLess},
      {{"under"}, Trigger::kLess},
      {{"before"}, Trigger::kLess},
      {{"average"}, Trigger::kAverage},
      {{"mean"}, Trigger::kAverage},
      {{"total"}, Trigger::kSum},
      {{"sum"}, Trigger::kSum},
      {{"combined"}, Trigger::kSum},
      {{"each"}, Trigger::kEach},
      {{"every"}, Trigger::kEach},
      {{"per"}, Trigger::kEach},
      {{"sorted"}, Trigger::kOrder},
      {{"ordered"}, Trigger::kOrder},
      {{"ascending"}, Trigger::kOrder},
      {{"alphabetical"}, Trigger::kOrder},
      {{"alphabetically"}, Trigger::kOrder},
      {{"descending"}, Trigger::kDescending},
      {{"decreasing"}, Trigger::kDescending},
      {{"both"}, Trigger::kBoth},
      {{"except"}, Trigger::kExcept},
      {{"excluding"}, Trigger::kExcept},
      {{"either"}, Trigger::kEither},
      {{"or"}, Trigger::kEither},
      {{"not"}, Trigger::kNegation},
      {{"never"}, Trigger::kNegation},
      {{"without"}, Trigger::kNegation},
  };
  return kCues;
}

}  // namespace

std::string_view TriggerName(Trigger t) {
  static constexpr std::string_view kNames[kNumTriggers] = {
      "count", "most",  "least", "more",   "less",  "at_least", "at_most", "average",
      "sum",   "each",  "order", "descending", "both", "except", "either", "negation"};
  return kNames[static_cast<int>(t)];
}

TriggerSet DetectTriggers(std::string_view text) {
  std::vector<std::string> tokens = Tokenize(text);
  std::vector<bool> used(tokens.size(), false);
  TriggerSet set;
  for (const Cue& cue : Cues()) {
    std::size_t n = cue.words.size();
    for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
      bool match = true;
      for (std::size_t k = 0; k < n && match; ++k) {
        match = !used[i + k] && tokens[i + k] == cue.words[k];
      }
      if (!match) continue;
      set.set(static_cast<int>(cue.trigger));
      for (std::size_t k = 0; k < n; ++k) used[i + k] = true;
    }
  }
  return set;
}

std::string SuggestedComparison(const TriggerSet& set) {
  if (Has(set, Trigger::kAtLeast)) return ">=";
  if (Has(set, Trigger::kAtMost)) return "<=";
  if (Has(set, Trigger::kMore)) return ">";
  if (Has(set, Trigger::kLess)) return "<";
  return "=";
}

}  // namespace uniparse
