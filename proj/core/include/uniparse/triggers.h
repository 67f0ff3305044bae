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

#ifndef UNIPARSE_TRIGGERS_H_
#define UNIPARSE_TRIGGERS_H_

#include <bitset>
#include <string>
#include <string_view>

namespace uniparse {

// Lexical cues for operations. They feed scorer features; nothing is decided
// by a trigger alone.
enum class Trigger {
  kCount,       // how many, number of
  kMost,        // most, highest, oldest
  kLeast,       // least, lowest, youngest
  kMore,        // more than, older than, above
  kLess,        // less than, younger than, below
  kAtLeast,     // at least, or more
  kAtMost,      // at most, or less
  kAverage,     // average, mean
  kSum,         // total, sum
  kEach,        // each, per
  kOrder,       // sorted, ordered by
  kDescending,  // descending, decreasing
  kBoth,        // both
  kExcept,      // except, but not
  kEither,      // either, or
  kNegation,    // not, never
};

inline constexpr int kNumTriggers = 16;

using TriggerSet = std::bitset<kNumTriggers>;

std::string_view TriggerName(Trigger t);

// Multi-word cues are matched before single words so that "at least" does
// not also fire kLeast.
TriggerSet DetectTriggers(std::string_view text);

inline bool Has(const TriggerSet& set, Trigger t) { return set.test(static_cast<int>(t)); }

// Comparison suggested by the cues: ">", "<", ">=", "<=", or "=" when none.
std::string SuggestedComparison(const TriggerSet& set);

}  // namespace uniparse

#endif  // UNIPARSE_TRIGGERS_H_
