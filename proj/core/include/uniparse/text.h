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

#ifndef UNIPARSE_TEXT_H_
#define UNIPARSE_TEXT_H_

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace uniparse {

// Lowercased alphanumeric runs. Dots between digits are kept so "3.5" stays
// one token; every other character separates tokens, which splits schema
// identifiers such as "film.film.directed_by" into words.
std::vector<std::string> Tokenize(std::string_view text);

bool IsStopword(std::string_view token);

// Strips a plural suffix ("departments" -> "department", "cities" -> "city").
std::string Singularize(std::string_view token);

// Tokenize + stopword removal + singularization.
std::vector<std::string> ContentTokens(std::string_view text);

// Canonical phrase used by the fuzzy matcher: content tokens sorted and joined
// by single spaces, so word order and inflection do not matter.
std::string NormalizePhrase(std::string_view text);

std::size_t LongestCommonSubstring(std::string_view a, std::string_view b);

// Longest-common-substring length over the normalized phrases divided by the
// longer normalized length. 0 when either side normalizes to nothing.
double FuzzySimilarity(std::string_view a, std::string_view b);

// All contiguous word n-grams of length 1..max_n, in left-to-right order,
// rebuilt from the raw tokens with single spaces.
std::vector<std::string> WordNGrams(std::string_view text, int max_n);

// Best FuzzySimilarity of `name` against any n-gram of `text`.
double BestPhraseSimilarity(std::string_view text, std::string_view name,
                            int max_n = 5);

std::optional<double> ParseNumber(std::string_view text);

// Integral values print without a fractional part; others use the shortest
// representation that round-trips.
std::string FormatNumber(double value);

// Numeric tokens appearing in the text, canonicalized with FormatNumber, in
// order of first appearance and without repeats.
std::vector<std::string> ExtractNumbers(std::string_view text);

std::string ToLower(std::string_view text);
std::string ToUpper(std::string_view text);

// mt19937_64 with explicit draws. The standard distributions are
// implementation-defined, so index draws and shuffles are spelled out here to
// keep seeded runs reproducible across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t Next() { return engine_(); }
  // Uniform in [0, n); n must be positive.
  std::size_t Index(std::size_t n) { return static_cast<std::size_t>(engine_() % n); }
  // Uniform in [0, 1).
  double Unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  template <typename T>
  void Shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::size_t j = Index(i);
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace uniparse

#endif  // UNIPARSE_TEXT_H_
