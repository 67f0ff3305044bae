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

#include "uniparse/text.h"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <set>

namespace uniparse {
namespace {

constexpr std::array<std::string_view, 44> kStopwords = {
    "a",     "an",   "and",  "are",   "as",    "at",   "be",   "been", "by",
    "did",   "do",   "does", "for",   "from",  "give", "had",  "has",  "have",
    "how",   "in",   "is",   "it",    "its",   "list", "many", "me",   "much",
    "of",    "on",   "or",   "show",  "than",  "that", "the",  "their", "there",
    "this",  "to",   "was",  "were",  "what",  "which", "who", "with"};

bool IsAlnum(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }
bool IsDigit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }

}  // namespace

std::string ToLower(std::string_view text) {
  std::string out(text);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string ToUpper(std::string_view text) {
  std::string out(text);
  for (char& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

std::vector<std::string> Tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (IsAlnum(c)) {
      current.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
      continue;
    }
    bool all_digits = !current.empty() &&
                      std::all_of(current.begin(), current.end(), IsDigit);
    if (c == '.' && all_digits && i + 1 < text.size() && IsDigit(text[i + 1])) {
      current.push_back('.');
      continue;
    }
    if (!current.empty()) tokens.push_back(std::move(current));
    current.clear();
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

bool IsStopword(std::string_view token) {
  return std::find(kStopwords.begin(), kStopwords.end(), token) != kStopwords.end();
}

std::string Singularize(std::string_view token) {
  std::string t(token);
  if (t.size() > 4 && t.ends_with("ies")) return t.substr(0, t.size() - 3) + "y";
  if (t.size() > 3 && t.ends_with("s") && !t.ends_with("ss") && !t.ends_with("us") &&
      !IsDigit(t[t.size() - 2])) {
    return t.substr(0, t.size() - 1);
  }
  return t;
}

std::vector<std::string> ContentTokens(std::string_view text) {
  std::vector<std::string> out;
  for (const std::string& token : Tokenize(text)) {
    if (IsStopword(token)) continue;
    out.push_back(Singularize(token));
  }
  return out;
}

std::string NormalizePhrase(std::string_view text) {
  std::vector<std::string> tokens = ContentTokens(text);
  std::sort(tokens.begin(), tokens.end());
  std::string out;
  for (const std::string& t : tokens) {
    if (!out.empty()) out.push_back(' ');
    out += t;
  }
  return out;
}

std::size_t LongestCommonSubstring(std::string_view a, std::string_view b) {
  if (a.empty() || b.empty()) return 0;
  std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
  std::size_t best = 0;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : 0;
      best = std::max(best, cur[j]);
    }
    std::swap(prev, cur);
  }
  return best;
}

double FuzzySimilarity(std::string_view a, std::string_view b) {
  std::string na = NormalizePhrase(a);
  std::string nb = NormalizePhrase(b);
  if (na.empty() || nb.empty()) return 0.0;
  return static_cast<double>(LongestCommonSubstring(na, nb)) /
         static_cast<double>(std::max(na.size(), nb.size()));
}

std::vector<std::string> WordNGrams(std::string_view text, int max_n) {
  std::vector<std::string> tokens = Tokenize(text);
  std::vector<std::string> grams;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    std::string gram;
    for (std::size_t n = 0; n < static_cast<std::size_t>(max_n) && i + n < tokens.size(); ++n) {
      if (n > 0) gram.push_back(' ');
      gram += tokens[i + n];
      grams.push_back(gram);
    }
  }
  return grams;
}

double BestPhraseSimilarity(std::string_view text, std::string_view name, int max_n) {
  std::string target = NormalizePhrase(name);
  if (target.empty()) return 0.0;
  double best = 0.0;
  for (const std::string& gram : WordNGrams(text, max_n)) {
    std::string g = NormalizePhrase(gram);
    if (g.empty()) continue;
    double sim = static_cast<double>(LongestCommonSubstring(g, target)) /
                 static_cast<double>(std::max(g.size(), target.size()));
    best = std::max(best, sim);
    if (best >= 1.0) break;
  }
  return best;
}

std::optional<double> ParseNumber(std::string_view text) {
  if (text.empty()) return std::nullopt;
  std::string_view body = text;
  if (body.front() == '+') body.remove_prefix(1);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(body.data(), body.data() + body.size(), value);
  if (ec != std::errc() || ptr != body.data() + body.size()) return std::nullopt;
  if (!std::isfinite(value)) return std::nullopt;
  return value;
}

std::string FormatNumber(double value) {
  if (value == 0.0) return "0";
  if (std::nearbyint(value) == value && std::fabs(value) < 1e15) {
    return std::to_string(static_cast<long long>(value));
  }
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), ptr);
}

std::vector<std::string> ExtractNumbers(std::string_view text) {
  std::vector<std::string> out;
  std::set<std::string> seen;
  for (const std::string& token : Tokenize(text)) {
    if (!IsDigit(token.front())) continue;
    std::optional<double> value = ParseNumber(token);
    if (!value) continue;
    std::string canonical = FormatNumber(*value);
    if (seen.insert(canonical).second) out.push_back(canonical);
  }
  return out;
}

}  // namespace uniparse
