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

#include "uniparse/logical_form.h"

#include <cctype>

namespace uniparse {

LogicalForm ParseLogicalForm(std::string_view text, Modality modality) {
  std::string_view trimmed = text;
  while (!trimmed.empty() && std::isspace(static_cast<unsigned char>(trimmed.front()))) {
    trimmed.remove_prefix(1);
  }
  while (!trimmed.empty() && std::isspace(static_cast<unsigned char>(trimmed.back()))) {
    trimmed.remove_suffix(1);
  }
  if (trimmed == kNoAnswerText) return NoAnswer{};
  if (modality == Modality::kKb) return ParseSExpr(text);
  return ParseSql(text);
}

std::string PrintLogicalForm(const LogicalForm& form) {
  if (const auto* s = std::get_if<SExpr>(&form)) return PrintSExpr(*s);
  if (const auto* q = std::get_if<SqlQuery>(&form)) return PrintSql(*q);
  return std::string(kNoAnswerText);
}

Decomposition DecomposeLogicalForm(const LogicalForm& form) {
  if (const auto* s = std::get_if<SExpr>(&form)) return DecomposeSExpr(*s);
  if (const auto* q = std::get_if<SqlQuery>(&form)) return DecomposeSql(*q);
  return {};
}

std::string CanonicalizeLogicalForm(std::string_view text, Modality modality) {
  return PrintLogicalForm(ParseLogicalForm(text, modality));
}

Execution ExecuteLogicalForm(const LogicalForm& form, const Stores& stores) {
  Execution out;
  if (const auto* s = std::get_if<SExpr>(&form)) {
    if (stores.kb == nullptr) throw ExecutionError("no knowledge base attached");
    KbAnswer answer = ExecuteSExpr(*s, *stores.kb);
    out.answers = AnswerStrings(answer);
    out.non_empty = !answer.empty();
  } else if (const auto* q = std::get_if<SqlQuery>(&form)) {
    if (stores.db == nullptr) throw ExecutionError("no database attached");
    ResultTable table = ExecuteSql(*q, *stores.db);
    out.answers = ResultStrings(table);
    bool lone_cell = table.size() == 1 && table[0].size() == 1;
    bool degenerate =
        lone_cell &&
        (IsNull(table[0][0]) || (IsNumber(table[0][0]) && std::get<double>(table[0][0]) == 0.0));
    bool aggregate_only = !q->select.empty() && q->select[0].agg != Aggregate::kNone;
    out.non_empty = !table.empty() && !(degenerate && aggregate_only);
  }
  return out;
}

}  // namespace uniparse
