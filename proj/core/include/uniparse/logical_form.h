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

#ifndef UNIPARSE_LOGICAL_FORM_H_
#define UNIPARSE_LOGICAL_FORM_H_

#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "uniparse/datamodel.h"
#include "uniparse/sexpr.h"
#include "uniparse/sql.h"

namespace uniparse {

// Sentinel emitted when a question has no usable primitive. Prints as
// "NO_ANSWER" and executes to an empty answer.
struct NoAnswer {
  friend bool operator==(const NoAnswer&, const NoAnswer&) = default;
};

inline constexpr std::string_view kNoAnswerText = "NO_ANSWER";

using LogicalForm = std::variant<NoAnswer, SExpr, SqlQuery>;

inline bool IsNoAnswer(const LogicalForm& form) { return std::holds_alternative<NoAnswer>(form); }

// "NO_ANSWER" parses to the sentinel under either modality.
LogicalForm ParseLogicalForm(std::string_view text, Modality modality);
std::string PrintLogicalForm(const LogicalForm& form);
Decomposition DecomposeLogicalForm(const LogicalForm& form);

// Parse then print; the canonical form used for exact match.
std::string CanonicalizeLogicalForm(std::string_view text, Modality modality);

// Borrowed pointers to whichever stores a question runs against.
struct Stores {
  const KnowledgeBase* kb = nullptr;
  const Database* db = nullptr;
};

struct Execution {
  std::vector<std::string> answers;  // sorted, unique
  // False for empty sets, COUNT 0, and a single aggregate cell that is 0 or
  // NULL: such results are treated as "no answer" during inference.
  bool non_empty = false;
};

// Throws ExecutionError, including when the store for the form's modality is
// missing.
Execution ExecuteLogicalForm(const LogicalForm& form, const Stores& stores);

}  // namespace uniparse

#endif  // UNIPARSE_LOGICAL_FORM_H_
