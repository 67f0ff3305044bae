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

#ifndef UNIPARSE_SEXPR_H_
#define UNIPARSE_SEXPR_H_

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "uniparse/datamodel.h"

namespace uniparse {

enum class SExprKind { kEntity, kJoin, kAnd, kCount, kArgMax, kArgMin, kCompare };

enum class CompareOp { kLt, kLe, kGt, kGe };

std::string_view CompareOpKeyword(CompareOp op);  // "LT", "LE", "GT", "GE"

// S-expression AST over a knowledge base.
//
//   expr    := entity | (JOIN rel expr) | (JOIN (R rel) expr) | (AND expr expr)
//            | (ARGMAX expr rel) | (ARGMIN expr rel) | (LT|LE|GT|GE rel literal)
//   root    := expr | (COUNT expr)
//
// `symbol` is the entity id for kEntity and the relation id otherwise.
struct SExpr {
  SExprKind kind = SExprKind::kEntity;
  std::string symbol;
  bool reverse = false;  // kJoin: (JOIN (R symbol) ...)
  CompareOp op = CompareOp::kLt;
  std::string literal;   // kCompare
  std::vector<SExpr> args;

  static SExpr Entity(std::string id);
  static SExpr Join(std::string relation, SExpr sub, bool reverse = false);
  static SExpr And(SExpr a, SExpr b);
  static SExpr Count(SExpr sub);
  static SExpr ArgMax(SExpr sub, std::string relation);
  static SExpr ArgMin(SExpr sub, std::string relation);
  static SExpr Compare(CompareOp op, std::string relation, std::string literal);

  friend bool operator==(const SExpr&, const SExpr&) = default;
};

// Throws ParseError with the byte offset of the offending token.
SExpr ParseSExpr(std::string_view text);

// Canonical single-space form.
std::string PrintSExpr(const SExpr& expr);

// Number of relation hops between the answer set and its nearest anchored
// entity: 0 for an entity, 1 + sub for JOIN, max over AND branches.
// Compare nodes are unanchored and report -1.
int HopDepth(const SExpr& expr);

struct Decomposition {
  std::vector<Primitive> primitives;
  std::vector<std::string> operations;
};

// FirstHop for each relation joined directly onto an entity, SecondHop for
// each relation one hop further out (JOIN over a depth-1 set, or an
// ARGMAX/ARGMIN/comparison attribute read off a depth-1 set). Operations are
// the operator nodes in pre-order, with R listed after its JOIN.
Decomposition DecomposeSExpr(const SExpr& expr);

// Denotation of an S-expression: a set of entities/literals, or a count.
struct KbAnswer {
  bool is_count = false;
  std::int64_t count = 0;
  std::set<Object> values;

  bool empty() const { return is_count ? count == 0 : values.empty(); }
  friend bool operator==(const KbAnswer&, const KbAnswer&) = default;
};

// Sorted string form used for answer comparison and serialization.
std::vector<std::string> AnswerStrings(const KbAnswer& answer);

// Compares a literal against a constant: numerically when both parse as
// numbers, lexicographically when neither does. Throws ExecutionError on a
// mixed pair. Returns <0, 0, >0.
int CompareLiteralText(std::string_view a, std::string_view b);

// Throws ExecutionError on comparison type mismatches.
KbAnswer ExecuteSExpr(const SExpr& expr, const KnowledgeBase& kb);

}  // namespace uniparse

#endif  // UNIPARSE_SEXPR_H_
