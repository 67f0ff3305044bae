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

#ifndef UNIPARSE_DATAMODEL_H_
#define UNIPARSE_DATAMODEL_H_

#include <compare>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "uniparse/error.h"

namespace uniparse {

// ---------------------------------------------------------------------------
// Knowledge base
// ---------------------------------------------------------------------------

enum class ObjectKind { kEntity, kInt, kFloat, kString };

std::string_view ObjectKindName(ObjectKind kind);
std::optional<ObjectKind> ParseObjectKind(std::string_view name);

// The object slot of a triple: an entity id or a typed literal. Dates are
// carried as kString.
struct Object {
  ObjectKind kind = ObjectKind::kEntity;
  std::string text;

  bool is_entity() const { return kind == ObjectKind::kEntity; }
  bool is_numeric() const { return kind == ObjectKind::kInt || kind == ObjectKind::kFloat; }

  friend bool operator==(const Object&, const Object&) = default;
  friend auto operator<=>(const Object& a, const Object& b) {
    if (auto c = a.text <=> b.text; c != 0) return c;
    return a.kind <=> b.kind;
  }
};

inline Object EntityObject(std::string id) { return {ObjectKind::kEntity, std::move(id)}; }

struct Triple {
  std::string subject;
  std::string relation;
  Object object;

  friend bool operator==(const Triple&, const Triple&) = default;
};

// Which way an edge points relative to the entity it is read from: kOut for
// (entity, r, x), kIn for (x, r, entity).
enum class Direction { kOut, kIn };

std::string_view DirectionName(Direction d);

struct Edge {
  std::string relation;
  Object other;

  friend bool operator==(const Edge&, const Edge&) = default;
};

using EdgeIndex = std::map<std::string, std::vector<Edge>, std::less<>>;

// Immutable triple store. The out-index holds every triple under its subject;
// the in-index holds every triple whose object is an entity under that object.
class KnowledgeBase {
 public:
  KnowledgeBase() = default;
  explicit KnowledgeBase(std::vector<Triple> triples,
                         std::map<std::string, std::string, std::less<>> names = {});

  const std::vector<Triple>& triples() const { return triples_; }
  const EdgeIndex& out_index() const { return out_index_; }
  const EdgeIndex& in_index() const { return in_index_; }
  const std::map<std::string, std::string, std::less<>>& names() const { return names_; }

  std::span<const Edge> OutEdges(std::string_view entity) const;
  std::span<const Edge> InEdges(std::string_view entity) const;
  std::span<const Edge> Edges(std::string_view entity, Direction d) const {
    return d == Direction::kOut ? OutEdges(entity) : InEdges(entity);
  }
  // Triples whose object is the given literal, as (relation, subject) edges.
  std::span<const Edge> LiteralInEdges(const Object& literal) const;
  // Positions in triples() of every triple with this relation.
  std::span<const std::size_t> RelationTriples(std::string_view relation) const;

  // Display name, or nullptr when the entity has none.
  const std::string* Name(std::string_view entity) const;
  bool HasRelation(std::string_view relation) const;

  friend bool operator==(const KnowledgeBase& a, const KnowledgeBase& b) {
    return a.triples_ == b.triples_ && a.names_ == b.names_;
  }

 private:
  std::vector<Triple> triples_;
  EdgeIndex out_index_;
  EdgeIndex in_index_;
  std::map<std::string, std::string, std::less<>> names_;
  std::map<Object, std::vector<Edge>> literal_in_index_;
  std::map<std::string, std::vector<std::size_t>, std::less<>> relation_index_;
};

// Triples TSV: subject \t relation \t object \t kind. The optional names TSV
// maps entity id \t display name.
KnowledgeBase LoadKnowledgeBase(const std::filesystem::path& triples_path,
                                const std::optional<std::filesystem::path>& names_path = {});
KnowledgeBase ParseKnowledgeBase(std::string_view triples_tsv, std::string_view names_tsv = {});

// ---------------------------------------------------------------------------
// Database
// ---------------------------------------------------------------------------

enum class ColumnType { kText, kNumber };

std::string_view ColumnTypeName(ColumnType type);

// A cell or SQL literal: null, number or text. The variant order gives
// null < number < text, which the executors rely on for stable sorting.
using Value = std::variant<std::monostate, double, std::string>;

inline bool IsNull(const Value& v) { return std::holds_alternative<std::monostate>(v); }
inline bool IsNumber(const Value& v) { return std::holds_alternative<double>(v); }
inline bool IsText(const Value& v) { return std::holds_alternative<std::string>(v); }

// Display form: numbers via FormatNumber, text verbatim, null as "NULL".
std::string ValueToString(const Value& v);
// SQL literal form: text single-quoted with '' escapes.
std::string ValueToSqlLiteral(const Value& v);

struct Column {
  std::string name;
  ColumnType type = ColumnType::kText;

  friend bool operator==(const Column&, const Column&) = default;
};

using Row = std::vector<Value>;

struct Table {
  std::string name;
  std::vector<Column> columns;
  std::vector<Row> rows;

  // -1 when absent.
  int ColumnIndex(std::string_view column) const;

  friend bool operator==(const Table&, const Table&) = default;
};

class Database {
 public:
  Database() = default;
  // Throws IngestError when an invariant does not hold.
  Database(std::string id, std::vector<Table> tables);

  const std::string& id() const { return id_; }
  const std::vector<Table>& tables() const { return tables_; }
  const Table* FindTable(std::string_view name) const;
  std::size_t ColumnCount() const;

  friend bool operator==(const Database&, const Database&) = default;

 private:
  std::string id_;
  std::vector<Table> tables_;
};

// Schema JSON plus one "<table>.csv" per table under rows_dir.
Database LoadDatabase(const std::filesystem::path& schema_path,
                      const std::filesystem::path& rows_dir);

// ---------------------------------------------------------------------------
// Questions
// ---------------------------------------------------------------------------

enum class Modality { kKb, kDb };

std::string_view ModalityName(Modality m);
std::optional<Modality> ParseModality(std::string_view name);

struct Question {
  std::string id;
  std::string text;
  Modality modality = Modality::kKb;
  std::optional<std::string> gold;
  std::optional<std::vector<std::string>> entity_mentions;
  std::optional<std::vector<std::string>> answers;
  std::optional<std::string> db_id;

  friend bool operator==(const Question&, const Question&) = default;
};

std::vector<Question> LoadQuestions(const std::filesystem::path& path);
std::vector<Question> ParseQuestions(std::string_view jsonl);

// ---------------------------------------------------------------------------
// Primitives
// ---------------------------------------------------------------------------

enum class Category { kFirstHop, kSecondHop, kTbCl, kTbClVl };

inline constexpr int kNumCategories = 4;

// Special token naming the category in ranker inputs, e.g. "<|firsthop|>".
std::string_view CategoryToken(Category c);
std::string_view CategoryName(Category c);
std::optional<Category> ParseCategory(std::string_view name);

struct FirstHop {
  std::string entity;
  std::string relation;
  Direction direction = Direction::kOut;

  friend auto operator<=>(const FirstHop&, const FirstHop&) = default;
};

struct SecondHop {
  std::string relation;
  Direction direction = Direction::kOut;

  friend auto operator<=>(const SecondHop&, const SecondHop&) = default;
};

struct TbCl {
  std::string table;
  std::string column;

  friend auto operator<=>(const TbCl&, const TbCl&) = default;
};

// `value` is SQL literal text: 56, 'Kyle', NULL, 1 AND 5, (1, 2).
struct TbClVl {
  std::string table;
  std::string column;
  std::string op;
  std::string value;

  friend auto operator<=>(const TbClVl&, const TbClVl&) = default;
};

using PrimitivePayload = std::variant<FirstHop, SecondHop, TbCl, TbClVl>;

std::string RenderSurface(const PrimitivePayload& payload);

class Primitive {
 public:
  explicit Primitive(PrimitivePayload payload)
      : payload_(std::move(payload)), surface_(RenderSurface(payload_)) {}

  Category category() const { return static_cast<Category>(payload_.index()); }
  const PrimitivePayload& payload() const { return payload_; }
  const std::string& surface() const { return surface_; }

  template <typename T>
  const T& as() const { return std::get<T>(payload_); }

  friend bool operator==(const Primitive& a, const Primitive& b) {
    return a.payload_ == b.payload_;
  }
  friend bool operator<(const Primitive& a, const Primitive& b) { return a.payload_ < b.payload_; }

 private:
  PrimitivePayload payload_;
  std::string surface_;
};

}  // namespace uniparse

#endif  // UNIPARSE_DATAMODEL_H_
