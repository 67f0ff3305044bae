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

#include "uniparse/datamodel.h"

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "uniparse/text.h"

namespace uniparse {
namespace {

using nlohmann::json;

std::string ReadFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IngestError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string_view> SplitLines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    start = end + 1;
  }
  return lines;
}

std::vector<std::string_view> SplitTabs(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    std::size_t tab = line.find('\t', start);
    if (tab == std::string_view::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
  return fields;
}

bool ValidLiteral(ObjectKind kind, std::string_view text) {
  switch (kind) {
    case ObjectKind::kEntity:
      return !text.empty();
    case ObjectKind::kInt: {
      long long v = 0;
      std::string_view body = text;
      if (!body.empty() && body.front() == '+') body.remove_prefix(1);
      auto [ptr, ec] = std::from_chars(body.data(), body.data() + body.size(), v);
      return !body.empty() && ec == std::errc() && ptr == body.data() + body.size();
    }
    case ObjectKind::kFloat:
      return ParseNumber(text).has_value();
    case ObjectKind::kString:
      return true;
  }
  return false;
}

// One CSV record per line; fields may be double-quoted with "" escapes.
// Unquoted empty fields are nulls.
struct CsvField {
  std::string text;
  bool quoted = false;
};

std::vector<CsvField> ParseCsvLine(std::string_view line, std::size_t line_no,
                                   const std::string& where) {
  std::vector<CsvField> fields;
  CsvField field;
  std::size_t i = 0;
  bool field_start = true;
  while (i <= line.size()) {
    if (i == line.size()) {
      fields.push_back(std::move(field));
      break;
    }
    char c = line[i];
    if (field_start && c == '"') {
      field.quoted = true;
      ++i;
      bool closed = false;
      while (i < line.size()) {
        if (line[i] == '"') {
          if (i + 1 < line.size() && line[i + 1] == '"') {
            field.text.push_back('"');
            i += 2;
            continue;
          }
          closed = true;
          ++i;
          break;
        }
        field.text.push_back(line[i++]);
      }
      if (!closed) {
        throw IngestError(where + " row " + std::to_string(line_no) + ": unterminated quote");
      }
      field_start = false;
      continue;
    }
    if (c == ',') {
      fields.push_back(std::move(field));
      field = CsvField{};
      field_start = true;
      ++i;
      continue;
    }
    if (field.quoted) {
      throw IngestError(where + " row " + std::to_string(line_no) +
                        ": unexpected character after closing quote");
    }
    field.text.push_back(c);
    field_start = false;
    ++i;
  }
  return fields;
}

}  // namespace

std::string_view ObjectKindName(ObjectKind kind) {
  switch (kind) {
    case ObjectKind::kEntity: return "entity";
    case ObjectKind::kInt: return "int";
    case ObjectKind::kFloat: return "float";
    case ObjectKind::kString: return "str";
  }
  return "entity";
}

std::optional<ObjectKind> ParseObjectKind(std::string_view name) {
  if (name == "entity") return ObjectKind::kEntity;
  if (name == "int") return ObjectKind::kInt;
  if (name == "float") return ObjectKind::kFloat;
  if (name == "str") return ObjectKind::kString;
  return std::nullopt;
}

std::string_view DirectionName(Direction d) { return d == Direction::kOut ? "out" : "in"; }

KnowledgeBase::KnowledgeBase(std::vector<Triple> triples,
                             std::map<std::string, std::string, std::less<>> names)
    : triples_(std::move(triples)), names_(std::move(names)) {
  for (std::size_t i = 0; i < triples_.size(); ++i) {
    const Triple& t = triples_[i];
    out_index_[t.subject].push_back(Edge{t.relation, t.object});
    if (t.object.is_entity()) {
      in_index_[t.object.text].push_back(Edge{t.relation, EntityObject(t.subject)});
    } else {
      literal_in_index_[t.object].push_back(Edge{t.relation, EntityObject(t.subject)});
    }
    relation_index_[t.relation].push_back(i);
  }
}

std::span<const Edge> KnowledgeBase::OutEdges(std::string_view entity) const {
  auto it = out_index_.find(entity);
  if (it == out_index_.end()) return {};
  return it->second;
}

std::span<const Edge> KnowledgeBase::InEdges(std::string_view entity) const {
  auto it = in_index_.find(entity);
  if (it == in_index_.end()) return {};
  return it->second;
}

std::span<const Edge> KnowledgeBase::LiteralInEdges(const Object& literal) const {
  auto it = literal_in_index_.find(literal);
  if (it == literal_in_index_.end()) return {};
  return it->second;
}

std::span<const std::size_t> KnowledgeBase::RelationTriples(std::string_view relation) const {
  auto it = relation_index_.find(relation);
  if (it == relation_index_.end()) return {};
  return it->second;
}

const std::string* KnowledgeBase::Name(std::string_view entity) const {
  auto it = names_.find(entity);
  return it == names_.end() ? nullptr : &it->second;
}

bool KnowledgeBase::HasRelation(std::string_view relation) const {
  return relation_index_.find(relation) != relation_index_.end();
}

KnowledgeBase ParseKnowledgeBase(std::string_view triples_tsv, std::string_view names_tsv) {
  std::vector<Triple> triples;
  std::vector<std::string_view> lines = SplitLines(triples_tsv);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    std::string_view line = lines[i];
    if (line.empty()) continue;
    std::vector<std::string_view> f = SplitTabs(line);
    std::string where = "triples line " + std::to_string(i + 1);
    if (f.size() != 4) {
      throw IngestError(where + ": expected 4 fields, got " + std::to_string(f.size()));
    }
    if (f[0].empty() || f[1].empty()) throw IngestError(where + ": empty subject or relation");
    std::optional<ObjectKind> kind = ParseObjectKind(f[3]);
    if (!kind) throw IngestError(where + ": unknown object kind '" + std::string(f[3]) + "'");
    if (!ValidLiteral(*kind, f[2])) {
      throw IngestError(where + ": cannot parse '" + std::string(f[2]) + "' as " +
                        std::string(f[3]));
    }
    triples.push_back(
        Triple{std::string(f[0]), std::string(f[1]), Object{*kind, std::string(f[2])}});
  }
  std::map<std::string, std::string, std::less<>> names;
  std::vector<std::string_view> name_lines = SplitLines(names_tsv);
  for (std::size_t i = 0; i < name_lines.size(); ++i) {
    if (name_lines[i].empty()) continue;
    std::vector<std::string_view> f = SplitTabs(name_lines[i]);
    if (f.size() != 2) {
      throw IngestError("names line " + std::to_string(i + 1) + ": expected 2 fields, got " +
                        std::to_string(f.size()));
    }
    names.emplace(std::string(f[0]), std::string(f[1]));
  }
  return KnowledgeBase(std::move(triples), std::move(names));
}

KnowledgeBase LoadKnowledgeBase(const std::filesystem::path& triples_path,
                                const std::optional<std::filesystem::path>& names_path) {
  std::string triples = ReadFile(triples_path);
  std::string names = names_path ? ReadFile(*names_path) : std::string();
  return ParseKnowledgeBase(triples, names);
}

std::string_view ColumnTypeName(ColumnType type) {
  return type == ColumnType::kNumber ? "number" : "text";
}

std::string ValueToString(const Value& v) {
  if (IsNull(v)) return "NULL";
  if (IsNumber(v)) return FormatNumber(std::get<double>(v));
  return std::get<std::string>(v);
}

std::string ValueToSqlLiteral(const Value& v) {
  if (!IsText(v)) return ValueToString(v);
  std::string out = "'";
  for (char c : std::get<std::string>(v)) {
    if (c == '\'') out.push_back('\'');
    out.push_back(c);
  }
  out.push_back('\'');
  return out;
}

int Table::ColumnIndex(std::string_view column) const {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i].name == column) return static_cast<int>(i);
  }
  return -1;
}

Database::Database(std::string id, std::vector<Table> tables)
    : id_(std::move(id)), tables_(std::move(tables)) {
  std::set<std::string> table_names;
  for (const Table& t : tables_) {
    if (!table_names.insert(t.name).second) {
      throw IngestError("duplicate table name '" + t.name + "'");
    }
    std::set<std::string> column_names;
    for (const Column& c : t.columns) {
      if (!column_names.insert(c.name).second) {
        throw IngestError("table " + t.name + ": duplicate column name '" + c.name + "'");
      }
    }
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
      const Row& row = t.rows[r];
      if (row.size() != t.columns.size()) {
        throw IngestError("table " + t.name + " row " + std::to_string(r + 1) + ": expected " +
                          std::to_string(t.columns.size()) + " cells, got " +
                          std::to_string(row.size()));
      }
      for (std::size_t c = 0; c < row.size(); ++c) {
        bool ok = IsNull(row[c]) || (t.columns[c].type == ColumnType::kNumber ? IsNumber(row[c])
                                                                             : IsText(row[c]));
        if (!ok) {
          throw IngestError("table " + t.name + " row " + std::to_string(r + 1) + ": cell " +
                            t.columns[c].name + " does not match column type");
        }
      }
    }
  }
}

const Table* Database::FindTable(std::string_view name) const {
  for (const Table& t : tables_) {
    if (t.name == name) return &t;
  }
  return nullptr;
}

std::size_t Database::ColumnCount() const {
  std::size_t n = 0;
  for (const Table& t : tables_) n += t.columns.size();
  return n;
}

Database LoadDatabase(const std::filesystem::path& schema_path,
                      const std::filesystem::path& rows_dir) {
  json schema;
  try {
    schema = json::parse(ReadFile(schema_path));
  } catch (const json::exception& e) {
    throw IngestError("schema " + schema_path.string() + ": " + e.what());
  }
  if (!schema.contains("tables") || !schema["tables"].is_array()) {
    throw IngestError("schema " + schema_path.string() + ": missing \"tables\" array");
  }
  std::string id = schema.value("id", schema_path.stem().string());
  std::vector<Table> tables;
  for (const json& jt : schema["tables"]) {
    Table table;
    table.name = jt.at("name").get<std::string>();
    std::set<std::string> seen;
    for (const json& jc : jt.at("columns")) {
      Column col;
      col.name = jc.at("name").get<std::string>();
      std::string type = jc.at("type").get<std::string>();
      if (type == "number") {
        col.type = ColumnType::kNumber;
      } else if (type == "text") {
        col.type = ColumnType::kText;
      } else {
        throw IngestError("table " + table.name + ": unknown column type '" + type + "'");
      }
      if (!seen.insert(col.name).second) {
        throw IngestError("table " + table.name + ": duplicate column name '" + col.name + "'");
      }
      table.columns.push_back(std::move(col));
    }

    std::filesystem::path csv_path = rows_dir / (table.name + ".csv");
    std::string where = "table " + table.name;
    std::vector<std::string_view> lines;
    std::string csv;
    if (std::filesystem::exists(csv_path)) {
      csv = ReadFile(csv_path);
      lines = SplitLines(csv);
    } else {
      throw IngestError(where + ": missing rows file " + csv_path.string());
    }
    if (lines.empty()) throw IngestError(where + ": rows file has no header");
    std::vector<CsvField> header = ParseCsvLine(lines[0], 0, where);
    bool header_ok = header.size() == table.columns.size();
    for (std::size_t c = 0; header_ok && c < header.size(); ++c) {
      header_ok = header[c].text == table.columns[c].name;
    }
    if (!header_ok) throw IngestError(where + ": CSV header does not match schema columns");

    for (std::size_t r = 1; r < lines.size(); ++r) {
      if (lines[r].empty()) continue;
      std::vector<CsvField> fields = ParseCsvLine(lines[r], r, where);
      if (fields.size() != table.columns.size()) {
        throw IngestError(where + " row " + std::to_string(r) + ": expected " +
                          std::to_string(table.columns.size()) + " cells, got " +
                          std::to_string(fields.size()));
      }
      Row row;
      for (std::size_t c = 0; c < fields.size(); ++c) {
        const CsvField& f = fields[c];
        if (!f.quoted && f.text.empty()) {
          row.emplace_back(std::monostate{});
        } else if (table.columns[c].type == ColumnType::kNumber) {
          std::optional<double> v = ParseNumber(f.text);
          if (!v) {
            throw IngestError(where + " row " + std::to_string(r) + ": non-numeric cell '" +
                              f.text + "' in number column " + table.columns[c].name);
          }
          row.emplace_back(*v);
        } else {
          row.emplace_back(f.text);
        }
      }
      table.rows.push_back(std::move(row));
    }
    tables.push_back(std::move(table));
  }
  return Database(std::move(id), std::move(tables));
}

std::string_view ModalityName(Modality m) { return m == Modality::kKb ? "kb" : "db"; }

std::optional<Modality> ParseModality(std::string_view name) {
  if (name == "kb") return Modality::kKb;
  if (name == "db") return Modality::kDb;
  return std::nullopt;
}

std::vector<Question> ParseQuestions(std::string_view jsonl) {
  std::vector<Question> out;
  std::vector<std::string_view> lines = SplitLines(jsonl);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].find_first_not_of(" \t") == std::string_view::npos) continue;
    std::string where = "questions line " + std::to_string(i + 1);
    json j;
    try {
      j = json::parse(lines[i]);
    } catch (const json::exception& e) {
      throw IngestError(where + ": " + e.what());
    }
    if (!j.is_object()) throw IngestError(where + ": expected a JSON object");
    for (const char* field : {"id", "text", "modality"}) {
      if (!j.contains(field) || !j[field].is_string()) {
        throw IngestError(where + ": missing required field '" + field + "'");
      }
    }
    Question q;
    q.id = j["id"].get<std::string>();
    q.text = j["text"].get<std::string>();
    std::optional<Modality> m = ParseModality(j["modality"].get<std::string>());
    if (!m) {
      throw IngestError(where + ": unknown modality '" + j["modality"].get<std::string>() + "'");
    }
    q.modality = *m;
    try {
      if (j.contains("gold") && !j["gold"].is_null()) q.gold = j["gold"].get<std::string>();
      if (j.contains("db_id") && !j["db_id"].is_null()) q.db_id = j["db_id"].get<std::string>();
      if (j.contains("entity_mentions") && !j["entity_mentions"].is_null()) {
        q.entity_mentions = j["entity_mentions"].get<std::vector<std::string>>();
      }
      if (j.contains("answers") && !j["answers"].is_null()) {
        std::vector<std::string> answers;
        for (const json& a : j["answers"]) {
          if (a.is_number()) {
            answers.push_back(FormatNumber(a.get<double>()));
          } else if (a.is_string()) {
            answers.push_back(a.get<std::string>());
          } else {
            throw IngestError(where + ": answers must be strings or numbers");
          }
        }
        q.answers = std::move(answers);
      }
    } catch (const json::exception& e) {
      throw IngestError(where + ": " + e.what());
    }
    out.push_back(std::move(q));
  }
  return out;
}

std::vector<Question> LoadQuestions(const std::filesystem::path& path) {
  return ParseQuestions(ReadFile(path));
}

std::string_view CategoryToken(Category c) {
  switch (c) {
    case Category::kFirstHop: return "<|firsthop|>";
    case Category::kSecondHop: return "<|secondhop|>";
    case Category::kTbCl: return "<|tb_cl|>";
    case Category::kTbClVl: return "<|tb_cl_vl|>";
  }
  return "";
}

std::string_view CategoryName(Category c) {
  switch (c) {
    case Category::kFirstHop: return "firsthop";
    case Category::kSecondHop: return "secondhop";
    case Category::kTbCl: return "tb_cl";
    case Category::kTbClVl: return "tb_cl_vl";
  }
  return "";
}

std::optional<Category> ParseCategory(std::string_view name) {
  for (int i = 0; i < kNumCategories; ++i) {
    if (CategoryName(static_cast<Category>(i)) == name) return static_cast<Category>(i);
  }
  return std::nullopt;
}

std::string RenderSurface(const PrimitivePayload& payload) {
  struct Renderer {
    std::string operator()(const FirstHop& p) const {
      if (p.direction == Direction::kIn) return "(JOIN " + p.relation + " " + p.entity + ")";
      return "(JOIN (R " + p.relation + ") " + p.entity + ")";
    }
    std::string operator()(const SecondHop& p) const {
      if (p.direction == Direction::kIn) return p.relation;
      return "(R " + p.relation + ")";
    }
    std::string operator()(const TbCl& p) const { return p.table + "." + p.column; }
    std::string operator()(const TbClVl& p) const {
      return p.table + "." + p.column + " " + p.op + " " + p.value;
    }
  };
  return std::visit(Renderer{}, payload);
}

}  // namespace uniparse
