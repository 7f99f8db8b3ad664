// Copyright 2026 The cardrank Authors. All Rights Reserved.
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

#ifndef CARDRANK_INGEST_HPP
#define CARDRANK_INGEST_HPP

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "cardrank/error.hpp"

namespace cardrank {

inline constexpr std::size_t default_batch_size = 4196;

enum class ColumnRole { feature, target, ignore };

struct ColumnSpec {
  std::string name;
  ColumnRole role = ColumnRole::feature;
};

// Column roles for one dataset. Exactly one target, at least one feature,
// unique names.
class Schema {
 public:
  explicit Schema(std::vector<ColumnSpec> columns, std::string missing_token = {})
      : columns_(std::move(columns)), missing_token_(std::move(missing_token)) {
    std::unordered_set<std::string> seen;
    std::size_t targets = 0;
    for (std::size_t i = 0; i < columns_.size(); ++i) {
      const auto& c = columns_[i];
      if (!seen.insert(c.name).second) {
        throw ConfigError("duplicate column name in schema: '" + c.name + "'");
      }
      switch (c.role) {
        case ColumnRole::target:
          ++targets;
          target_ = i;
          break;
        case ColumnRole::feature:
          features_.push_back(i);
          break;
        case ColumnRole::ignore:
          break;
      }
    }
    if (targets != 1) {
      throw ConfigError("schema must have exactly one target column, found " +
                        std::to_string(targets));
    }
    if (features_.empty()) {
      throw ConfigError("schema must have at least one feature column");
    }
  }

  // Every header column becomes a feature except the target and the ignored.
  static Schema from_header(const std::vector<std::string>& header,
                            std::string_view target,
                            const std::vector<std::string>& ignored = {},
                            std::string missing_token = {}) {
    if (std::find(header.begin(), header.end(), target) == header.end()) {
      throw DataError("target column '" + std::string(target) +
                      "' not found in header");
    }
    for (const auto& name : ignored) {
      if (std::find(header.begin(), header.end(), name) == header.end()) {
        throw DataError("ignored column '" + name + "' not found in header");
      }
    }
    std::vector<ColumnSpec> cols;
    cols.reserve(header.size());
    for (const auto& name : header) {
      ColumnRole role = ColumnRole::feature;
      if (name == target) {
        role = ColumnRole::target;
      } else if (std::find(ignored.begin(), ignored.end(), name) != ignored.end()) {
        role = ColumnRole::ignore;
      }
      cols.push_back({name, role});
    }
    return Schema(std::move(cols), std::move(missing_token));
  }

  [[nodiscard]] const std::vector<ColumnSpec>& columns() const noexcept { return columns_; }
  [[nodiscard]] const std::string& missing_token() const noexcept { return missing_token_; }
  [[nodiscard]] const std::string& target_name() const noexcept { return columns_[target_].name; }
  [[nodiscard]] std::size_t feature_count() const noexcept { return features_.size(); }

  [[nodiscard]] std::vector<std::string> feature_names() const {
    std::vector<std::string> out;
    out.reserve(features_.size());
    for (auto i : features_) out.push_back(columns_[i].name);
    return out;
  }

  [[nodiscard]] std::optional<std::size_t> find(std::string_view name) const {
    for (std::size_t i = 0; i < columns_.size(); ++i) {
      if (columns_[i].name == name) return i;
    }
    return std::nullopt;
  }

  // Position of a column among the features, or nullopt for target/ignored.
  [[nodiscard]] std::optional<std::size_t> feature_slot(std::size_t column) const {
    auto it = std::find(features_.begin(), features_.end(), column);
    if (it == features_.end()) return std::nullopt;
    return static_cast<std::size_t>(it - features_.begin());
  }

 private:
  std::vector<ColumnSpec> columns_;
  std::string missing_token_;
  std::vector<std::size_t> features_;
  std::size_t target_ = 0;
};

// Dense 0-based codes for one column of one batch, in first-appearance order.
struct EncodedColumn {
  std::vector<std::uint32_t> codes;
  std::uint32_t cardinality = 0;
  std::size_t missing_count = 0;
  // dictionary[code] is the token; empty for synthesized columns.
  std::vector<std::string> dictionary;

  [[nodiscard]] std::span<const std::uint32_t> view() const noexcept { return codes; }
  [[nodiscard]] const std::string& decode(std::size_t row) const { return dictionary.at(codes.at(row)); }
};

class ColumnEncoder {
 public:
  explicit ColumnEncoder(std::string missing_token = {})
      : missing_(std::move(missing_token)) {}

  void reserve(std::size_t rows) {
    column_.codes.reserve(rows);
    index_.reserve(rows);
  }

  std::uint32_t add(const std::string& token) {
    const auto next = static_cast<std::uint32_t>(column_.dictionary.size());
    auto [it, inserted] = index_.try_emplace(token, next);
    if (inserted) column_.dictionary.push_back(token);
    if (token == missing_) ++column_.missing_count;
    column_.codes.push_back(it->second);
    return it->second;
  }

  EncodedColumn finish() {
    column_.cardinality = static_cast<std::uint32_t>(column_.dictionary.size());
    EncodedColumn out = std::move(column_);
    column_ = {};
    index_.clear();
    return out;
  }

 private:
  std::string missing_;
  std::unordered_map<std::string, std::uint32_t> index_;
  EncodedColumn column_;
};

inline EncodedColumn encode_column(std::span<const std::string> values,
                                   const std::string& missing_token = {}) {
  if (values.empty()) throw DataError("encode_column: empty value sequence");
  ColumnEncoder enc(missing_token);
  enc.reserve(values.size());
  for (const auto& v : values) enc.add(v);
  return enc.finish();
}

struct EncodedBatch {
  std::size_t batch_index = 0;
  std::size_t row_count = 0;
  // Physical line number (1-based) of the first record in the batch.
  std::size_t first_line = 0;
  std::vector<EncodedColumn> features;
  EncodedColumn target;
};

enum class Format { csv, tsv };

inline Format parse_format(std::string_view s) {
  if (s == "csv") return Format::csv;
  if (s == "tsv") return Format::tsv;
  throw ConfigError("unknown format '" + std::string(s) + "' (expected csv or tsv)");
}

inline std::string_view to_string(Format f) { return f == Format::csv ? "csv" : "tsv"; }

// RFC-4180 record reader for CSV (quoted fields, doubled quotes, embedded
// newlines, CRLF). TSV is split on tabs with no quoting. Blank lines are
// skipped.
class RecordReader {
 public:
  RecordReader(std::istream& in, Format format)
      : in_(in),
        delimiter_(format == Format::csv ? ',' : '\t'),
        quoting_(format == Format::csv),
        buffer_(1 << 16) {}

  bool next(std::vector<std::string>& fields) {
    std::size_t count = 0;
    for (;;) {
      const int c = peek();
      if (c == eof) return false;
      if (c == '\n') {
        advance();
        ++line_;
        continue;
      }
      if (c == '\r') {
        advance();
        if (peek() == '\n') advance();
        ++line_;
        continue;
      }
      break;
    }
    record_line_ = line_;
    for (;;) {
      if (count == fields.size()) fields.emplace_back();
      std::string& field = fields[count++];
      field.clear();
      read_field(field);
      const int c = peek();
      if (c == delimiter_) {
        advance();
        continue;
      }
      if (c == '\r') {
        advance();
        if (peek() == '\n') advance();
        ++line_;
      } else if (c == '\n') {
        advance();
        ++line_;
      }
      break;
    }
    fields.resize(count);
    return true;
  }

  // Line on which the most recently returned record started.
  [[nodiscard]] std::size_t line() const noexcept { return record_line_; }

 private:
  static constexpr int eof = -1;

  int peek() {
    if (pos_ == end_ && !refill()) return eof;
    return static_cast<unsigned char>(buffer_[pos_]);
  }
  void advance() noexcept { ++pos_; }

  bool refill() {
    if (done_) return false;
    in_.read(buffer_.data(), static_cast<std::streamsize>(buffer_.size()));
    end_ = static_cast<std::size_t>(in_.gcount());
    pos_ = 0;
    if (end_ == 0) {
      done_ = true;
      return false;
    }
    return true;
  }

  void read_field(std::string& field) {
    if (quoting_ && peek() == '"') {
      advance();
      for (;;) {
        const int c = peek();
        if (c == eof) {
          throw DataError("line " + std::to_string(record_line_) +
                          ": unterminated quoted field");
        }
        advance();
        if (c == '"') {
          if (peek() == '"') {
            advance();
            field.push_back('"');
            continue;
          }
          break;
        }
        if (c == '\n') ++line_;
        field.push_back(static_cast<char>(c));
      }
      const int after = peek();
      if (after != eof && after != delimiter_ && after != '\n' && after != '\r') {
        throw DataError("line " + std::to_string(line_) +
                        ": unexpected character after closing quote");
      }
      return;
    }
    for (;;) {
      if (pos_ == end_ && !refill()) return;
      // Scan the buffered run without per-character refill checks.
      std::size_t i = pos_;
      while (i < end_) {
        const char ch = buffer_[i];
        if (ch == delimiter_ || ch == '\n' || ch == '\r') break;
        ++i;
      }
      field.append(buffer_.data() + pos_, i - pos_);
      pos_ = i;
      if (i < end_) return;
    }
  }

  std::istream& in_;
  char delimiter_;
  bool quoting_;
  std::vector<char> buffer_;
  std::size_t pos_ = 0;
  std::size_t end_ = 0;
  bool done_ = false;
  std::size_t line_ = 1;
  std::size_t record_line_ = 0;
};

// How to derive a Schema from a file's own header row.
struct HeaderSchema {
  std::string target;
  std::vector<std::string> ignored;
  std::string missing_token;
};

// Streams a delimited file as batches of at most batch_size rows. Codes are
// batch-local: every batch is re-encoded from scratch.
class BatchReader {
 public:
  BatchReader(std::istream& in, Format format, Schema schema,
              std::size_t batch_size = default_batch_size)
      : reader_(in, format),
        header_(read_header_row(reader_)),
        schema_(std::move(schema)),
        batch_size_(batch_size) {
    init();
  }

  BatchReader(std::istream& in, Format format, const HeaderSchema& spec,
              std::size_t batch_size = default_batch_size)
      : reader_(in, format),
        header_(read_header_row(reader_)),
        schema_(Schema::from_header(header_, spec.target, spec.ignored, spec.missing_token)),
        batch_size_(batch_size) {
    init();
  }

  [[nodiscard]] const Schema& schema() const noexcept { return schema_; }
  [[nodiscard]] std::vector<std::string> feature_names() const { return schema_.feature_names(); }
  [[nodiscard]] std::size_t batch_size() const noexcept { return batch_size_; }

  std::optional<EncodedBatch> next() {
    const std::size_t nfeat = schema_.feature_count();
    std::vector<ColumnEncoder> encoders(nfeat, ColumnEncoder(schema_.missing_token()));
    ColumnEncoder target(schema_.missing_token());
    for (auto& e : encoders) e.reserve(batch_size_);
    target.reserve(batch_size_);

    EncodedBatch batch;
    std::size_t rows = 0;
    while (rows < batch_size_ && reader_.next(fields_)) {
      if (fields_.size() != slots_.size()) {
        throw DataError("line " + std::to_string(reader_.line()) + ": expected " +
                        std::to_string(slots_.size()) + " fields, got " +
                        std::to_string(fields_.size()));
      }
      if (rows == 0) batch.first_line = reader_.line();
      for (std::size_t i = 0; i < slots_.size(); ++i) {
        const int slot = slots_[i];
        if (slot >= 0) {
          encoders[static_cast<std::size_t>(slot)].add(fields_[i]);
        } else if (slot == target_slot) {
          target.add(fields_[i]);
        }
      }
      ++rows;
    }
    if (rows == 0) return std::nullopt;
    batch.batch_index = next_index_++;
    batch.row_count = rows;
    batch.features.reserve(nfeat);
    for (auto& e : encoders) batch.features.push_back(e.finish());
    batch.target = target.finish();
    return batch;
  }

 private:
  static constexpr int ignore_slot = -1;
  static constexpr int target_slot = -2;

  static std::vector<std::string> read_header_row(RecordReader& reader) {
    std::vector<std::string> header;
    if (!reader.next(header)) throw DataError("input is empty: missing header row");
    return header;
  }

  void init() {
    if (batch_size_ < 2) throw ConfigError("batch_size must be >= 2");
    bind_header(header_);
  }

  void bind_header(const std::vector<std::string>& header) {
    std::unordered_set<std::string> seen;
    slots_.assign(header.size(), ignore_slot);
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (!seen.insert(header[i]).second) {
        throw DataError("duplicate column in header: '" + header[i] + "'");
      }
      auto col = schema_.find(header[i]);
      if (!col) throw DataError("unknown column in header: '" + header[i] + "'");
      const auto role = schema_.columns()[*col].role;
      if (role == ColumnRole::target) {
        slots_[i] = target_slot;
      } else if (role == ColumnRole::feature) {
        slots_[i] = static_cast<int>(*schema_.feature_slot(*col));
      }
    }
    for (const auto& c : schema_.columns()) {
      if (!seen.contains(c.name)) {
        throw DataError("schema column '" + c.name + "' missing from header");
      }
    }
  }

  RecordReader reader_;
  std::vector<std::string> header_;
  Schema schema_;
  std::size_t batch_size_;
  std::vector<int> slots_;
  std::vector<std::string> fields_;
  std::size_t next_index_ = 0;
};

inline std::vector<EncodedBatch> read_batches(std::istream& in, Format format,
                                              const Schema& schema,
                                              std::size_t batch_size = default_batch_size) {
  BatchReader reader(in, format, schema, batch_size);
  std::vector<EncodedBatch> out;
  while (auto b = reader.next()) out.push_back(std::move(*b));
  return out;
}

}  // namespace cardrank

#endif  // CARDRANK_INGEST_HPP
