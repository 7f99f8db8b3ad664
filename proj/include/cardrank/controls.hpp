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

#ifndef CARDRANK_CONTROLS_HPP
#define CARDRANK_CONTROLS_HPP

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cardrank/error.hpp"
#include "cardrank/hashing.hpp"
#include "cardrank/ingest.hpp"
#include "cardrank/recode.hpp"

namespace cardrank {

// Sanity-check features with known expected scores: uniform noise of a
// chosen cardinality (expected CardMI 0), a constant (exactly 0) and a copy
// of the target (maximal score).
inline constexpr std::string_view control_prefix = "CONTROL_";

enum class ControlKind { random_uniform, constant, target_leak };

inline std::string_view to_string(ControlKind k) {
  switch (k) {
    case ControlKind::random_uniform: return "random_uniform";
    case ControlKind::constant: return "constant";
    case ControlKind::target_leak: return "target_leak";
  }
  return "unknown";
}

struct ControlSpec {
  ControlKind kind = ControlKind::constant;
  // Only meaningful for random_uniform; 1 for constant, 0 for target_leak.
  std::uint32_t cardinality = 1;
  std::string name;

  static ControlSpec random_uniform(std::uint32_t c) {
    if (c == 0) throw ConfigError("random control cardinality must be >= 1");
    return {ControlKind::random_uniform, c,
            std::string(control_prefix) + "random_" + std::to_string(c)};
  }
  static ControlSpec constant() {
    return {ControlKind::constant, 1, std::string(control_prefix) + "constant"};
  }
  static ControlSpec target_leak() {
    return {ControlKind::target_leak, 0, std::string(control_prefix) + "target_leak"};
  }
};

inline bool is_control_name(std::string_view name) {
  return name.substr(0, control_prefix.size()) == control_prefix;
}

inline StreamKey control_stream_key(std::uint64_t seed, std::size_t batch_index,
                                    std::string_view control_name) {
  StreamKey key;
  key.seed = seed;
  key.batch_index = batch_index;
  key.purpose = StreamPurpose::control;
  key.a = hash_token(control_name);
  return key;
}

inline std::vector<std::uint32_t> make_random_control(std::uint32_t cardinality,
                                                      std::size_t rows,
                                                      const StreamKey& key) {
  if (cardinality == 0) throw ConfigError("random control cardinality must be >= 1");
  if (rows == 0) throw ConfigError("random control needs at least one row");
  std::vector<std::uint32_t> out(rows);
  if (cardinality == 1) return out;
  Rng rng = make_rng(key);
  std::uniform_int_distribution<std::uint32_t> dist(0, cardinality - 1);
  for (auto& c : out) c = dist(rng);
  return out;
}

inline std::vector<std::uint32_t> make_constant_control(std::size_t rows) {
  return std::vector<std::uint32_t>(rows, 0);
}

inline std::vector<std::uint32_t> make_target_leak_control(std::span<const std::uint32_t> target) {
  return {target.begin(), target.end()};
}

// constant, target_leak, and uniform noise at 2, 10, 100 and batch_size/2.
inline std::vector<ControlSpec> default_controls(std::size_t batch_size) {
  std::vector<ControlSpec> out{ControlSpec::constant(), ControlSpec::target_leak()};
  std::vector<std::uint32_t> cards{2, 10, 100, static_cast<std::uint32_t>(batch_size / 2)};
  for (auto c : cards) {
    if (c < 2) continue;
    bool dup = false;
    for (const auto& s : out) dup = dup || (s.kind == ControlKind::random_uniform && s.cardinality == c);
    if (!dup) out.push_back(ControlSpec::random_uniform(c));
  }
  return out;
}

// Builds the control column for one batch, re-encoded to dense codes so it
// obeys the same invariants as ingested columns.
inline EncodedColumn materialize_control(const ControlSpec& spec, const EncodedBatch& batch,
                                         std::uint64_t seed) {
  std::vector<std::uint32_t> raw;
  switch (spec.kind) {
    case ControlKind::random_uniform:
      raw = make_random_control(spec.cardinality, batch.row_count,
                                control_stream_key(seed, batch.batch_index, spec.name));
      break;
    case ControlKind::constant:
      raw = make_constant_control(batch.row_count);
      break;
    case ControlKind::target_leak: {
      EncodedColumn leak;
      leak.codes = make_target_leak_control(batch.target.codes);
      leak.cardinality = batch.target.cardinality;
      return leak;
    }
  }
  return recode_dense<std::uint32_t>(raw);
}

}  // namespace cardrank

#endif  // CARDRANK_CONTROLS_HPP
