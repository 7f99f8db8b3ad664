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

#ifndef CARDRANK_INTERACTIONS_HPP
#define CARDRANK_INTERACTIONS_HPP

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <iterator>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cardrank/error.hpp"
#include "cardrank/hashing.hpp"
#include "cardrank/ingest.hpp"
#include "cardrank/mutual_information.hpp"
#include "cardrank/recode.hpp"
#include "cardrank/worker_pool.hpp"

namespace cardrank {

inline constexpr std::size_t default_buffer_size = 512;
inline constexpr std::size_t default_min_count = 3;

// A conjunction of 2 or 3 features, identified by canonically sorted ids.
struct CombinedFeature {
  std::vector<std::size_t> members;

  static CombinedFeature of(std::vector<std::size_t> ids) {
    std::sort(ids.begin(), ids.end());
    if (ids.size() < 2 || ids.size() > 3) {
      throw ConfigError("combined features have 2 or 3 members, got " +
                        std::to_string(ids.size()));
    }
    if (std::adjacent_find(ids.begin(), ids.end()) != ids.end()) {
      throw ConfigError("combined feature members must be distinct");
    }
    return CombinedFeature{std::move(ids)};
  }

  [[nodiscard]] std::size_t order() const noexcept { return members.size(); }

  [[nodiscard]] std::string display_name(std::span<const std::string> names) const {
    std::string out;
    for (std::size_t i = 0; i < members.size(); ++i) {
      if (i) out += " AND ";
      out += names[members[i]];
    }
    return out;
  }

  auto operator<=>(const CombinedFeature&) const = default;
};

struct CombinedColumn {
  std::vector<std::uint32_t> codes;
  std::uint32_t cardinality = 0;
  // Distinct member tuples that merged into an already-seen hash value.
  std::size_t collisions = 0;
};

// Hashes each row's member-code tuple to 64 bits, then re-encodes the hash
// values to dense batch-local codes.
inline CombinedColumn combine(const EncodedBatch& batch, const CombinedFeature& feature,
                              std::uint64_t hash_seed) {
  const auto& m = feature.members;
  if (m.size() < 2 || m.size() > 3 || !std::is_sorted(m.begin(), m.end())) {
    throw ConfigError("combine: members must be 2 or 3 sorted feature ids");
  }
  std::array<const EncodedColumn*, 3> cols{};
  for (std::size_t k = 0; k < m.size(); ++k) {
    if (m[k] >= batch.features.size()) {
      throw Error("combine: unknown feature id " + std::to_string(m[k]));
    }
    cols[k] = &batch.features[m[k]];
  }

  // Exact tuple identity for the collision counter, when it fits in 64 bits.
  bool exact_fits = true;
  unsigned __int128 cells = 1;
  for (std::size_t k = 0; k < m.size(); ++k) {
    cells *= std::max<std::uint32_t>(1, cols[k]->cardinality);
    exact_fits = exact_fits && cells <= ~std::uint64_t{0};
  }

  const std::size_t n = batch.row_count;
  CombinedColumn out;
  out.codes.resize(n);
  DenseRecoder by_hash(n);
  std::optional<DenseRecoder> by_tuple;
  if (exact_fits) by_tuple.emplace(n);
  std::array<std::uint32_t, 3> tuple{};
  for (std::size_t row = 0; row < n; ++row) {
    std::uint64_t exact = 0;
    for (std::size_t k = 0; k < m.size(); ++k) {
      tuple[k] = cols[k]->codes[row];
      exact = exact * std::max<std::uint32_t>(1, cols[k]->cardinality) + tuple[k];
    }
    out.codes[row] = by_hash.code(hash_bytes(tuple.data(), m.size() * sizeof(std::uint32_t), hash_seed));
    if (by_tuple) by_tuple->code(exact);
  }
  out.cardinality = by_hash.size();
  if (by_tuple && by_tuple->size() > by_hash.size()) out.collisions = by_tuple->size() - by_hash.size();
  return out;
}

// Every combination of `order` distinct feature ids out of [0, feature_count).
inline std::vector<CombinedFeature> combination_universe(std::size_t feature_count,
                                                         std::size_t order) {
  if (order < 2 || order > 3) throw ConfigError("interaction order must be 2 or 3");
  std::vector<CombinedFeature> out;
  if (order == 2) {
    for (std::size_t i = 0; i < feature_count; ++i)
      for (std::size_t j = i + 1; j < feature_count; ++j) out.push_back({{i, j}});
  } else {
    for (std::size_t i = 0; i < feature_count; ++i)
      for (std::size_t j = i + 1; j < feature_count; ++j)
        for (std::size_t k = j + 1; k < feature_count; ++k) out.push_back({{i, j, k}});
  }
  return out;
}

struct FeatureBuffer {
  std::size_t buffer_size = 0;
  std::size_t batch_index = 0;
  std::vector<CombinedFeature> selected;
};

// Uniform sample without replacement, a pure function of (seed, batch_index,
// universe). Saturates to the whole universe.
inline FeatureBuffer sample_buffer(std::span<const CombinedFeature> universe,
                                   std::size_t buffer_size, std::size_t batch_index,
                                   std::uint64_t seed) {
  if (buffer_size == 0) throw ConfigError("buffer_size must be >= 1");
  FeatureBuffer out{buffer_size, batch_index, {}};
  if (buffer_size >= universe.size()) {
    out.selected.assign(universe.begin(), universe.end());
    return out;
  }
  StreamKey key;
  key.seed = seed;
  key.batch_index = batch_index;
  key.purpose = StreamPurpose::buffer;
  key.a = universe.front().order();
  key.b = universe.size();
  Rng rng = make_rng(key);
  out.selected.reserve(buffer_size);
  std::sample(universe.begin(), universe.end(), std::back_inserter(out.selected), buffer_size, rng);
  return out;
}

// Sparse lower-triangular accumulator of batch scores. Keys hold member ids
// in strictly decreasing order; pairs never observed have no entry.
template <typename Tag, std::size_t Order = 2>
class InteractionMatrix {
 public:
  using Key = std::array<std::size_t, Order>;

  struct Cell {
    double sum = 0.0;
    std::size_t count = 0;
    [[nodiscard]] double score() const noexcept { return sum / static_cast<double>(count); }
  };

  static Key key_of(const CombinedFeature& f) {
    if (f.order() != Order) throw ConfigError("interaction order mismatch");
    Key k{};
    for (std::size_t i = 0; i < Order; ++i) k[i] = f.members[Order - 1 - i];
    return k;
  }

  void add(const Key& key, double score) {
    auto& cell = cells_[key];
    cell.sum += score;
    ++cell.count;
  }

  void merge(const InteractionMatrix& other) {
    for (const auto& [k, c] : other.cells_) {
      auto& cell = cells_[k];
      cell.sum += c.sum;
      cell.count += c.count;
    }
  }

  [[nodiscard]] std::optional<Cell> find(Key key) const {
    std::sort(key.begin(), key.end(), std::greater<>());
    auto it = cells_.find(key);
    if (it == cells_.end()) return std::nullopt;
    return it->second;
  }

  [[nodiscard]] const std::map<Key, Cell>& cells() const noexcept { return cells_; }
  [[nodiscard]] std::size_t size() const noexcept { return cells_.size(); }
  [[nodiscard]] bool empty() const noexcept { return cells_.empty(); }

 private:
  std::map<Key, Cell> cells_;
};

struct RedundancyTag {};
struct RelationTag {};
using RedundancyMatrix = InteractionMatrix<RedundancyTag, 2>;
using RelationMatrix = InteractionMatrix<RelationTag, 2>;
using TripleRelationMatrix = InteractionMatrix<RelationTag, 3>;

// Parameters shared by redundancy and relation scoring.
struct InteractionScoring {
  NullMode null_mode = NullMode::permutation;
  std::uint32_t num_samples = default_noise_samples;
  std::uint64_t seed = 0;
  std::uint64_t hash_seed = 0;
  // Score with plain MI instead of CardMI.
  bool raw_mi = false;
};

namespace detail {

inline BatchScore score_pair(Codes u, Codes v, std::size_t batch_index,
                             const InteractionScoring& cfg, StreamPurpose purpose,
                             const CombinedFeature& f) {
  if (cfg.raw_mi) return raw_batch(u, v, batch_index);
  NullSampler sampler;
  sampler.mode = cfg.null_mode;
  sampler.num_samples = cfg.num_samples;
  sampler.key.seed = cfg.seed;
  sampler.key.batch_index = batch_index;
  sampler.key.purpose = purpose;
  sampler.key.a = f.members[0];
  sampler.key.b = f.members[1];
  sampler.key.c = f.order() > 2 ? f.members[2] + 1 : 0;
  return cardmi_batch(u, v, sampler);
}

inline void for_each_index(std::size_t n, WorkerPool* pool,
                           const std::function<void(std::size_t)>& fn) {
  if (pool) {
    pool->parallel_for(n, fn);
  } else {
    for (std::size_t i = 0; i < n; ++i) fn(i);
  }
}

}  // namespace detail

// Batch scores of f_i against f_j (i > j) for each pair in the buffer.
inline std::vector<BatchScore> score_redundancy(const EncodedBatch& batch,
                                                const FeatureBuffer& buffer,
                                                const InteractionScoring& cfg,
                                                WorkerPool* pool = nullptr) {
  std::vector<BatchScore> out(buffer.selected.size());
  detail::for_each_index(buffer.selected.size(), pool, [&](std::size_t k) {
    const auto& f = buffer.selected[k];
    if (f.order() != 2) throw ConfigError("redundancy is defined for pairs only");
    if (f.members[1] >= batch.features.size()) {
      throw Error("unknown feature id " + std::to_string(f.members[1]));
    }
    out[k] = detail::score_pair(batch.features[f.members[1]].codes,
                                batch.features[f.members[0]].codes, batch.batch_index, cfg,
                                StreamPurpose::null_redundancy, f);
  });
  return out;
}

inline void accumulate_redundancy(const EncodedBatch& batch, const FeatureBuffer& buffer,
                                  const InteractionScoring& cfg, RedundancyMatrix& matrix,
                                  WorkerPool* pool = nullptr) {
  const auto scores = score_redundancy(batch, buffer, cfg, pool);
  for (std::size_t k = 0; k < scores.size(); ++k) {
    matrix.add(RedundancyMatrix::key_of(buffer.selected[k]), scores[k].normalized);
  }
}

struct RelationScores {
  std::vector<BatchScore> scores;
  std::size_t collisions = 0;
};

// Batch scores of each buffered combination against the target.
inline RelationScores score_relation(const EncodedBatch& batch, const FeatureBuffer& buffer,
                                     Codes target, const InteractionScoring& cfg,
                                     WorkerPool* pool = nullptr) {
  RelationScores out;
  out.scores.resize(buffer.selected.size());
  std::vector<std::size_t> collisions(buffer.selected.size(), 0);
  detail::for_each_index(buffer.selected.size(), pool, [&](std::size_t k) {
    const auto& f = buffer.selected[k];
    const auto combined = combine(batch, f, cfg.hash_seed);
    collisions[k] = combined.collisions;
    out.scores[k] = detail::score_pair(
        target, combined.codes, batch.batch_index, cfg,
        f.order() == 2 ? StreamPurpose::null_relation : StreamPurpose::null_triple, f);
  });
  for (auto c : collisions) out.collisions += c;
  return out;
}

// Returns the number of hash collisions observed in this batch.
template <std::size_t Order>
std::size_t accumulate_relation(const EncodedBatch& batch, const FeatureBuffer& buffer,
                                Codes target, const InteractionScoring& cfg,
                                InteractionMatrix<RelationTag, Order>& matrix,
                                WorkerPool* pool = nullptr) {
  const auto result = score_relation(batch, buffer, target, cfg, pool);
  for (std::size_t k = 0; k < result.scores.size(); ++k) {
    matrix.add(InteractionMatrix<RelationTag, Order>::key_of(buffer.selected[k]),
               result.scores[k].normalized);
  }
  return result.collisions;
}

}  // namespace cardrank

#endif  // CARDRANK_INTERACTIONS_HPP
