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

#ifndef CARDRANK_PROFILING_HPP
#define CARDRANK_PROFILING_HPP

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "cardrank/error.hpp"
#include "cardrank/hashing.hpp"
#include "cardrank/ingest.hpp"

namespace cardrank {

inline constexpr unsigned default_sketch_precision = 14;
inline constexpr std::size_t default_exact_threshold = 1024;
inline constexpr std::size_t default_top_k = 10;

// Distinct-count sketch: an exact hash set up to `exact_threshold` distinct
// values, then 2^p HyperLogLog registers read with Ertl's improved raw
// estimator. Merge is register-wise max (set union while exact).
class CardinalitySketch {
 public:
  explicit CardinalitySketch(unsigned precision = default_sketch_precision,
                             std::size_t exact_threshold = default_exact_threshold)
      : precision_(precision), threshold_(exact_threshold) {
    if (precision_ < 4 || precision_ > 18) throw ConfigError("sketch precision must be in [4, 18]");
  }

  void insert(std::string_view token) { insert_hash(hash_token(token, token_seed)); }

  void insert_hash(std::uint64_t h) {
    if (registers_.empty()) {
      exact_.insert(h);
      if (exact_.size() > threshold_) promote();
    } else {
      update_register(h);
    }
  }

  [[nodiscard]] bool is_exact() const noexcept { return registers_.empty(); }
  [[nodiscard]] unsigned precision() const noexcept { return precision_; }

  [[nodiscard]] double estimate() const {
    if (is_exact()) return static_cast<double>(exact_.size());
    // Promotion happened after seeing threshold + 1 distinct hashes.
    return std::max(register_estimate(), static_cast<double>(threshold_ + 1));
  }

  void merge(const CardinalitySketch& other) {
    if (other.precision_ != precision_ || other.threshold_ != threshold_) {
      throw ConfigError("cannot merge sketches with different parameters");
    }
    if (other.is_exact()) {
      for (auto h : other.exact_) insert_hash(h);
      return;
    }
    if (is_exact()) promote();
    for (std::size_t i = 0; i < registers_.size(); ++i) {
      registers_[i] = std::max(registers_[i], other.registers_[i]);
    }
  }

  friend bool operator==(const CardinalitySketch& a, const CardinalitySketch& b) {
    return a.precision_ == b.precision_ && a.threshold_ == b.threshold_ &&
           a.exact_ == b.exact_ && a.registers_ == b.registers_;
  }

  static constexpr std::uint64_t token_seed = 0x5EED5EEDULL;

 private:
  void promote() {
    registers_.assign(std::size_t{1} << precision_, 0);
    for (auto h : exact_) update_register(h);
    exact_.clear();
    exact_.rehash(0);
  }

  void update_register(std::uint64_t h) {
    const unsigned q = 64 - precision_;
    const std::size_t idx = static_cast<std::size_t>(h >> q);
    const std::uint64_t rest = h << precision_;
    const auto rank = static_cast<std::uint8_t>(std::min<unsigned>(std::countl_zero(rest) + 1, q + 1));
    registers_[idx] = std::max(registers_[idx], rank);
  }

  static double sigma(double x) {
    if (x == 1.0) return std::numeric_limits<double>::infinity();
    double y = 1.0;
    double z = x;
    for (;;) {
      x *= x;
      const double prev = z;
      z += x * y;
      y += y;
      if (prev == z) return z;
    }
  }

  static double tau(double x) {
    if (x == 0.0 || x == 1.0) return 0.0;
    double y = 1.0;
    double z = 1.0 - x;
    for (;;) {
      x = std::sqrt(x);
      const double prev = z;
      y *= 0.5;
      z -= (1.0 - x) * (1.0 - x) * y;
      if (prev == z) return z / 3.0;
    }
  }

  [[nodiscard]] double register_estimate() const {
    const unsigned q = 64 - precision_;
    const double m = static_cast<double>(registers_.size());
    std::vector<std::uint64_t> hist(q + 2, 0);
    for (auto r : registers_) ++hist[r];
    double z = m * tau(1.0 - static_cast<double>(hist[q + 1]) / m);
    for (unsigned k = q; k >= 1; --k) z = 0.5 * (z + static_cast<double>(hist[k]));
    z += m * sigma(static_cast<double>(hist[0]) / m);
    const double alpha_inf = 1.0 / (2.0 * std::log(2.0));
    return alpha_inf * m * m / z;
  }

  unsigned precision_;
  std::size_t threshold_;
  std::unordered_set<std::uint64_t> exact_;
  std::vector<std::uint8_t> registers_;
};

struct TokenCount {
  std::string token;
  std::uint64_t count = 0;
};

// Exact row and missing counts plus an approximate cross-batch top-k: each
// batch contributes its exact top-k, and the candidate table is pruned back
// when it grows past a fixed capacity.
class CoverageStats {
 public:
  explicit CoverageStats(std::size_t top_k = default_top_k)
      : top_k_(top_k), capacity_(std::max<std::size_t>(1024, 64 * top_k)) {}

  void update(const EncodedColumn& column) {
    total_ += column.codes.size();
    missing_ += column.missing_count;
    if (top_k_ == 0 || column.dictionary.empty()) return;
    std::vector<std::uint64_t> counts(column.dictionary.size(), 0);
    for (auto c : column.codes) ++counts[c];
    std::vector<std::uint32_t> idx(counts.size());
    for (std::uint32_t i = 0; i < idx.size(); ++i) idx[i] = i;
    const std::size_t k = std::min(top_k_, idx.size());
    std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k), idx.end(),
                      [&](std::uint32_t a, std::uint32_t b) {
                        return counts[a] != counts[b] ? counts[a] > counts[b] : a < b;
                      });
    for (std::size_t i = 0; i < k; ++i) candidates_[column.dictionary[idx[i]]] += counts[idx[i]];
    if (candidates_.size() > capacity_) prune(capacity_ / 2);
  }

  void merge(const CoverageStats& other) {
    total_ += other.total_;
    missing_ += other.missing_;
    for (const auto& [tok, c] : other.candidates_) candidates_[tok] += c;
    if (candidates_.size() > capacity_) prune(capacity_ / 2);
  }

  [[nodiscard]] std::uint64_t total() const noexcept { return total_; }
  [[nodiscard]] std::uint64_t missing() const noexcept { return missing_; }
  [[nodiscard]] double coverage() const noexcept {
    return total_ == 0 ? 1.0 : 1.0 - static_cast<double>(missing_) / static_cast<double>(total_);
  }

  [[nodiscard]] std::vector<TokenCount> top_values() const {
    auto all = sorted_candidates();
    if (all.size() > top_k_) all.resize(top_k_);
    return all;
  }

 private:
  [[nodiscard]] std::vector<TokenCount> sorted_candidates() const {
    std::vector<TokenCount> all;
    all.reserve(candidates_.size());
    for (const auto& [tok, c] : candidates_) all.push_back({tok, c});
    std::sort(all.begin(), all.end(), [](const TokenCount& a, const TokenCount& b) {
      return a.count != b.count ? a.count > b.count : a.token < b.token;
    });
    return all;
  }

  void prune(std::size_t keep) {
    auto all = sorted_candidates();
    all.resize(std::min(keep, all.size()));
    candidates_.clear();
    for (auto& t : all) candidates_.emplace(std::move(t.token), t.count);
  }

  std::size_t top_k_;
  std::size_t capacity_;
  std::uint64_t total_ = 0;
  std::uint64_t missing_ = 0;
  std::unordered_map<std::string, std::uint64_t> candidates_;
};

struct ProfileConfig {
  unsigned precision = default_sketch_precision;
  std::size_t exact_threshold = default_exact_threshold;
  std::size_t top_k = default_top_k;
};

struct FeatureProfile {
  std::string name;
  CardinalitySketch sketch;
  CoverageStats coverage;
};

// Global (cross-batch) profile of every ingested feature.
class DatasetProfiler {
 public:
  DatasetProfiler(const std::vector<std::string>& names, const ProfileConfig& cfg = {}) {
    profiles_.reserve(names.size());
    for (const auto& n : names) {
      profiles_.push_back({n, CardinalitySketch(cfg.precision, cfg.exact_threshold),
                           CoverageStats(cfg.top_k)});
    }
  }

  // Only the first profiles().size() columns of the batch are profiled.
  void update(const EncodedBatch& batch) {
    if (batch.features.size() < profiles_.size()) throw Error("profile: batch has too few features");
    for (std::size_t f = 0; f < profiles_.size(); ++f) {
      const auto& col = batch.features[f];
      for (const auto& tok : col.dictionary) profiles_[f].sketch.insert(tok);
      profiles_[f].coverage.update(col);
    }
  }

  [[nodiscard]] const std::vector<FeatureProfile>& profiles() const noexcept { return profiles_; }

  [[nodiscard]] nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json out = nlohmann::ordered_json::object();
    for (const auto& p : profiles_) {
      nlohmann::ordered_json top = nlohmann::ordered_json::array();
      for (const auto& t : p.coverage.top_values()) top.push_back({t.token, t.count});
      out[p.name] = {
          {"estimated_cardinality", std::llround(p.sketch.estimate())},
          {"cardinality_exact", p.sketch.is_exact()},
          {"coverage", p.coverage.coverage()},
          {"total_rows", p.coverage.total()},
          {"missing_rows", p.coverage.missing()},
          {"top_values", top},
      };
    }
    return out;
  }

 private:
  std::vector<FeatureProfile> profiles_;
};

}  // namespace cardrank

#endif  // CARDRANK_PROFILING_HPP
