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

#ifndef CARDRANK_MUTUAL_INFORMATION_HPP
#define CARDRANK_MUTUAL_INFORMATION_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cardrank/error.hpp"
#include "cardrank/hashing.hpp"

namespace cardrank {

// All quantities are in nats.
using Codes = std::span<const std::uint32_t>;

namespace detail {

// Per-thread scratch space. The dense counter is kept all-zero between calls.
struct MiScratch {
  std::vector<std::uint32_t> dense;
  std::vector<std::uint64_t> keys;
  std::vector<std::uint32_t> freq;
  std::vector<std::uint32_t> sample;
};

inline MiScratch& scratch() {
  thread_local MiScratch s;
  return s;
}

inline std::uint32_t max_code_plus_one(Codes codes) {
  std::uint32_t m = 0;
  for (auto c : codes) m = std::max(m, c);
  return codes.empty() ? 0 : m + 1;
}

// Sum over count classes of freq[k] * k ln k, in ascending k. Summing by count
// class instead of by cell makes the result independent of cell order, so
// relabelings and argument swaps give bit-identical values.
inline double xlogx_from_freq(const std::vector<std::uint32_t>& freq) {
  double total = 0.0;
  for (std::size_t k = 2; k < freq.size(); ++k) {
    if (freq[k] != 0) {
      const double kd = static_cast<double>(k);
      total += static_cast<double>(freq[k]) * (kd * std::log(kd));
    }
  }
  return total;
}

inline double marginal_xlogx(Codes codes, std::uint32_t card, MiScratch& s) {
  if (s.dense.size() < card) s.dense.resize(card, 0);
  s.freq.assign(codes.size() + 1, 0);
  for (auto c : codes) ++s.dense[c];
  for (auto c : codes) {
    if (const auto n = s.dense[c]; n != 0) {
      ++s.freq[n];
      s.dense[c] = 0;
    }
  }
  return xlogx_from_freq(s.freq);
}

inline bool use_dense_joint(std::uint64_t cells, std::size_t n) {
  const std::uint64_t limit = std::max<std::uint64_t>(1u << 16, 16ull * n);
  return cells <= std::min<std::uint64_t>(limit, 1ull << 24);
}

inline double joint_xlogx(Codes u, Codes v, std::uint32_t card_v, std::uint64_t cells,
                          MiScratch& s) {
  const std::size_t n = u.size();
  s.freq.assign(n + 1, 0);
  if (use_dense_joint(cells, n)) {
    if (s.dense.size() < cells) s.dense.resize(cells, 0);
    for (std::size_t i = 0; i < n; ++i) ++s.dense[std::size_t{u[i]} * card_v + v[i]];
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t key = std::size_t{u[i]} * card_v + v[i];
      if (const auto c = s.dense[key]; c != 0) {
        ++s.freq[c];
        s.dense[key] = 0;
      }
    }
  } else {
    s.keys.resize(n);
    for (std::size_t i = 0; i < n; ++i) s.keys[i] = std::uint64_t{u[i]} * card_v + v[i];
    std::sort(s.keys.begin(), s.keys.end());
    std::size_t run = 1;
    for (std::size_t i = 1; i <= n; ++i) {
      if (i < n && s.keys[i] == s.keys[i - 1]) {
        ++run;
      } else {
        ++s.freq[run];
        run = 1;
      }
    }
  }
  return xlogx_from_freq(s.freq);
}

inline double n_log_n(std::size_t n) {
  const double nd = static_cast<double>(n);
  return nd * std::log(nd);
}

// MI from the xlogx sums of the joint and both marginals.
inline double mi_from_sums(std::size_t n, double joint, double sum_u, double sum_v) {
  const double mi = ((joint + n_log_n(n)) - (sum_u + sum_v)) / static_cast<double>(n);
  return mi > 0.0 ? mi : 0.0;
}

inline void check_pair(Codes u, Codes v) {
  if (u.size() != v.size()) {
    throw Error("mutual_information: length mismatch (" + std::to_string(u.size()) + " vs " +
                std::to_string(v.size()) + ")");
  }
  if (u.empty()) throw Error("mutual_information: empty input");
}

}  // namespace detail

inline double entropy(Codes codes) {
  if (codes.empty()) throw Error("entropy: empty input");
  auto& s = detail::scratch();
  const auto card = detail::max_code_plus_one(codes);
  const double h = std::log(static_cast<double>(codes.size())) -
                   detail::marginal_xlogx(codes, card, s) / static_cast<double>(codes.size());
  return std::clamp(h, 0.0, std::log(static_cast<double>(card)));
}

// Plugin estimate H(U) + H(V) - H(U,V) from the joint contingency table.
inline double mutual_information(Codes u, Codes v) {
  detail::check_pair(u, v);
  auto& s = detail::scratch();
  const auto cu = detail::max_code_plus_one(u);
  const auto cv = detail::max_code_plus_one(v);
  if (cu == 1 || cv == 1) return 0.0;
  const double su = detail::marginal_xlogx(u, cu, s);
  const double sv = detail::marginal_xlogx(v, cv, s);
  const double joint = detail::joint_xlogx(u, v, cv, std::uint64_t{cu} * cv, s);
  return detail::mi_from_sums(u.size(), joint, su, sv);
}

enum class NullMode { permutation, uniform_cardinality };

inline std::string_view to_string(NullMode m) {
  return m == NullMode::permutation ? "permutation" : "uniform_cardinality";
}

inline NullMode parse_null_mode(std::string_view s) {
  if (s == "permutation") return NullMode::permutation;
  if (s == "uniform_cardinality" || s == "uniform") return NullMode::uniform_cardinality;
  throw ConfigError("unknown null mode '" + std::string(s) + "'");
}

inline constexpr std::uint32_t default_noise_samples = 8;

// How the chance level of MI(u, v) is estimated. Sample k draws from the
// stream key.with_sample(k). With exhaustive set, permutation mode averages
// over every distinct arrangement of v instead (small inputs only).
struct NullSampler {
  NullMode mode = NullMode::permutation;
  std::uint32_t num_samples = default_noise_samples;
  StreamKey key{};
  bool exhaustive = false;
};

inline constexpr std::size_t max_exhaustive_length = 12;

inline double null_expectation(Codes u, Codes v, const NullSampler& sampler) {
  detail::check_pair(u, v);
  if (sampler.num_samples == 0 && !sampler.exhaustive) {
    throw ConfigError("null_expectation: num_samples must be >= 1");
  }
  if (sampler.exhaustive && sampler.mode == NullMode::permutation &&
      u.size() > max_exhaustive_length) {
    throw ConfigError("exhaustive null enumeration limited to length " +
                      std::to_string(max_exhaustive_length));
  }
  auto& s = detail::scratch();
  const auto cu = detail::max_code_plus_one(u);
  const auto cv = detail::max_code_plus_one(v);
  if (cu == 1 || cv == 1) return 0.0;
  const std::size_t n = u.size();
  const double su = detail::marginal_xlogx(u, cu, s);

  // Keep the sample in its own buffer: marginal/joint helpers reuse scratch.
  std::vector<std::uint32_t> sample(v.begin(), v.end());

  if (sampler.mode == NullMode::permutation) {
    const double sv = detail::marginal_xlogx(v, cv, s);
    const std::uint64_t cells = std::uint64_t{cu} * cv;
    if (sampler.exhaustive) {
      std::sort(sample.begin(), sample.end());
      double total = 0.0;
      std::size_t count = 0;
      do {
        total += detail::mi_from_sums(n, detail::joint_xlogx(u, sample, cv, cells, s), su, sv);
        ++count;
      } while (std::next_permutation(sample.begin(), sample.end()));
      return total / static_cast<double>(count);
    }
    double total = 0.0;
    for (std::uint32_t k = 0; k < sampler.num_samples; ++k) {
      Rng rng = make_rng(sampler.key.with_sample(k));
      std::shuffle(sample.begin(), sample.end(), rng);
      total += detail::mi_from_sums(n, detail::joint_xlogx(u, sample, cv, cells, s), su, sv);
    }
    return total / static_cast<double>(sampler.num_samples);
  }

  double total = 0.0;
  std::uniform_int_distribution<std::uint32_t> dist(0, cv - 1);
  for (std::uint32_t k = 0; k < sampler.num_samples; ++k) {
    Rng rng = make_rng(sampler.key.with_sample(k));
    for (auto& c : sample) c = dist(rng);
    const auto cs = detail::max_code_plus_one(sample);
    if (cs == 1) continue;
    const double ss = detail::marginal_xlogx(sample, cs, s);
    total += detail::mi_from_sums(
        n, detail::joint_xlogx(u, sample, cs, std::uint64_t{cu} * cs, s), su, ss);
  }
  return total / static_cast<double>(sampler.num_samples);
}

struct BatchScore {
  std::size_t batch_index = 0;
  double raw_mi = 0.0;
  double null_mean = 0.0;
  double normalized = 0.0;
};

// One batch's CardMI term: MI(u, v) minus the mean MI of u against null
// samples shaped like v. May be negative.
inline BatchScore cardmi_batch(Codes u, Codes v, const NullSampler& sampler) {
  BatchScore out;
  out.batch_index = sampler.key.batch_index;
  out.raw_mi = mutual_information(u, v);
  out.null_mean = null_expectation(u, v, sampler);
  out.normalized = out.raw_mi - out.null_mean;
  return out;
}

// Raw MI only, with the null term fixed at zero.
inline BatchScore raw_batch(Codes u, Codes v, std::size_t batch_index) {
  BatchScore out;
  out.batch_index = batch_index;
  out.raw_mi = mutual_information(u, v);
  out.normalized = out.raw_mi;
  return out;
}

}  // namespace cardrank

#endif  // CARDRANK_MUTUAL_INFORMATION_HPP
