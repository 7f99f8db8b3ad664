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

#ifndef CARDRANK_RECODE_HPP
#define CARDRANK_RECODE_HPP

#include <bit>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "cardrank/ingest.hpp"

namespace cardrank {

// Open-addressing map from 64-bit keys to dense codes in first-appearance
// order. Sized once per column; never rehashes.
class DenseRecoder {
 public:
  explicit DenseRecoder(std::size_t expected_keys) {
    const std::size_t cap = std::bit_ceil(std::max<std::size_t>(16, expected_keys * 2));
    shift_ = 64 - std::countr_zero(cap);
    mask_ = cap - 1;
    keys_.assign(cap, 0);
    codes_.assign(cap, empty);
  }

  std::uint32_t code(std::uint64_t key) {
    std::size_t slot = static_cast<std::size_t>((key * 0x9E3779B97F4A7C15ULL) >> shift_);
    for (;;) {
      if (codes_[slot] == empty) {
        keys_[slot] = key;
        codes_[slot] = size_;
        return size_++;
      }
      if (keys_[slot] == key) return codes_[slot];
      slot = (slot + 1) & mask_;
    }
  }

  [[nodiscard]] std::uint32_t size() const noexcept { return size_; }

 private:
  static constexpr std::uint32_t empty = std::numeric_limits<std::uint32_t>::max();
  std::vector<std::uint64_t> keys_;
  std::vector<std::uint32_t> codes_;
  unsigned shift_ = 0;
  std::size_t mask_ = 0;
  std::uint32_t size_ = 0;
};

template <typename Key>
EncodedColumn recode_dense(std::span<const Key> keys) {
  EncodedColumn out;
  DenseRecoder rec(keys.size());
  out.codes.reserve(keys.size());
  for (const auto k : keys) out.codes.push_back(rec.code(static_cast<std::uint64_t>(k)));
  out.cardinality = rec.size();
  return out;
}

}  // namespace cardrank

#endif  // CARDRANK_RECODE_HPP
