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

#ifndef CARDRANK_HASHING_HPP
#define CARDRANK_HASHING_HPP

#include <array>
#include <cstddef>
#include <cstdint>
#include <random>
#include <string_view>

#ifndef XXH_INLINE_ALL
#define XXH_INLINE_ALL
#endif
#include "xxhash.h"

namespace cardrank {

inline std::uint64_t hash_bytes(const void* data, std::size_t size,
                                std::uint64_t seed = 0) noexcept {
  return XXH3_64bits_withSeed(data, size, seed);
}

inline std::uint64_t hash_token(std::string_view token,
                                std::uint64_t seed = 0) noexcept {
  return hash_bytes(token.data(), token.size(), seed);
}

// Every random draw in the engine comes from a stream named by one of these
// purposes plus the coordinates below. No ambient RNG exists anywhere.
enum class StreamPurpose : std::uint64_t {
  control = 1,
  null_single = 2,
  null_redundancy = 3,
  null_relation = 4,
  null_triple = 5,
  buffer = 6,
  synth = 7,
};

struct StreamKey {
  std::uint64_t seed = 0;
  std::uint64_t batch_index = 0;
  StreamPurpose purpose = StreamPurpose::null_single;
  std::uint64_t a = 0;
  std::uint64_t b = 0;
  std::uint64_t c = 0;
  std::uint64_t sample = 0;

  [[nodiscard]] std::uint64_t digest() const noexcept {
    const std::array<std::uint64_t, 7> words{
        seed, batch_index, static_cast<std::uint64_t>(purpose), a, b, c, sample};
    return hash_bytes(words.data(), sizeof(words), 0x9E3779B97F4A7C15ULL);
  }

  [[nodiscard]] StreamKey with_sample(std::uint64_t s) const noexcept {
    StreamKey k = *this;
    k.sample = s;
    return k;
  }
};

using Rng = std::mt19937_64;

inline Rng make_rng(const StreamKey& key) { return Rng{key.digest()}; }

}  // namespace cardrank

#endif  // CARDRANK_HASHING_HPP
