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

#include "cardrank/mutual_information.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <thread>

#include "oracles.hpp"
#include "test_support.hpp"

namespace cardrank {
namespace {

using V = std::vector<std::uint32_t>;
const double ln2 = std::log(2.0);

double kl_oracle(const V& u, const V& v) { return oracle::kl_mutual_information(u, v); }

double entropy_oracle(const V& u) {
  std::map<std::uint32_t, double> p;
  for (auto x : u) p[x] += 1.0;
  double h = 0.0;
  for (const auto& [k, c] : p) h -= c / u.size() * std::log(c / u.size());
  return h;
}

TEST(Entropy, Examples) {
  EXPECT_NEAR(entropy(V{0, 0, 1, 1}), ln2, 1e-15);
  EXPECT_EQ(entropy(V{0, 0, 0}), 0.0);
  EXPECT_NEAR(entropy(V{0, 1, 2, 3}), std::log(4.0), 1e-15);
}

TEST(Entropy, EmptyIsAnError) { EXPECT_THROW(entropy(V{}), Error); }

TEST(Entropy, MatchesOracleAndBounds) {
  std::mt19937_64 rng(1);
  for (int t = 0; t < 200; ++t) {
    const auto card = static_cast<std::uint32_t>(1 + rng() % 20);
    const auto u = testing::column_of(testing::random_codes(rng, 1 + rng() % 200, card)).codes;
    const double h = entropy(u);
    EXPECT_NEAR(h, entropy_oracle(u), 1e-12);
    EXPECT_GE(h, 0.0);
    const auto c = *std::max_element(u.begin(), u.end()) + 1;
    EXPECT_LE(h, std::log(static_cast<double>(c)) + 1e-12);
  }
}

TEST(MutualInformation, Examples) {
  EXPECT_NEAR(mutual_information(V{0, 0, 1, 1}, V{0, 0, 1, 1}), ln2, 1e-15);
  EXPECT_NEAR(mutual_information(V{0, 0, 1, 1}, V{0, 1, 0, 1}), 0.0, 1e-15);
}

TEST(MutualInformation, ThreeRowExample) {
  // (ln3 - (2/3)ln2) - (2/3)ln2, confirmed against the joint-table sum.
  const V u{0, 0, 1};
  const V v{0, 1, 1};
  const double hand = std::log(3.0) - 4.0 / 3.0 * ln2;
  EXPECT_NEAR(kl_oracle(u, v), hand, 1e-15);
  EXPECT_NEAR(mutual_information(u, v), hand, 1e-12);
  EXPECT_NEAR(mutual_information(u, v), 0.174416, 1e-6);
}

TEST(MutualInformation, LengthMismatch) {
  EXPECT_THROW(mutual_information(V{0, 1}, V{0, 1, 1}), Error);
  EXPECT_THROW(mutual_information(V{}, V{}), Error);
}

TEST(MutualInformationProperty, MatchesKlOracle) {
  std::mt19937_64 rng(2);
  for (int t = 0; t < 500; ++t) {
    const std::size_t n = 1 + rng() % 256;
    const auto u = testing::random_codes(rng, n, static_cast<std::uint32_t>(1 + rng() % 12));
    const auto v = testing::random_codes(rng, n, static_cast<std::uint32_t>(1 + rng() % 12));
    EXPECT_NEAR(mutual_information(u, v), kl_oracle(u, v), 1e-12);
  }
}

TEST(MutualInformationProperty, SymmetricAndBounded) {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 300; ++t) {
    const std::size_t n = 1 + rng() % 400;
    const auto u = testing::column_of(testing::random_codes(rng, n, 1 + rng() % 30)).codes;
    const auto v = testing::column_of(testing::random_codes(rng, n, 1 + rng() % 30)).codes;
    const double a = mutual_information(u, v);
    EXPECT_EQ(a, mutual_information(v, u));
    EXPECT_GE(a, 0.0);
    EXPECT_LE(a, std::min(entropy(u), entropy(v)) + 1e-12);
  }
}

TEST(MutualInformationProperty, RelabelingInvariant) {
  std::mt19937_64 rng(4);
  for (int t = 0; t < 100; ++t) {
    const std::size_t n = 2 + rng() % 300;
    const std::uint32_t cu = 1 + rng() % 15;
    const std::uint32_t cv = 1 + rng() % 15;
    const auto u = testing::random_codes(rng, n, cu);
    const auto v = testing::random_codes(rng, n, cv);
    V pu(cu);
    V pv(cv);
    std::iota(pu.begin(), pu.end(), 0u);
    std::iota(pv.begin(), pv.end(), 0u);
    std::shuffle(pu.begin(), pu.end(), rng);
    std::shuffle(pv.begin(), pv.end(), rng);
    V u2(n);
    V v2(n);
    for (std::size_t i = 0; i < n; ++i) {
      u2[i] = pu[u[i]];
      v2[i] = pv[v[i]];
    }
    EXPECT_EQ(mutual_information(u, v), mutual_information(u2, v2));
    EXPECT_EQ(entropy(u), entropy(u2));
  }
}

TEST(MutualInformationProperty, SparseAndDenseTablesAgree) {
  // Large cardinality products take the sorted-key path.
  std::mt19937_64 rng(5);
  const std::size_t n = 5000;
  const auto u = testing::random_codes(rng, n, 4000);
  const auto v = testing::random_codes(rng, n, 4000);
  EXPECT_NEAR(mutual_information(u, v), kl_oracle(u, v), 1e-11);
  const auto small = testing::random_codes(rng, n, 3);
  EXPECT_NEAR(mutual_information(small, v), kl_oracle(small, v), 1e-12);
}

TEST(MutualInformation, ConstantSideIsZero) {
  EXPECT_EQ(mutual_information(V{0, 0, 0}, V{0, 1, 2}), 0.0);
  EXPECT_EQ(mutual_information(V{0, 1, 2}, V{0, 0, 0}), 0.0);
}

NullSampler sampler(NullMode mode, std::uint32_t s = 8, std::uint64_t seed = 0) {
  NullSampler out;
  out.mode = mode;
  out.num_samples = s;
  out.key.seed = seed;
  return out;
}

TEST(NullExpectation, ConstantSidesGiveZero) {
  std::mt19937_64 rng(6);
  const auto r = testing::random_codes(rng, 50, 5);
  for (auto mode : {NullMode::permutation, NullMode::uniform_cardinality}) {
    EXPECT_EQ(null_expectation(r, V(50, 0), sampler(mode)), 0.0);
    EXPECT_EQ(null_expectation(V(50, 0), r, sampler(mode)), 0.0);
  }
}

TEST(NullExpectation, TwoRowPermutations) {
  auto s = sampler(NullMode::permutation);
  s.exhaustive = true;
  EXPECT_NEAR(null_expectation(V{0, 1}, V{0, 1}, s), ln2, 1e-15);
  // Any finite sample count agrees: both arrangements give ln 2.
  EXPECT_NEAR(null_expectation(V{0, 1}, V{0, 1}, sampler(NullMode::permutation, 64)), ln2, 1e-15);
}

// Mean MI over all n! orderings, duplicates included.
double all_orderings_oracle(const V& u, const V& v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  double total = 0.0;
  std::size_t count = 0;
  do {
    V p(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) p[i] = v[idx[i]];
    total += kl_oracle(u, p);
    ++count;
  } while (std::next_permutation(idx.begin(), idx.end()));
  return total / static_cast<double>(count);
}

TEST(NullExpectation, ExhaustiveMatchesAllOrderings) {
  std::mt19937_64 rng(7);
  for (int t = 0; t < 30; ++t) {
    const std::size_t n = 2 + rng() % 6;
    const auto u = testing::random_codes(rng, n, 1 + rng() % 3);
    const auto v = testing::random_codes(rng, n, 1 + rng() % 3);
    auto s = sampler(NullMode::permutation);
    s.exhaustive = true;
    EXPECT_NEAR(null_expectation(u, v, s), all_orderings_oracle(u, v), 1e-12);
  }
}

TEST(NullExpectation, ExhaustiveLengthLimit) {
  auto s = sampler(NullMode::permutation);
  s.exhaustive = true;
  EXPECT_THROW(null_expectation(V(13, 0), V(13, 1), s), ConfigError);
}

TEST(NullExpectation, ZeroSamplesIsAnError) {
  EXPECT_THROW(null_expectation(V{0, 1}, V{0, 1}, sampler(NullMode::permutation, 0)), ConfigError);
}

TEST(NullExpectation, DeterministicAcrossThreads) {
  std::mt19937_64 rng(8);
  const auto u = testing::random_codes(rng, 4196, 2);
  const auto v = testing::random_codes(rng, 4196, 300);
  for (auto mode : {NullMode::permutation, NullMode::uniform_cardinality}) {
    const auto s = sampler(mode, 8, 99);
    const double ref = null_expectation(u, v, s);
    std::vector<double> got(4);
    std::vector<std::thread> threads;
    for (std::size_t i = 0; i < got.size(); ++i) {
      threads.emplace_back([&, i] {
        // Interleave unrelated work to disturb the thread-local scratch.
        mutual_information(v, u);
        got[i] = null_expectation(u, v, s);
      });
    }
    for (auto& th : threads) th.join();
    for (double g : got) EXPECT_EQ(g, ref);
  }
}

TEST(NullExpectation, SeedChangesSamples) {
  std::mt19937_64 rng(9);
  const auto u = testing::random_codes(rng, 500, 2);
  const auto v = testing::random_codes(rng, 500, 50);
  EXPECT_NE(null_expectation(u, v, sampler(NullMode::permutation, 8, 1)),
            null_expectation(u, v, sampler(NullMode::permutation, 8, 2)));
}

TEST(NullExpectation, TracksCardinalityBias) {
  // Plugin MI of independent variables grows with cardinality; so must the null.
  std::mt19937_64 rng(10);
  const auto u = testing::random_codes(rng, 4196, 2);
  double prev = 0.0;
  for (std::uint32_t c : {2u, 20u, 200u, 2000u}) {
    const auto v = testing::random_codes(rng, 4196, c);
    const double null = null_expectation(u, v, sampler(NullMode::permutation, 16));
    EXPECT_GT(null, prev);
    EXPECT_NEAR(mutual_information(u, v), null, 0.25 * null + 1e-3);
    prev = null;
  }
}

TEST(CardMiBatch, Examples) {
  auto ex = sampler(NullMode::permutation);
  ex.exhaustive = true;
  EXPECT_NEAR(cardmi_batch(V{0, 1}, V{0, 1}, ex).normalized, 0.0, 1e-15);
  const auto s = cardmi_batch(V{0, 0, 1, 1}, V{0, 0, 1, 1}, ex);
  EXPECT_NEAR(s.normalized, ln2 - ln2 / 3.0, 1e-12);
  EXPECT_NEAR(s.normalized, 0.462098, 1e-6);

  std::mt19937_64 rng(11);
  const auto r = testing::random_codes(rng, 100, 7);
  const auto c = cardmi_batch(r, V(100, 0), sampler(NullMode::uniform_cardinality));
  EXPECT_EQ(c.normalized, 0.0);
}

TEST(CardMiBatch, NormalizedIsExactDifference) {
  std::mt19937_64 rng(12);
  for (int t = 0; t < 50; ++t) {
    const std::size_t n = 2 + rng() % 500;
    const auto u = testing::random_codes(rng, n, 1 + rng() % 4);
    const auto v = testing::random_codes(rng, n, 1 + rng() % 100);
    auto s = sampler(t % 2 ? NullMode::permutation : NullMode::uniform_cardinality);
    s.key.batch_index = static_cast<std::uint64_t>(t);
    const auto b = cardmi_batch(u, v, s);
    EXPECT_EQ(b.normalized, b.raw_mi - b.null_mean);
    EXPECT_EQ(b.batch_index, static_cast<std::size_t>(t));
  }
}

TEST(CardMiBatch, NoiseCentersOnZero) {
  std::mt19937_64 rng(13);
  const auto u = testing::random_codes(rng, 4196, 2);
  for (auto mode : {NullMode::permutation, NullMode::uniform_cardinality}) {
    double total = 0.0;
    for (int b = 0; b < 50; ++b) {
      const auto v = testing::random_codes(rng, 4196, 1000);
      auto s = sampler(mode);
      s.key.batch_index = static_cast<std::uint64_t>(b);
      total += cardmi_batch(u, v, s).normalized;
    }
    EXPECT_LT(std::abs(total / 50.0), 0.01) << to_string(mode);
  }
}

TEST(NullModeParse, RoundTrip) {
  for (auto m : {NullMode::permutation, NullMode::uniform_cardinality}) {
    EXPECT_EQ(parse_null_mode(to_string(m)), m);
  }
  EXPECT_THROW(parse_null_mode("bogus"), ConfigError);
}

TEST(RawBatch, NullTermZero) {
  const auto b = raw_batch(V{0, 0, 1, 1}, V{0, 0, 1, 1}, 4);
  EXPECT_EQ(b.null_mean, 0.0);
  EXPECT_EQ(b.normalized, b.raw_mi);
  EXPECT_EQ(b.batch_index, 4u);
}

}  // namespace
}  // namespace cardrank
