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

#include "cardrank/profiling.hpp"

#include <gtest/gtest.h>

#include <random>
#include <unordered_set>

namespace cardrank {
namespace {

std::string tok(std::uint64_t i) { return "tok" + std::to_string(i); }

TEST(Sketch, SmallSetIsExact) {
  CardinalitySketch s;
  s.insert("a");
  EXPECT_EQ(s.estimate(), 1.0);
  for (int i = 0; i < 10; ++i) s.insert(tok(i));
  s.insert("a");
  EXPECT_EQ(s.estimate(), 11.0);
  EXPECT_TRUE(s.is_exact());
}

TEST(Sketch, ExactUpToThreshold) {
  CardinalitySketch s;
  for (int i = 0; i < 1024; ++i) {
    s.insert(tok(i));
    ASSERT_EQ(s.estimate(), i + 1.0);
  }
  EXPECT_TRUE(s.is_exact());
  s.insert(tok(5000));
  EXPECT_FALSE(s.is_exact());
  EXPECT_GE(s.estimate(), 1025.0);
}

TEST(Sketch, HundredThousandWithinTwoPercent) {
  std::unordered_set<std::string> exact;
  CardinalitySketch s(14);
  std::mt19937_64 rng(1);
  for (std::uint64_t i = 0; i < 100000; ++i) {
    const auto fresh = tok(i);
    const auto repeat = tok(rng() % (i + 1));
    for (const auto& t : {fresh, repeat}) {
      exact.insert(t);
      s.insert(t);
    }
  }
  ASSERT_EQ(exact.size(), 100000u);
  const double truth = static_cast<double>(exact.size());
  EXPECT_NEAR(s.estimate(), truth, 0.02 * truth);
}

TEST(Sketch, EstimateIsMonotoneUnderInsertion) {
  CardinalitySketch s(10, 64);
  double prev = 0.0;
  for (int i = 0; i < 20000; ++i) {
    s.insert(tok(i));
    const double e = s.estimate();
    ASSERT_GE(e, prev) << i;
    prev = e;
  }
}

TEST(Sketch, RelativeErrorAcrossScales) {
  for (std::uint64_t n : {2000ull, 20000ull, 300000ull}) {
    CardinalitySketch s;
    for (std::uint64_t i = 0; i < n; ++i) s.insert(tok(i * 31 + 1));
    EXPECT_NEAR(s.estimate(), static_cast<double>(n), 0.03 * static_cast<double>(n)) << n;
  }
}

CardinalitySketch sketch_of(std::uint64_t lo, std::uint64_t hi) {
  CardinalitySketch s;
  for (auto i = lo; i < hi; ++i) s.insert(tok(i));
  return s;
}

TEST(SketchMerge, EqualsSketchOfConcatenation) {
  const std::pair<std::uint64_t, std::uint64_t> ranges[][2] = {
      {{0, 100}, {50, 300}},        // exact + exact, stays exact
      {{0, 900}, {600, 1500}},      // exact + exact, promotes
      {{0, 500}, {200, 50000}},     // exact + sketch
      {{0, 40000}, {30000, 90000}}, // sketch + sketch
  };
  for (const auto& r : ranges) {
    auto a = sketch_of(r[0].first, r[0].second);
    const auto b = sketch_of(r[1].first, r[1].second);
    CardinalitySketch stream;
    for (auto i = r[0].first; i < r[0].second; ++i) stream.insert(tok(i));
    for (auto i = r[1].first; i < r[1].second; ++i) stream.insert(tok(i));
    auto ab = a;
    ab.merge(b);
    auto ba = b;
    ba.merge(a);
    EXPECT_TRUE(ab == stream);
    EXPECT_TRUE(ba == stream);
    EXPECT_EQ(ab.estimate(), stream.estimate());
  }
}

TEST(SketchMerge, AssociativeAndIdempotent) {
  const auto a = sketch_of(0, 700);
  const auto b = sketch_of(500, 5000);
  const auto c = sketch_of(4000, 9000);
  auto left = a;
  left.merge(b);
  left.merge(c);
  auto bc = b;
  bc.merge(c);
  auto right = a;
  right.merge(bc);
  EXPECT_TRUE(left == right);
  auto twice = left;
  twice.merge(left);
  EXPECT_TRUE(twice == left);
  auto exact_twice = a;
  exact_twice.merge(a);
  EXPECT_TRUE(exact_twice == a);
}

TEST(SketchMerge, ParameterMismatch) {
  CardinalitySketch a(14);
  CardinalitySketch b(12);
  EXPECT_THROW(a.merge(b), ConfigError);
  EXPECT_THROW(CardinalitySketch(3), ConfigError);
}

TEST(SketchPromotion, NeverDecreasesEstimate) {
  for (std::size_t threshold : {16u, 256u, 1024u}) {
    CardinalitySketch s(14, threshold);
    for (std::size_t i = 0; i < threshold; ++i) s.insert(tok(i));
    const double before = s.estimate();
    s.insert(tok(threshold + 999));
    EXPECT_GE(s.estimate(), before);
  }
}

EncodedColumn column(const std::vector<std::string>& tokens, const std::string& missing = "") {
  return encode_column(tokens, missing);
}

TEST(Coverage, Examples) {
  CoverageStats full;
  full.update(column(std::vector<std::string>(100, "v")));
  EXPECT_EQ(full.coverage(), 1.0);

  std::vector<std::string> half(100, "v");
  for (int i = 0; i < 50; ++i) half[i] = "";
  CoverageStats h;
  h.update(column(half));
  EXPECT_EQ(h.coverage(), 0.5);

  std::vector<std::string> b1(10, "x");
  std::vector<std::string> b2(10, "y");
  for (int i = 0; i < 2; ++i) b1[i] = "";
  for (int i = 0; i < 3; ++i) b2[i] = "";
  CoverageStats m;
  m.update(column(b1));
  m.update(column(b2));
  EXPECT_EQ(m.total(), 20u);
  EXPECT_EQ(m.missing(), 5u);
  EXPECT_EQ(m.coverage(), 0.75);
}

TEST(Coverage, MergeMatchesSequentialUpdate) {
  std::mt19937_64 rng(2);
  CoverageStats seq(3);
  CoverageStats a(3);
  CoverageStats b(3);
  for (int batch = 0; batch < 10; ++batch) {
    std::vector<std::string> t(200);
    for (auto& x : t) x = rng() % 5 == 0 ? "" : tok(rng() % 6);
    const auto col = column(t);
    seq.update(col);
    (batch % 2 ? a : b).update(col);
  }
  a.merge(b);
  EXPECT_EQ(a.total(), seq.total());
  EXPECT_EQ(a.missing(), seq.missing());
  EXPECT_LE(a.missing(), a.total());
  ASSERT_EQ(a.top_values().size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(a.top_values()[i].token, seq.top_values()[i].token);
    EXPECT_EQ(a.top_values()[i].count, seq.top_values()[i].count);
  }
}

TEST(Coverage, TopValuesExactWithinBatch) {
  CoverageStats s(2);
  s.update(column({"a", "b", "b", "c", "c", "c", "a", "c"}));
  const auto top = s.top_values();
  ASSERT_EQ(top.size(), 2u);
  EXPECT_EQ(top[0].token, "c");
  EXPECT_EQ(top[0].count, 4u);
  EXPECT_EQ(top[1].token, "a");
  EXPECT_EQ(top[1].count, 2u);
}

TEST(Coverage, CandidateSetStaysBounded) {
  CoverageStats s(4);
  for (int batch = 0; batch < 2000; ++batch) {
    std::vector<std::string> t;
    for (int i = 0; i < 8; ++i) t.push_back(tok(batch * 8 + i));
    t.push_back("hot");
    t.push_back("hot");
    s.update(column(t));
  }
  EXPECT_EQ(s.top_values().front().token, "hot");
  EXPECT_EQ(s.top_values().front().count, 4000u);
}

TEST(Profiler, JsonShape) {
  EncodedBatch b;
  b.row_count = 4;
  b.features.push_back(column({"a", "", "a", "b"}));
  b.features.push_back(column({"x", "x", "x", "x"}));
  DatasetProfiler p({"f", "g"});
  p.update(b);
  p.update(b);
  const auto j = p.to_json();
  EXPECT_EQ(j["f"]["estimated_cardinality"], 3);
  EXPECT_EQ(j["f"]["coverage"], 0.75);
  EXPECT_EQ(j["f"]["total_rows"], 8);
  EXPECT_EQ(j["f"]["top_values"][0][0], "a");
  EXPECT_EQ(j["f"]["top_values"][0][1], 4);
  EXPECT_EQ(j["g"]["estimated_cardinality"], 1);
  EXPECT_TRUE(j["g"]["cardinality_exact"].get<bool>());
}

}  // namespace
}  // namespace cardrank
