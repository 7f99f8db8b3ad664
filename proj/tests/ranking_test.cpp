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

#include "cardrank/ranking.hpp"

#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"

namespace cardrank {
namespace {

using D = std::vector<double>;
using Order = std::vector<std::size_t>;

TEST(Aggregate, Examples) {
  EXPECT_NEAR(aggregate(D{0.2, 0.4}, Aggregate::mean, false), 0.3, 1e-15);
  EXPECT_EQ(aggregate(D{0.1, 0.9, 0.2}, Aggregate::median, false), 0.2);
  EXPECT_EQ(aggregate(D{-0.2, 0.1}, Aggregate::mean, true), 0.0);
  EXPECT_NEAR(aggregate(D{-0.2, 0.1}, Aggregate::mean, false), -0.05, 1e-15);
  EXPECT_NEAR(aggregate(D{0.5, 0.25, 0.5}, Aggregate::sum, false), 1.25, 1e-15);
  EXPECT_EQ(aggregate(D{0.5, 0.25, 0.5}, Aggregate::sum, true), 1.0);
  EXPECT_EQ(aggregate(D{1, 4, 2, 3}, Aggregate::median, false), 2.5);
}

TEST(Aggregate, EmptyIsAnError) { EXPECT_THROW(aggregate(D{}, Aggregate::mean, false), Error); }

TEST(Statistic, EmptyIsZeroAndP90NearestRank) {
  for (auto f : {StatFn::mean, StatFn::median, StatFn::p90, StatFn::sum}) {
    EXPECT_EQ(statistic(D{}, f), 0.0);
  }
  D ten{10, 1, 9, 2, 8, 3, 7, 4, 6, 5};
  EXPECT_EQ(statistic(ten, StatFn::p90), 9.0);
  EXPECT_EQ(statistic(D{3}, StatFn::p90), 3.0);
  EXPECT_EQ(statistic(D{1, 2}, StatFn::p90), 2.0);
  D eleven{1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11};
  EXPECT_EQ(statistic(eleven, StatFn::p90), 10.0);
  std::mt19937_64 rng(1);
  for (int t = 0; t < 200; ++t) {
    D xs(1 + rng() % 40);
    for (auto& x : xs) x = static_cast<double>(rng() % 100);
    EXPECT_EQ(statistic(xs, StatFn::p90), oracle::sf_of(xs, oracle::Sf::p90));
    EXPECT_EQ(statistic(xs, StatFn::median), oracle::sf_of(xs, oracle::Sf::median));
  }
}

TEST(ScaleScores, Examples) {
  EXPECT_EQ(scale_scores(D{2, 4, 6}), (D{0, 0.5, 1}));
  EXPECT_EQ(scale_scores(D{5, 5}), (D{0, 0}));
  EXPECT_EQ(scale_scores(D{0, 1}), (D{0, 1}));
}

TEST(ScaleScoresProperty, OrderAndRange) {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int t = 0; t < 100; ++t) {
    D x(1 + rng() % 30);
    for (auto& v : x) v = g(rng);
    const auto y = scale_scores(x);
    for (double v : y) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
    }
    EXPECT_EQ(rank_by_score(x).order, rank_by_score(y).order);
    if (x.size() > 1) {
      EXPECT_EQ(*std::max_element(y.begin(), y.end()), 1.0);
      EXPECT_EQ(*std::min_element(y.begin(), y.end()), 0.0);
    }
  }
}

TEST(RankByScore, Examples) {
  EXPECT_EQ(rank_by_score(D{0.1, 0.9, 0.5}).order, (Order{1, 2, 0}));
  EXPECT_EQ(rank_by_score(D{0.3, 0.3, 0.3}).order, (Order{0, 1, 2}));
  EXPECT_EQ(rank_by_score(D{0.7}).order, (Order{0}));
  EXPECT_EQ(rank_by_score(D{0.1, 0.5, 0.1, 0.5}).order, (Order{1, 3, 0, 2}));
  const auto r = rank_by_score(D{0.1, 0.9, 0.5});
  EXPECT_NEAR(r.margins[0], 0.4, 1e-15);
  EXPECT_TRUE(std::isnan(r.margins.back()));
}

PairLookup lookup(std::size_t n, std::initializer_list<std::tuple<std::size_t, std::size_t, double>> xs) {
  PairLookup p(n);
  for (const auto& [i, j, v] : xs) p.set(i, j, v);
  return p;
}

TEST(Rank3mr, HandTracedExample) {
  // Step two: f2 = 0.8 - 0.30 + 0.05 = 0.55, f3 = 0.7 - 0.05 + 0.20 = 0.85.
  const D s{0.9, 0.8, 0.7};
  const auto r = lookup(3, {{1, 0, 0.6}, {2, 0, 0.1}});
  const auto c = lookup(3, {{1, 0, 0.1}, {2, 0, 0.4}});
  const auto out = rank_3mr(s, r, c, {0.5, 0.5, StatFn::mean});
  EXPECT_EQ(out.order, (Order{0, 2, 1}));
  EXPECT_NEAR(out.selection_scores[1], 0.85, 1e-15);
  EXPECT_NEAR(out.margins[1], 0.30, 1e-15);
  EXPECT_EQ(out.heuristic, "3mr");
}

TEST(Rank3mr, ZeroWeightsReduceToScoreRanking) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int t = 0; t < 50; ++t) {
    const std::size_t n = 1 + rng() % 12;
    D s(n);
    for (auto& x : s) x = std::round(u(rng) * 4) / 4;  // frequent ties
    PairLookup r(n);
    PairLookup c(n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < i; ++j) {
        r.set(i, j, u(rng));
        c.set(i, j, u(rng));
      }
    EXPECT_EQ(rank_3mr(s, r, c, {0.0, 0.0, StatFn::mean}).order, rank_by_score(s).order);
  }
}

TEST(Rank3mr, MissingEntriesAreExcludedNotZero) {
  // f1 and f2 tie on S; only f1 has a (negative) redundancy entry.
  const D s{1.0, 0.5, 0.5};
  const auto r = lookup(3, {{1, 0, -0.2}});
  const auto out = rank_3mr(s, r, PairLookup(3), {1.0, 0.0, StatFn::mean});
  EXPECT_EQ(out.order, (Order{0, 1, 2}));
  EXPECT_EQ(out.heuristic, "mrmr");
  // With the entry positive, f1 is penalized and f2 (empty set, SF = 0) leads.
  const auto r2 = lookup(3, {{1, 0, 0.2}});
  EXPECT_EQ(rank_3mr(s, r2, PairLookup(3), {1.0, 0.0, StatFn::mean}).order, (Order{0, 2, 1}));
}

TEST(Rank3mr, Errors) {
  EXPECT_THROW(rank_3mr(D{}, PairLookup(0), PairLookup(0), {}), Error);
  EXPECT_THROW(rank_3mr(D{1, 2}, PairLookup(3), PairLookup(2), {}), Error);
  EXPECT_THROW(rank_3mr(D{1, 2}, PairLookup(2), PairLookup(2), {-0.1, 0.2, StatFn::mean}),
               ConfigError);
}

struct Instance {
  D s;
  oracle::Table rt;
  oracle::Table ct;
  PairLookup r;
  PairLookup c;
};

Instance random_instance(std::mt19937_64& rng, std::size_t n, double density) {
  std::uniform_real_distribution<double> u(-0.2, 1.0);
  std::bernoulli_distribution present(density);
  Instance in{D(n), oracle::Table(n, std::vector<std::optional<double>>(n)),
              oracle::Table(n, std::vector<std::optional<double>>(n)), PairLookup(n), PairLookup(n)};
  for (auto& x : in.s) x = u(rng);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < i; ++j) {
      if (present(rng)) {
        const double v = u(rng);
        in.rt[i][j] = in.rt[j][i] = v;
        in.r.set(i, j, v);
      }
      if (present(rng)) {
        const double v = u(rng);
        in.ct[i][j] = in.ct[j][i] = v;
        in.c.set(i, j, v);
      }
    }
  return in;
}

oracle::Sf to_oracle(StatFn f) {
  switch (f) {
    case StatFn::mean: return oracle::Sf::mean;
    case StatFn::median: return oracle::Sf::median;
    case StatFn::p90: return oracle::Sf::p90;
    case StatFn::sum: return oracle::Sf::sum;
  }
  return oracle::Sf::mean;
}

TEST(Rank3mrProperty, MatchesLiteralRecursion) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> w(0.0, 2.0);
  for (auto sf : {StatFn::mean, StatFn::median, StatFn::p90, StatFn::sum}) {
    for (int t = 0; t < 100; ++t) {
      const auto in = random_instance(rng, 1 + rng() % 12, 0.3 + 0.7 * (t % 4) / 3.0);
      const double a = w(rng);
      const double b = w(rng);
      EXPECT_EQ(rank_3mr(in.s, in.r, in.c, {a, b, sf}).order,
                oracle::literal_3mr(in.s, in.rt, in.ct, a, b, to_oracle(sf)));
    }
  }
}

TEST(Rank3mrProperty, BetaZeroMatchesMrmr) {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 100; ++t) {
    const auto in = random_instance(rng, 1 + rng() % 12, 0.8);
    const double a = static_cast<double>(rng() % 100) / 50.0;
    EXPECT_EQ(rank_3mr(in.s, in.r, in.c, {a, 0.0, StatFn::mean}).order,
              oracle::mrmr(in.s, in.rt, a));
  }
}

TEST(Rank3mrProperty, FirstPickIsArgmaxAndOutputIsPermutation) {
  std::mt19937_64 rng(6);
  for (int t = 0; t < 200; ++t) {
    const auto in = random_instance(rng, 1 + rng() % 12, 0.6);
    const ThreeMRConfig cfg{static_cast<double>(rng() % 10), static_cast<double>(rng() % 10),
                            static_cast<StatFn>(rng() % 4)};
    const auto out = rank_3mr(in.s, in.r, in.c, cfg);
    EXPECT_EQ(out.order.front(), rank_by_score(in.s).order.front());
    Order sorted = out.order;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < sorted.size(); ++i) EXPECT_EQ(sorted[i], i);
    EXPECT_EQ(out.order, rank_3mr(in.s, in.r, in.c, cfg).order);
  }
}

TEST(Rank3mrProperty, MonotonePenalty) {
  // After F(0) = 0, the step-two objective of a candidate with a positive
  // redundancy entry must not increase as alpha grows.
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.01, 1.0);
  for (int t = 0; t < 100; ++t) {
    const double r10 = u(rng);
    const double c10 = u(rng);
    double prev = HUGE_VAL;
    for (double a : {0.0, 0.1, 0.5, 1.0, 3.0}) {
      const D s{2.0, 0.5};
      const auto out = rank_3mr(s, lookup(2, {{1, 0, r10}}), lookup(2, {{1, 0, c10}}),
                                {a, 0.2, StatFn::mean});
      EXPECT_LE(out.selection_scores[1], prev);
      prev = out.selection_scores[1];
    }
  }
}

TEST(PairLookupTest, SymmetricWithAbsentEntries) {
  PairLookup p(3);
  EXPECT_TRUE(p.empty());
  p.set(2, 0, 0.5);
  EXPECT_FALSE(p.empty());
  EXPECT_EQ(*p.get(0, 2), 0.5);
  EXPECT_FALSE(p.get(1, 0));
  EXPECT_THROW((void)p.get(3, 0), Error);
}

TEST(ScoreAccumulatorTest, CountsAndMerge) {
  ScoreAccumulator a(2);
  ScoreAccumulator b(2);
  a.add(0, 0.1);
  a.add(0, 0.3);
  b.add(0, 0.5);
  b.add(1, 0.2);
  a.merge(b);
  EXPECT_EQ(a.count(0), 3u);
  EXPECT_EQ(a.count(1), 1u);
  EXPECT_NEAR(a.finalize(0, Aggregate::mean, false), 0.3, 1e-15);
  EXPECT_EQ(a.finalize(0, Aggregate::median, false), 0.3);
  EXPECT_THROW(a.merge(ScoreAccumulator(3)), Error);
  EXPECT_THROW(ScoreAccumulator(2).finalize_all(Aggregate::mean, false), Error);
}

TEST(Parse, RoundTrips) {
  for (auto h : {Heuristic::mi_raw, Heuristic::cardmi, Heuristic::mrmr, Heuristic::three_mr}) {
    EXPECT_EQ(parse_heuristic(to_string(h)), h);
  }
  for (auto f : {StatFn::mean, StatFn::median, StatFn::p90, StatFn::sum}) {
    EXPECT_EQ(parse_stat_fn(to_string(f)), f);
  }
  for (auto a : {Aggregate::mean, Aggregate::median, Aggregate::sum}) {
    EXPECT_EQ(parse_aggregate(to_string(a)), a);
  }
  EXPECT_THROW(parse_heuristic("rf"), ConfigError);
  EXPECT_THROW(parse_stat_fn("max"), ConfigError);
  EXPECT_THROW(parse_aggregate("max"), ConfigError);
}

}  // namespace
}  // namespace cardrank
