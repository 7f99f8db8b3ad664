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

#ifndef CARDRANK_RANKING_HPP
#define CARDRANK_RANKING_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cardrank/error.hpp"
#include "cardrank/interactions.hpp"

namespace cardrank {

enum class Aggregate { mean, median, sum };
enum class StatFn { mean, median, p90, sum };
enum class Heuristic { mi_raw, cardmi, mrmr, three_mr };

inline std::string_view to_string(Aggregate a) {
  switch (a) {
    case Aggregate::mean: return "mean";
    case Aggregate::median: return "median";
    case Aggregate::sum: return "sum";
  }
  return "?";
}

inline std::string_view to_string(StatFn f) {
  switch (f) {
    case StatFn::mean: return "mean";
    case StatFn::median: return "median";
    case StatFn::p90: return "p90";
    case StatFn::sum: return "sum";
  }
  return "?";
}

inline std::string_view to_string(Heuristic h) {
  switch (h) {
    case Heuristic::mi_raw: return "mi_raw";
    case Heuristic::cardmi: return "cardmi";
    case Heuristic::mrmr: return "mrmr";
    case Heuristic::three_mr: return "3mr";
  }
  return "?";
}

inline Aggregate parse_aggregate(std::string_view s) {
  if (s == "mean") return Aggregate::mean;
  if (s == "median") return Aggregate::median;
  if (s == "sum") return Aggregate::sum;
  throw ConfigError("unknown aggregate '" + std::string(s) + "'");
}

inline StatFn parse_stat_fn(std::string_view s) {
  if (s == "mean") return StatFn::mean;
  if (s == "median") return StatFn::median;
  if (s == "p90") return StatFn::p90;
  if (s == "sum") return StatFn::sum;
  throw ConfigError("unknown statistical function '" + std::string(s) + "'");
}

inline Heuristic parse_heuristic(std::string_view s) {
  if (s == "mi_raw") return Heuristic::mi_raw;
  if (s == "cardmi") return Heuristic::cardmi;
  if (s == "mrmr") return Heuristic::mrmr;
  if (s == "3mr") return Heuristic::three_mr;
  throw ConfigError("unknown heuristic '" + std::string(s) + "'");
}

namespace detail {

inline double sum_in_order(std::span<const double> xs) {
  double s = 0.0;
  for (double x : xs) s += x;
  return s;
}

inline double median_of(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  const std::size_t n = xs.size();
  return n % 2 == 1 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

}  // namespace detail

inline double aggregate(std::span<const double> scores, Aggregate method, bool truncate) {
  if (scores.empty()) throw Error("aggregate: empty score sequence");
  double v = 0.0;
  switch (method) {
    case Aggregate::mean:
      v = detail::sum_in_order(scores) / static_cast<double>(scores.size());
      break;
    case Aggregate::median:
      v = detail::median_of({scores.begin(), scores.end()});
      break;
    case Aggregate::sum:
      v = detail::sum_in_order(scores);
      break;
  }
  return truncate ? std::clamp(v, 0.0, 1.0) : v;
}

// SF over a set of pair scores. The empty set maps to 0. p90 is nearest-rank.
inline double statistic(std::span<const double> values, StatFn fn) {
  if (values.empty()) return 0.0;
  switch (fn) {
    case StatFn::mean:
      return detail::sum_in_order(values) / static_cast<double>(values.size());
    case StatFn::sum:
      return detail::sum_in_order(values);
    case StatFn::median:
      return detail::median_of({values.begin(), values.end()});
    case StatFn::p90: {
      std::vector<double> sorted(values.begin(), values.end());
      std::sort(sorted.begin(), sorted.end());
      const std::size_t rank = (9 * sorted.size() + 9) / 10;  // ceil(0.9 n)
      return sorted[rank - 1];
    }
  }
  return 0.0;
}

// Min-max scaling to [0,1]. An all-equal vector maps to all zeros.
inline std::vector<double> scale_scores(std::span<const double> x) {
  std::vector<double> out(x.size(), 0.0);
  if (x.empty()) return out;
  const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
  const double range = *hi - *lo;
  if (!(range > 0.0)) return out;
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = (x[i] - *lo) / range;
  return out;
}

// Per-feature stream of batch scores.
class ScoreAccumulator {
 public:
  explicit ScoreAccumulator(std::size_t features = 0) : scores_(features) {}

  void resize(std::size_t features) { scores_.resize(features); }
  void add(std::size_t feature, double score) { scores_.at(feature).push_back(score); }

  void merge(const ScoreAccumulator& other) {
    if (other.scores_.size() != scores_.size()) throw Error("ScoreAccumulator: size mismatch");
    for (std::size_t f = 0; f < scores_.size(); ++f) {
      scores_[f].insert(scores_[f].end(), other.scores_[f].begin(), other.scores_[f].end());
    }
  }

  [[nodiscard]] std::size_t features() const noexcept { return scores_.size(); }
  [[nodiscard]] std::size_t count(std::size_t feature) const { return scores_.at(feature).size(); }
  [[nodiscard]] std::span<const double> scores(std::size_t feature) const { return scores_.at(feature); }

  [[nodiscard]] double finalize(std::size_t feature, Aggregate method, bool truncate) const {
    return aggregate(scores_.at(feature), method, truncate);
  }

  [[nodiscard]] std::vector<double> finalize_all(Aggregate method, bool truncate) const {
    std::vector<double> out;
    out.reserve(scores_.size());
    for (std::size_t f = 0; f < scores_.size(); ++f) out.push_back(finalize(f, method, truncate));
    return out;
  }

 private:
  std::vector<std::vector<double>> scores_;
};

// Dense symmetric view of a finalized pair matrix; missing entries are NaN.
class PairLookup {
 public:
  explicit PairLookup(std::size_t n = 0)
      : n_(n), values_(n * n, std::numeric_limits<double>::quiet_NaN()) {}

  template <typename Tag>
  static PairLookup from(const InteractionMatrix<Tag, 2>& m, std::size_t n) {
    PairLookup out(n);
    for (const auto& [key, cell] : m.cells()) out.set(key[0], key[1], cell.score());
    return out;
  }

  void set(std::size_t i, std::size_t j, double v) {
    check(i, j);
    values_[i * n_ + j] = v;
    values_[j * n_ + i] = v;
    present_ = true;
  }

  [[nodiscard]] std::optional<double> get(std::size_t i, std::size_t j) const {
    check(i, j);
    const double v = values_[i * n_ + j];
    if (std::isnan(v)) return std::nullopt;
    return v;
  }

  [[nodiscard]] std::size_t size() const noexcept { return n_; }
  [[nodiscard]] bool empty() const noexcept { return !present_; }

 private:
  void check(std::size_t i, std::size_t j) const {
    if (i >= n_ || j >= n_) throw Error("PairLookup: index out of range");
  }

  std::size_t n_;
  std::vector<double> values_;
  bool present_ = false;
};

struct ThreeMRConfig {
  double alpha = 0.1;
  double beta = 0.2;
  StatFn sf = StatFn::mean;

  void validate() const {
    if (!(alpha >= 0.0) || !(beta >= 0.0)) throw ConfigError("alpha and beta must be >= 0");
  }
};

struct RankingResult {
  std::string heuristic;
  // order[r] is the feature at rank r + 1.
  std::vector<std::size_t> order;
  // Objective value of each pick and its lead over the runner-up (NaN when
  // the pick was the only candidate).
  std::vector<double> selection_scores;
  std::vector<double> margins;
  // Indexed by feature id: Scale() of the relevance scores.
  std::vector<double> scaled_scores;
  std::optional<ThreeMRConfig> config;
  bool degraded = false;
};

// Descending score, ties by ascending feature id.
inline RankingResult rank_by_score(std::span<const double> scores,
                                   std::string heuristic = "cardmi") {
  RankingResult out;
  out.heuristic = std::move(heuristic);
  out.order.resize(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) out.order[i] = i;
  std::stable_sort(out.order.begin(), out.order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  for (std::size_t r = 0; r < out.order.size(); ++r) {
    out.selection_scores.push_back(scores[out.order[r]]);
    out.margins.push_back(r + 1 < out.order.size() ? scores[out.order[r]] - scores[out.order[r + 1]]
                                                   : std::numeric_limits<double>::quiet_NaN());
  }
  out.scaled_scores = scale_scores(scores);
  return out;
}

// Greedy 3MR: start from argmax S, then repeatedly take the unranked j
// maximizing S_j - alpha * SF(R_{j,k}) + beta * SF(C_{j,k}) over ranked k
// with an entry present.
inline RankingResult rank_3mr(std::span<const double> scores, const PairLookup& redundancy,
                              const PairLookup& relation, const ThreeMRConfig& cfg) {
  cfg.validate();
  const std::size_t n = scores.size();
  if (n == 0) throw Error("rank_3mr: empty feature set");
  if (redundancy.size() != n || relation.size() != n) {
    throw Error("rank_3mr: pair matrices do not match the score vector");
  }

  RankingResult out;
  out.heuristic = cfg.beta == 0.0 ? "mrmr" : "3mr";
  out.config = cfg;
  out.scaled_scores = scale_scores(scores);

  std::vector<bool> ranked(n, false);
  std::vector<std::vector<double>> red_sets(n);
  std::vector<std::vector<double>> rel_sets(n);
  constexpr double lowest = -std::numeric_limits<double>::infinity();

  for (std::size_t step = 0; step < n; ++step) {
    std::size_t best = n;
    double best_score = lowest;
    double runner_up = lowest;
    for (std::size_t j = 0; j < n; ++j) {
      if (ranked[j]) continue;
      double s = scores[j];
      if (step > 0) {
        s = s - cfg.alpha * statistic(red_sets[j], cfg.sf) + cfg.beta * statistic(rel_sets[j], cfg.sf);
      }
      if (best == n || s > best_score) {
        if (best != n) runner_up = best_score;
        best = j;
        best_score = s;
      } else if (s > runner_up) {
        runner_up = s;
      }
    }
    ranked[best] = true;
    out.order.push_back(best);
    out.selection_scores.push_back(best_score);
    out.margins.push_back(runner_up == lowest ? std::numeric_limits<double>::quiet_NaN()
                                              : best_score - runner_up);
    for (std::size_t j = 0; j < n; ++j) {
      if (ranked[j]) continue;
      if (auto r = redundancy.get(j, best)) red_sets[j].push_back(*r);
      if (auto c = relation.get(j, best)) rel_sets[j].push_back(*c);
    }
  }
  return out;
}

}  // namespace cardrank

#endif  // CARDRANK_RANKING_HPP
