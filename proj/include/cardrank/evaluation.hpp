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

#ifndef CARDRANK_EVALUATION_HPP
#define CARDRANK_EVALUATION_HPP

#include <algorithm>
#include <cstdio>
#include <iterator>
#include <cstddef>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <unordered_set>
#include <vector>

#include "cardrank/error.hpp"

namespace cardrank {

// An ordered list of feature names, rank 1 first.
struct RankingFile {
  std::vector<std::string> names;

  void validate() const {
    std::unordered_set<std::string> seen;
    for (const auto& n : names) {
      if (!seen.insert(n).second) throw DataError("duplicate feature in ranking: '" + n + "'");
    }
  }
};

// Reads one name per line. A ranking.tsv report is also accepted: its header
// is recognized, the feature column is used and control rows are dropped.
inline RankingFile read_ranking(std::istream& in) {
  RankingFile out;
  std::string line;
  bool first = true;
  bool report = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (first) {
      first = false;
      if (line.rfind("rank\tfeature\t", 0) == 0) {
        report = true;
        continue;
      }
    }
    if (line.empty()) continue;
    if (report) {
      std::vector<std::string> cols;
      std::stringstream ss(line);
      std::string col;
      while (std::getline(ss, col, '\t')) cols.push_back(col);
      if (cols.size() < 5) throw DataError("malformed ranking report row: '" + line + "'");
      if (cols[4] == "1" || cols[4] == "true") continue;
      out.names.push_back(cols[1]);
    } else {
      out.names.push_back(line);
    }
  }
  out.validate();
  return out;
}

inline RankingFile read_ranking_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open ranking file '" + path + "'");
  return read_ranking(in);
}

inline void check_same_universe(const RankingFile& reference, const RankingFile& candidate) {
  reference.validate();
  candidate.validate();
  const std::set<std::string> a(reference.names.begin(), reference.names.end());
  const std::set<std::string> b(candidate.names.begin(), candidate.names.end());
  if (a == b) return;
  std::vector<std::string> diff;
  std::set_symmetric_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(diff));
  std::string msg = "rankings cover different features; symmetric difference:";
  for (const auto& d : diff) msg += " " + d;
  throw DataError(msg);
}

// |top-i(reference) ∩ top-i(candidate)| / i
inline double recall_at(const RankingFile& reference, const RankingFile& candidate, std::size_t i) {
  check_same_universe(reference, candidate);
  const std::size_t n = reference.names.size();
  if (i < 1 || i > n) {
    throw ConfigError("recall_at: prefix length must be in [1, " + std::to_string(n) + "]");
  }
  const std::unordered_set<std::string> top(reference.names.begin(),
                                            reference.names.begin() + static_cast<std::ptrdiff_t>(i));
  std::size_t hits = 0;
  for (std::size_t k = 0; k < i; ++k) hits += top.contains(candidate.names[k]);
  return static_cast<double>(hits) / static_cast<double>(i);
}

// R_1..R_N in one pass.
inline std::vector<double> recall_curve(const RankingFile& reference, const RankingFile& candidate) {
  check_same_universe(reference, candidate);
  const std::size_t n = reference.names.size();
  std::unordered_set<std::string> seen_ref;
  std::unordered_set<std::string> seen_cand;
  std::vector<double> curve;
  curve.reserve(n);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& r = reference.names[i];
    const auto& c = candidate.names[i];
    seen_ref.insert(r);
    seen_cand.insert(c);
    if (r == c) {
      ++hits;
    } else {
      hits += seen_cand.contains(r);
      hits += seen_ref.contains(c);
    }
    curve.push_back(static_cast<double>(hits) / static_cast<double>(i + 1));
  }
  return curve;
}

inline double recall_sum(const RankingFile& reference, const RankingFile& candidate) {
  double total = 0.0;
  for (double r : recall_curve(reference, candidate)) total += r;
  return total;
}

inline void write_recall_curve(std::ostream& out, const std::vector<double>& curve) {
  out << "i\tR_i\n";
  char buf[64];
  for (std::size_t i = 0; i < curve.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%zu\t%.12g\n", i + 1, curve[i]);
    out << buf;
  }
}

}  // namespace cardrank

#endif  // CARDRANK_EVALUATION_HPP
