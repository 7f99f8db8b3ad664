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

#ifndef CARDRANK_ENGINE_HPP
#define CARDRANK_ENGINE_HPP

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <istream>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cardrank/controls.hpp"
#include "cardrank/error.hpp"
#include "cardrank/hashing.hpp"
#include "cardrank/ingest.hpp"
#include "cardrank/interactions.hpp"
#include "cardrank/mutual_information.hpp"
#include "cardrank/profiling.hpp"
#include "cardrank/ranking.hpp"
#include "cardrank/worker_pool.hpp"

namespace cardrank {

inline constexpr std::string_view version = "0.1.0";

struct RunConfig {
  std::string input;  // path, or "-" for stdin
  Format format = Format::csv;
  std::string target;
  std::vector<std::string> ignored;
  std::string missing_token;

  std::size_t batch_size = default_batch_size;
  std::uint32_t noise_samples = default_noise_samples;
  NullMode null_mode = NullMode::permutation;
  std::size_t buffer_size = default_buffer_size;
  std::size_t interaction_order = 2;

  Heuristic heuristic = Heuristic::three_mr;
  double alpha = 0.1;
  double beta = 0.2;
  StatFn sf = StatFn::mean;
  Aggregate aggregate = Aggregate::mean;
  bool truncate = false;
  bool truncate_per_batch = false;
  // Score redundancy pairs with plain MI instead of CardMI.
  bool redundancy_raw_mi = false;

  bool controls = true;
  double control_tolerance = 0.01;
  std::size_t control_min_batches = 50;
  std::size_t min_count = default_min_count;

  std::uint64_t seed = 0;
  std::size_t workers = 1;
  std::string output_dir;
  ProfileConfig profile;

  void validate() const {
    if (batch_size < 2) throw ConfigError("batch_size must be >= 2");
    if (noise_samples < 1) throw ConfigError("noise_samples must be >= 1");
    if (buffer_size < 1) throw ConfigError("buffer_size must be >= 1");
    if (interaction_order != 2 && interaction_order != 3) {
      throw ConfigError("interaction order must be 2 or 3");
    }
    if (!(alpha >= 0.0) || !(beta >= 0.0)) throw ConfigError("alpha and beta must be >= 0");
    if (!(control_tolerance >= 0.0)) throw ConfigError("control tolerance must be >= 0");
    if (workers < 1) throw ConfigError("workers must be >= 1");
    if (target.empty()) throw ConfigError("target column is required");
  }

  [[nodiscard]] std::uint64_t hash_seed() const noexcept {
    return hash_bytes(&seed, sizeof seed, 0xC0B1DE5ULL);
  }

  [[nodiscard]] bool needs_redundancy() const noexcept {
    return heuristic == Heuristic::mrmr || heuristic == Heuristic::three_mr;
  }
  [[nodiscard]] bool needs_relation() const noexcept { return heuristic == Heuristic::three_mr; }

  [[nodiscard]] nlohmann::ordered_json to_json() const {
    return {
        {"input", input},
        {"format", to_string(format)},
        {"target", target},
        {"ignored", ignored},
        {"missing_token", missing_token},
        {"batch_size", batch_size},
        {"noise_samples", noise_samples},
        {"null_mode", to_string(null_mode)},
        {"buffer_size", buffer_size},
        {"interaction_order", interaction_order},
        {"heuristic", to_string(heuristic)},
        {"alpha", alpha},
        {"beta", beta},
        {"sf", to_string(sf)},
        {"aggregate", to_string(aggregate)},
        {"truncate", truncate},
        {"truncate_per_batch", truncate_per_batch},
        {"redundancy_measure", redundancy_raw_mi ? "mi_raw" : "cardmi"},
        {"controls", controls},
        {"control_tolerance", control_tolerance},
        {"control_min_batches", control_min_batches},
        {"min_count", min_count},
        {"seed", seed},
        {"hash_seed", hash_seed()},
        {"workers", workers},
        {"output_dir", output_dir},
        {"sketch_precision", profile.precision},
        {"sketch_exact_threshold", profile.exact_threshold},
        {"top_k", profile.top_k},
        {"version", version},
    };
  }
};

struct FeatureInfo {
  std::string name;
  std::optional<ControlSpec> control;
  [[nodiscard]] bool is_control() const noexcept { return control.has_value(); }
};

struct RunResult {
  std::vector<FeatureInfo> features;
  // Aggregated plain MI and CardMI per feature, in nats.
  std::vector<double> raw_scores;
  std::vector<double> cardmi_scores;
  RankingResult ranking;
  RedundancyMatrix redundancy;
  RelationMatrix relations;
  TripleRelationMatrix triple_relations;
  nlohmann::ordered_json profile;
  nlohmann::ordered_json controls_report;
  std::vector<std::string> warnings;
  std::size_t batches = 0;
  std::size_t rows = 0;
  std::size_t hash_collisions = 0;

  [[nodiscard]] std::vector<std::string> names() const {
    std::vector<std::string> out;
    for (const auto& f : features) out.push_back(f.name);
    return out;
  }

  [[nodiscard]] std::optional<std::size_t> find(const std::string& name) const {
    for (std::size_t i = 0; i < features.size(); ++i) {
      if (features[i].name == name) return i;
    }
    return std::nullopt;
  }

  // Names in rank order, optionally without the controls.
  [[nodiscard]] std::vector<std::string> ranked_names(bool include_controls = true) const {
    std::vector<std::string> out;
    for (auto f : ranking.order) {
      if (include_controls || !features[f].is_control()) out.push_back(features[f].name);
    }
    return out;
  }
};

// Consumes encoded batches one at a time: injects controls, updates the
// profile, scores single features and the sampled interaction buffer, and
// folds everything into the accumulators. Memory is independent of the
// number of rows seen, apart from one retained score per feature per batch.
class RankEngine {
 public:
  RankEngine(RunConfig cfg, const std::vector<std::string>& data_features)
      : cfg_(std::move(cfg)), data_features_(data_features.size()),
        profiler_(data_features, cfg_.profile) {
    cfg_.validate();
    for (const auto& n : data_features) {
      if (is_control_name(n)) {
        throw DataError("column name '" + n + "' uses the reserved prefix " +
                        std::string(control_prefix));
      }
      features_.push_back({n, std::nullopt});
    }
    if (cfg_.controls) {
      for (auto& c : default_controls(cfg_.batch_size)) features_.push_back({c.name, c});
    }
    raw_.resize(features_.size());
    cardmi_.resize(features_.size());
    if (cfg_.needs_redundancy()) pair_universe_ = combination_universe(features_.size(), 2);
    if (cfg_.needs_relation() && cfg_.interaction_order == 3) {
      triple_universe_ = combination_universe(features_.size(), 3);
    }
    if (cfg_.workers > 1) pool_ = std::make_unique<WorkerPool>(cfg_.workers);
  }

  [[nodiscard]] const std::vector<FeatureInfo>& features() const noexcept { return features_; }
  [[nodiscard]] const RunConfig& config() const noexcept { return cfg_; }

  void consume(EncodedBatch batch) {
    if (batch.features.size() != data_features_) {
      throw DataError("batch has " + std::to_string(batch.features.size()) + " features, expected " +
                      std::to_string(data_features_));
    }
    profiler_.update(batch);
    for (std::size_t f = data_features_; f < features_.size(); ++f) {
      batch.features.push_back(materialize_control(*features_[f].control, batch, cfg_.seed));
    }
    score_singles(batch);
    if (cfg_.needs_redundancy()) score_interactions(batch);
    ++batches_;
    rows_ += batch.row_count;
  }

  [[nodiscard]] RunResult finish() const {
    RunResult out;
    out.features = features_;
    out.batches = batches_;
    out.rows = rows_;
    out.hash_collisions = collisions_;
    out.redundancy = redundancy_;
    out.relations = relation_;
    out.triple_relations = triple_relation_;
    out.profile = profiler_.to_json();
    if (batches_ == 0) throw DataError("input contains no data rows");
    out.raw_scores = raw_.finalize_all(cfg_.aggregate, cfg_.truncate);
    out.cardmi_scores = cardmi_.finalize_all(cfg_.aggregate, cfg_.truncate);

    const std::size_t n = features_.size();
    switch (cfg_.heuristic) {
      case Heuristic::mi_raw:
        out.ranking = rank_by_score(out.raw_scores, "mi_raw");
        break;
      case Heuristic::cardmi:
        out.ranking = rank_by_score(out.cardmi_scores, "cardmi");
        break;
      case Heuristic::mrmr:
      case Heuristic::three_mr: {
        const auto red = PairLookup::from(redundancy_, n);
        const auto rel = cfg_.needs_relation() ? PairLookup::from(relation_, n) : PairLookup(n);
        if (red.empty() && rel.empty()) {
          out.warnings.push_back(std::string(to_string(cfg_.heuristic)) +
                                 ": no redundancy or relation entries; ranking by score only");
          out.ranking = rank_by_score(out.cardmi_scores, "cardmi");
          out.ranking.degraded = true;
        } else {
          ThreeMRConfig tm{cfg_.alpha, cfg_.heuristic == Heuristic::mrmr ? 0.0 : cfg_.beta, cfg_.sf};
          out.ranking = rank_3mr(out.cardmi_scores, red, rel, tm);
        }
        out.ranking.heuristic = to_string(cfg_.heuristic);
        break;
      }
    }
    out.controls_report = controls_report(out);
    return out;
  }

 private:
  void for_each(std::size_t n, const std::function<void(std::size_t)>& fn) {
    if (pool_) {
      pool_->parallel_for(n, fn);
    } else {
      for (std::size_t i = 0; i < n; ++i) fn(i);
    }
  }

  void score_singles(const EncodedBatch& batch) {
    const std::size_t n = features_.size();
    std::vector<BatchScore> scores(n);
    for_each(n, [&](std::size_t f) {
      NullSampler sampler;
      sampler.mode = cfg_.null_mode;
      sampler.num_samples = cfg_.noise_samples;
      sampler.key.seed = cfg_.seed;
      sampler.key.batch_index = batch.batch_index;
      sampler.key.purpose = StreamPurpose::null_single;
      sampler.key.a = f;
      scores[f] = cardmi_batch(batch.target.codes, batch.features[f].codes, sampler);
    });
    for (std::size_t f = 0; f < n; ++f) {
      double norm = scores[f].normalized;
      double raw = scores[f].raw_mi;
      if (cfg_.truncate_per_batch) {
        norm = std::clamp(norm, 0.0, 1.0);
        raw = std::clamp(raw, 0.0, 1.0);
      }
      cardmi_.add(f, norm);
      raw_.add(f, raw);
    }
  }

  void score_interactions(const EncodedBatch& batch) {
    InteractionScoring scoring;
    scoring.null_mode = cfg_.null_mode;
    scoring.num_samples = cfg_.noise_samples;
    scoring.seed = cfg_.seed;
    scoring.hash_seed = cfg_.hash_seed();

    const auto buffer = sample_buffer(pair_universe_, cfg_.buffer_size, batch.batch_index, cfg_.seed);
    InteractionScoring red_scoring = scoring;
    red_scoring.raw_mi = cfg_.redundancy_raw_mi;
    accumulate_redundancy(batch, buffer, red_scoring, redundancy_, pool_.get());
    if (!cfg_.needs_relation()) return;
    collisions_ += accumulate_relation(batch, buffer, batch.target.codes, scoring, relation_, pool_.get());
    if (!triple_universe_.empty()) {
      const auto triples =
          sample_buffer(triple_universe_, cfg_.buffer_size, batch.batch_index, cfg_.seed);
      collisions_ += accumulate_relation(batch, triples, batch.target.codes, scoring,
                                         triple_relation_, pool_.get());
    }
  }

  [[nodiscard]] nlohmann::ordered_json controls_report(const RunResult& r) const {
    nlohmann::ordered_json controls = nlohmann::ordered_json::array();
    bool all_passed = true;
    const bool enough = batches_ >= cfg_.control_min_batches;
    std::vector<std::size_t> rank_of(features_.size());
    for (std::size_t k = 0; k < r.ranking.order.size(); ++k) rank_of[r.ranking.order[k]] = k + 1;
    const auto scaled = scale_scores(r.cardmi_scores);
    for (std::size_t f = 0; f < features_.size(); ++f) {
      if (!features_[f].is_control()) continue;
      const auto& spec = *features_[f].control;
      const double score = r.cardmi_scores[f];
      std::string check;
      std::string status;
      switch (spec.kind) {
        case ControlKind::random_uniform:
        case ControlKind::constant:
          check = "|aggregated_cardmi| <= tolerance";
          if (std::abs(score) <= cfg_.control_tolerance) {
            status = "pass";
          } else {
            status = enough || spec.kind == ControlKind::constant ? "fail" : "inconclusive";
          }
          break;
        case ControlKind::target_leak:
          check = "scaled_score == 1";
          status = scaled[f] == 1.0 ? "pass" : "fail";
          break;
      }
      if (status == "fail") all_passed = false;
      controls.push_back({{"name", spec.name},
                          {"kind", to_string(spec.kind)},
                          {"cardinality", spec.cardinality},
                          {"aggregated_cardmi", score},
                          {"scaled_score", scaled[f]},
                          {"rank", rank_of[f]},
                          {"check", check},
                          {"status", status}});
    }
    return {{"tolerance_nats", cfg_.control_tolerance},
            {"min_batches", cfg_.control_min_batches},
            {"batches", batches_},
            {"band_conclusive", enough},
            {"controls", controls},
            {"all_passed", all_passed}};
  }

  RunConfig cfg_;
  std::size_t data_features_;
  std::vector<FeatureInfo> features_;
  DatasetProfiler profiler_;
  ScoreAccumulator raw_;
  ScoreAccumulator cardmi_;
  RedundancyMatrix redundancy_;
  RelationMatrix relation_;
  TripleRelationMatrix triple_relation_;
  std::vector<CombinedFeature> pair_universe_;
  std::vector<CombinedFeature> triple_universe_;
  std::unique_ptr<WorkerPool> pool_;
  std::size_t batches_ = 0;
  std::size_t rows_ = 0;
  std::size_t collisions_ = 0;
};

inline RunResult rank_stream(std::istream& in, const RunConfig& cfg) {
  cfg.validate();
  BatchReader reader(in, cfg.format, HeaderSchema{cfg.target, cfg.ignored, cfg.missing_token},
                     cfg.batch_size);
  RankEngine engine(cfg, reader.feature_names());
  while (auto batch = reader.next()) engine.consume(std::move(*batch));
  return engine.finish();
}

inline nlohmann::ordered_json profile_stream(std::istream& in, const RunConfig& cfg) {
  BatchReader reader(in, cfg.format, HeaderSchema{cfg.target, cfg.ignored, cfg.missing_token},
                     cfg.batch_size);
  DatasetProfiler profiler(reader.feature_names(), cfg.profile);
  while (auto batch = reader.next()) profiler.update(*batch);
  return profiler.to_json();
}

namespace detail {

inline std::string format_real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

template <typename Tag, std::size_t Order>
void write_interactions(std::ostream& out, const InteractionMatrix<Tag, Order>& m,
                        const std::vector<FeatureInfo>& features, std::size_t min_count) {
  static constexpr const char* cols[] = {"i", "j", "k"};
  for (std::size_t c = 0; c < Order; ++c) out << cols[c] << '\t';
  out << "score\tcount\tlow_confidence\n";
  for (const auto& [key, cell] : m.cells()) {
    for (std::size_t c = 0; c < Order; ++c) out << features[key[c]].name << '\t';
    out << format_real(cell.score()) << '\t' << cell.count << '\t'
        << (cell.count < min_count ? 1 : 0) << '\n';
  }
}

inline std::ofstream open_output(const std::filesystem::path& p) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw DataError("cannot write '" + p.string() + "'");
  return out;
}

}  // namespace detail

inline void write_ranking_tsv(std::ostream& out, const RunResult& r) {
  out << "rank\tfeature\traw_aggregate\tscaled_score\tis_control\theuristic\n";
  const bool raw = r.ranking.heuristic == "mi_raw";
  const auto& scores = raw ? r.raw_scores : r.cardmi_scores;
  for (std::size_t k = 0; k < r.ranking.order.size(); ++k) {
    const auto f = r.ranking.order[k];
    out << k + 1 << '\t' << r.features[f].name << '\t' << detail::format_real(scores[f]) << '\t'
        << detail::format_real(r.ranking.scaled_scores[f]) << '\t'
        << (r.features[f].is_control() ? 1 : 0) << '\t' << r.ranking.heuristic << '\n';
  }
}

inline void write_redundancy_tsv(std::ostream& out, const RunResult& r, std::size_t min_count) {
  detail::write_interactions(out, r.redundancy, r.features, min_count);
}

inline void write_relations_tsv(std::ostream& out, const RunResult& r, std::size_t min_count) {
  detail::write_interactions(out, r.relations, r.features, min_count);
}

inline void write_reports(const RunResult& r, const RunConfig& cfg,
                          const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  {
    auto out = detail::open_output(dir / "ranking.tsv");
    write_ranking_tsv(out, r);
  }
  {
    auto out = detail::open_output(dir / "redundancy.tsv");
    write_redundancy_tsv(out, r, cfg.min_count);
  }
  {
    auto out = detail::open_output(dir / "relations.tsv");
    write_relations_tsv(out, r, cfg.min_count);
  }
  if (cfg.interaction_order == 3 && cfg.needs_relation()) {
    auto out = detail::open_output(dir / "relations3.tsv");
    detail::write_interactions(out, r.triple_relations, r.features, cfg.min_count);
  }
  {
    auto out = detail::open_output(dir / "profile.json");
    out << r.profile.dump(2) << '\n';
  }
  {
    auto report = r.controls_report;
    report["warnings"] = r.warnings;
    report["hash_collisions"] = r.hash_collisions;
    auto out = detail::open_output(dir / "controls_report.json");
    out << report.dump(2) << '\n';
  }
  {
    auto out = detail::open_output(dir / "run_config.json");
    out << cfg.to_json().dump(2) << '\n';
  }
}

// End-to-end `rank`: read the input, score, and write every report.
inline RunResult run_rank(const RunConfig& cfg) {
  cfg.validate();
  RunResult result;
  if (cfg.input == "-") {
    result = rank_stream(std::cin, cfg);
  } else {
    std::ifstream in(cfg.input, std::ios::binary);
    if (!in) throw DataError("cannot open input '" + cfg.input + "'");
    result = rank_stream(in, cfg);
  }
  if (!cfg.output_dir.empty()) write_reports(result, cfg, cfg.output_dir);
  return result;
}

}  // namespace cardrank

#endif  // CARDRANK_ENGINE_HPP
