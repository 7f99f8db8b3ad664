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

// Command-line front end: rank, profile, evaluate, synth.
//
// Every rank/profile flag can also be set through an environment variable
// named CARDRANK_<FLAG> (upper case, dashes as underscores), e.g.
// CARDRANK_BATCH_SIZE=8192. Exit codes: 0 success, 1 usage, 2 data error.

#include <cctype>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cardrank/cardrank.hpp"

namespace {

constexpr int exit_usage = 1;
constexpr int exit_data = 2;

std::string env_name(const std::string& flag) {
  std::string out = "CARDRANK_";
  for (char c : flag) out.push_back(c == '-' ? '_' : static_cast<char>(std::toupper(c)));
  return out;
}

struct InputOptions {
  std::string format = "csv";
  std::string null_mode = "permutation";
  std::string heuristic = "3mr";
  std::string sf = "mean";
  std::string aggregate = "mean";
  std::string redundancy_measure = "cardmi";
  bool no_controls = false;
};

void add_input_flags(CLI::App& cmd, cardrank::RunConfig& cfg, InputOptions& opt) {
  auto flag = [&](auto* option, const std::string& name) { option->envname(env_name(name)); };
  flag(cmd.add_option("--input,-i", cfg.input, "Input file, or - for stdin")->required(), "input");
  flag(cmd.add_option("--format", opt.format, "csv or tsv")->capture_default_str(), "format");
  flag(cmd.add_option("--target,-t", cfg.target, "Target column name")->required(), "target");
  flag(cmd.add_option("--ignore", cfg.ignored, "Columns to skip")->delimiter(','), "ignore");
  flag(cmd.add_option("--missing-token", cfg.missing_token, "Token that marks a missing value"),
       "missing-token");
  flag(cmd.add_option("--batch-size", cfg.batch_size, "Rows per batch")->capture_default_str(),
       "batch-size");
  flag(cmd.add_option("--sketch-precision", cfg.profile.precision, "HyperLogLog precision p")
           ->capture_default_str(),
       "sketch-precision");
  flag(cmd.add_option("--top-k", cfg.profile.top_k, "Top values per feature in the profile")
           ->capture_default_str(),
       "top-k");
}

void add_rank_flags(CLI::App& cmd, cardrank::RunConfig& cfg, InputOptions& opt) {
  auto flag = [&](auto* option, const std::string& name) { option->envname(env_name(name)); };
  flag(cmd.add_option("--noise-samples,-s", cfg.noise_samples, "Null samples per score")
           ->capture_default_str(),
       "noise-samples");
  flag(cmd.add_option("--null-mode", opt.null_mode, "permutation or uniform_cardinality")
           ->capture_default_str(),
       "null-mode");
  flag(cmd.add_option("--buffer-size", cfg.buffer_size, "Combinations scored per batch")
           ->capture_default_str(),
       "buffer-size");
  flag(cmd.add_option("--interaction-order", cfg.interaction_order, "2, or 3 to add triples")
           ->capture_default_str(),
       "interaction-order");
  flag(cmd.add_option("--heuristic", opt.heuristic, "mi_raw, cardmi, mrmr or 3mr")
           ->capture_default_str(),
       "heuristic");
  flag(cmd.add_option("--alpha", cfg.alpha, "Redundancy weight")->capture_default_str(), "alpha");
  flag(cmd.add_option("--beta", cfg.beta, "Relation weight")->capture_default_str(), "beta");
  flag(cmd.add_option("--sf", opt.sf, "mean, median, p90 or sum")->capture_default_str(), "sf");
  flag(cmd.add_option("--aggregate", opt.aggregate, "mean, median or sum")->capture_default_str(),
       "aggregate");
  flag(cmd.add_flag("--truncate", cfg.truncate, "Clamp aggregated scores to [0,1]"), "truncate");
  flag(cmd.add_flag("--truncate-per-batch", cfg.truncate_per_batch,
                    "Clamp every batch score to [0,1]"),
       "truncate-per-batch");
  flag(cmd.add_option("--redundancy-measure", opt.redundancy_measure, "cardmi or mi_raw")
           ->capture_default_str(),
       "redundancy-measure");
  flag(cmd.add_flag("--no-controls", opt.no_controls, "Do not inject sanity-check controls"),
       "no-controls");
  flag(cmd.add_option("--control-tolerance", cfg.control_tolerance, "Noise band in nats")
           ->capture_default_str(),
       "control-tolerance");
  flag(cmd.add_option("--min-count", cfg.min_count, "Observations below which pairs are flagged")
           ->capture_default_str(),
       "min-count");
  flag(cmd.add_option("--seed", cfg.seed, "Global seed")->capture_default_str(), "seed");
  flag(cmd.add_option("--workers,-j", cfg.workers, "Scoring threads")->capture_default_str(),
       "workers");
  flag(cmd.add_option("--out,-o", cfg.output_dir, "Output directory")->required(), "out");
}

void resolve(cardrank::RunConfig& cfg, const InputOptions& opt) {
  cfg.format = cardrank::parse_format(opt.format);
  cfg.null_mode = cardrank::parse_null_mode(opt.null_mode);
  cfg.heuristic = cardrank::parse_heuristic(opt.heuristic);
  cfg.sf = cardrank::parse_stat_fn(opt.sf);
  cfg.aggregate = cardrank::parse_aggregate(opt.aggregate);
  if (opt.redundancy_measure == "mi_raw") {
    cfg.redundancy_raw_mi = true;
  } else if (opt.redundancy_measure != "cardmi") {
    throw cardrank::ConfigError("unknown redundancy measure '" + opt.redundancy_measure + "'");
  }
  cfg.controls = !opt.no_controls;
}

int run_rank(cardrank::RunConfig cfg, const InputOptions& opt) {
  resolve(cfg, opt);
  const auto result = cardrank::run_rank(cfg);
  for (const auto& w : result.warnings) std::cerr << "warning: " << w << '\n';
  std::cerr << "ranked " << result.features.size() << " features over " << result.rows
            << " rows in " << result.batches << " batches -> " << cfg.output_dir << '\n';
  if (!result.controls_report.value("all_passed", true)) {
    std::cerr << "warning: one or more sanity-check controls failed; see controls_report.json\n";
  }
  return 0;
}

int run_profile(cardrank::RunConfig cfg, const InputOptions& opt, const std::string& out_path) {
  resolve(cfg, opt);
  nlohmann::ordered_json profile;
  if (cfg.input == "-") {
    profile = cardrank::profile_stream(std::cin, cfg);
  } else {
    std::ifstream in(cfg.input, std::ios::binary);
    if (!in) throw cardrank::DataError("cannot open input '" + cfg.input + "'");
    profile = cardrank::profile_stream(in, cfg);
  }
  if (out_path.empty() || out_path == "-") {
    std::cout << profile.dump(2) << '\n';
  } else {
    std::ofstream out(out_path);
    if (!out) throw cardrank::DataError("cannot write '" + out_path + "'");
    out << profile.dump(2) << '\n';
  }
  return 0;
}

int run_evaluate(const std::string& reference, const std::string& candidate,
                 const std::string& curve_path) {
  const auto ref = cardrank::read_ranking_file(reference);
  const auto cand = cardrank::read_ranking_file(candidate);
  const auto curve = cardrank::recall_curve(ref, cand);
  double total = 0.0;
  for (double r : curve) total += r;
  std::printf("R = %.12g (N = %zu)\n", total, curve.size());
  std::ofstream out(curve_path);
  if (!out) throw cardrank::DataError("cannot write '" + curve_path + "'");
  cardrank::write_recall_curve(out, curve);
  return 0;
}

int run_synth(const std::string& spec_path, const std::string& out_path,
              const std::string& manifest_path, const std::string& truth_path) {
  std::ifstream spec_in(spec_path);
  if (!spec_in) throw cardrank::ConfigError("cannot open spec '" + spec_path + "'");
  nlohmann::json j;
  try {
    spec_in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw cardrank::ConfigError(std::string("cannot parse spec: ") + e.what());
  }
  const auto spec = cardrank::SynthSpec::from_json(j);
  if (out_path == "-") {
    cardrank::generate(spec, std::cout);
  } else {
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw cardrank::DataError("cannot write '" + out_path + "'");
    cardrank::generate(spec, out);
  }
  const auto manifest = cardrank::synth_manifest(spec);
  if (!manifest_path.empty()) {
    std::ofstream m(manifest_path);
    if (!m) throw cardrank::DataError("cannot write '" + manifest_path + "'");
    m << manifest.dump(2) << '\n';
  }
  if (!truth_path.empty()) {
    std::ofstream t(truth_path);
    if (!t) throw cardrank::DataError("cannot write '" + truth_path + "'");
    for (const auto& name : manifest["truth_ranking"]) t << name.get<std::string>() << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cardrank: cardinality-aware feature ranking for large categorical data"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(cardrank::version));

  cardrank::RunConfig rank_cfg;
  InputOptions rank_opt;
  auto* rank = app.add_subcommand("rank", "Rank features against the target");
  add_input_flags(*rank, rank_cfg, rank_opt);
  add_rank_flags(*rank, rank_cfg, rank_opt);

  cardrank::RunConfig profile_cfg;
  InputOptions profile_opt;
  std::string profile_out;
  auto* profile = app.add_subcommand("profile", "Cardinality and coverage profile");
  add_input_flags(*profile, profile_cfg, profile_opt);
  profile->add_option("--out,-o", profile_out, "profile.json path (default stdout)");

  std::string reference;
  std::string candidate;
  std::string curve_path = "recall_curve.tsv";
  auto* evaluate = app.add_subcommand("evaluate", "Recall of a candidate ranking against a reference");
  evaluate->add_option("--reference", reference, "Reference ranking")->required();
  evaluate->add_option("--candidate", candidate, "Candidate ranking")->required();
  evaluate->add_option("--curve", curve_path, "Where to write the recall curve")
      ->capture_default_str();

  std::string spec_path;
  std::string synth_out;
  std::string manifest_path;
  std::string truth_path;
  auto* synth = app.add_subcommand("synth", "Generate a planted-signal dataset");
  synth->add_option("--spec", spec_path, "Generator spec (JSON)")->required();
  synth->add_option("--out", synth_out, "CSV output path, or -")->required();
  synth->add_option("--manifest", manifest_path, "Ground-truth manifest (JSON)");
  synth->add_option("--truth-ranking", truth_path, "Ground-truth ranking, one name per line");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : exit_usage;
  }

  try {
    if (*rank) return run_rank(rank_cfg, rank_opt);
    if (*profile) return run_profile(profile_cfg, profile_opt, profile_out);
    if (*evaluate) return run_evaluate(reference, candidate, curve_path);
    if (*synth) return run_synth(spec_path, synth_out, manifest_path, truth_path);
  } catch (const cardrank::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_usage;
  } catch (const cardrank::DataError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_data;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_data;
  }
  return exit_usage;
}
