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

#ifndef CARDRANK_SYNTHGEN_HPP
#define CARDRANK_SYNTHGEN_HPP

#include <algorithm>
#include <array>
#include <charconv>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <ostream>
#include <random>
#include <streambuf>
#include <string>
#include <vector>

#include <json.hpp>

#include "cardrank/error.hpp"
#include "cardrank/hashing.hpp"

namespace cardrank {

// Planted-signal categorical data with a binary target.
struct SynthSpec {
  struct Informative {
    std::uint32_t cardinality = 2;
    // Per-row chance the target-driven value is replaced by a uniform draw.
    double flip_probability = 0.0;
  };

  std::size_t n_rows = 1000;
  double positive_rate = 0.1;
  std::vector<Informative> informative;
  std::vector<std::uint32_t> noise;
  // Two balanced binary features whose XOR is the target.
  bool xor_pair = false;
  std::uint64_t seed = 0;

  void validate() const {
    if (n_rows < 1) throw ConfigError("synth: n_rows must be >= 1");
    if (!(positive_rate >= 0.0 && positive_rate <= 1.0)) {
      throw ConfigError("synth: positive_rate must be in [0, 1]");
    }
    for (const auto& f : informative) {
      if (f.cardinality < 1) throw ConfigError("synth: cardinalities must be >= 1");
      if (!(f.flip_probability >= 0.0 && f.flip_probability <= 1.0)) {
        throw ConfigError("synth: flip_probability must be in [0, 1]");
      }
    }
    for (auto c : noise) {
      if (c < 1) throw ConfigError("synth: cardinalities must be >= 1");
    }
  }

  static SynthSpec from_json(const nlohmann::json& j) {
    SynthSpec s;
    try {
      s.n_rows = j.at("n_rows").get<std::size_t>();
      s.positive_rate = j.value("positive_rate", 0.1);
      s.seed = j.value("seed", std::uint64_t{0});
      s.xor_pair = j.value("xor_pair", false);
      for (const auto& f : j.value("informative", nlohmann::json::array())) {
        s.informative.push_back({f.at("cardinality").get<std::uint32_t>(),
                                 f.value("flip_probability", 0.0)});
      }
      for (const auto& c : j.value("noise", nlohmann::json::array())) {
        s.noise.push_back(c.get<std::uint32_t>());
      }
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(std::string("synth: invalid spec: ") + e.what());
    }
    s.validate();
    return s;
  }

  [[nodiscard]] nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json inf = nlohmann::ordered_json::array();
    for (const auto& f : informative) {
      inf.push_back({{"cardinality", f.cardinality}, {"flip_probability", f.flip_probability}});
    }
    return {{"n_rows", n_rows}, {"positive_rate", positive_rate}, {"informative", inf},
            {"noise", noise}, {"xor_pair", xor_pair}, {"seed", seed}};
  }
};

inline constexpr const char* synth_target_name = "target";

inline std::string informative_name(std::size_t i) { return "informative_" + std::to_string(i); }
inline std::string noise_name(std::size_t i) { return "noise_" + std::to_string(i); }

// Row-at-a-time generator. Informative features map each value to one target
// class through a fixed random surjection; a row takes a uniform value from
// its class's preimage, or with probability p a uniform value overall.
class SynthGenerator {
 public:
  explicit SynthGenerator(SynthSpec spec) : spec_(std::move(spec)) {
    spec_.validate();
    StreamKey key;
    key.seed = spec_.seed;
    key.purpose = StreamPurpose::synth;
    rng_ = make_rng(key);
    for (const auto& f : spec_.informative) {
      std::vector<std::uint32_t> perm(f.cardinality);
      std::iota(perm.begin(), perm.end(), 0u);
      std::shuffle(perm.begin(), perm.end(), rng_);
      Preimage pre;
      for (std::size_t k = 0; k < perm.size(); ++k) pre[k % 2].push_back(perm[k]);
      preimages_.push_back(std::move(pre));
    }
    names_ = column_names(spec_);
    values_.resize(names_.size());
  }

  [[nodiscard]] const SynthSpec& spec() const noexcept { return spec_; }
  [[nodiscard]] const std::vector<std::string>& names() const noexcept { return names_; }

  // Values of the next row in column order; the target is last.
  const std::vector<std::uint32_t>& next_row() {
    std::bernoulli_distribution positive(spec_.positive_rate);
    const std::uint32_t t = positive(rng_) ? 1 : 0;
    std::size_t col = 0;
    for (std::size_t i = 0; i < spec_.informative.size(); ++i) {
      const auto& f = spec_.informative[i];
      const auto& pre = preimages_[i][t];
      std::bernoulli_distribution flip(f.flip_probability);
      if (flip(rng_) || pre.empty()) {
        values_[col++] = uniform(f.cardinality);
      } else {
        values_[col++] = pre[uniform(static_cast<std::uint32_t>(pre.size()))];
      }
    }
    for (auto c : spec_.noise) values_[col++] = uniform(c);
    if (spec_.xor_pair) {
      const std::uint32_t a = uniform(2);
      values_[col++] = a;
      values_[col++] = a ^ t;
    }
    values_[col] = t;
    return values_;
  }

  static std::vector<std::string> column_names(const SynthSpec& spec) {
    std::vector<std::string> names;
    for (std::size_t i = 0; i < spec.informative.size(); ++i) names.push_back(informative_name(i));
    for (std::size_t i = 0; i < spec.noise.size(); ++i) names.push_back(noise_name(i));
    if (spec.xor_pair) {
      names.emplace_back("xor_a");
      names.emplace_back("xor_b");
    }
    names.emplace_back(synth_target_name);
    return names;
  }

  static void append_header(std::string& out, const std::vector<std::string>& names) {
    for (std::size_t i = 0; i < names.size(); ++i) {
      if (i) out.push_back(',');
      out += names[i];
    }
    out.push_back('\n');
  }

  void append_row(std::string& out) {
    const auto& row = next_row();
    char buf[16];
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out.push_back(',');
      const auto res = std::to_chars(buf, buf + sizeof buf, row[i]);
      out.append(buf, res.ptr);
    }
    out.push_back('\n');
  }

 private:
  using Preimage = std::array<std::vector<std::uint32_t>, 2>;

  std::uint32_t uniform(std::uint32_t c) {
    if (c <= 1) return 0;
    return std::uniform_int_distribution<std::uint32_t>(0, c - 1)(rng_);
  }

  SynthSpec spec_;
  Rng rng_;
  std::vector<Preimage> preimages_;
  std::vector<std::string> names_;
  std::vector<std::uint32_t> values_;
};

// Ground truth: informative features by ascending flip probability (ties by
// index), then the XOR pair, then noise.
inline nlohmann::ordered_json synth_manifest(const SynthSpec& spec) {
  std::vector<std::size_t> idx(spec.informative.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return spec.informative[a].flip_probability < spec.informative[b].flip_probability;
  });
  nlohmann::ordered_json relevant = nlohmann::ordered_json::array();
  nlohmann::ordered_json flips = nlohmann::ordered_json::object();
  nlohmann::ordered_json truth = nlohmann::ordered_json::array();
  for (auto i : idx) {
    relevant.push_back(informative_name(i));
    truth.push_back(informative_name(i));
  }
  for (std::size_t i = 0; i < spec.informative.size(); ++i) {
    flips[informative_name(i)] = spec.informative[i].flip_probability;
  }
  nlohmann::ordered_json xor_members = nlohmann::ordered_json::array();
  if (spec.xor_pair) {
    xor_members = {"xor_a", "xor_b"};
    truth.push_back("xor_a");
    truth.push_back("xor_b");
  }
  nlohmann::ordered_json noise = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < spec.noise.size(); ++i) {
    noise.push_back(noise_name(i));
    truth.push_back(noise_name(i));
  }
  return {{"target", synth_target_name}, {"relevant", relevant}, {"flip_probability", flips},
          {"xor_pair", xor_members},     {"noise", noise},       {"truth_ranking", truth},
          {"spec", spec.to_json()}};
}

inline void generate(const SynthSpec& spec, std::ostream& out) {
  SynthGenerator gen(spec);
  std::string chunk;
  SynthGenerator::append_header(chunk, gen.names());
  for (std::size_t r = 0; r < spec.n_rows; ++r) {
    gen.append_row(chunk);
    if (chunk.size() > (1 << 20)) {
      out.write(chunk.data(), static_cast<std::streamsize>(chunk.size()));
      chunk.clear();
    }
  }
  out.write(chunk.data(), static_cast<std::streamsize>(chunk.size()));
}

// Read-only stream buffer producing the same bytes as generate() on demand,
// so arbitrarily long datasets can be fed to a reader without touching disk.
class SynthStreamBuf : public std::streambuf {
 public:
  explicit SynthStreamBuf(const SynthSpec& spec) : gen_(spec), remaining_(spec.n_rows) {
    SynthGenerator::append_header(chunk_, gen_.names());
    expose();
  }

 protected:
  int_type underflow() override {
    if (gptr() < egptr()) return traits_type::to_int_type(*gptr());
    chunk_.clear();
    while (remaining_ > 0 && chunk_.size() < (1 << 16)) {
      gen_.append_row(chunk_);
      --remaining_;
    }
    if (chunk_.empty()) return traits_type::eof();
    expose();
    return traits_type::to_int_type(*gptr());
  }

 private:
  void expose() { setg(chunk_.data(), chunk_.data(), chunk_.data() + chunk_.size()); }

  SynthGenerator gen_;
  std::size_t remaining_;
  std::string chunk_;
};

}  // namespace cardrank

#endif  // CARDRANK_SYNTHGEN_HPP
