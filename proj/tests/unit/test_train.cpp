// Copyright 2026 The dsmvoc Authors
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

#include "dsmvoc/train.hpp"

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "dsmvoc/model.hpp"
#include "dsmvoc/rng.hpp"
#include "dsmvoc/types.hpp"
#include "dsmvoc/wav.hpp"
#include "synthetic_corpus.hpp"
#include "test_env.hpp"

using namespace dsmvoc;
namespace fs = std::filesystem;

namespace {

std::vector<char> file_bytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  return std::vector<char>(std::istreambuf_iterator<char>(in),
                           std::istreambuf_iterator<char>());
}

TrainConfig shared_config() {
  TrainConfig cfg;
  cfg.corpus_dir = testing::shared_model().corpus_dir;
  cfg.f0_min = 100.0;
  cfg.f0_max = 240.0;
  return cfg;
}

}  // namespace

TEST_CASE("training reports a plausible summary of the corpus") {
  const auto& sm = testing::shared_model();
  const auto& rep = sm.report;

  CHECK(rep.utterances == 2);
  CHECK(rep.corpus_seconds == doctest::Approx(24.0).epsilon(0.05));
  CHECK(rep.usable_frames > 1000);
  // Extraction losses stay marginal on a clean corpus.
  CHECK(rep.skipped_gcis + rep.rejected_frames < rep.usable_frames / 20);
  CHECK(rep.flagged_envelope_frames < rep.usable_frames / 20);

  CHECK(rep.k_at_coverage >= 1);
  CHECK(rep.k_at_coverage <= sm.model.basis.eigenvectors.size());
  CHECK(rep.first_eigenvector_share > 0.15);
  CHECK(rep.first_eigenvector_share < 0.6);

  const auto& cum = rep.dispersion.cumulative_fraction;
  REQUIRE(!cum.empty());
  CHECK(cum.front() == doctest::Approx(rep.first_eigenvector_share));
  CHECK(cum.back() == doctest::Approx(1.0));
  for (size_t i = 1; i < cum.size(); ++i) CHECK(cum[i] >= cum[i - 1] - 1e-12);
  // k_at_coverage is the smallest k reaching the 80% default.
  CHECK(cum[rep.k_at_coverage - 1] >= 0.8 - 1e-9);
  if (rep.k_at_coverage >= 2) CHECK(cum[rep.k_at_coverage - 2] < 0.8);

  CHECK(rep.band_gain_ratio > 0.1);
  CHECK(rep.band_gain_ratio < 1.0);
  CHECK(rep.ar_stopband_db >= 20.0);
}

TEST_CASE("the trained model is internally consistent") {
  const auto& m = testing::shared_model().model;
  CHECK(m.sample_rate == 16000);
  CHECK(m.f0_min == 100.0);
  CHECK(m.f0_max == 240.0);
  CHECK(m.norm.f0_star == doctest::Approx(200.0));
  CHECK(m.norm.normalized_length == 160);
  CHECK(m.mean_abs_w1 > 0.0);
  CHECK(m.basis.mean.size() == 160);
  CHECK(m.noise.order() >= 2);
  CHECK(m.noise.band_gain_ratio ==
        doctest::Approx(testing::shared_model().report.band_gain_ratio));
}

TEST_CASE("training is bit-identical across job counts and reruns") {
  const auto& sm = testing::shared_model();
  TrainConfig cfg = shared_config();
  cfg.jobs = 3;
  const auto again = train_model(cfg);
  CHECK(again.model == sm.model);

  const auto dir = testing::scratch_dir("train_determinism");
  save_model(sm.model, dir / "a.dsmb");
  save_model(again.model, dir / "b.dsmb");
  CHECK(file_bytes(dir / "a.dsmb") == file_bytes(dir / "b.dsmb"));

  // And the file round trip restores the exact model.
  CHECK(load_model(dir / "a.dsmb") == sm.model);
}

TEST_CASE("a corpus of pure noise fails with no voiced frames") {
  const auto dir = testing::scratch_dir("train_noise_corpus");
  for (int u = 0; u < 2; ++u) {
    SpeechSignal n;
    n.sample_rate = 16000;
    n.samples.resize(32000);
    NoiseSource rng(100 + u);
    for (double& s : n.samples) s = 0.1 * rng.next_gaussian();
    write_wav(n, dir / ("n0" + std::to_string(u) + ".wav"));
  }
  TrainConfig cfg = shared_config();
  cfg.corpus_dir = dir;
  CHECK_THROWS_WITH_AS(train_model(cfg),
                       doctest::Contains("no voiced frames"), Error);
}

TEST_CASE("external f0 files override the built-in tracker") {
  // All-unvoiced override tracks starve the extractor even though the
  // audio itself is voiced: proof the files are consumed.
  const auto f0_dir = testing::scratch_dir("train_f0_override");
  const auto& sm = testing::shared_model();
  for (const auto& e : fs::directory_iterator(sm.corpus_dir)) {
    if (e.path().extension() != ".wav") continue;
    std::ofstream out(f0_dir / (e.path().stem().string() + ".f0"));
    for (int i = 0; i < 3000; ++i) out << i * 0.005 << " 0.0 0\n";
  }
  TrainConfig cfg = shared_config();
  cfg.f0_dir = f0_dir;
  CHECK_THROWS_WITH_AS(train_model(cfg),
                       doctest::Contains("no voiced frames"), Error);
}

TEST_CASE("training rejects missing, empty, and wrong-rate corpora") {
  TrainConfig cfg = shared_config();
  cfg.corpus_dir = "/nonexistent/dsmvoc-corpus";
  CHECK_THROWS_WITH_AS(train_model(cfg),
                       doctest::Contains("corpus directory not found"), Error);

  cfg.corpus_dir = testing::scratch_dir("train_empty_corpus");
  CHECK_THROWS_WITH_AS(train_model(cfg), doctest::Contains("no .wav files"),
                       Error);

  const auto dir = testing::scratch_dir("train_bad_rate");
  SpeechSignal s8k;
  s8k.sample_rate = 8000;
  s8k.samples.assign(8000, 0.0);
  write_wav(s8k, dir / "u00.wav");
  cfg.corpus_dir = dir;
  CHECK_THROWS_WITH_AS(train_model(cfg),
                       doctest::Contains("needs 16000 Hz input, got 8000"),
                       Error);
}
