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

#ifndef DSMVOC_TRAIN_HPP_
#define DSMVOC_TRAIN_HPP_

#include <filesystem>
#include <vector>

#include "dsmvoc/envelope.hpp"
#include "dsmvoc/model.hpp"
#include "dsmvoc/types.hpp"

namespace dsmvoc {

struct TrainConfig {
  std::filesystem::path corpus_dir;
  double f0_min = 60.0;
  double f0_max = 240.0;
  double f_max_voiced = 4000.0;
  double coverage = 0.8;
  double f0_star_override = 0.0;  // 0: equality in the band bound
  int ar_order = 18;
  double beta = 0.5;
  bool center = true;  // subtract the dataset mean before PCA
  std::filesystem::path f0_dir;  // optional `<stem>.f0` files override the tracker
  EnvelopeConfig envelope;
  int jobs = 1;
};

struct TrainReport {
  size_t utterances = 0;
  double corpus_seconds = 0.0;
  size_t usable_frames = 0;
  size_t skipped_gcis = 0;
  size_t rejected_frames = 0;
  size_t flagged_envelope_frames = 0;
  size_t k_at_coverage = 0;
  double first_eigenvector_share = 0.0;
  double band_gain_ratio = 0.0;
  double ar_stopband_db = 0.0;  // attenuation at F_m - 500 Hz vs passband max
  DispersionCurve dispersion;
};

struct TrainResult {
  DsmModel model;
  TrainReport report;
};

// Runs the whole training path over every .wav under corpus_dir (sorted,
// non-recursive): envelope analysis, inverse filtering, pitch, GCIs, frame
// extraction and normalization, PCA, AR noise fit, band gain measurement.
// Utterances are processed in parallel with cfg.jobs workers; results are
// reduced in corpus order, so the model is bit-identical for any job
// count. Throws on an empty corpus or when no voiced frames survive.
TrainResult train_model(const TrainConfig& cfg);

}  // namespace dsmvoc

#endif  // DSMVOC_TRAIN_HPP_
