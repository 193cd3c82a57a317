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

#ifndef DSMVOC_MODEL_HPP_
#define DSMVOC_MODEL_HPP_

#include <filesystem>

#include "dsmvoc/eigenbasis.hpp"
#include "dsmvoc/envelope.hpp"
#include "dsmvoc/frames.hpp"
#include "dsmvoc/noise.hpp"
#include "dsmvoc/types.hpp"

namespace dsmvoc {

// Everything a trained voice needs for synthesis.
struct DsmModel {
  int sample_rate = 16000;
  double f0_min = 0.0;  // pitch search range used at training
  double f0_max = 0.0;
  NormalizationConfig norm;
  EnvelopeConfig envelope;
  EigenBasis basis;
  NoiseModel noise;
  // Mean |w1| over the training set; the implicit first-eigenvector weight
  // when synthesizing with k = 0.
  double mean_abs_w1 = 0.0;

  bool operator==(const DsmModel& other) const;
};

// `DSMB` container: magic, u16 version, then config / eigenbasis / noise
// blocks with u32 length prefixes and little-endian f64 payloads. The
// round trip is bit-exact. Loading rejects bad magic, unknown versions,
// and truncation (the error names the block that ended early).
void save_model(const DsmModel& model, const std::filesystem::path& path);
DsmModel load_model(const std::filesystem::path& path);

}  // namespace dsmvoc

#endif  // DSMVOC_MODEL_HPP_
