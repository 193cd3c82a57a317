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

#ifndef DSMVOC_FRAMES_HPP_
#define DSMVOC_FRAMES_HPP_

#include <filesystem>
#include <vector>

#include "dsmvoc/gci.hpp"
#include "dsmvoc/pitch.hpp"
#include "dsmvoc/types.hpp"

namespace dsmvoc {

// Pitch-normalization geometry. The usable normalization pitch is bounded
// by F0_star <= (F_N / F_m) * F0_min; upsampling a normalized frame to any
// admissible target period then keeps the deterministic band edge at or
// above F_m.
struct NormalizationConfig {
  double f_nyquist = 8000.0;  // F_N, Hz
  double f_max_voiced = 4000.0;  // F_m, Hz
  double f0_min = 0.0;           // Hz
  double f0_star = 0.0;          // normalization pitch, Hz
  int normalized_length = 0;     // round(2 * sample_rate / f0_star)

  bool operator==(const NormalizationConfig&) const = default;
};

// Picks F0_star = (F_N / F_m) * F0_min (the shortest admissible frame) or
// the given override when positive; the override must not exceed the
// bound. Throws if F_m exceeds the Nyquist frequency.
NormalizationConfig compute_normalization(int sample_rate, double f_max_voiced,
                                          double f0_min,
                                          double f0_star_override = 0.0);

struct ResidualFrame {
  std::vector<double> samples;
  long center_gci = 0;     // sample index in the source residual
  double source_f0 = 0.0;  // Hz at the GCI
  bool normalized = false;
};

struct ExtractResult {
  std::vector<ResidualFrame> frames;
  size_t skipped = 0;  // GCIs whose two-period support left the signal
};

// Cuts one GCI-centered, two-period, Blackman-windowed frame per GCI.
// Frame length is twice the local period rounded to even so the GCI lands
// at the center sample; boundary GCIs are skipped and counted.
ExtractResult extract_frames(const SpeechSignal& residual,
                             const GciSequence& gci, const PitchTrack& pitch);

// Resamples a raw frame to cfg.normalized_length (band-limited) and scales
// it to unit L2 norm. Throws on zero-energy frames.
ResidualFrame normalize_frame(const ResidualFrame& frame,
                              const NormalizationConfig& cfg);

// Binary matrix dump: u32 row count, u32 columns, then row-major
// little-endian f64 samples.
void write_dataset(const std::vector<ResidualFrame>& frames,
                   const std::filesystem::path& path);

}  // namespace dsmvoc

#endif  // DSMVOC_FRAMES_HPP_
