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

#ifndef DSMVOC_PITCH_HPP_
#define DSMVOC_PITCH_HPP_

#include <filesystem>
#include <vector>

#include "dsmvoc/types.hpp"

namespace dsmvoc {

struct PitchFrame {
  double time = 0.0;  // seconds, frame center
  double f0 = 0.0;    // Hz; 0 when unvoiced
  bool voiced = false;
};

struct PitchTrack {
  std::vector<PitchFrame> values;
  double hop = 0.01;  // seconds
  double f0_min = 0.0;
  double f0_max = 0.0;

  size_t size() const { return values.size(); }

  // Linearly interpolated f0 at an arbitrary time, using voiced frames
  // only; returns 0 outside any voiced region.
  double f0_at(double t) const;
  bool voiced_at(double t) const;
};

// Normalized-autocorrelation tracker: 40 ms analysis window, 10 ms hop,
// voicing = peak >= 0.30 plus an energy gate (frame RMS > 0.02 x utterance
// RMS), parabolic peak refinement, median-5 smoothing of the contour.
PitchTrack estimate_pitch(const SpeechSignal& signal, double f0_min,
                          double f0_max);

// Text pitch files: one line per frame, `time_s f0_hz voiced{0|1}`.
PitchTrack read_pitch_file(const std::filesystem::path& path, double f0_min,
                           double f0_max);
void write_pitch_file(const PitchTrack& track,
                      const std::filesystem::path& path);

}  // namespace dsmvoc

#endif  // DSMVOC_PITCH_HPP_
