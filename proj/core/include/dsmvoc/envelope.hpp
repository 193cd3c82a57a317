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

#ifndef DSMVOC_ENVELOPE_HPP_
#define DSMVOC_ENVELOPE_HPP_

#include <filesystem>
#include <string>
#include <vector>

#include "dsmvoc/types.hpp"

namespace dsmvoc {

/// Spectral-envelope analysis settings. gamma = 0 selects the mel-cepstral
/// representation with MLSA filtering; gamma = -1/3 the generalized form
/// with the corresponding cascade filter.
struct EnvelopeConfig {
  double alpha = 0.42;
  double gamma = 0.0;
  int order = 24;               // coefficients beyond c0
  double frame_shift = 0.005;   // seconds
  double frame_length = 0.025;  // seconds
  std::string window = "hamming";

  void validate() const;
  int stages() const;  // -1/gamma for the generalized filter, 0 otherwise
  bool operator==(const EnvelopeConfig&) const = default;
};

/// Per-frame envelope coefficients c0..c_order at a fixed frame shift.
/// Frame i is centered on sample i * frame_shift * rate.
struct EnvelopeTrack {
  std::vector<std::vector<double>> frames;
  std::vector<uint8_t> flagged;  // frames where the fit did not converge
  EnvelopeConfig config;

  size_t size() const { return frames.size(); }
};

/// Fits the spectral envelope frame by frame (iterative mel-cepstral
/// estimation; stops when the criterion changes by < 1e-6 relative or
/// after 30 iterations). Frames that fail to converge are flagged and
/// inherit the previous frame's coefficients. Frames with RMS below 1e-6
/// get zero coefficients with c0 at the silence floor ln(1e-5).
EnvelopeTrack analyze_envelope(const SpeechSignal& signal,
                               const EnvelopeConfig& cfg);

/// Removes the envelope from speech, leaving the residual. Exact inverse
/// of synthesis_filter for the same track.
SpeechSignal inverse_filter(const SpeechSignal& signal,
                            const EnvelopeTrack& env);

/// Runs the synthesis filter (MLSA for gamma = 0, the generalized cascade
/// otherwise) over an excitation. Coefficients are interpolated linearly
/// between frame centers. Throws if a coefficient frame is unstable,
/// naming the frame index.
SpeechSignal synthesis_filter(const SpeechSignal& excitation,
                              const EnvelopeTrack& env);

///// Text dump, one line per frame: c0..c_order space-separated.
void write_envelope_text(const EnvelopeTrack& env,
                         const std::filesystem::path& path);

/// Evaluates the model's log-magnitude envelope (dB) of one frame on a
/// dense grid of `bins` points from 0 to the Nyquist frequency; used by
/// diagnostics and the export command.
std::vector<double> envelope_spectrum_db(const std::vector<double>& coeffs,
                                         const EnvelopeConfig& cfg,
                                         size_t bins);

}  // namespace dsmvoc

#endif  // DSMVOC_ENVELOPE_HPP_
