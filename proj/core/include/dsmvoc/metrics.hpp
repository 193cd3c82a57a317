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

#ifndef DSMVOC_METRICS_HPP_
#define DSMVOC_METRICS_HPP_

#include "dsmvoc/pitch.hpp"
#include "dsmvoc/types.hpp"

namespace dsmvoc {

// Mean of per-frame 10*log10(ref energy / error energy) over 20 ms frames
// (10 ms hop) whose reference RMS is at least 1% of the utterance RMS;
// per-frame values are clamped to [0, 80] dB. NaN when no frame qualifies.
double segmental_snr_db(const SpeechSignal& ref, const SpeechSignal& test);

// Median over voiced-in-both frames of |f0_test - f0_ref| / f0_ref; the
// tracks must share the hop. NaN when no frame qualifies.
double median_f0_deviation(const PitchTrack& ref, const PitchTrack& test);

// Median log-spectral distortion (dB, RMS across bands per frame) between
// the two signals over a triangular mel-spaced filterbank covering
// [0, f_limit]; frames below 1% of the reference utterance RMS are
// skipped. NaN when no frame qualifies.
double median_mel_lsd_db(const SpeechSignal& ref, const SpeechSignal& test,
                         double f_limit);

}  // namespace dsmvoc

#endif  // DSMVOC_METRICS_HPP_
