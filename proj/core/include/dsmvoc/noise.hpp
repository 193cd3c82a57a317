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

#ifndef DSMVOC_NOISE_HPP_
#define DSMVOC_NOISE_HPP_

#include <cstdint>
#include <vector>

#include "dsmvoc/frames.hpp"
#include "dsmvoc/types.hpp"

namespace dsmvoc {

// The fixed high-band shaping filter plus the balance parameters of the
// stochastic component.
struct NoiseModel {
  std::vector<double> ar_coefficients;  // a1..ap, monic convention
  double ar_gain = 1.0;     // scales 1/A(z)-filtered white noise to unit variance
  double beta = 0.5;        // triangular envelope floor, in (0, 1]
  double band_gain_ratio = 1.0;  // RMS(high band) / RMS(low band) at training

  int order() const { return static_cast<int>(ar_coefficients.size()); }
  bool operator==(const NoiseModel&) const = default;
};

struct TriangularEnvelope {
  std::vector<double> values;  // length 2 x target period
  size_t apex_index = 0;       // = target period; value 1 there
  double floor = 0.5;          // value at both ends
};

// FFT size used for the mean periodogram the AR fit runs on.
inline constexpr size_t kNoiseFftSize = 1024;

// Adds one raw frame's periodogram (|FFT|^2 / frame length over
// kNoiseFftSize points) into `power_sum` (kNoiseFftSize/2 + 1 bins).
// Returns false when the frame is unusable (empty or longer than the FFT).
bool accumulate_frame_power(const std::vector<double>& frame,
                            std::vector<double>& power_sum);

// RMS(high band) / RMS(low band) of one raw frame, split at f_m on the
// true frequency axis.
double band_rms_ratio(const std::vector<double>& frame, int sample_rate,
                      double f_m);

// Fits an AR(order) filter by Levinson-Durbin on the autocorrelation of
// the mean periodogram of the given raw residual frames, brick-wall
// high-passed at f_max_voiced (bins below it floored 100 dB down). On an
// unstable fit the order is reduced by one and refitted, down to 2.
// Returns a NoiseModel with ar_coefficients and ar_gain filled in.
NoiseModel estimate_ar_filter(const std::vector<ResidualFrame>& frames,
                              int sample_rate, int order,
                              double f_max_voiced);

// Same fit from an already-averaged periodogram (kNoiseFftSize/2 + 1
// bins), for callers that accumulate frame power incrementally.
NoiseModel estimate_ar_filter_from_power(std::vector<double> mean_power,
                                         int sample_rate, int order,
                                         double f_max_voiced);

// Piecewise-linear triangle: floor at both ends, 1 at the apex (= target
// period, the frame's central GCI). Throws for periods below 8 samples.
TriangularEnvelope build_envelope(long target_period, double beta);

// Magnitude response of the fitted filter at the given frequencies.
std::vector<double> noise_filter_response_db(const NoiseModel& model,
                                             const std::vector<double>& freqs,
                                             int sample_rate);

// Seeded Gaussian noise, shaped by 1/A(z), normalized to unit variance by
// ar_gain, multiplied pointwise by the envelope and by band_gain_ratio.
// The scale never depends on the envelope's contents, so outputs for two
// envelopes from one seed differ exactly by their pointwise ratio.
std::vector<double> generate_noise_frame(size_t length,
                                         const NoiseModel& model,
                                         const std::vector<double>& envelope,
                                         uint64_t seed);

}  // namespace dsmvoc

#endif  // DSMVOC_NOISE_HPP_
