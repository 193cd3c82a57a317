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

#include "dsmvoc/noise.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include "dsmvoc/dsp.hpp"
#include "dsmvoc/rng.hpp"

namespace dsmvoc {

namespace {

constexpr double kStopbandFloor = 1e-10;  // -100 dB relative power floor

// Unit-variance normalization for the all-pole filter: the energy of its
// impulse response, accumulated until it has decayed away.
double impulse_response_energy(const std::vector<double>& a) {
  const size_t p = a.size();
  std::vector<double> state(p, 0.0);  // state[k] = y[n-1-k]
  double energy = 0.0;
  for (size_t n = 0; n < 65536; ++n) {
    double y = n == 0 ? 1.0 : 0.0;
    for (size_t k = 0; k < p; ++k) y -= a[k] * state[k];
    if (p > 0) {
      for (size_t k = p - 1; k > 0; --k) state[k] = state[k - 1];
      state[0] = y;
    }
    energy += y * y;
    if (n > 64 && y * y < 1e-24 * energy) break;
  }
  return energy;
}

}  // namespace

bool accumulate_frame_power(const std::vector<double>& frame,
                            std::vector<double>& power_sum) {
  if (frame.empty() || frame.size() > kNoiseFftSize) return false;
  if (power_sum.size() != kNoiseFftSize / 2 + 1)
    power_sum.assign(kNoiseFftSize / 2 + 1, 0.0);
  auto spec = dsp::fft_real(frame, kNoiseFftSize);
  const double inv_len = 1.0 / static_cast<double>(frame.size());
  for (size_t i = 0; i < power_sum.size(); ++i)
    power_sum[i] += std::norm(spec[i]) * inv_len;
  return true;
}

double band_rms_ratio(const std::vector<double>& frame, int sample_rate,
                      double f_m) {
  const size_t nfft = std::max(kNoiseFftSize, dsp::next_pow2(frame.size()));
  const auto spec = dsp::fft_real(frame, nfft);
  const size_t edge =
      static_cast<size_t>(std::lround(f_m / sample_rate * nfft));
  double lo = 0.0, hi = 0.0;
  for (size_t i = 1; i <= nfft / 2; ++i)
    (i <= edge ? lo : hi) += std::norm(spec[i]);
  if (lo <= 0.0) throw Error("band_rms_ratio: empty low band");
  return std::sqrt(hi / lo);
}

NoiseModel estimate_ar_filter(const std::vector<ResidualFrame>& frames,
                              int sample_rate, int order,
                              double f_max_voiced) {
  if (frames.empty()) throw Error("estimate_ar_filter: no frames");
  std::vector<double> power_sum(kNoiseFftSize / 2 + 1, 0.0);
  size_t used = 0;
  for (const auto& frame : frames)
    if (accumulate_frame_power(frame.samples, power_sum)) ++used;
  if (used == 0) throw Error("estimate_ar_filter: no usable frames");
  for (double& p : power_sum) p /= static_cast<double>(used);
  return estimate_ar_filter_from_power(std::move(power_sum), sample_rate,
                                       order, f_max_voiced);
}

NoiseModel estimate_ar_filter_from_power(std::vector<double> mean_power,
                                         int sample_rate, int order,
                                         double f_max_voiced) {
  if (order < 2) throw Error("estimate_ar_filter: order must be >= 2");
  if (sample_rate <= 0) throw Error("estimate_ar_filter: bad sample rate");
  if (mean_power.size() != kNoiseFftSize / 2 + 1)
    throw Error("estimate_ar_filter: unexpected periodogram size");

  // Brick-wall high pass: the low band is floored rather than zeroed so
  // the autocorrelation stays positive definite.
  const double peak = *std::max_element(mean_power.begin(), mean_power.end());
  if (peak <= 0.0) throw Error("estimate_ar_filter: all-zero spectrum");
  const size_t edge_bin = static_cast<size_t>(
      std::lround(f_max_voiced / sample_rate * kNoiseFftSize));
  for (size_t i = 0; i < mean_power.size() && i < edge_bin; ++i)
    mean_power[i] = peak * kStopbandFloor;
  for (size_t i = 0; i < mean_power.size(); ++i)
    mean_power[i] = std::max(mean_power[i], peak * kStopbandFloor);

  // Autocorrelation = inverse transform of the power spectrum.
  std::vector<std::complex<double>> full(kNoiseFftSize);
  for (size_t i = 0; i <= kNoiseFftSize / 2; ++i) {
    full[i] = mean_power[i];
    if (i > 0 && i < kNoiseFftSize / 2) full[kNoiseFftSize - i] = mean_power[i];
  }
  dsp::fft(full, true);
  std::vector<double> autocorr(static_cast<size_t>(order) + 1);
  for (size_t i = 0; i < autocorr.size(); ++i) autocorr[i] = full[i].real();

  NoiseModel model;
  for (int p = order; p >= 2; --p) {
    const auto fit = dsp::levinson(
        std::span<const double>(autocorr.data(), static_cast<size_t>(p) + 1),
        p);
    if (fit.stable) {
      model.ar_coefficients = fit.coeffs;
      break;
    }
    if (p == 2)
      throw Error("estimate_ar_filter: no stable fit down to order 2");
  }
  model.ar_gain =
      1.0 / std::sqrt(impulse_response_energy(model.ar_coefficients));
  return model;
}

TriangularEnvelope build_envelope(long target_period, double beta) {
  if (target_period < 8)
    throw Error("build_envelope: degenerate period " +
                std::to_string(target_period));
  if (!(beta > 0.0) || beta > 1.0)
    throw Error("build_envelope: beta must be in (0, 1]");
  TriangularEnvelope env;
  env.apex_index = static_cast<size_t>(target_period);
  env.floor = beta;
  const size_t length = static_cast<size_t>(2 * target_period);
  env.values.resize(length);
  const double apex = static_cast<double>(env.apex_index);
  const double tail = static_cast<double>(length - 1 - env.apex_index);
  for (size_t i = 0; i < length; ++i) {
    const double rel = i <= env.apex_index
                           ? static_cast<double>(i) / apex
                           : static_cast<double>(length - 1 - i) / tail;
    env.values[i] = beta + (1.0 - beta) * rel;
  }
  return env;
}

std::vector<double> noise_filter_response_db(const NoiseModel& model,
                                             const std::vector<double>& freqs,
                                             int sample_rate) {
  std::vector<double> out(freqs.size());
  for (size_t i = 0; i < freqs.size(); ++i) {
    const double w = 2.0 * std::numbers::pi * freqs[i] / sample_rate;
    std::complex<double> a(1.0, 0.0);
    for (size_t k = 0; k < model.ar_coefficients.size(); ++k)
      a += model.ar_coefficients[k] *
           std::exp(std::complex<double>(0.0, -w * static_cast<double>(k + 1)));
    out[i] = 20.0 * std::log10(model.ar_gain / std::abs(a));
  }
  return out;
}

std::vector<double> generate_noise_frame(size_t length,
                                         const NoiseModel& model,
                                         const std::vector<double>& envelope,
                                         uint64_t seed) {
  if (envelope.size() != length)
    throw Error("generate_noise_frame: envelope length mismatch");
  NoiseSource rng(seed);
  std::vector<double> out(length);
  const size_t p = model.ar_coefficients.size();
  std::vector<double> state(p, 0.0);
  for (size_t n = 0; n < length; ++n) {
    double y = rng.next_gaussian();
    for (size_t k = 0; k < p && k < n; ++k)
      y -= model.ar_coefficients[k] * state[k];
    if (p > 0) {
      for (size_t k = p - 1; k > 0; --k) state[k] = state[k - 1];
      state[0] = y;
    }
    out[n] = model.band_gain_ratio * model.ar_gain * envelope[n] * y;
  }
  return out;
}

}  // namespace dsmvoc
