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

#include "dsmvoc/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <vector>

#include "dsmvoc/dsp.hpp"

namespace dsmvoc {

namespace {

constexpr double kActivityGate = 0.01;  // of utterance RMS

double median(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  const size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<long>(mid), v.end());
  if (v.size() % 2 == 1) return v[mid];
  const double hi = v[mid];
  const double lo = *std::max_element(v.begin(), v.begin() + static_cast<long>(mid));
  return 0.5 * (lo + hi);
}

// Triangular filters with centers equally spaced on the mel scale.
std::vector<std::vector<double>> mel_filterbank(size_t n_filters, size_t nfft,
                                                int rate, double f_limit) {
  auto hz_to_mel = [](double f) { return 2595.0 * std::log10(1.0 + f / 700.0); };
  auto mel_to_hz = [](double m) {
    return 700.0 * (std::pow(10.0, m / 2595.0) - 1.0);
  };
  const double mel_max = hz_to_mel(f_limit);
  std::vector<double> edges(n_filters + 2);
  for (size_t i = 0; i < edges.size(); ++i)
    edges[i] = mel_to_hz(mel_max * static_cast<double>(i) /
                         static_cast<double>(n_filters + 1));
  const size_t n_bins = nfft / 2 + 1;
  std::vector<std::vector<double>> bank(n_filters,
                                        std::vector<double>(n_bins, 0.0));
  for (size_t f = 0; f < n_filters; ++f) {
    const double lo = edges[f], mid = edges[f + 1], hi = edges[f + 2];
    for (size_t b = 0; b < n_bins; ++b) {
      const double freq = static_cast<double>(b) * rate / nfft;
      if (freq <= lo || freq >= hi) continue;
      bank[f][b] = freq <= mid ? (freq - lo) / (mid - lo)
                               : (hi - freq) / (hi - mid);
    }
  }
  return bank;
}

}  // namespace

double segmental_snr_db(const SpeechSignal& ref, const SpeechSignal& test) {
  if (ref.sample_rate != test.sample_rate)
    throw Error("segmental_snr_db: sample rates differ");
  const size_t n = std::min(ref.samples.size(), test.samples.size());
  const int rate = ref.sample_rate;
  const size_t flen = static_cast<size_t>(rate / 50);  // 20 ms
  const size_t hop = flen / 2;
  if (n < flen) return std::numeric_limits<double>::quiet_NaN();

  double total = 0.0;
  for (size_t i = 0; i < n; ++i) total += ref.samples[i] * ref.samples[i];
  const double gate = kActivityGate * std::sqrt(total / static_cast<double>(n));

  double acc = 0.0;
  size_t count = 0;
  for (size_t start = 0; start + flen <= n; start += hop) {
    double e_ref = 0.0, e_err = 0.0;
    for (size_t k = start; k < start + flen; ++k) {
      const double r = ref.samples[k];
      const double d = r - test.samples[k];
      e_ref += r * r;
      e_err += d * d;
    }
    const double frame_rms = std::sqrt(e_ref / static_cast<double>(flen));
    if (frame_rms < gate) continue;
    double snr = e_err > 0.0 ? 10.0 * std::log10(e_ref / e_err) : 80.0;
    snr = std::clamp(snr, 0.0, 80.0);
    acc += snr;
    ++count;
  }
  return count ? acc / static_cast<double>(count)
               : std::numeric_limits<double>::quiet_NaN();
}

double median_f0_deviation(const PitchTrack& ref, const PitchTrack& test) {
  std::vector<double> devs;
  const size_t n = std::min(ref.values.size(), test.values.size());
  for (size_t i = 0; i < n; ++i) {
    const auto& a = ref.values[i];
    const auto& b = test.values[i];
    if (a.voiced && b.voiced && a.f0 > 0.0)
      devs.push_back(std::abs(b.f0 - a.f0) / a.f0);
  }
  return median(std::move(devs));
}

double median_mel_lsd_db(const SpeechSignal& ref, const SpeechSignal& test,
                         double f_limit) {
  if (ref.sample_rate != test.sample_rate)
    throw Error("median_mel_lsd_db: sample rates differ");
  const int rate = ref.sample_rate;
  const size_t n = std::min(ref.samples.size(), test.samples.size());
  const size_t flen = static_cast<size_t>(rate / 40);  // 25 ms
  const size_t hop = static_cast<size_t>(rate / 200);  // 5 ms
  if (n < flen) return std::numeric_limits<double>::quiet_NaN();
  const size_t nfft = dsp::next_pow2(flen);
  const auto window = dsp::hamming_window(flen);
  const auto bank = mel_filterbank(24, nfft, rate, f_limit);

  double total = 0.0;
  for (size_t i = 0; i < n; ++i) total += ref.samples[i] * ref.samples[i];
  const double gate = kActivityGate * std::sqrt(total / static_cast<double>(n));

  std::vector<double> w_ref(flen), w_test(flen), lsd;
  for (size_t start = 0; start + flen <= n; start += hop) {
    double e_ref = 0.0;
    for (size_t k = 0; k < flen; ++k) {
      w_ref[k] = ref.samples[start + k] * window[k];
      w_test[k] = test.samples[start + k] * window[k];
      e_ref += ref.samples[start + k] * ref.samples[start + k];
    }
    if (std::sqrt(e_ref / static_cast<double>(flen)) < gate) continue;
    const auto s_ref = dsp::fft_real(w_ref, nfft);
    const auto s_test = dsp::fft_real(w_test, nfft);
    double acc = 0.0;
    for (const auto& filt : bank) {
      double p_ref = 1e-20, p_test = 1e-20;
      for (size_t b = 0; b < filt.size(); ++b) {
        if (filt[b] == 0.0) continue;
        p_ref += filt[b] * std::norm(s_ref[b]);
        p_test += filt[b] * std::norm(s_test[b]);
      }
      const double d = 10.0 * std::log10(p_ref / p_test);
      acc += d * d;
    }
    lsd.push_back(std::sqrt(acc / static_cast<double>(bank.size())));
  }
  return median(std::move(lsd));
}

}  // namespace dsmvoc
