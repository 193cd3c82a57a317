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

#include "dsmvoc/dsp.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "dsmvoc/types.hpp"

namespace dsmvoc::dsp {

namespace {
constexpr double kPi = std::numbers::pi;
}  // namespace

void fft(std::vector<std::complex<double>>& data, bool inverse) {
  const size_t n = data.size();
  if (n == 0) return;
  if ((n & (n - 1)) != 0) throw Error("fft: size must be a power of two");

  // Bit-reversal permutation.
  for (size_t i = 1, j = 0; i < n; ++i) {
    size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(data[i], data[j]);
  }

  for (size_t len = 2; len <= n; len <<= 1) {
    const double ang = 2.0 * kPi / static_cast<double>(len) *
                       (inverse ? 1.0 : -1.0);
    const std::complex<double> wlen(std::cos(ang), std::sin(ang));
    for (size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (size_t k = 0; k < len / 2; ++k) {
        const std::complex<double> u = data[i + k];
        const std::complex<double> v = data[i + k + len / 2] * w;
        data[i + k] = u + v;
        data[i + k + len / 2] = u - v;
        w *= wlen;
      }
    }
  }
  if (inverse) {
    const double inv = 1.0 / static_cast<double>(n);
    for (auto& c : data) c *= inv;
  }
}

std::vector<std::complex<double>> fft_real(std::span<const double> x,
                                           size_t nfft) {
  std::vector<std::complex<double>> data(nfft, {0.0, 0.0});
  const size_t n = std::min(x.size(), nfft);
  for (size_t i = 0; i < n; ++i) data[i] = {x[i], 0.0};
  fft(data, false);
  return data;
}

std::vector<double> ifft_symmetric(std::span<const double> spectrum) {
  std::vector<std::complex<double>> data(spectrum.size());
  for (size_t i = 0; i < spectrum.size(); ++i) data[i] = {spectrum[i], 0.0};
  fft(data, true);
  std::vector<double> out(spectrum.size());
  for (size_t i = 0; i < spectrum.size(); ++i) out[i] = data[i].real();
  return out;
}

std::vector<double> power_spectrum(std::span<const double> x, size_t nfft) {
  auto spec = fft_real(x, nfft);
  std::vector<double> p(nfft);
  for (size_t i = 0; i < nfft; ++i) p[i] = std::norm(spec[i]);
  return p;
}

namespace {

std::vector<double> cosine_window(size_t length, double a0, double a1,
                                  double a2) {
  std::vector<double> w(length);
  if (length == 1) {
    w[0] = 1.0;
    return w;
  }
  const double step = 2.0 * kPi / static_cast<double>(length - 1);
  for (size_t i = 0; i < length; ++i) {
    const double t = step * static_cast<double>(i);
    w[i] = a0 - a1 * std::cos(t) + a2 * std::cos(2.0 * t);
  }
  return w;
}

}  // namespace

std::vector<double> blackman_window(size_t length) {
  return cosine_window(length, 0.42, 0.5, 0.08);
}

std::vector<double> hamming_window(size_t length) {
  return cosine_window(length, 0.54, 0.46, 0.0);
}

std::vector<double> hanning_window(size_t length) {
  return cosine_window(length, 0.5, 0.5, 0.0);
}

double kaiser_bessel_i0(double x) {
  // Power series; converges quickly for the argument range used here.
  double sum = 1.0;
  double term = 1.0;
  const double half_x = 0.5 * x;
  for (int k = 1; k < 64; ++k) {
    term *= (half_x / k) * (half_x / k);
    sum += term;
    if (term < 1e-16 * sum) break;
  }
  return sum;
}

std::vector<double> resample(std::span<const double> in, size_t out_len) {
  const size_t in_len = in.size();
  if (out_len == 0 || in_len == 0) return std::vector<double>(out_len, 0.0);
  if (out_len == in_len) return std::vector<double>(in.begin(), in.end());

  constexpr double kBeta = 8.0;
  constexpr int kZeroCrossings = 16;
  const double ratio = static_cast<double>(in_len) / out_len;
  const double cutoff = std::min(1.0, static_cast<double>(out_len) / in_len);
  const double half_width = kZeroCrossings / cutoff;
  const double i0_beta = kaiser_bessel_i0(kBeta);

  std::vector<double> out(out_len, 0.0);
  for (size_t j = 0; j < out_len; ++j) {
    const double center = static_cast<double>(j) * ratio;
    const long k_lo =
        std::max<long>(0, static_cast<long>(std::ceil(center - half_width)));
    const long k_hi = std::min<long>(static_cast<long>(in_len) - 1,
                                     static_cast<long>(center + half_width));
    double acc = 0.0;
    for (long k = k_lo; k <= k_hi; ++k) {
      const double t = center - static_cast<double>(k);
      const double u = std::min(1.0, std::abs(t) / half_width);
      const double win = kaiser_bessel_i0(kBeta * std::sqrt(1.0 - u * u)) /
                         i0_beta;
      const double arg = kPi * cutoff * t;
      const double sinc = std::abs(arg) < 1e-12 ? 1.0 : std::sin(arg) / arg;
      acc += in[static_cast<size_t>(k)] * cutoff * sinc * win;
    }
    out[j] = acc;
  }
  return out;
}

ArFit levinson(std::span<const double> autocorr, int order) {
  ArFit fit;
  if (order < 0 || autocorr.size() < static_cast<size_t>(order) + 1)
    throw Error("levinson: need autocorrelation lags 0..order");
  fit.coeffs.assign(static_cast<size_t>(order), 0.0);
  fit.error = autocorr[0];
  fit.stable = true;
  if (autocorr[0] <= 0.0) {
    fit.stable = false;
    return fit;
  }
  std::vector<double> prev(fit.coeffs);
  for (int i = 1; i <= order; ++i) {
    double acc = autocorr[static_cast<size_t>(i)];
    for (int j = 1; j < i; ++j)
      acc += fit.coeffs[static_cast<size_t>(j - 1)] *
             autocorr[static_cast<size_t>(i - j)];
    const double k = -acc / fit.error;
    if (!(std::abs(k) < 1.0)) {
      fit.stable = false;
      return fit;
    }
    prev = fit.coeffs;
    fit.coeffs[static_cast<size_t>(i - 1)] = k;
    for (int j = 1; j < i; ++j)
      fit.coeffs[static_cast<size_t>(j - 1)] =
          prev[static_cast<size_t>(j - 1)] + k * prev[static_cast<size_t>(i - j - 1)];
    fit.error *= 1.0 - k * k;
    if (fit.error <= 0.0) {
      fit.stable = false;
      return fit;
    }
  }
  return fit;
}

double ar_magnitude(std::span<const double> coeffs, double gain, double freq,
                    double rate) {
  const double w = 2.0 * kPi * freq / rate;
  std::complex<double> a(1.0, 0.0);
  for (size_t k = 0; k < coeffs.size(); ++k) {
    const double ang = -w * static_cast<double>(k + 1);
    a += coeffs[k] * std::complex<double>(std::cos(ang), std::sin(ang));
  }
  return gain / std::abs(a);
}

std::vector<double> median_smooth(std::span<const double> x, int window) {
  std::vector<double> out(x.size());
  const int half = window / 2;
  std::vector<double> buf;
  for (size_t i = 0; i < x.size(); ++i) {
    const long lo = std::max<long>(0, static_cast<long>(i) - half);
    const long hi =
        std::min<long>(static_cast<long>(x.size()) - 1, static_cast<long>(i) + half);
    buf.assign(x.begin() + lo, x.begin() + hi + 1);
    std::nth_element(buf.begin(), buf.begin() + buf.size() / 2, buf.end());
    double med = buf[buf.size() / 2];
    if (buf.size() % 2 == 0) {
      // Even window (only at the edges): average the two central values.
      auto m = std::max_element(buf.begin(), buf.begin() + buf.size() / 2);
      med = 0.5 * (med + *m);
    }
    out[i] = med;
  }
  return out;
}

}  // namespace dsmvoc::dsp
