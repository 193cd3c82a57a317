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

#ifndef DSMVOC_DSP_HPP_
#define DSMVOC_DSP_HPP_

#include <complex>
#include <span>
#include <vector>

namespace dsmvoc::dsp {

/// In-place radix-2 FFT; size must be a power of two. The inverse
/// transform includes the 1/N factor.
void fft(std::vector<std::complex<double>>& data, bool inverse);

/// FFT of a real sequence zero-padded to nfft (power of two).
std::vector<std::complex<double>> fft_real(std::span<const double> x,
                                           size_t nfft);

/// Inverse FFT of a real, even-symmetric spectrum; returns the real result.
std::vector<double> ifft_symmetric(std::span<const double> spectrum);

/// |FFT|^2 of a real sequence, all nfft bins.
std::vector<double> power_spectrum(std::span<const double> x, size_t nfft);

std::vector<double> blackman_window(size_t length);
std::vector<double> hamming_window(size_t length);
std::vector<double> hanning_window(size_t length);

/// Band-limited resampling of a finite frame to a new length. Windowed-sinc
/// interpolation (Kaiser beta = 8, 16 zero crossings per side, i.e. 32 taps
/// per output sample at unit rate), cutoff at the narrower of the two
/// Nyquist bands. Samples outside the frame are taken as zero. Length-
/// preserving calls return the input exactly.
std::vector<double> resample(std::span<const double> in, size_t out_len);

struct ArFit {
  std::vector<double> coeffs;  // a1..ap of the monic polynomial A(z)
  double error = 0.0;          // final prediction error power
  bool stable = false;         // all reflection coefficients inside (-1, 1)
};

/// Levinson-Durbin recursion on autocorrelation r[0..order].
ArFit levinson(std::span<const double> autocorr, int order);

/// Magnitude of g / A(e^{j 2 pi f / rate}) for the monic AR polynomial.
double ar_magnitude(std::span<const double> coeffs, double gain, double freq,
                    double rate);

/// Running median of the given odd window size; the window shrinks at the
/// sequence ends.
std::vector<double> median_smooth(std::span<const double> x, int window);

double kaiser_bessel_i0(double x);

inline double rms(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return x.empty() ? 0.0 : std::sqrt(s / static_cast<double>(x.size()));
}

inline double l2_norm(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

inline size_t next_pow2(size_t n) {
  size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

}  // namespace dsmvoc::dsp

#endif  // DSMVOC_DSP_HPP_
