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
//
// Mel-generalized cepstral primitives: frequency transforms, gain
// normalization, filter-coefficient conversions, the MLSA / MGLSA digital
// filters and the iterative mel-cepstral spectral fit.

#ifndef DSMVOC_MGC_HPP_
#define DSMVOC_MGC_HPP_

#include <span>
#include <vector>

namespace dsmvoc::mgc {

/// All-pass frequency transform of a cepstral sequence (Oppenheim
/// recursion). c_in is one-sided c[0..m1]; returns c[0..out_order].
std::vector<double> freqt(std::span<const double> c_in, int out_order,
                          double alpha);

/// Gain normalization of a generalized cepstrum, in place. After the call
/// c[0] holds the linear gain K.
void gnorm(std::span<double> c, double gamma);

/// Inverse of gnorm, in place.
void ignorm(std::span<double> c, double gamma);

/// Generalized cepstral transform between gamma values; operates on
/// gain-normalized coefficients.
std::vector<double> gc2gc(std::span<const double> c1, double gamma1,
                          int out_order, double gamma2);

/// Full (alpha, gamma) -> (alpha2, gamma2) conversion.
std::vector<double> mgc2mgc(std::span<const double> c1, double alpha1,
                            double gamma1, int out_order, double alpha2,
                            double gamma2);

/// Mel-cepstrum to MLSA filter coefficients and back.
std::vector<double> mc2b(std::span<const double> mc, double alpha);
std::vector<double> b2mc(std::span<const double> b, double alpha);

/// Max over frequency of |sum_{k>=2} b_k e^{-jwk}| and |b_1|; the Pade
/// approximation inside the MLSA filter is stable while this stays below
/// 6.0 (order 5) and transparent below 4.5.
double mlsa_stability_margin(std::span<const double> b);

/// MLSA digital filter, Pade order 5 (order 4 selectable). Runs one sample
/// at a time against externally supplied coefficients b1..bm so callers can
/// interpolate them freely; the b0 gain is applied by the caller. The
/// inverse flag replays the forward state recursion and solves it for the
/// input (every feedback term depends on past state only), so a
/// forward/inverse pair with identical coefficient trajectories cancels to
/// machine precision even while the coefficients move.
class MlsaFilter {
 public:
  MlsaFilter(int order, double alpha, bool inverse, int pade_order = 5);

  double step(std::span<const double> b, double x);
  void reset();

  int order() const { return order_; }

 private:
  double stage1(double x, double b1);
  double stage2(double x, std::span<const double> b);
  double warped_fir(double x, std::span<const double> b, double* d);

  int order_;
  double alpha_;
  bool inverse_;
  int pade_;
  const double* pade_coeffs_;
  std::vector<double> d1_;
  std::vector<double> d2_;
};

/// MGLSA digital filter for gamma = -1/stages: a cascade of identical
/// warped one-pole-per-coefficient sections. Coefficients are the
/// gain-normalized, gamma-scaled filter coefficients; the linear gain K is
/// applied by the caller. The inverse form is exact.
class MglsaFilter {
 public:
  MglsaFilter(int order, double alpha, int stages, bool inverse);

  double step(std::span<const double> b, double x);
  void reset();

 private:
  double section(double x, std::span<const double> b, double* d);

  int order_;
  double alpha_;
  int stages_;
  bool inverse_;
  std::vector<double> d_;
};

struct McepResult {
  std::vector<double> mc;  // c0..c_order
  bool converged = false;
  int iterations = 0;
};

/// Iterative mel-cepstral fit to the periodogram of a windowed frame
/// (Newton updates on the unbiased log-spectral criterion). The
/// periodogram is floored at rel_floor_db below its maximum.
McepResult mcep(std::span<const double> windowed, size_t nfft, int order,
                double alpha, int min_iters = 2, int max_iters = 30,
                double threshold = 1e-6, double rel_floor_db = -100.0);

}  // namespace dsmvoc::mgc

#endif  // DSMVOC_MGC_HPP_
