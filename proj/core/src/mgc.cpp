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

#include "dsmvoc/mgc.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include "dsmvoc/dsp.hpp"
#include "dsmvoc/types.hpp"

namespace dsmvoc::mgc {

namespace {

// Diagonal Pade approximants of exp(w) used by the MLSA filter. The
// diagonal form makes the filter with negated coefficients the exact
// reciprocal of the forward one.
constexpr double kPade4[] = {1.0, 0.4999273, 0.1067005, 0.01170221,
                             0.0005656279};
constexpr double kPade5[] = {1.0,        0.4999391,    0.1107098,
                             0.01369984, 0.0009564853, 0.00003041721};

}  // namespace

std::vector<double> freqt(std::span<const double> c_in, int out_order,
                          double alpha) {
  const int m1 = static_cast<int>(c_in.size()) - 1;
  const int m2 = out_order;
  const double beta = 1.0 - alpha * alpha;
  std::vector<double> g(static_cast<size_t>(m2) + 1, 0.0);
  std::vector<double> d(static_cast<size_t>(m2) + 1, 0.0);
  for (int i = -m1; i <= 0; ++i) {
    std::copy(g.begin(), g.end(), d.begin());
    g[0] = c_in[static_cast<size_t>(-i)] + alpha * d[0];
    if (m2 >= 1) g[1] = beta * d[0] + alpha * d[1];
    for (int j = 2; j <= m2; ++j)
      g[static_cast<size_t>(j)] = d[static_cast<size_t>(j - 1)] +
                                  alpha * (d[static_cast<size_t>(j)] -
                                           g[static_cast<size_t>(j - 1)]);
  }
  return g;
}

void gnorm(std::span<double> c, double gamma) {
  if (c.empty()) return;
  if (gamma != 0.0) {
    const double k = 1.0 + gamma * c[0];
    for (size_t i = c.size() - 1; i >= 1; --i) c[i] /= k;
    c[0] = std::pow(k, 1.0 / gamma);
  } else {
    c[0] = std::exp(c[0]);
  }
}

void ignorm(std::span<double> c, double gamma) {
  if (c.empty()) return;
  if (gamma != 0.0) {
    const double k = std::pow(c[0], gamma);
    for (size_t i = c.size() - 1; i >= 1; --i) c[i] *= k;
    c[0] = (k - 1.0) / gamma;
  } else {
    c[0] = std::log(c[0]);
  }
}

std::vector<double> gc2gc(std::span<const double> c1, double gamma1,
                          int out_order, double gamma2) {
  const int m1 = static_cast<int>(c1.size()) - 1;
  std::vector<double> c2(static_cast<size_t>(out_order) + 1, 0.0);
  c2[0] = c1[0];
  for (int i = 1; i <= out_order; ++i) {
    double ss1 = 0.0;
    double ss2 = 0.0;
    const int lim = std::min(m1, i - 1);
    for (int k = 1; k <= lim; ++k) {
      const int mk = i - k;
      const double cc =
          c1[static_cast<size_t>(k)] * c2[static_cast<size_t>(mk)];
      ss2 += k * cc;
      ss1 += mk * cc;
    }
    double v = (gamma2 * ss2 - gamma1 * ss1) / i;
    if (i <= m1) v += c1[static_cast<size_t>(i)];
    c2[static_cast<size_t>(i)] = v;
  }
  return c2;
}

std::vector<double> mgc2mgc(std::span<const double> c1, double alpha1,
                            double gamma1, int out_order, double alpha2,
                            double gamma2) {
  std::vector<double> tmp;
  if (alpha1 == alpha2) {
    tmp.assign(c1.begin(), c1.end());
  } else {
    const double a = (alpha2 - alpha1) / (1.0 - alpha1 * alpha2);
    tmp = freqt(c1, out_order, a);
  }
  gnorm(tmp, gamma1);
  std::vector<double> out = gc2gc(tmp, gamma1, out_order, gamma2);
  ignorm(out, gamma2);
  return out;
}

std::vector<double> mc2b(std::span<const double> mc, double alpha) {
  std::vector<double> b(mc.begin(), mc.end());
  for (int i = static_cast<int>(b.size()) - 2; i >= 0; --i)
    b[static_cast<size_t>(i)] -= alpha * b[static_cast<size_t>(i) + 1];
  return b;
}

std::vector<double> b2mc(std::span<const double> b, double alpha) {
  std::vector<double> mc(b.begin(), b.end());
  for (size_t i = 0; i + 1 < mc.size(); ++i) mc[i] += alpha * b[i + 1];
  return mc;
}

double mlsa_stability_margin(std::span<const double> b) {
  if (b.size() <= 1) return 0.0;
  double margin = std::abs(b[1]);
  if (b.size() > 2) {
    const size_t nfft = 128;
    std::vector<double> tail(nfft, 0.0);
    for (size_t k = 2; k < b.size(); ++k) tail[k] = b[k];
    auto spec = dsp::fft_real(tail, nfft);
    for (size_t i = 0; i <= nfft / 2; ++i)
      margin = std::max(margin, std::abs(spec[i]));
  }
  return margin;
}

MlsaFilter::MlsaFilter(int order, double alpha, bool inverse, int pade_order)
    : order_(order),
      alpha_(alpha),
      inverse_(inverse),
      pade_(pade_order) {
  if (pade_order != 4 && pade_order != 5)
    throw Error("MlsaFilter: Pade order must be 4 or 5");
  pade_coeffs_ = pade_order == 5 ? kPade5 : kPade4;
  reset();
}

void MlsaFilter::reset() {
  d1_.assign(2 * static_cast<size_t>(pade_ + 1), 0.0);
  d2_.assign(static_cast<size_t>(pade_) * (order_ + 2) + pade_ + 1, 0.0);
}

double MlsaFilter::warped_fir(double x, std::span<const double> b, double* d) {
  const double aa = 1.0 - alpha_ * alpha_;
  d[0] = x;
  d[1] = aa * d[0] + alpha_ * d[1];
  double y = 0.0;
  for (int i = 2; i <= order_; ++i) {
    d[i] += alpha_ * (d[i + 1] - d[i - 1]);
    y += d[i] * b[static_cast<size_t>(i)];
  }
  for (int i = order_ + 1; i > 1; --i) d[i] = d[i - 1];
  return y;
}

// Both stages share one shape: every Pade term v_i is a function of past
// state and the current coefficients alone, so the forward recursion
//   u = x + fb, y = u + out
// can be solved for x given y with the state untouched:
//   u = y - out, x = u - fb.
// Driving pt[0] with u in both directions keeps the two state machines
// identical, which is what makes the inverse exact under moving
// coefficients.

double MlsaFilter::stage1(double x, double b1) {
  const double aa = 1.0 - alpha_ * alpha_;
  double* d = d1_.data();
  double* pt = d + pade_ + 1;
  double out = 0.0;
  double fb = 0.0;
  for (int i = pade_; i >= 1; --i) {
    d[i] = aa * pt[i - 1] + alpha_ * d[i];
    pt[i] = d[i] * b1;
    const double v = pt[i] * pade_coeffs_[i];
    fb += (i & 1) ? v : -v;
    out += v;
  }
  const double u = inverse_ ? x - out : x + fb;
  pt[0] = u;
  return inverse_ ? u - fb : u + out;
}

double MlsaFilter::stage2(double x, std::span<const double> b) {
  double* d = d2_.data();
  double* pt = d + static_cast<size_t>(pade_) * (order_ + 2);
  double out = 0.0;
  double fb = 0.0;
  for (int i = pade_; i >= 1; --i) {
    pt[i] = warped_fir(pt[i - 1], b, d + static_cast<size_t>(i - 1) * (order_ + 2));
    const double v = pt[i] * pade_coeffs_[i];
    fb += (i & 1) ? v : -v;
    out += v;
  }
  const double u = inverse_ ? x - out : x + fb;
  pt[0] = u;
  return inverse_ ? u - fb : u + out;
}

double MlsaFilter::step(std::span<const double> b, double x) {
  // The inverse must unwind the cascade back to front.
  if (inverse_) {
    x = stage2(x, b);
    x = stage1(x, b[1]);
  } else {
    x = stage1(x, b[1]);
    x = stage2(x, b);
  }
  return x;
}

MglsaFilter::MglsaFilter(int order, double alpha, int stages, bool inverse)
    : order_(order), alpha_(alpha), stages_(stages), inverse_(inverse) {
  if (stages < 1) throw Error("MglsaFilter: stages must be >= 1");
  reset();
}

void MglsaFilter::reset() {
  d_.assign(static_cast<size_t>(stages_) * (order_ + 1), 0.0);
}

double MglsaFilter::section(double x, std::span<const double> b, double* d) {
  const double aa = 1.0 - alpha_ * alpha_;
  double y = d[0] * b[1];
  for (int i = 1; i <= order_ - 1; ++i) {
    d[i] += alpha_ * (d[i + 1] - d[i - 1]);
    y += d[i] * b[static_cast<size_t>(i) + 1];
  }
  double out;
  double drive;  // the all-pole side feeds its output back, the MA side its input
  if (inverse_) {
    out = x + y;
    drive = x;
  } else {
    out = x - y;
    drive = out;
  }
  for (int i = order_ - 1; i > 0; --i) d[i] = d[i - 1];
  d[0] = alpha_ * d[0] + aa * drive;
  return out;
}

double MglsaFilter::step(std::span<const double> b, double x) {
  for (int s = 0; s < stages_; ++s)
    x = section(x, b, d_.data() + static_cast<size_t>(s) * (order_ + 1));
  return x;
}

namespace {

// Solves (T + H) x = rhs for the symmetric Toeplitz-plus-Hankel system of
// the mel-cepstral Newton step; dense LU with partial pivoting (the system
// is order ~25, far too small to warrant a specialized solver).
bool solve_toeplitz_plus_hankel(std::span<const double> t,
                                std::span<const double> h,
                                std::span<const double> rhs,
                                std::span<double> x) {
  const int n = static_cast<int>(rhs.size());
  std::vector<double> a(static_cast<size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      a[static_cast<size_t>(i) * n + j] =
          t[static_cast<size_t>(std::abs(i - j))] +
          h[static_cast<size_t>(i + j)];
  std::vector<double> bvec(rhs.begin(), rhs.end());

  double scale = 0.0;
  for (double v : a) scale = std::max(scale, std::abs(v));
  const double tiny = std::max(scale, 1.0) * 1e-14;

  for (int col = 0; col < n; ++col) {
    int pivot = col;
    for (int r = col + 1; r < n; ++r)
      if (std::abs(a[static_cast<size_t>(r) * n + col]) >
          std::abs(a[static_cast<size_t>(pivot) * n + col]))
        pivot = r;
    if (std::abs(a[static_cast<size_t>(pivot) * n + col]) < tiny) return false;
    if (pivot != col) {
      for (int j = 0; j < n; ++j)
        std::swap(a[static_cast<size_t>(col) * n + j],
                  a[static_cast<size_t>(pivot) * n + j]);
      std::swap(bvec[static_cast<size_t>(col)], bvec[static_cast<size_t>(pivot)]);
    }
    const double inv = 1.0 / a[static_cast<size_t>(col) * n + col];
    for (int r = col + 1; r < n; ++r) {
      const double f = a[static_cast<size_t>(r) * n + col] * inv;
      if (f == 0.0) continue;
      for (int j = col; j < n; ++j)
        a[static_cast<size_t>(r) * n + j] -=
            f * a[static_cast<size_t>(col) * n + j];
      bvec[static_cast<size_t>(r)] -= f * bvec[static_cast<size_t>(col)];
    }
  }
  for (int r = n - 1; r >= 0; --r) {
    double acc = bvec[static_cast<size_t>(r)];
    for (int j = r + 1; j < n; ++j)
      acc -= a[static_cast<size_t>(r) * n + j] * x[static_cast<size_t>(j)];
    x[static_cast<size_t>(r)] = acc / a[static_cast<size_t>(r) * n + r];
  }
  return true;
}

}  // namespace

McepResult mcep(std::span<const double> windowed, size_t nfft, int order,
                double alpha, int min_iters, int max_iters, double threshold,
                double rel_floor_db) {
  McepResult result;
  const size_t f2 = nfft / 2;
  const int m2 = 2 * order;

  std::vector<double> pgram = dsp::power_spectrum(windowed, nfft);
  double peak = 0.0;
  for (double v : pgram) peak = std::max(peak, v);
  if (peak <= 0.0) throw Error("mcep: zero frame");
  const double floor = peak * std::pow(10.0, rel_floor_db / 10.0);
  for (double& v : pgram) v = std::max(v, floor);

  // Initial value: warped truncation of the log-periodogram cepstrum.
  std::vector<double> logp(nfft);
  for (size_t i = 0; i < nfft; ++i) logp[i] = std::log(pgram[i]);
  std::vector<double> cep = dsp::ifft_symmetric(logp);
  cep.resize(f2 + 1);
  cep[0] *= 0.5;
  cep[f2] *= 0.5;
  result.mc = freqt(cep, order, alpha);

  std::vector<double> al(static_cast<size_t>(order) + 1);
  al[0] = 1.0;
  for (int i = 1; i <= order; ++i)
    al[static_cast<size_t>(i)] = -alpha * al[static_cast<size_t>(i - 1)];

  // Warped frequency cosine per FFT bin, for the correlation sums below.
  std::vector<double> cos_beta(nfft);
  for (size_t i = 0; i < nfft; ++i) {
    const double w =
        2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(nfft);
    const double beta =
        w + 2.0 * std::atan2(alpha * std::sin(w), 1.0 - alpha * std::cos(w));
    cos_beta[i] = std::cos(beta);
  }

  double prev_criterion = 0.0;
  std::vector<double> ratio(nfft);
  std::vector<double> rw(static_cast<size_t>(m2) + 1);
  std::vector<double> grad(static_cast<size_t>(order) + 1);
  std::vector<double> step(static_cast<size_t>(order) + 1);

  for (int iter = 1; iter <= max_iters; ++iter) {
    result.iterations = iter;

    // Model log spectrum from the current mel-cepstrum.
    std::vector<double> cl = freqt(result.mc, static_cast<int>(f2), -alpha);
    auto spec = dsp::fft_real(cl, nfft);
    for (size_t i = 0; i < nfft; ++i)
      ratio[i] = pgram[i] / std::exp(2.0 * spec[i].real());

    // Warped correlations of the spectral ratio: rw[m] is the mean of
    // ratio(w) cos(m beta(w)) over the unit circle, built with the cosine
    // recurrence in m at each bin. The criterion gradient is rw[m] minus
    // its value for a perfect fit, (-alpha)^m; the Hessian entries are
    // rw[|m - l|] + rw[m + l].
    std::fill(rw.begin(), rw.end(), 0.0);
    for (size_t i = 0; i < nfft; ++i) {
      const double v = ratio[i];
      const double cb = cos_beta[i];
      double c_prev = 1.0;
      double c_cur = cb;
      rw[0] += v;
      rw[1] += v * cb;
      for (int m = 2; m <= m2; ++m) {
        const double c_next = 2.0 * cb * c_cur - c_prev;
        rw[static_cast<size_t>(m)] += v * c_next;
        c_prev = c_cur;
        c_cur = c_next;
      }
    }
    for (double& v : rw) v /= static_cast<double>(nfft);

    const double criterion = rw[0];
    if (iter >= min_iters &&
        std::abs((criterion - prev_criterion) / criterion) < threshold) {
      result.converged = true;
      break;
    }
    prev_criterion = criterion;

    for (int i = 0; i <= order; ++i)
      grad[static_cast<size_t>(i)] =
          rw[static_cast<size_t>(i)] - al[static_cast<size_t>(i)];

    if (!solve_toeplitz_plus_hankel(
            std::span(rw).first(static_cast<size_t>(order) + 1), rw, grad,
            step)) {
      result.converged = false;
      break;
    }
    for (int i = 0; i <= order; ++i)
      result.mc[static_cast<size_t>(i)] += step[static_cast<size_t>(i)];
  }
  return result;
}

}  // namespace dsmvoc::mgc
