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

#include "dsmvoc/eigenbasis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace dsmvoc {

namespace {

constexpr size_t kMaxStoredEigenvectors = 64;
constexpr double kJacobiTolerance = 1e-12;
constexpr int kJacobiMaxSweeps = 100;

// Cyclic Jacobi eigendecomposition of a symmetric matrix stored row-major.
// Rotations are applied until the off-diagonal Frobenius mass falls below
// kJacobiTolerance relative to the total. V accumulates eigenvectors as
// columns.
void jacobi_eigen(std::vector<double>& a, size_t n, std::vector<double>& v) {
  v.assign(n * n, 0.0);
  for (size_t i = 0; i < n; ++i) v[i * n + i] = 1.0;

  double total = 0.0;
  for (size_t i = 0; i < n * n; ++i) total += a[i] * a[i];
  if (total == 0.0) return;

  for (int sweep = 0; sweep < kJacobiMaxSweeps; ++sweep) {
    double off = 0.0;
    for (size_t i = 0; i < n; ++i)
      for (size_t j = i + 1; j < n; ++j) off += 2.0 * a[i * n + j] * a[i * n + j];
    if (off <= kJacobiTolerance * total) break;

    for (size_t p = 0; p < n; ++p) {
      for (size_t q = p + 1; q < n; ++q) {
        const double apq = a[p * n + q];
        if (apq == 0.0) continue;
        const double app = a[p * n + p];
        const double aqq = a[q * n + q];
        const double theta = (aqq - app) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;

        for (size_t k = 0; k < n; ++k) {
          const double akp = a[k * n + p];
          const double akq = a[k * n + q];
          a[k * n + p] = c * akp - s * akq;
          a[k * n + q] = s * akp + c * akq;
        }
        for (size_t k = 0; k < n; ++k) {
          const double apk = a[p * n + k];
          const double aqk = a[q * n + k];
          a[p * n + k] = c * apk - s * aqk;
          a[q * n + k] = s * apk + c * aqk;
        }
        for (size_t k = 0; k < n; ++k) {
          const double vkp = v[k * n + p];
          const double vkq = v[k * n + q];
          v[k * n + p] = c * vkp - s * vkq;
          v[k * n + q] = s * vkp + c * vkq;
        }
      }
    }
  }
}

}  // namespace

EigenBasis fit_pca(const std::vector<ResidualFrame>& frames, bool center) {
  if (frames.size() < 2) throw Error("fit_pca: need at least 2 frames");
  const size_t dim = frames[0].samples.size();
  for (const auto& f : frames)
    if (f.samples.size() != dim)
      throw Error("fit_pca: inconsistent frame lengths");

  EigenBasis basis;
  basis.training_frame_count = frames.size();
  basis.mean.assign(dim, 0.0);
  if (center) {
    for (const auto& f : frames)
      for (size_t i = 0; i < dim; ++i) basis.mean[i] += f.samples[i];
    for (double& m : basis.mean) m /= static_cast<double>(frames.size());
  }

  // Population covariance (1/N) of centered frames.
  std::vector<double> cov(dim * dim, 0.0);
  std::vector<double> centered(dim);
  for (const auto& f : frames) {
    for (size_t i = 0; i < dim; ++i) centered[i] = f.samples[i] - basis.mean[i];
    for (size_t i = 0; i < dim; ++i) {
      const double ci = centered[i];
      for (size_t j = i; j < dim; ++j) cov[i * dim + j] += ci * centered[j];
    }
  }
  const double inv_n = 1.0 / static_cast<double>(frames.size());
  for (size_t i = 0; i < dim; ++i)
    for (size_t j = i; j < dim; ++j) {
      cov[i * dim + j] *= inv_n;
      cov[j * dim + i] = cov[i * dim + j];
    }

  std::vector<double> vecs;
  jacobi_eigen(cov, dim, vecs);

  std::vector<size_t> order(dim);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return cov[a * dim + a] > cov[b * dim + b];
  });

  basis.eigenvalues.resize(dim);
  const size_t stored = std::min({dim, frames.size(), kMaxStoredEigenvectors});
  basis.eigenvectors.reserve(stored);
  for (size_t r = 0; r < dim; ++r) {
    const size_t col = order[r];
    basis.eigenvalues[r] = std::max(0.0, cov[col * dim + col]);
    if (r >= stored) continue;
    std::vector<double> vec(dim);
    size_t arg = 0;
    double best = 0.0;
    for (size_t i = 0; i < dim; ++i) {
      vec[i] = vecs[i * dim + col];
      if (std::abs(vec[i]) > best) {
        best = std::abs(vec[i]);
        arg = i;
      }
    }
    if (vec[arg] < 0.0)
      for (double& x : vec) x = -x;
    basis.eigenvectors.push_back(std::move(vec));
  }
  return basis;
}

DispersionCurve dispersion(const EigenBasis& basis) {
  DispersionCurve curve;
  const double total = std::accumulate(basis.eigenvalues.begin(),
                                       basis.eigenvalues.end(), 0.0);
  if (total <= 0.0) throw Error("dispersion: zero total dispersion");
  curve.cumulative_fraction.resize(basis.eigenvalues.size());
  double acc = 0.0;
  for (size_t i = 0; i < basis.eigenvalues.size(); ++i) {
    acc += basis.eigenvalues[i];
    curve.cumulative_fraction[i] = acc / total;
  }
  return curve;
}

size_t select_components(const DispersionCurve& curve, double coverage) {
  if (!(coverage > 0.0) || coverage > 1.0)
    throw Error("select_components: coverage must be in (0, 1]");
  for (size_t i = 0; i < curve.cumulative_fraction.size(); ++i)
    if (curve.cumulative_fraction[i] >= coverage - 1e-12) return i + 1;
  return curve.cumulative_fraction.size();
}

std::vector<double> project(const std::vector<double>& frame,
                            const EigenBasis& basis, size_t k) {
  if (frame.size() != basis.dim())
    throw Error("project: frame length does not match basis");
  if (k > basis.eigenvectors.size())
    throw Error("project: k exceeds stored eigenvector count");
  std::vector<double> weights(k, 0.0);
  for (size_t w = 0; w < k; ++w) {
    double acc = 0.0;
    const auto& v = basis.eigenvectors[w];
    for (size_t i = 0; i < frame.size(); ++i)
      acc += (frame[i] - basis.mean[i]) * v[i];
    weights[w] = acc;
  }
  return weights;
}

std::vector<double> reconstruct(const std::vector<double>& weights,
                                const EigenBasis& basis) {
  if (weights.size() > basis.eigenvectors.size())
    throw Error("reconstruct: more weights than stored eigenvectors");
  std::vector<double> frame = basis.mean;
  for (size_t w = 0; w < weights.size(); ++w) {
    const auto& v = basis.eigenvectors[w];
    for (size_t i = 0; i < frame.size(); ++i) frame[i] += weights[w] * v[i];
  }
  return frame;
}

}  // namespace dsmvoc
