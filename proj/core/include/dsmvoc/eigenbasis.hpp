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

#ifndef DSMVOC_EIGENBASIS_HPP_
#define DSMVOC_EIGENBASIS_HPP_

#include <cstddef>
#include <vector>

#include "dsmvoc/frames.hpp"
#include "dsmvoc/types.hpp"

namespace dsmvoc {

struct EigenBasis {
  std::vector<double> mean;                       // normalized_length
  std::vector<std::vector<double>> eigenvectors;  // orthonormal, stored count <= 64
  std::vector<double> eigenvalues;  // descending, ALL of them (full spectrum)
  size_t training_frame_count = 0;

  size_t dim() const { return mean.size(); }
};

struct DispersionCurve {
  // cumulative_fraction[k-1] = share of total dispersion covered by the
  // first k eigenvectors; last entry is 1 for any nonzero spectrum.
  std::vector<double> cumulative_fraction;
};

// PCA over the dataset: mean, eigenpairs of the population covariance
// (1/N) of centered frames, descending eigenvalues, each eigenvector's
// largest-magnitude entry made positive. `center=false` skips mean
// subtraction (the mean is stored as zeros). At most 64 eigenvectors are
// stored; the eigenvalue list always covers the full spectrum.
EigenBasis fit_pca(const std::vector<ResidualFrame>& frames,
                   bool center = true);

DispersionCurve dispersion(const EigenBasis& basis);

// Smallest k whose cumulative fraction reaches `coverage` in (0,1].
size_t select_components(const DispersionCurve& curve, double coverage);

// Dot products of (frame - mean) with the first k eigenvectors.
std::vector<double> project(const std::vector<double>& frame,
                            const EigenBasis& basis, size_t k);

// mean + sum_i weights[i] * eigenvector[i].
std::vector<double> reconstruct(const std::vector<double>& weights,
                                const EigenBasis& basis);

}  // namespace dsmvoc

#endif  // DSMVOC_EIGENBASIS_HPP_
