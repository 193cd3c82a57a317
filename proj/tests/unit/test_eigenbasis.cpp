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

#include <cmath>
#include <vector>

#include "doctest.h"
#include "dsmvoc/eigenbasis.hpp"
#include "dsmvoc/rng.hpp"

namespace {

std::vector<dsmvoc::ResidualFrame> random_frames(size_t count, size_t dim,
                                                 uint64_t seed) {
  dsmvoc::NoiseSource rng(seed);
  std::vector<dsmvoc::ResidualFrame> frames(count);
  for (auto& f : frames) {
    f.samples.resize(dim);
    for (auto& s : f.samples) s = rng.next_gaussian();
    f.normalized = true;
  }
  return frames;
}

double sq_norm(const std::vector<double>& a, const std::vector<double>& b) {
  double acc = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    double d = a[i] - b[i];
    acc += d * d;
  }
  return acc;
}

}  // namespace

TEST_CASE("two-dimensional toy dataset has the hand-computed eigenpair") {
  std::vector<dsmvoc::ResidualFrame> frames(4);
  const double xs[4] = {1.0, -1.0, 2.0, -2.0};
  for (size_t i = 0; i < 4; ++i) {
    frames[i].samples.assign(8, 0.0);
    frames[i].samples[0] = xs[i];
  }
  auto basis = dsmvoc::fit_pca(frames);
  CHECK(basis.training_frame_count == 4);
  for (double m : basis.mean) CHECK(m == doctest::Approx(0.0));
  REQUIRE(basis.eigenvalues.size() == 8);
  CHECK(basis.eigenvalues[0] == doctest::Approx(2.5).epsilon(1e-12));
  for (size_t i = 1; i < 8; ++i)
    CHECK(std::abs(basis.eigenvalues[i]) < 1e-12);
  REQUIRE(basis.eigenvectors.size() >= 1);
  CHECK(basis.eigenvectors[0][0] == doctest::Approx(1.0).epsilon(1e-12));
  for (size_t i = 1; i < 8; ++i)
    CHECK(std::abs(basis.eigenvectors[0][i]) < 1e-9);
}

TEST_CASE("identical frames collapse to the mean with zero spread") {
  std::vector<dsmvoc::ResidualFrame> frames(5);
  for (auto& f : frames) f.samples = {0.5, -0.25, 0.125, 1.0};
  auto basis = dsmvoc::fit_pca(frames);
  for (size_t i = 0; i < 4; ++i)
    CHECK(basis.mean[i] == doctest::Approx(frames[0].samples[i]));
  for (double ev : basis.eigenvalues) CHECK(std::abs(ev) < 1e-15);
}

TEST_CASE("eigenpairs reassemble the brute-force covariance") {
  const size_t n = 50, dim = 160;
  auto frames = random_frames(n, dim, 1234);
  auto basis = dsmvoc::fit_pca(frames);

  // Invariants: orthonormal, descending, bounded count.
  CHECK(basis.eigenvectors.size() <= std::min(n, dim));
  for (size_t a = 0; a < basis.eigenvectors.size(); ++a) {
    double norm = 0.0;
    for (double x : basis.eigenvectors[a]) norm += x * x;
    CHECK(std::abs(std::sqrt(norm) - 1.0) < 1e-9);
    for (size_t b = a + 1; b < basis.eigenvectors.size(); ++b) {
      double dot = 0.0;
      for (size_t i = 0; i < dim; ++i)
        dot += basis.eigenvectors[a][i] * basis.eigenvectors[b][i];
      CHECK(std::abs(dot) <= 1e-8);
    }
  }
  for (size_t i = 1; i < basis.eigenvalues.size(); ++i)
    CHECK(basis.eigenvalues[i] <= basis.eigenvalues[i - 1] + 1e-12);

  // Brute-force population covariance.
  std::vector<double> mean(dim, 0.0);
  for (const auto& f : frames)
    for (size_t i = 0; i < dim; ++i) mean[i] += f.samples[i];
  for (double& m : mean) m /= static_cast<double>(n);
  std::vector<double> cov(dim * dim, 0.0);
  for (const auto& f : frames)
    for (size_t i = 0; i < dim; ++i)
      for (size_t j = 0; j < dim; ++j)
        cov[i * dim + j] += (f.samples[i] - mean[i]) *
                            (f.samples[j] - mean[j]) /
                            static_cast<double>(n);

  // Rank is below the stored count, so the stored pairs carry the whole
  // matrix: C = sum_i lambda_i v_i v_i^T.
  double worst = 0.0;
  for (size_t i = 0; i < dim; ++i)
    for (size_t j = 0; j < dim; ++j) {
      double acc = 0.0;
      for (size_t r = 0; r < basis.eigenvectors.size(); ++r)
        acc += basis.eigenvalues[r] * basis.eigenvectors[r][i] *
               basis.eigenvectors[r][j];
      worst = std::max(worst, std::abs(acc - cov[i * dim + j]));
    }
  CHECK(worst < 1e-8);
}

TEST_CASE("projection and reconstruction identities") {
  // dim below the storage cap, frame count above dim: the stored basis is
  // complete and every identity is exact.
  const size_t dim = 32;
  auto frames = random_frames(100, dim, 77);
  auto basis = dsmvoc::fit_pca(frames);
  REQUIRE(basis.eigenvectors.size() == dim);

  SUBCASE("mean projects to zero, mean plus v1 to a unit weight") {
    auto w0 = dsmvoc::project(basis.mean, basis, 5);
    for (double w : w0) CHECK(std::abs(w) < 1e-12);

    auto probe = basis.mean;
    for (size_t i = 0; i < dim; ++i) probe[i] += 0.3 * basis.eigenvectors[0][i];
    auto w1 = dsmvoc::project(probe, basis, 4);
    CHECK(w1[0] == doctest::Approx(0.3).epsilon(1e-10));
    for (size_t i = 1; i < w1.size(); ++i) CHECK(std::abs(w1[i]) < 1e-10);
  }

  SUBCASE("Parseval and completeness on fresh random frames") {
    auto tests = random_frames(20, dim, 991);
    for (const auto& f : tests) {
      auto w = dsmvoc::project(f.samples, basis, dim);
      double wsq = 0.0;
      for (double x : w) wsq += x * x;
      double fsq = sq_norm(f.samples, basis.mean);
      CHECK(wsq == doctest::Approx(fsq).epsilon(1e-9));

      auto back = dsmvoc::reconstruct(w, basis);
      for (size_t i = 0; i < dim; ++i)
        CHECK(back[i] == doctest::Approx(f.samples[i]).epsilon(1e-9));
    }
  }

  SUBCASE("truncation error is non-increasing in k") {
    auto tests = random_frames(10, dim, 555);
    for (const auto& f : tests) {
      double prev = -1.0;
      for (size_t k = 0; k <= dim; ++k) {
        std::vector<double> w =
            k ? dsmvoc::project(f.samples, basis, k) : std::vector<double>{};
        auto rec = dsmvoc::reconstruct(w, basis);
        double err = sq_norm(f.samples, rec);
        if (prev >= 0.0) CHECK(err <= prev + 1e-12);
        prev = err;
      }
      CHECK(prev < 1e-18);
    }
  }

  SUBCASE("mean truncation error equals the eigenvalue tail on training data") {
    for (size_t k : {0UL, 5UL, 16UL}) {
      double mean_err = 0.0;
      for (const auto& f : frames) {
        auto w = dsmvoc::project(f.samples, basis, k);
        auto rec = dsmvoc::reconstruct(w, basis);
        mean_err += sq_norm(f.samples, rec);
      }
      mean_err /= static_cast<double>(frames.size());
      double tail = 0.0;
      for (size_t i = k; i < basis.eigenvalues.size(); ++i)
        tail += basis.eigenvalues[i];
      CHECK(mean_err == doctest::Approx(tail).epsilon(0.05));
    }
  }

  SUBCASE("zero weights reconstruct the mean") {
    auto rec = dsmvoc::reconstruct({}, basis);
    for (size_t i = 0; i < dim; ++i)
      CHECK(rec[i] == doctest::Approx(basis.mean[i]));
  }

  SUBCASE("deterministic refit") {
    auto again = dsmvoc::fit_pca(frames);
    CHECK(again.mean == basis.mean);
    CHECK(again.eigenvalues == basis.eigenvalues);
    CHECK(again.eigenvectors == basis.eigenvectors);
  }

  SUBCASE("uncentered mode stores a zero mean") {
    auto raw = dsmvoc::fit_pca(frames, false);
    for (double m : raw.mean) CHECK(m == 0.0);
    // Uncentered second moment dominates the centered one.
    CHECK(raw.eigenvalues[0] >= basis.eigenvalues[0] - 1e-9);
  }
}

TEST_CASE("dispersion curve and component selection") {
  dsmvoc::EigenBasis basis;
  basis.mean.assign(4, 0.0);
  basis.eigenvalues = {3.0, 1.0, 0.0, 0.0};
  basis.eigenvectors = {{1, 0, 0, 0}, {0, 1, 0, 0}};

  auto curve = dsmvoc::dispersion(basis);
  REQUIRE(curve.cumulative_fraction.size() == 4);
  CHECK(curve.cumulative_fraction[0] == doctest::Approx(0.75));
  CHECK(curve.cumulative_fraction[1] == doctest::Approx(1.0));
  CHECK(curve.cumulative_fraction[3] == doctest::Approx(1.0).epsilon(1e-9));
  for (size_t i = 1; i < 4; ++i)
    CHECK(curve.cumulative_fraction[i] >=
          curve.cumulative_fraction[i - 1] - 1e-12);

  CHECK(dsmvoc::select_components(curve, 0.8) == 2);
  CHECK(dsmvoc::select_components(curve, 0.75) == 1);
  CHECK(dsmvoc::select_components(curve, 1.0) == 2);  // nonzero eigenvalues
  CHECK_THROWS_AS(dsmvoc::select_components(curve, 0.0), dsmvoc::Error);
  CHECK_THROWS_AS(dsmvoc::select_components(curve, 1.5), dsmvoc::Error);
}

TEST_CASE("input validation") {
  std::vector<dsmvoc::ResidualFrame> one(1);
  one[0].samples = {1.0, 2.0};
  CHECK_THROWS_WITH_AS(dsmvoc::fit_pca(one),
                       doctest::Contains("at least 2"), dsmvoc::Error);

  auto frames = random_frames(3, 8, 2);
  frames[2].samples.resize(7);
  CHECK_THROWS_WITH_AS(dsmvoc::fit_pca(frames),
                       doctest::Contains("inconsistent"), dsmvoc::Error);

  auto good = dsmvoc::fit_pca(random_frames(10, 8, 3));
  std::vector<double> wrong_len(7, 0.0);
  CHECK_THROWS_AS(dsmvoc::project(wrong_len, good, 2), dsmvoc::Error);
  CHECK_THROWS_AS(dsmvoc::project(std::vector<double>(8, 0.0), good, 99),
                  dsmvoc::Error);
  CHECK_THROWS_AS(dsmvoc::reconstruct(std::vector<double>(99, 0.0), good),
                  dsmvoc::Error);
}
