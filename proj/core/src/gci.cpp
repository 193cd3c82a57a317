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

#include "dsmvoc/gci.hpp"

#include <algorithm>
#include <cmath>

namespace dsmvoc {

namespace {

struct VoicedRun {
  long begin = 0;  // sample index, inclusive
  long end = 0;    // sample index, exclusive
};

std::vector<VoicedRun> voiced_runs(const PitchTrack& pitch, long n_samples,
                                   int rate) {
  std::vector<VoicedRun> runs;
  const double half_hop = pitch.hop / 2.0;
  size_t i = 0;
  while (i < pitch.values.size()) {
    if (!pitch.values[i].voiced) {
      ++i;
      continue;
    }
    size_t j = i;
    while (j + 1 < pitch.values.size() && pitch.values[j + 1].voiced) ++j;
    VoicedRun run;
    run.begin = std::max<long>(
        0, std::lround((pitch.values[i].time - half_hop) * rate));
    run.end = std::min<long>(
        n_samples, std::lround((pitch.values[j].time + half_hop) * rate));
    if (run.end > run.begin) runs.push_back(run);
    i = j + 1;
  }
  return runs;
}

long argmax_signed(const std::vector<double>& x, int sign, long begin,
                   long end) {
  long best = begin;
  double best_v = sign * x[static_cast<size_t>(begin)];
  for (long t = begin + 1; t < end; ++t) {
    const double v = sign * x[static_cast<size_t>(t)];
    if (v > best_v) {
      best_v = v;
      best = t;
    }
  }
  return best;
}

}  // namespace

GciSequence detect_gci(const SpeechSignal& residual, const PitchTrack& pitch) {
  GciSequence out;
  if (residual.samples.empty() || pitch.values.empty()) return out;
  const int rate = residual.sample_rate;
  const long n = static_cast<long>(residual.samples.size());
  const auto runs = voiced_runs(pitch, n, rate);
  if (runs.empty()) return out;

  // Global polarity: compare the mean positive extremum to the mean
  // negative extremum over period-long windows of all voiced runs.
  double pos_sum = 0.0, neg_sum = 0.0;
  size_t extrema = 0;
  for (const auto& run : runs) {
    long t = run.begin;
    while (t < run.end) {
      const double f0 = pitch.f0_at(static_cast<double>(t) / rate);
      if (f0 <= 0.0) break;
      const long period = std::lround(rate / f0);
      const long stop = std::min(run.end, t + period);
      double lo = 0.0, hi = 0.0;
      for (long k = t; k < stop; ++k) {
        lo = std::min(lo, residual.samples[static_cast<size_t>(k)]);
        hi = std::max(hi, residual.samples[static_cast<size_t>(k)]);
      }
      pos_sum += hi;
      neg_sum += -lo;
      ++extrema;
      t = stop;
    }
  }
  out.polarity = (extrema == 0 || pos_sum >= neg_sum) ? 1 : -1;

  // One GCI per period, walked in both directions from the strongest peak
  // of each voiced run. Windows whose extremum falls below a small fraction
  // of the run's anchor amplitude hold no discontinuity (zero stretches at
  // run edges); they are stepped over without emitting an instant.
  constexpr double kAmplitudeFloor = 0.05;
  for (const auto& run : runs) {
    const long anchor =
        argmax_signed(residual.samples, out.polarity, run.begin, run.end);
    const double anchor_amp =
        out.polarity * residual.samples[static_cast<size_t>(anchor)];
    if (anchor_amp <= 0.0) continue;
    const double floor_amp = kAmplitudeFloor * anchor_amp;

    std::vector<long> picked = {anchor};
    for (int dir : {+1, -1}) {
      long g = anchor;
      while (true) {
        const double f0 = pitch.f0_at(static_cast<double>(g) / rate);
        if (f0 <= 0.0) break;
        const double period = rate / f0;
        long lo, hi;
        if (dir > 0) {
          lo = g + std::lround(0.5 * period);
          hi = std::min(run.end, g + std::lround(1.5 * period) + 1);
        } else {
          lo = std::max(run.begin, g - std::lround(1.5 * period));
          hi = g - std::lround(0.5 * period) + 1;
        }
        if (lo >= hi) break;
        const long cand = argmax_signed(residual.samples, out.polarity, lo, hi);
        if (out.polarity * residual.samples[static_cast<size_t>(cand)] >=
            floor_amp) {
          picked.push_back(cand);
          g = cand;
        } else {
          g += dir * std::lround(period);
        }
      }
    }
    std::sort(picked.begin(), picked.end());
    out.instants.insert(out.instants.end(), picked.begin(), picked.end());
  }
  std::sort(out.instants.begin(), out.instants.end());
  return out;
}

}  // namespace dsmvoc
