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

#include "dsmvoc/pitch.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "dsmvoc/dsp.hpp"

namespace dsmvoc {

namespace {

constexpr double kWindowSec = 0.040;
constexpr double kHopSec = 0.010;
constexpr double kVoicingThreshold = 0.30;
constexpr double kEnergyGate = 0.02;

// Candidates within this factor of the best peak are considered ties and
// the shortest lag wins; guards against octave errors on highly periodic
// signals whose autocorrelation is near 1 at every multiple of the period.
constexpr double kOctaveGuard = 0.95;

struct Candidate {
  double corr = -1.0;
  double lag = 0.0;
};

Candidate best_lag(std::span<const double> w, int lag_min, int lag_max) {
  const int n = static_cast<int>(w.size());
  std::vector<double> corr(static_cast<size_t>(lag_max) + 1, -1.0);
  // Normalized cross-correlation between the window and its lagged copy.
  for (int lag = lag_min; lag <= lag_max && lag < n; ++lag) {
    double num = 0.0, e0 = 0.0, e1 = 0.0;
    for (int i = 0; i + lag < n; ++i) {
      num += w[i] * w[i + lag];
      e0 += w[i] * w[i];
      e1 += w[i + lag] * w[i + lag];
    }
    const double den = std::sqrt(e0 * e1);
    corr[static_cast<size_t>(lag)] = den > 0.0 ? num / den : -1.0;
  }
  double peak = -1.0;
  for (int lag = lag_min; lag <= lag_max; ++lag)
    peak = std::max(peak, corr[static_cast<size_t>(lag)]);

  Candidate out;
  if (peak <= 0.0) return out;
  for (int lag = lag_min; lag <= lag_max; ++lag) {
    const double c = corr[static_cast<size_t>(lag)];
    const bool local_max =
        (lag == lag_min || c >= corr[static_cast<size_t>(lag) - 1]) &&
        (lag == lag_max || c >= corr[static_cast<size_t>(lag) + 1]);
    if (c >= kOctaveGuard * peak && local_max) {
      out.corr = c;
      out.lag = lag;
      // Parabolic refinement around the integer peak.
      if (lag > lag_min && lag < lag_max) {
        const double cm = corr[static_cast<size_t>(lag) - 1];
        const double cp = corr[static_cast<size_t>(lag) + 1];
        const double denom = cm - 2.0 * c + cp;
        if (std::abs(denom) > 1e-12) {
          const double delta = 0.5 * (cm - cp) / denom;
          if (std::abs(delta) < 1.0) out.lag += delta;
        }
      }
      break;
    }
  }
  return out;
}

}  // namespace

double PitchTrack::f0_at(double t) const {
  if (values.empty()) return 0.0;
  // Locate the surrounding frames.
  const double idx = t / hop;
  const long i0 = std::clamp<long>(static_cast<long>(std::floor(idx)), 0,
                                   static_cast<long>(values.size()) - 1);
  const long i1 = std::min<long>(i0 + 1, static_cast<long>(values.size()) - 1);
  const auto& a = values[static_cast<size_t>(i0)];
  const auto& b = values[static_cast<size_t>(i1)];
  if (a.voiced && b.voiced) {
    const double w = std::clamp(idx - static_cast<double>(i0), 0.0, 1.0);
    return (1.0 - w) * a.f0 + w * b.f0;
  }
  if (a.voiced) return a.f0;
  if (b.voiced) return b.f0;
  return 0.0;
}

bool PitchTrack::voiced_at(double t) const {
  if (values.empty()) return false;
  const long i = std::clamp<long>(static_cast<long>(std::lround(t / hop)), 0,
                                  static_cast<long>(values.size()) - 1);
  return values[static_cast<size_t>(i)].voiced;
}

PitchTrack estimate_pitch(const SpeechSignal& signal, double f0_min,
                          double f0_max) {
  if (signal.sample_rate <= 0) throw Error("estimate_pitch: no sample rate");
  if (!(f0_min > 0.0) || !(f0_min < f0_max) ||
      !(f0_max < signal.sample_rate / 4.0))
    throw Error("estimate_pitch: need 0 < f0_min < f0_max < rate/4");

  const int rate = signal.sample_rate;
  const int wlen = static_cast<int>(std::lround(kWindowSec * rate));
  const int hop = static_cast<int>(std::lround(kHopSec * rate));
  const int lag_min = std::max(2, static_cast<int>(std::floor(rate / f0_max)));
  const int lag_max = static_cast<int>(std::ceil(rate / f0_min));

  PitchTrack track;
  track.hop = kHopSec;
  track.f0_min = f0_min;
  track.f0_max = f0_max;

  const double global_rms = dsp::rms(signal.samples);
  const size_t n_frames =
      signal.samples.empty()
          ? 0
          : (signal.samples.size() + static_cast<size_t>(hop) - 1) /
                static_cast<size_t>(hop);

  std::vector<double> window(static_cast<size_t>(wlen));
  std::vector<double> raw_f0(n_frames, 0.0);
  track.values.resize(n_frames);

  for (size_t i = 0; i < n_frames; ++i) {
    const long center = static_cast<long>(i) * hop;
    double energy = 0.0;
    for (int k = 0; k < wlen; ++k) {
      const long t = center - wlen / 2 + k;
      const double v =
          (t >= 0 && t < static_cast<long>(signal.samples.size()))
              ? signal.samples[static_cast<size_t>(t)]
              : 0.0;
      window[static_cast<size_t>(k)] = v;
      energy += v * v;
    }
    track.values[i].time = static_cast<double>(center) / rate;
    const double frame_rms = std::sqrt(energy / wlen);
    if (global_rms <= 0.0 || frame_rms <= kEnergyGate * global_rms) continue;

    const Candidate c = best_lag(window, lag_min, lag_max);
    if (c.corr >= kVoicingThreshold && c.lag > 0.0) {
      const double f0 = rate / c.lag;
      if (f0 >= f0_min && f0 <= f0_max) raw_f0[i] = f0;
    }
  }

  // Median smoothing over the contour with unvoiced frames as zeros; a
  // voiced decision survives only if the local median is nonzero.
  const auto smoothed = dsp::median_smooth(raw_f0, 5);
  for (size_t i = 0; i < n_frames; ++i) {
    if (smoothed[i] > 0.0 && raw_f0[i] > 0.0) {
      track.values[i].voiced = true;
      track.values[i].f0 = raw_f0[i];
    }
  }
  return track;
}

PitchTrack read_pitch_file(const std::filesystem::path& path, double f0_min,
                           double f0_max) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  PitchTrack track;
  track.f0_min = f0_min;
  track.f0_max = f0_max;
  std::string line;
  size_t line_no = 0;
  double prev_time = -1.0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    PitchFrame f;
    int voiced = 0;
    if (!(ss >> f.time >> f.f0 >> voiced))
      throw Error(path.string() + ":" + std::to_string(line_no) +
                  ": expected `time_s f0_hz voiced{0|1}`");
    f.voiced = voiced != 0;
    if (!f.voiced) f.f0 = 0.0;
    if (f.time <= prev_time)
      throw Error(path.string() + ":" + std::to_string(line_no) +
                  ": times must be strictly increasing");
    prev_time = f.time;
    track.values.push_back(f);
  }
  if (track.values.size() >= 2)
    track.hop = track.values[1].time - track.values[0].time;
  return track;
}

void write_pitch_file(const PitchTrack& track,
                      const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  char buf[64];
  for (const auto& f : track.values) {
    std::snprintf(buf, sizeof buf, "%.6f %.6f %d\n", f.time, f.f0,
                  f.voiced ? 1 : 0);
    out << buf;
  }
}

}  // namespace dsmvoc
