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

#include "synthetic_corpus.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "dsmvoc/rng.hpp"
#include "dsmvoc/wav.hpp"

namespace dsmvoc::testing {

namespace {

constexpr int kRate = 16000;
constexpr double kPi = std::numbers::pi;

struct Formant {
  double freq;
  double bw;
};

// Rough vowel targets (F1..F4 with bandwidths).
constexpr Formant kVowels[5][4] = {
    {{730, 70}, {1090, 90}, {2440, 130}, {3500, 200}},   // a
    {{270, 60}, {2290, 100}, {3010, 140}, {3700, 220}},  // i
    {{300, 60}, {870, 90}, {2240, 130}, {3400, 200}},    // u
    {{530, 70}, {1840, 100}, {2480, 130}, {3600, 210}},  // e
    {{570, 70}, {840, 90}, {2410, 130}, {3500, 200}},    // o
};

// Two-pole resonator with per-sample retuning.
class Resonator {
 public:
  void tune(double freq, double bw) {
    const double r = std::exp(-kPi * bw / kRate);
    a1_ = 2.0 * r * std::cos(2.0 * kPi * freq / kRate);
    a2_ = -r * r;
    gain_ = (1.0 - r) * std::sqrt(1.0 - 2.0 * r * std::cos(4.0 * kPi * freq / kRate) + r * r);
  }
  double step(double x) {
    const double y = gain_ * x + a1_ * y1_ + a2_ * y2_;
    y2_ = y1_;
    y1_ = y;
    return y;
  }

 private:
  double a1_ = 0, a2_ = 0, gain_ = 1, y1_ = 0, y2_ = 0;
};

enum class SegKind { kSilence, kVowel, kFricative };

struct Segment {
  SegKind kind;
  double seconds;
  int vowel_from;
  int vowel_to;
};

}  // namespace

SpeechSignal synth_utterance(const SyntheticVoice& voice, double seconds) {
  NoiseSource rng(voice.seed);
  auto uniform = [&](double lo, double hi) {
    return lo + (hi - lo) * rng.next_uniform();
  };

  auto pick_vowel = [&] { return std::min(4, static_cast<int>(uniform(0, 5))); };

  // Segment plan: vowels separated by fricatives, sparse short silences.
  std::vector<Segment> plan;
  plan.push_back({SegKind::kSilence, 0.12, 0, 0});
  double planned = 0.12;
  int prev_vowel = pick_vowel();
  while (planned < seconds - 0.2) {
    const int next_vowel = pick_vowel();
    const double vdur = uniform(voice.vowel_lo, voice.vowel_hi);
    plan.push_back({SegKind::kVowel, vdur, prev_vowel, next_vowel});
    planned += vdur;
    prev_vowel = next_vowel;
    const double roll = uniform(0, 1);
    if (roll < 0.45) {
      const double fdur = uniform(0.06, 0.14);
      plan.push_back({SegKind::kFricative, fdur, 0, 0});
      planned += fdur;
    } else if (roll < 0.6) {
      const double sdur = uniform(0.05, 0.12);
      plan.push_back({SegKind::kSilence, sdur, 0, 0});
      planned += sdur;
    }
  }
  plan.push_back({SegKind::kSilence, 0.12, 0, 0});
  planned += 0.12;

  SpeechSignal out;
  out.sample_rate = kRate;
  out.samples.reserve(static_cast<size_t>(planned * kRate) + 16);

  Resonator cascade[4];
  Resonator fric_shape;
  const double total = planned;
  double t_global = 0.0;

  // Per-utterance voice quality; oq drifts slowly across the utterance.
  double oq = uniform(voice.oq_low, voice.oq_high);
  const double oq_rate = uniform(-0.06, 0.06);  // per second
  const double vibrato_hz = uniform(2.6, 3.6);
  const double vibrato_phase = uniform(0, 2.0 * kPi);
  const double span = voice.f0_span;
  const double declination = span * uniform(0.7, 1.0);

  double phase = 1.0;  // forces period setup on first voiced sample
  double period_gain = 1.0;
  double period_f0 = voice.f0_base;
  double radiation_prev = 0.0;

  for (const Segment& seg : plan) {
    const auto nsamp = static_cast<size_t>(std::lround(seg.seconds * kRate));
    if (seg.kind == SegKind::kFricative) {
      fric_shape.tune(uniform(2400, 5000), uniform(900, 1600));
      for (size_t i = 0; i < nsamp; ++i) {
        const double edge =
            std::min({i / (0.01 * kRate), (nsamp - 1 - i) / (0.01 * kRate), 1.0});
        out.samples.push_back(0.06 * edge * fric_shape.step(rng.next_gaussian()));
        t_global += 1.0 / kRate;
      }
      continue;
    }
    if (seg.kind == SegKind::kSilence) {
      for (size_t i = 0; i < nsamp; ++i) {
        out.samples.push_back(2e-5 * rng.next_gaussian());
        t_global += 1.0 / kRate;
      }
      continue;
    }

    // Vowel: time-varying formant cascade over a glottal derivative train.
    for (size_t i = 0; i < nsamp; ++i) {
      const double frac = static_cast<double>(i) / static_cast<double>(nsamp);
      for (int f = 0; f < 4; ++f) {
        const Formant& a = kVowels[seg.vowel_from][f];
        const Formant& b = kVowels[seg.vowel_to][f];
        cascade[f].tune(a.freq + (b.freq - a.freq) * frac,
                        voice.bw_scale * (a.bw + (b.bw - a.bw) * frac));
      }
      const double decl =
          1.0 + declination * (0.5 - t_global / total);
      const double vib = 1.0 + 0.05 * span *
                                   std::sin(2.0 * kPi * vibrato_hz * t_global +
                                            vibrato_phase);
      double f0 = voice.f0_base * decl * vib;
      f0 = std::clamp(f0, (1.0 - 0.8 * span) * voice.f0_base,
                      (1.0 + 0.8 * span) * voice.f0_base);

      phase += period_f0 / kRate;
      if (phase >= 1.0) {
        phase -= 1.0;
        period_f0 = f0 * (1.0 + voice.jitter * rng.next_gaussian());
        period_gain = 1.0 + voice.shimmer * rng.next_gaussian();
        oq += oq_rate / period_f0;
        oq = std::clamp(oq, voice.oq_low, voice.oq_high);
      }

      // Rosenberg flow derivative: sine rise, sharp sine fall reaching -1
      // at closure (the GCI), then an optional exponential return phase.
      const double tp = 0.67 * oq;
      const double tn = 0.33 * oq;
      double g = 0.0;
      if (phase < tp) {
        g = (tn / tp) * std::sin(kPi * phase / tp);
      } else if (phase < tp + tn) {
        g = -std::sin(0.5 * kPi * (phase - tp) / tn);
      } else if (voice.return_phase > 0.0) {
        g = -std::exp(-(phase - tp - tn) / voice.return_phase);
      }
      const double open = phase < tp + tn ? 1.0 : 0.25;
      const double asp = voice.aspiration * open * rng.next_gaussian();
      double x = period_gain * (g + asp);
      // Lip radiation as a first difference.
      const double rad = x - 0.98 * radiation_prev;
      radiation_prev = x;
      x = rad;
      for (auto& reso : cascade) x = reso.step(x);
      out.samples.push_back(40.0 * x);
      t_global += 1.0 / kRate;
    }
  }

  double peak = 0.0;
  for (double v : out.samples) peak = std::max(peak, std::abs(v));
  if (peak > 0.0) {
    const double scale = 0.3 / peak;
    for (double& v : out.samples) v *= scale;
  }
  return out;
}

double write_corpus(const std::filesystem::path& dir, SyntheticVoice voice,
                    int count, double seconds_each) {
  std::filesystem::create_directories(dir);
  double total = 0.0;
  for (int i = 0; i < count; ++i) {
    SyntheticVoice v = voice;
    v.seed = voice.seed + 1000ull * static_cast<std::uint64_t>(i);
    const SpeechSignal utt = synth_utterance(v, seconds_each);
    char name[32];
    std::snprintf(name, sizeof name, "u%02d.wav", i);
    write_wav(utt, dir / name);
    total += utt.duration();
  }
  return total;
}

}  // namespace dsmvoc::testing
