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

#include "dsmvoc/envelope.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <numbers>

#include "dsmvoc/dsp.hpp"
#include "dsmvoc/mgc.hpp"

namespace dsmvoc {

namespace {

constexpr double kSilenceRms = 1e-6;
constexpr double kSilenceC0 = -11.512925464970229;  // ln(1e-5)
constexpr double kMlsaStabilityBound = 6.0;

std::vector<double> make_window(const std::string& name, size_t length) {
  if (name == "hamming") return dsp::hamming_window(length);
  if (name == "hanning") return dsp::hanning_window(length);
  if (name == "blackman") return dsp::blackman_window(length);
  if (name == "rectangular") return std::vector<double>(length, 1.0);
  throw Error("unknown analysis window: " + name);
}

size_t frame_count_for(size_t samples, int shift) {
  return (samples + static_cast<size_t>(shift) - 1) / static_cast<size_t>(shift);
}

// Per-frame coefficients prepared for the running filter: index 0 carries
// the linear gain, 1..order the filter taps (mc2b domain; gamma-scaled and
// gain-normalized for the generalized filter).
std::vector<std::vector<double>> filter_coefficients(const EnvelopeTrack& env) {
  const double gamma = env.config.gamma;
  std::vector<std::vector<double>> out;
  out.reserve(env.frames.size());
  for (const auto& mc : env.frames) {
    std::vector<double> b = mgc::mc2b(mc, env.config.alpha);
    if (gamma == 0.0) {
      b[0] = std::exp(b[0]);
    } else {
      mgc::gnorm(b, gamma);
      for (size_t i = 1; i < b.size(); ++i) b[i] *= gamma;
    }
    out.push_back(std::move(b));
  }
  return out;
}

// Winding number of 1 + F(e^{jw}) around the origin; nonzero means the
// all-pole section of the generalized filter has poles outside the unit
// circle.
bool generalized_frame_stable(std::span<const double> b) {
  const size_t nfft = 256;
  std::vector<double> taps(nfft, 0.0);
  taps[0] = 1.0;
  for (size_t k = 1; k < b.size(); ++k) taps[k] = b[k];
  auto spec = dsp::fft_real(taps, nfft);
  double winding = 0.0;
  double prev = std::arg(spec[0]);
  for (size_t i = 1; i <= nfft; ++i) {
    const double cur = std::arg(spec[i % nfft]);
    double d = cur - prev;
    while (d > std::numbers::pi) d -= 2.0 * std::numbers::pi;
    while (d < -std::numbers::pi) d += 2.0 * std::numbers::pi;
    winding += d;
    prev = cur;
  }
  return std::abs(winding) < std::numbers::pi;
}

class CoefficientTrajectory {
 public:
  CoefficientTrajectory(const std::vector<std::vector<double>>& frames,
                        int shift)
      : frames_(frames), shift_(shift), current_(frames.front().size()) {}

  // Linear interpolation between frame centers; evaluated directly from the
  // sample index so forward and inverse passes see bit-identical values.
  const std::vector<double>& at(size_t t) {
    const size_t i = t / static_cast<size_t>(shift_);
    if (i + 1 >= frames_.size()) {
      current_ = frames_.back();
      return current_;
    }
    const double w = static_cast<double>(t - i * static_cast<size_t>(shift_)) /
                     static_cast<double>(shift_);
    const auto& a = frames_[i];
    const auto& b = frames_[i + 1];
    for (size_t k = 0; k < current_.size(); ++k)
      current_[k] = (1.0 - w) * a[k] + w * b[k];
    return current_;
  }

 private:
  const std::vector<std::vector<double>>& frames_;
  int shift_;
  std::vector<double> current_;
};

SpeechSignal run_filter(const SpeechSignal& in, const EnvelopeTrack& env,
                        bool inverse) {
  env.config.validate();
  if (in.sample_rate <= 0) throw Error("filter: signal has no sample rate");
  if (in.samples.empty()) {
    SpeechSignal empty;
    empty.sample_rate = in.sample_rate;
    return empty;
  }
  const int shift =
      static_cast<int>(std::lround(env.config.frame_shift * in.sample_rate));
  const size_t needed = frame_count_for(in.samples.size(), shift);
  if (env.frames.size() < needed)
    throw Error("filter: envelope track covers " +
                std::to_string(env.frames.size()) + " frames, signal needs " +
                std::to_string(needed));

  auto coeffs = filter_coefficients(env);
  for (size_t i = 0; i < coeffs.size(); ++i) {
    if (env.config.gamma == 0.0) {
      if (mgc::mlsa_stability_margin(coeffs[i]) > kMlsaStabilityBound)
        throw Error("synthesis_filter: unstable envelope frame " +
                    std::to_string(i));
    } else if (!generalized_frame_stable(coeffs[i])) {
      throw Error("synthesis_filter: unstable envelope frame " +
                  std::to_string(i));
    }
  }

  SpeechSignal out;
  out.sample_rate = in.sample_rate;
  out.samples.resize(in.samples.size());
  CoefficientTrajectory traj(coeffs, shift);

  if (env.config.gamma == 0.0) {
    mgc::MlsaFilter filter(env.config.order, env.config.alpha, inverse);
    for (size_t t = 0; t < in.samples.size(); ++t) {
      const auto& b = traj.at(t);
      if (inverse)
        out.samples[t] = filter.step(b, in.samples[t]) / b[0];
      else
        out.samples[t] = filter.step(b, in.samples[t] * b[0]);
    }
  } else {
    mgc::MglsaFilter filter(env.config.order, env.config.alpha,
                            env.config.stages(), inverse);
    for (size_t t = 0; t < in.samples.size(); ++t) {
      const auto& b = traj.at(t);
      if (inverse)
        out.samples[t] = filter.step(b, in.samples[t]) / b[0];
      else
        out.samples[t] = filter.step(b, in.samples[t] * b[0]);
    }
  }
  return out;
}

}  // namespace

void EnvelopeConfig::validate() const {
  if (!(alpha >= 0.0 && alpha < 1.0))
    throw Error("EnvelopeConfig: alpha must be in [0, 1)");
  if (!(gamma == 0.0 || std::abs(gamma + 1.0 / 3.0) < 1e-12))
    throw Error("EnvelopeConfig: gamma must be 0 or -1/3");
  if (order < 1) throw Error("EnvelopeConfig: order must be >= 1");
  if (!(frame_shift > 0.0) || !(frame_shift < frame_length))
    throw Error("EnvelopeConfig: frame_shift must be positive and smaller "
                "than frame_length");
  make_window(window, 8);
}

int EnvelopeConfig::stages() const {
  if (gamma == 0.0) return 0;
  return static_cast<int>(std::lround(-1.0 / gamma));
}

EnvelopeTrack analyze_envelope(const SpeechSignal& signal,
                               const EnvelopeConfig& cfg) {
  cfg.validate();
  if (signal.sample_rate <= 0) throw Error("analyze_envelope: no sample rate");
  const int rate = signal.sample_rate;
  const int shift = static_cast<int>(std::lround(cfg.frame_shift * rate));
  const int flen = static_cast<int>(std::lround(cfg.frame_length * rate));
  const size_t nfft = std::max<size_t>(256, dsp::next_pow2(static_cast<size_t>(flen)));
  const auto window = make_window(cfg.window, static_cast<size_t>(flen));

  EnvelopeTrack track;
  track.config = cfg;
  const size_t n_frames = frame_count_for(signal.samples.size(), shift);
  track.frames.reserve(n_frames);
  track.flagged.assign(n_frames, 0);

  std::vector<double> frame(static_cast<size_t>(flen));
  for (size_t i = 0; i < n_frames; ++i) {
    const long center = static_cast<long>(i) * shift;
    double energy = 0.0;
    for (int k = 0; k < flen; ++k) {
      const long t = center - flen / 2 + k;
      const double v =
          (t >= 0 && t < static_cast<long>(signal.samples.size()))
              ? signal.samples[static_cast<size_t>(t)]
              : 0.0;
      frame[static_cast<size_t>(k)] = v * window[static_cast<size_t>(k)];
      energy += v * v;
    }
    const double rms = std::sqrt(energy / flen);

    std::vector<double> mc;
    bool ok = true;
    if (rms < kSilenceRms) {
      mc.assign(static_cast<size_t>(cfg.order) + 1, 0.0);
      mc[0] = kSilenceC0;
    } else {
      auto fit = mgc::mcep(frame, nfft, cfg.order, cfg.alpha);
      mc = std::move(fit.mc);
      ok = fit.converged;
      if (ok && cfg.gamma != 0.0)
        mc = mgc::mgc2mgc(mc, cfg.alpha, 0.0, cfg.order, cfg.alpha, cfg.gamma);
    }
    if (!ok && !track.frames.empty()) {
      track.flagged[i] = 1;
      track.frames.push_back(track.frames.back());
    } else {
      if (!ok) track.flagged[i] = 1;
      track.frames.push_back(std::move(mc));
    }
  }
  return track;
}

SpeechSignal inverse_filter(const SpeechSignal& signal,
                            const EnvelopeTrack& env) {
  return run_filter(signal, env, true);
}

SpeechSignal synthesis_filter(const SpeechSignal& excitation,
                              const EnvelopeTrack& env) {
  return run_filter(excitation, env, false);
}

void write_envelope_text(const EnvelopeTrack& env,
                         const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  char buf[32];
  for (const auto& frame : env.frames) {
    for (size_t k = 0; k < frame.size(); ++k) {
      std::snprintf(buf, sizeof buf, "%.17g", frame[k]);
      out << (k ? " " : "") << buf;
    }
    out << '\n';
  }
}

std::vector<double> envelope_spectrum_db(const std::vector<double>& coeffs,
                                         const EnvelopeConfig& cfg,
                                         size_t bins) {
  std::vector<double> mc = coeffs;
  if (cfg.gamma != 0.0)
    mc = mgc::mgc2mgc(mc, cfg.alpha, cfg.gamma, cfg.order * 2, cfg.alpha, 0.0);
  std::vector<double> db(bins);
  const double to_db = 20.0 / std::numbers::ln10;
  for (size_t i = 0; i < bins; ++i) {
    const double w = std::numbers::pi * static_cast<double>(i) /
                     static_cast<double>(bins - 1);
    // Phase of the all-pass element at this frequency.
    const double beta =
        w + 2.0 * std::atan2(cfg.alpha * std::sin(w), 1.0 - cfg.alpha * std::cos(w));
    double logmag = 0.0;
    for (size_t k = 0; k < mc.size(); ++k)
      logmag += mc[k] * std::cos(beta * static_cast<double>(k));
    db[i] = to_db * logmag;
  }
  return db;
}

}  // namespace dsmvoc
