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

#include "dsmvoc/synth.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "dsmvoc/dsp.hpp"
#include "dsmvoc/noise.hpp"
#include "dsmvoc/rng.hpp"

namespace dsmvoc {

namespace {

// Seed-index spaces: voiced plan entries use their entry index, unvoiced
// parameter frames are offset into a disjoint range.
constexpr uint64_t kUnvoicedSeedBase = 1ull << 32;

constexpr double kHoleDepthDb = 30.0;
constexpr double kHoleWidthHz = 500.0;

double lerp_f0(const DsmParams& p, size_t i0, size_t i1, double t) {
  if (i1 == i0) return p.frames[i0].f0;
  double pos = (t - p.frames[i0].time) / p.frame_shift;
  pos = std::clamp(pos, 0.0, static_cast<double>(i1 - i0));
  const size_t j = std::min(static_cast<size_t>(pos), i1 - i0 - 1);
  const double w = pos - static_cast<double>(j);
  return (1.0 - w) * p.frames[i0 + j].f0 + w * p.frames[i0 + j + 1].f0;
}

std::vector<double> lerp_weights(const DsmParams& p, size_t i0, size_t i1,
                                 double t) {
  if (i1 == i0) return p.frames[i0].pca_weights;
  double pos = (t - p.frames[i0].time) / p.frame_shift;
  pos = std::clamp(pos, 0.0, static_cast<double>(i1 - i0));
  const size_t j = std::min(static_cast<size_t>(pos), i1 - i0 - 1);
  const double w = pos - static_cast<double>(j);
  const auto& a = p.frames[i0 + j].pca_weights;
  const auto& b = p.frames[i0 + j + 1].pca_weights;
  std::vector<double> out(a.size());
  for (size_t i = 0; i < a.size(); ++i) out[i] = (1.0 - w) * a[i] + w * b[i];
  return out;
}

// The testable form of the band guarantee: a contiguous low-band stretch
// wider than 500 Hz sitting more than 30 dB under the low-band mean.
bool has_energy_hole(const std::vector<double>& frame, int rate, double f_m) {
  const size_t nfft = std::max<size_t>(1024, dsp::next_pow2(frame.size()));
  const auto spec = dsp::fft_real(frame, nfft);
  const size_t edge = static_cast<size_t>(f_m / rate * nfft);
  if (edge < 4) return false;
  double mean_power = 0.0;
  for (size_t i = 1; i < edge; ++i) mean_power += std::norm(spec[i]);
  mean_power /= static_cast<double>(edge - 1);
  if (mean_power <= 0.0) return true;
  const double threshold = mean_power * std::pow(10.0, -kHoleDepthDb / 10.0);
  const double bin_hz = static_cast<double>(rate) / nfft;
  const size_t max_run = static_cast<size_t>(kHoleWidthHz / bin_hz);
  size_t run = 0;
  for (size_t i = 1; i < edge; ++i) {
    run = std::norm(spec[i]) < threshold ? run + 1 : 0;
    if (run > max_run) return true;
  }
  return false;
}

void scale_to_unit_l2(std::vector<double>& v) {
  const double norm = dsp::l2_norm(v);
  if (norm > 0.0)
    for (double& x : v) x /= norm;
}

}  // namespace

DsmParams read_params(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  DsmParams params;
  std::string line;
  size_t line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (have_header) continue;  // later comments are ignored
      std::istringstream ss(line.substr(1));
      std::string tok;
      while (ss >> tok) {
        const auto eq = tok.find('=');
        if (eq == std::string::npos) continue;
        const std::string key = tok.substr(0, eq);
        const std::string val = tok.substr(eq + 1);
        try {
          if (key == "k")
            params.k = std::stoul(val);
          else if (key == "env_order")
            params.env_order = std::stoi(val);
          else if (key == "alpha")
            params.alpha = std::stod(val);
          else if (key == "gamma")
            params.gamma = std::stod(val);
          else if (key == "shift")
            params.frame_shift = std::stod(val);
          else if (key == "seed")
            params.master_seed = std::stoull(val);
        } catch (const std::exception&) {
          throw Error(path.string() + ":" + std::to_string(line_no) +
                      ": bad header value `" + tok + "`");
        }
      }
      have_header = true;
      continue;
    }
    if (!have_header)
      throw Error(path.string() + ":" + std::to_string(line_no) +
                  ": missing `#` header line");
    std::istringstream ss(line);
    ParamFrame f;
    int voiced = 0;
    if (!(ss >> f.time >> voiced >> f.f0) || (voiced != 0 && voiced != 1))
      throw Error(path.string() + ":" + std::to_string(line_no) +
                  ": expected `time_s voiced{0|1} f0_hz ...`");
    f.voiced = voiced == 1;
    if (!f.voiced) f.f0 = 0.0;
    f.pca_weights.resize(params.k);
    for (size_t i = 0; i < params.k; ++i)
      if (!(ss >> f.pca_weights[i]))
        throw Error(path.string() + ":" + std::to_string(line_no) +
                    ": expected " + std::to_string(params.k) + " weights");
    f.envelope_coefficients.resize(static_cast<size_t>(params.env_order) + 1);
    for (auto& c : f.envelope_coefficients)
      if (!(ss >> c))
        throw Error(path.string() + ":" + std::to_string(line_no) +
                    ": expected " + std::to_string(params.env_order + 1) +
                    " envelope coefficients");
    double extra;
    if (ss >> extra)
      throw Error(path.string() + ":" + std::to_string(line_no) +
                  ": trailing fields");
    params.frames.push_back(std::move(f));
  }
  return params;
}

void write_params(const DsmParams& params, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  char buf[128];
  out << "# k=" << params.k << " env_order=" << params.env_order;
  std::snprintf(buf, sizeof buf, " alpha=%.17g gamma=%.17g shift=%.17g",
                params.alpha, params.gamma, params.frame_shift);
  out << buf << " seed=" << params.master_seed << '\n';
  for (const auto& f : params.frames) {
    std::snprintf(buf, sizeof buf, "%.6f %d", f.time, f.voiced ? 1 : 0);
    out << buf;
    std::snprintf(buf, sizeof buf, " %.17g", f.f0);
    out << buf;
    for (const double w : f.pca_weights) {
      std::snprintf(buf, sizeof buf, " %.17g", w);
      out << buf;
    }
    for (const double c : f.envelope_coefficients) {
      std::snprintf(buf, sizeof buf, " %.17g", c);
      out << buf;
    }
    out << '\n';
  }
  if (!out) throw Error("write failed for " + path.string());
}

SynthesisPlan plan_gci_grid(const DsmParams& params, int sample_rate) {
  SynthesisPlan plan;
  size_t i = 0;
  while (i < params.frames.size()) {
    if (!params.frames[i].voiced || params.frames[i].f0 <= 0.0) {
      ++i;
      continue;
    }
    size_t j = i;
    while (j + 1 < params.frames.size() && params.frames[j + 1].voiced &&
           params.frames[j + 1].f0 > 0.0)
      ++j;
    const double run_end = params.frames[j].time + params.frame_shift;
    double t = params.frames[i].time;  // phase reset at the transition
    while (t < run_end) {
      const double f0 = lerp_f0(params, i, j, t);
      if (f0 <= 0.0) break;
      SynthesisPlan::Entry entry;
      entry.gci = std::lround(t * sample_rate);
      entry.f0 = f0;
      entry.weights = lerp_weights(params, i, j, t);
      plan.entries.push_back(std::move(entry));
      t += 1.0 / f0;
    }
    i = j + 1;
  }
  return plan;
}

std::vector<double> synth_voiced_frame(double f0,
                                       const std::vector<double>& weights,
                                       const DsmModel& model, uint64_t seed,
                                       VocodeStats* stats) {
  if (!(f0 > 0.0)) throw Error("synth_voiced_frame: f0 must be positive");
  const int rate = model.sample_rate;
  const long period = std::lround(rate / f0);
  if (period < 8)
    throw Error("synth_voiced_frame: period below 8 samples at f0 " +
                std::to_string(f0));
  const size_t length = static_cast<size_t>(2 * period);

  if (stats) {
    ++stats->voiced_frames;
    if (f0 < model.norm.f0_min - 1e-9) ++stats->band_edge_warnings;
  }

  const std::vector<double>& w =
      weights.empty() ? std::vector<double>{model.mean_abs_w1} : weights;
  std::vector<double> det = reconstruct(w, model.basis);
  det = dsp::resample(det, length);
  const double det_norm = dsp::l2_norm(det);

  // The noise envelope carries the same taper the training frames got at
  // extraction: triangle times Blackman, normalized so the stochastic
  // component's expected energy is band_gain_ratio^2 times the
  // deterministic frame's.
  const auto tri = build_envelope(period, model.noise.beta);
  const auto window = dsp::blackman_window(length);
  std::vector<double> env(length);
  for (size_t k = 0; k < length; ++k) env[k] = tri.values[k] * window[k];
  scale_to_unit_l2(env);

  auto sto = generate_noise_frame(length, model.noise, env, seed);
  const double ref = det_norm > 0.0 ? det_norm : 1.0;
  std::vector<double> frame(length);
  for (size_t k = 0; k < length; ++k) frame[k] = det[k] + ref * sto[k];

  if (stats && has_energy_hole(frame, rate, model.norm.f_max_voiced))
    ++stats->energy_holes;
  return frame;
}

std::vector<double> synth_unvoiced(size_t length, double sigma,
                                   uint64_t seed) {
  NoiseSource rng(seed);
  std::vector<double> out(length);
  for (double& v : out) v = sigma * rng.next_gaussian();
  return out;
}

SpeechSignal overlap_add(const SynthesisPlan& plan,
                         const std::vector<std::vector<double>>& frames,
                         size_t length, int sample_rate) {
  if (plan.entries.size() != frames.size())
    throw Error("overlap_add: plan and frame counts differ");
  SpeechSignal out;
  out.sample_rate = sample_rate;
  out.samples.assign(length, 0.0);
  for (size_t i = 0; i < frames.size(); ++i) {
    const auto& frame = frames[i];
    const long start =
        plan.entries[i].gci - static_cast<long>(frame.size() / 2);
    for (size_t k = 0; k < frame.size(); ++k) {
      const long t = start + static_cast<long>(k);
      if (t >= 0 && t < static_cast<long>(length))
        out.samples[static_cast<size_t>(t)] += frame[k];
    }
  }
  return out;
}

ExcitationResult build_excitation(const DsmParams& params,
                                  const DsmModel& model) {
  ExcitationResult result;
  const int rate = model.sample_rate;
  const long shift = std::lround(params.frame_shift * rate);
  if (shift <= 0) throw Error("build_excitation: bad frame shift");
  const size_t n = params.frames.size() * static_cast<size_t>(shift);

  const auto plan = plan_gci_grid(params, rate);
  std::vector<std::vector<double>> frames;
  frames.reserve(plan.entries.size());
  for (size_t i = 0; i < plan.entries.size(); ++i) {
    auto frame =
        synth_voiced_frame(plan.entries[i].f0, plan.entries[i].weights, model,
                           derive_seed(params.master_seed, i), &result.stats);
    scale_to_unit_l2(frame);  // energy policy: loudness lives in c0
    frames.push_back(std::move(frame));
  }
  result.excitation = overlap_add(plan, frames, n, rate);

  const double sigma_uv = std::sqrt(model.norm.f0_star / rate);
  for (size_t j = 0; j < params.frames.size(); ++j) {
    if (params.frames[j].voiced) continue;
    const auto noise =
        synth_unvoiced(static_cast<size_t>(shift), sigma_uv,
                       derive_seed(params.master_seed, kUnvoicedSeedBase + j));
    const size_t base = j * static_cast<size_t>(shift);
    for (size_t k = 0; k < noise.size(); ++k)
      result.excitation.samples[base + k] += noise[k];
    result.stats.unvoiced_samples += noise.size();
  }
  return result;
}

VocodeResult vocode(const DsmParams& params, const DsmModel& model) {
  auto exc = build_excitation(params, model);

  EnvelopeTrack env;
  env.config = model.envelope;
  env.config.alpha = params.alpha;
  env.config.gamma = params.gamma;
  env.config.order = params.env_order;
  env.config.frame_shift = params.frame_shift;
  env.frames.reserve(params.frames.size());
  for (const auto& f : params.frames) {
    if (f.envelope_coefficients.size() !=
        static_cast<size_t>(params.env_order) + 1)
      throw Error("vocode: envelope coefficient count mismatch");
    env.frames.push_back(f.envelope_coefficients);
  }
  env.flagged.assign(env.frames.size(), 0);

  VocodeResult result;
  result.stats = exc.stats;
  result.audio = synthesis_filter(exc.excitation, env);
  return result;
}

CopySynthResult copy_synthesis(const SpeechSignal& signal,
                               const DsmModel& model, size_t k,
                               uint64_t master_seed,
                               const PitchTrack* external_pitch) {
  if (signal.sample_rate != model.sample_rate)
    throw Error("copy_synthesis: signal rate " +
                std::to_string(signal.sample_rate) + " != model rate " +
                std::to_string(model.sample_rate));
  if (k > model.basis.eigenvectors.size())
    throw Error("copy_synthesis: k exceeds the model's eigenvector count");

  CopySynthResult result;
  const int rate = model.sample_rate;
  const auto env = analyze_envelope(signal, model.envelope);
  const auto residual = inverse_filter(signal, env);
  const PitchTrack pitch =
      external_pitch ? *external_pitch
                     : estimate_pitch(signal, model.f0_min, model.f0_max);
  const auto gci = detect_gci(residual, pitch);
  auto extracted = extract_frames(residual, gci, pitch);
  result.skipped_gcis = extracted.skipped;

  // Weights per usable GCI.
  std::vector<double> gci_times;
  std::vector<std::vector<double>> gci_weights;
  for (const auto& frame : extracted.frames) {
    try {
      const auto normed = normalize_frame(frame, model.norm);
      gci_times.push_back(static_cast<double>(frame.center_gci) / rate);
      gci_weights.push_back(project(normed.samples, model.basis, k));
    } catch (const Error&) {
      ++result.rejected_frames;
    }
  }

  DsmParams params;
  params.k = k;
  params.env_order = model.envelope.order;
  params.alpha = model.envelope.alpha;
  params.gamma = model.envelope.gamma;
  params.frame_shift = model.envelope.frame_shift;
  params.master_seed = master_seed;
  params.frames.resize(env.frames.size());

  size_t nearest = 0;
  for (size_t j = 0; j < env.frames.size(); ++j) {
    auto& f = params.frames[j];
    f.time = static_cast<double>(j) * params.frame_shift;
    f.envelope_coefficients = env.frames[j];
    const double f0 = pitch.f0_at(f.time);
    if (pitch.voiced_at(f.time) && f0 > 0.0) {
      f.voiced = true;
      f.f0 = std::clamp(f0, model.f0_min, model.f0_max);
      if (!gci_times.empty()) {
        while (nearest + 1 < gci_times.size() &&
               std::abs(gci_times[nearest + 1] - f.time) <=
                   std::abs(gci_times[nearest] - f.time))
          ++nearest;
        f.pca_weights = gci_weights[nearest];
      } else {
        f.pca_weights.assign(k, 0.0);
      }
    } else {
      f.pca_weights.assign(k, 0.0);
    }
  }

  auto exc = build_excitation(params, model);
  result.stats = exc.stats;

  // Loudness lives in c0: fold the per-frame residual-vs-excitation RMS
  // ratio into the gain so synthesis restores the analyzed level.
  const long shift = std::lround(params.frame_shift * rate);
  const long n = static_cast<long>(exc.excitation.samples.size());
  for (size_t j = 0; j < params.frames.size(); ++j) {
    const long center = static_cast<long>(j) * shift;
    const long lo = std::max<long>(0, center - shift / 2);
    const long hi = std::min<long>(n, center + shift - shift / 2);
    if (lo >= hi) continue;
    double er = 0.0, ee = 0.0;
    for (long t = lo; t < hi; ++t) {
      const auto u = static_cast<size_t>(t);
      if (u < residual.samples.size())
        er += residual.samples[u] * residual.samples[u];
      ee += exc.excitation.samples[u] * exc.excitation.samples[u];
    }
    if (er > 0.0 && ee > 0.0)
      params.frames[j].envelope_coefficients[0] += 0.5 * std::log(er / ee);
  }

  EnvelopeTrack adjusted;
  adjusted.config = model.envelope;
  adjusted.frames.reserve(params.frames.size());
  for (const auto& f : params.frames)
    adjusted.frames.push_back(f.envelope_coefficients);
  adjusted.flagged.assign(adjusted.frames.size(), 0);

  result.audio = synthesis_filter(exc.excitation, adjusted);
  result.params = std::move(params);
  return result;
}

}  // namespace dsmvoc
