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

// Micro-benchmarks for the synthesis-critical paths: the band-limited
// resampler, single-frame excitation, noise shaping, full excitation
// assembly, the MLSA filter and envelope analysis. The model is a small
// synthetic stand-in; absolute numbers track real models closely because
// the shapes (frame length 160, order 24, AR order 18) are the defaults.

#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "dsmvoc/dsp.hpp"
#include "dsmvoc/eigenbasis.hpp"
#include "dsmvoc/envelope.hpp"
#include "dsmvoc/frames.hpp"
#include "dsmvoc/model.hpp"
#include "dsmvoc/noise.hpp"
#include "dsmvoc/synth.hpp"
#include "dsmvoc/types.hpp"

namespace {

constexpr int kRate = 16000;

// Flat-spectrum multisine frames; enough structure for a plausible basis.
std::vector<dsmvoc::ResidualFrame> toy_frames(size_t dim, size_t count) {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const auto window = dsmvoc::dsp::blackman_window(dim);
  std::vector<dsmvoc::ResidualFrame> frames(count);
  for (auto& frame : frames) {
    frame.samples.assign(dim, 0.0);
    for (size_t h = 1; h <= 39; ++h) {
      const double phase =
          -std::numbers::pi * static_cast<double>(h * (h - 1)) / 39.0;
      const double scale = 1.0 + 0.1 * gauss(rng);
      for (size_t i = 0; i < dim; ++i)
        frame.samples[i] +=
            scale * std::cos(2.0 * std::numbers::pi * h * i / dim + phase);
    }
    for (size_t i = 0; i < dim; ++i) frame.samples[i] *= window[i];
    const double norm = dsmvoc::dsp::l2_norm(frame.samples);
    for (auto& s : frame.samples) s /= norm;
    frame.normalized = true;
    frame.source_f0 = 200.0;
  }
  return frames;
}

const dsmvoc::DsmModel& toy_model() {
  static const dsmvoc::DsmModel model = [] {
    dsmvoc::DsmModel m;
    m.sample_rate = kRate;
    m.f0_min = 100.0;
    m.f0_max = 240.0;
    m.norm = dsmvoc::compute_normalization(kRate, 4000.0, 100.0);
    const auto frames = toy_frames(m.norm.normalized_length, 100);
    m.basis = dsmvoc::fit_pca(frames, true);
    m.noise = dsmvoc::estimate_ar_filter_from_power(
        std::vector<double>(dsmvoc::kNoiseFftSize / 2 + 1, 1.0), kRate, 18,
        4000.0);
    m.noise.beta = 0.5;
    m.noise.band_gain_ratio = 0.25;
    m.mean_abs_w1 = 0.2;
    return m;
  }();
  return model;
}

dsmvoc::DsmParams flat_params(size_t k, double seconds) {
  dsmvoc::DsmParams params;
  params.k = k;
  params.env_order = 24;
  params.frame_shift = 0.005;
  const size_t n = static_cast<size_t>(seconds / params.frame_shift);
  for (size_t i = 0; i < n; ++i) {
    dsmvoc::ParamFrame f;
    f.time = i * params.frame_shift;
    f.voiced = true;
    f.f0 = 150.0;
    f.pca_weights.assign(k, 0.1);
    f.envelope_coefficients.assign(25, 0.0);
    params.frames.push_back(std::move(f));
  }
  return params;
}

void BM_Resample(benchmark::State& state) {
  const auto frames = toy_frames(160, 1);
  const size_t out_len = static_cast<size_t>(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(dsmvoc::dsp::resample(frames[0].samples, out_len));
  state.SetItemsProcessed(state.iterations() * out_len);
}
BENCHMARK(BM_Resample)->Arg(213)->Arg(320);

void BM_SynthVoicedFrame(benchmark::State& state) {
  const auto& model = toy_model();
  const std::vector<double> weights(static_cast<size_t>(state.range(0)), 0.1);
  uint64_t seed = 0;
  for (auto _ : state)
    benchmark::DoNotOptimize(
        dsmvoc::synth_voiced_frame(150.0, weights, model, seed++));
}
BENCHMARK(BM_SynthVoicedFrame)->Arg(0)->Arg(15);

void BM_NoiseFrame(benchmark::State& state) {
  const auto& model = toy_model();
  const auto env = dsmvoc::build_envelope(160, 0.5);
  uint64_t seed = 0;
  for (auto _ : state)
    benchmark::DoNotOptimize(
        dsmvoc::generate_noise_frame(320, model.noise, env.values, seed++));
  state.SetItemsProcessed(state.iterations() * 320);
}
BENCHMARK(BM_NoiseFrame);

void BM_BuildExcitation(benchmark::State& state) {
  const auto& model = toy_model();
  const auto params = flat_params(static_cast<size_t>(state.range(0)), 1.0);
  for (auto _ : state)
    benchmark::DoNotOptimize(dsmvoc::build_excitation(params, model));
  // items = output samples, so items/s over 16000 is the real-time factor.
  state.SetItemsProcessed(state.iterations() * kRate);
}
BENCHMARK(BM_BuildExcitation)->Arg(0)->Arg(15)->Unit(benchmark::kMillisecond);

void BM_SynthesisFilter(benchmark::State& state) {
  const auto params = flat_params(0, 1.0);
  dsmvoc::EnvelopeTrack env;
  env.config.order = 24;
  std::mt19937_64 rng(11);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (size_t i = 0; i < params.frames.size(); ++i) {
    std::vector<double> c(25, 0.0);
    c[1] = 0.3;  // a mild, stable first coefficient
    env.frames.push_back(c);
  }
  dsmvoc::SpeechSignal excitation;
  excitation.sample_rate = kRate;
  excitation.samples.resize(kRate);
  for (auto& s : excitation.samples) s = gauss(rng);
  for (auto _ : state)
    benchmark::DoNotOptimize(dsmvoc::synthesis_filter(excitation, env));
  state.SetItemsProcessed(state.iterations() * kRate);
}
BENCHMARK(BM_SynthesisFilter)->Unit(benchmark::kMillisecond);

void BM_Project(benchmark::State& state) {
  const auto& model = toy_model();
  const auto frames = toy_frames(160, 1);
  for (auto _ : state)
    benchmark::DoNotOptimize(
        dsmvoc::project(frames[0].samples, model.basis, 15));
}
BENCHMARK(BM_Project);

void BM_AnalyzeEnvelope(benchmark::State& state) {
  dsmvoc::SpeechSignal signal;
  signal.sample_rate = kRate;
  signal.samples.resize(kRate / 5);
  std::mt19937_64 rng(13);
  std::normal_distribution<double> gauss(0.0, 0.01);
  for (size_t i = 0; i < signal.samples.size(); ++i)
    signal.samples[i] = 0.2 * std::sin(2.0 * std::numbers::pi * 150.0 * i /
                                       kRate) +
                        0.1 * std::sin(2.0 * std::numbers::pi * 730.0 * i /
                                       kRate) +
                        gauss(rng);
  const dsmvoc::EnvelopeConfig cfg;
  for (auto _ : state)
    benchmark::DoNotOptimize(dsmvoc::analyze_envelope(signal, cfg));
  state.SetItemsProcessed(state.iterations() * signal.samples.size());
}
BENCHMARK(BM_AnalyzeEnvelope)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
