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

#include "dsmvoc/train.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <thread>

#include "dsmvoc/dsp.hpp"
#include "dsmvoc/frames.hpp"
#include "dsmvoc/gci.hpp"
#include "dsmvoc/noise.hpp"
#include "dsmvoc/pitch.hpp"
#include "dsmvoc/wav.hpp"

namespace dsmvoc {

namespace {

constexpr int kRequiredRate = 16000;

// Everything one utterance contributes; reduced in corpus order so the
// result does not depend on worker scheduling.
struct UtteranceAccum {
  std::vector<ResidualFrame> normalized;
  std::vector<double> power_sum;  // periodogram accumulator
  size_t power_frames = 0;
  double ratio_sum = 0.0;
  size_t ratio_frames = 0;
  size_t skipped = 0;
  size_t rejected = 0;
  size_t flagged = 0;
  double seconds = 0.0;
  std::string error;  // nonempty: processing failed
};

UtteranceAccum process_utterance(const std::filesystem::path& path,
                                 const TrainConfig& cfg,
                                 const NormalizationConfig& norm) {
  UtteranceAccum acc;
  acc.power_sum.assign(kNoiseFftSize / 2 + 1, 0.0);

  const auto signal = read_wav(path);
  if (signal.sample_rate != kRequiredRate)
    throw Error(path.string() + ": training needs " +
                std::to_string(kRequiredRate) + " Hz input, got " +
                std::to_string(signal.sample_rate));
  acc.seconds = signal.duration();

  const auto env = analyze_envelope(signal, cfg.envelope);
  for (const auto flag : env.flagged) acc.flagged += flag;
  const auto residual = inverse_filter(signal, env);

  PitchTrack pitch;
  const auto f0_path = cfg.f0_dir / (path.stem().string() + ".f0");
  if (!cfg.f0_dir.empty() && std::filesystem::exists(f0_path))
    pitch = read_pitch_file(f0_path, cfg.f0_min, cfg.f0_max);
  else
    pitch = estimate_pitch(signal, cfg.f0_min, cfg.f0_max);

  const auto gci = detect_gci(residual, pitch);
  auto extracted = extract_frames(residual, gci, pitch);
  acc.skipped = extracted.skipped;

  acc.normalized.reserve(extracted.frames.size());
  for (auto& frame : extracted.frames) {
    try {
      auto normed = normalize_frame(frame, norm);
      if (accumulate_frame_power(frame.samples, acc.power_sum))
        ++acc.power_frames;
      acc.ratio_sum += band_rms_ratio(frame.samples, kRequiredRate,
                                      cfg.f_max_voiced);
      ++acc.ratio_frames;
      acc.normalized.push_back(std::move(normed));
    } catch (const Error&) {
      ++acc.rejected;
    }
  }
  return acc;
}

}  // namespace

TrainResult train_model(const TrainConfig& cfg) {
  std::vector<std::filesystem::path> wavs;
  if (!std::filesystem::is_directory(cfg.corpus_dir))
    throw Error("corpus directory not found: " + cfg.corpus_dir.string());
  for (const auto& entry : std::filesystem::directory_iterator(cfg.corpus_dir))
    if (entry.is_regular_file() && entry.path().extension() == ".wav")
      wavs.push_back(entry.path());
  std::sort(wavs.begin(), wavs.end());
  if (wavs.empty())
    throw Error("no .wav files in " + cfg.corpus_dir.string());

  const auto norm =
      compute_normalization(kRequiredRate, cfg.f_max_voiced, cfg.f0_min,
                            cfg.f0_star_override);

  std::vector<UtteranceAccum> accs(wavs.size());
  const int jobs = std::max(1, cfg.jobs);
  if (jobs == 1) {
    for (size_t i = 0; i < wavs.size(); ++i) {
      try {
        accs[i] = process_utterance(wavs[i], cfg, norm);
      } catch (const Error& e) {
        accs[i].error = e.what();
      }
    }
  } else {
    std::atomic<size_t> next{0};
    auto worker = [&] {
      while (true) {
        const size_t i = next.fetch_add(1);
        if (i >= wavs.size()) return;
        try {
          accs[i] = process_utterance(wavs[i], cfg, norm);
        } catch (const Error& e) {
          accs[i].error = e.what();
        }
      }
    };
    std::vector<std::thread> pool;
    for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  for (size_t i = 0; i < accs.size(); ++i)
    if (!accs[i].error.empty()) throw Error(accs[i].error);

  TrainResult result;
  TrainReport& report = result.report;
  report.utterances = wavs.size();

  std::vector<ResidualFrame> dataset;
  std::vector<double> power_sum(kNoiseFftSize / 2 + 1, 0.0);
  size_t power_frames = 0;
  double ratio_sum = 0.0;
  size_t ratio_frames = 0;
  for (auto& acc : accs) {
    report.corpus_seconds += acc.seconds;
    report.skipped_gcis += acc.skipped;
    report.rejected_frames += acc.rejected;
    report.flagged_envelope_frames += acc.flagged;
    for (size_t b = 0; b < power_sum.size(); ++b)
      power_sum[b] += acc.power_sum[b];
    power_frames += acc.power_frames;
    ratio_sum += acc.ratio_sum;
    ratio_frames += acc.ratio_frames;
    for (auto& frame : acc.normalized) dataset.push_back(std::move(frame));
    acc.normalized.clear();
    acc.normalized.shrink_to_fit();
  }
  report.usable_frames = dataset.size();
  if (dataset.size() < 2) throw Error("no voiced frames in corpus");

  DsmModel& model = result.model;
  model.sample_rate = kRequiredRate;
  model.f0_min = cfg.f0_min;
  model.f0_max = cfg.f0_max;
  model.norm = norm;
  model.envelope = cfg.envelope;
  model.basis = fit_pca(dataset, cfg.center);

  report.dispersion = dispersion(model.basis);
  report.k_at_coverage = select_components(report.dispersion, cfg.coverage);
  report.first_eigenvector_share = report.dispersion.cumulative_fraction[0];

  double w1_abs_sum = 0.0;
  for (const auto& frame : dataset)
    w1_abs_sum += std::abs(project(frame.samples, model.basis, 1)[0]);
  model.mean_abs_w1 = w1_abs_sum / static_cast<double>(dataset.size());

  if (power_frames == 0) throw Error("no frames usable for the noise fit");
  for (double& p : power_sum) p /= static_cast<double>(power_frames);
  model.noise = estimate_ar_filter_from_power(std::move(power_sum),
                                              kRequiredRate, cfg.ar_order,
                                              cfg.f_max_voiced);
  model.noise.beta = cfg.beta;
  model.noise.band_gain_ratio =
      ratio_frames ? ratio_sum / static_cast<double>(ratio_frames) : 1.0;

  // Stop-band attenuation at F_m - 500 Hz relative to the passband peak.
  std::vector<double> freqs;
  for (double f = cfg.f_max_voiced; f <= norm.f_nyquist; f += 10.0)
    freqs.push_back(f);
  freqs.push_back(cfg.f_max_voiced - 500.0);
  const auto resp = noise_filter_response_db(model.noise, freqs, kRequiredRate);
  const double pass_peak =
      *std::max_element(resp.begin(), resp.end() - 1);
  report.ar_stopband_db = pass_peak - resp.back();
  report.band_gain_ratio = model.noise.band_gain_ratio;
  return result;
}

}  // namespace dsmvoc
