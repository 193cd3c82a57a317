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
#include <complex>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "dsmvoc/dsp.hpp"
#include "dsmvoc/metrics.hpp"
#include "dsmvoc/model.hpp"
#include "dsmvoc/noise.hpp"
#include "dsmvoc/synth.hpp"
#include "dsmvoc/train.hpp"
#include "dsmvoc/wav.hpp"

namespace {

void print_kv(const char* key, double value) {
  std::printf("%s=%.6g\n", key, value);
}

void print_kv(const char* key, size_t value) {
  std::printf("%s=%zu\n", key, value);
}

int run_train(const dsmvoc::TrainConfig& cfg,
              const std::filesystem::path& out) {
  const auto result = dsmvoc::train_model(cfg);
  dsmvoc::save_model(result.model, out);
  const auto& r = result.report;
  print_kv("utterances", r.utterances);
  print_kv("corpus_minutes", r.corpus_seconds / 60.0);
  print_kv("usable_frames", r.usable_frames);
  print_kv("skipped_gcis", r.skipped_gcis);
  print_kv("rejected_frames", r.rejected_frames);
  print_kv("flagged_envelope_frames", r.flagged_envelope_frames);
  print_kv("normalized_length",
           static_cast<size_t>(result.model.norm.normalized_length));
  print_kv("f0_star_hz", result.model.norm.f0_star);
  print_kv("k_at_coverage", r.k_at_coverage);
  print_kv("first_eigenvector_share", r.first_eigenvector_share);
  print_kv("band_gain_ratio", r.band_gain_ratio);
  print_kv("ar_stopband_db", r.ar_stopband_db);
  print_kv("ar_order", static_cast<size_t>(result.model.noise.order()));
  print_kv("model_bytes", std::filesystem::file_size(out));
  return 0;
}

int run_copysynth(const std::filesystem::path& model_path,
                  const std::filesystem::path& in,
                  const std::filesystem::path& out, size_t k, uint64_t seed,
                  double beta, double noise_gain,
                  const std::filesystem::path& f0_file,
                  const std::filesystem::path& params_out) {
  auto model = dsmvoc::load_model(model_path);
  if (beta > 0.0) model.noise.beta = beta;
  if (noise_gain >= 0.0) model.noise.band_gain_ratio = noise_gain;

  const auto signal = dsmvoc::read_wav(in);
  if (signal.sample_rate != model.sample_rate)
    throw dsmvoc::Error(in.string() + ": expected " +
                        std::to_string(model.sample_rate) + " Hz input");

  dsmvoc::PitchTrack external;
  const dsmvoc::PitchTrack* pitch = nullptr;
  if (!f0_file.empty()) {
    external = dsmvoc::read_pitch_file(f0_file, model.f0_min, model.f0_max);
    pitch = &external;
  }

  const auto result = dsmvoc::copy_synthesis(signal, model, k, seed, pitch);
  const size_t clipped = dsmvoc::write_wav(result.audio, out);
  if (!params_out.empty()) dsmvoc::write_params(result.params, params_out);

  const auto pitch_in =
      dsmvoc::estimate_pitch(signal, model.f0_min, model.f0_max);
  const auto pitch_out =
      dsmvoc::estimate_pitch(result.audio, model.f0_min, model.f0_max);
  print_kv("f0_dev_median",
           dsmvoc::median_f0_deviation(pitch_in, pitch_out));
  print_kv("mel_lsd_db_median",
           dsmvoc::median_mel_lsd_db(signal, result.audio,
                                     model.norm.f_max_voiced));
  print_kv("seg_snr_db", dsmvoc::segmental_snr_db(signal, result.audio));
  print_kv("voiced_frames", result.stats.voiced_frames);
  print_kv("energy_holes", result.stats.energy_holes);
  print_kv("band_edge_warnings", result.stats.band_edge_warnings);
  print_kv("skipped_gcis", result.skipped_gcis);
  print_kv("rejected_frames", result.rejected_frames);
  print_kv("clipped_samples", clipped);
  return 0;
}

int run_vocode(const std::filesystem::path& model_path,
               const std::filesystem::path& params_path,
               const std::filesystem::path& out) {
  const auto model = dsmvoc::load_model(model_path);
  const auto params = dsmvoc::read_params(params_path);
  const auto result = dsmvoc::vocode(params, model);
  const size_t clipped = dsmvoc::write_wav(result.audio, out);
  print_kv("samples", result.audio.samples.size());
  print_kv("voiced_frames", result.stats.voiced_frames);
  print_kv("energy_holes", result.stats.energy_holes);
  print_kv("band_edge_warnings", result.stats.band_edge_warnings);
  print_kv("clipped_samples", clipped);
  return 0;
}

int run_export(const std::filesystem::path& model_path, const std::string& what,
               const std::filesystem::path& out) {
  const auto model = dsmvoc::load_model(model_path);
  std::ofstream csv(out);
  if (!csv) throw dsmvoc::Error("cannot write " + out.string());

  if (what == "dispersion") {
    const auto curve = dsmvoc::dispersion(model.basis);
    csv << "k,cumulative_fraction\n";
    char buf[64];
    for (size_t i = 0; i < model.basis.eigenvectors.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%zu,%.12g\n", i + 1,
                    curve.cumulative_fraction[i]);
      csv << buf;
    }
    return 0;
  }
  if (what.rfind("eigenvector:", 0) == 0) {
    const size_t index = std::stoul(what.substr(12));
    if (index < 1 || index > model.basis.eigenvectors.size())
      throw dsmvoc::Error("eigenvector index out of range (stored: " +
                          std::to_string(model.basis.eigenvectors.size()) +
                          ")");
    csv << "index,sample,value\n";
    const auto& v = model.basis.eigenvectors[index - 1];
    char buf[64];
    for (size_t i = 0; i < v.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%zu,%zu,%.12g\n", index, i, v[i]);
      csv << buf;
    }
    return 0;
  }
  if (what == "ar-response") {
    std::vector<double> freqs;
    for (double f = 0.0; f <= 8000.0; f += 10.0) freqs.push_back(f);
    const auto resp =
        dsmvoc::noise_filter_response_db(model.noise, freqs, model.sample_rate);
    csv << "freq_hz,db\n";
    char buf[64];
    for (size_t i = 0; i < freqs.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.1f,%.6f\n", freqs[i], resp[i]);
      csv << buf;
    }
    return 0;
  }
  if (what.rfind("decomposition:", 0) == 0) {
    // Deterministic, stochastic, and summed spectra of one synthesized
    // frame, parameterized from the middle of the given utterance.
    const std::filesystem::path wav = what.substr(14);
    const auto signal = dsmvoc::read_wav(wav);
    const auto env = dsmvoc::analyze_envelope(signal, model.envelope);
    const auto residual = dsmvoc::inverse_filter(signal, env);
    const auto pitch =
        dsmvoc::estimate_pitch(signal, model.f0_min, model.f0_max);
    const auto gci = dsmvoc::detect_gci(residual, pitch);
    const auto extracted = dsmvoc::extract_frames(residual, gci, pitch);
    if (extracted.frames.empty())
      throw dsmvoc::Error(wav.string() + ": no voiced frames to decompose");
    const auto& frame = extracted.frames[extracted.frames.size() / 2];
    const auto normed = dsmvoc::normalize_frame(frame, model.norm);
    const size_t k = std::min<size_t>(15, model.basis.eigenvectors.size());
    const auto weights = dsmvoc::project(normed.samples, model.basis, k);

    dsmvoc::DsmModel silent = model;
    silent.noise.band_gain_ratio = 0.0;
    const auto det =
        dsmvoc::synth_voiced_frame(frame.source_f0, weights, silent, 1);
    const auto sum =
        dsmvoc::synth_voiced_frame(frame.source_f0, weights, model, 1);
    std::vector<double> sto(sum.size());
    for (size_t i = 0; i < sum.size(); ++i) sto[i] = sum[i] - det[i];

    csv << "part,freq_hz,db\n";
    for (const auto& [name, data] :
         {std::pair<const char*, const std::vector<double>&>{"deterministic",
                                                             det},
          {"stochastic", sto},
          {"sum", sum}}) {
      const size_t nfft = 1024;
      const auto spec = dsmvoc::dsp::fft_real(data, nfft);
      for (size_t i = 0; i <= nfft / 2; ++i) {
        const double db = 10.0 * std::log10(std::norm(spec[i]) + 1e-20);
        csv << name << ',' << static_cast<double>(i) * model.sample_rate / nfft
            << ',' << db << '\n';
      }
    }
    return 0;
  }
  throw dsmvoc::Error(
      "unknown export target `" + what +
      "`; expected dispersion | eigenvector:i | ar-response | "
      "decomposition:file.wav");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"DSM residual vocoder: train, copy-synthesize, vocode, export"};
  app.require_subcommand(1);

  // train
  auto* train = app.add_subcommand("train", "Train a voice model from a corpus");
  dsmvoc::TrainConfig cfg;
  std::filesystem::path train_out;
  train->add_option("--corpus", cfg.corpus_dir, "Directory of 16 kHz mono WAVs")
      ->required();
  train->add_option("--out", train_out, "Output model path")->required();
  train->add_option("--f0-min", cfg.f0_min, "Pitch search floor, Hz");
  train->add_option("--f0-max", cfg.f0_max, "Pitch search ceiling, Hz");
  train->add_option("--fm", cfg.f_max_voiced, "Maximum voiced frequency, Hz");
  train->add_option("--coverage", cfg.coverage, "Dispersion coverage target");
  train->add_option("--f0-star", cfg.f0_star_override,
                    "Normalization pitch override, Hz");
  train->add_option("--ar-order", cfg.ar_order, "Noise AR model order");
  train->add_option("--beta", cfg.beta, "Noise envelope floor");
  train->add_flag("--no-center", [&cfg](size_t) { cfg.center = false; },
                  "Skip mean centering before PCA");
  train->add_option("--f0-dir", cfg.f0_dir,
                    "Directory of external .f0 pitch files");
  train->add_option("--jobs", cfg.jobs, "Parallel workers over utterances");
  train->add_option("--alpha", cfg.envelope.alpha, "Warping coefficient");
  train->add_option("--gamma", cfg.envelope.gamma,
                    "Generalization exponent (0 or -1/3)");
  train->add_option("--env-order", cfg.envelope.order,
                    "Envelope cepstral order");

  // copysynth
  auto* copysynth =
      app.add_subcommand("copysynth", "Analyze and resynthesize one utterance");
  std::filesystem::path cs_model, cs_in, cs_out, cs_f0, cs_params;
  size_t cs_k = 15;
  uint64_t cs_seed = 0;
  double cs_beta = -1.0, cs_noise_gain = -1.0;
  copysynth->add_option("--model", cs_model, "Trained model")->required();
  copysynth->add_option("--in", cs_in, "Input WAV")->required();
  copysynth->add_option("--out", cs_out, "Output WAV")->required();
  copysynth->add_option("--k", cs_k, "PCA weight count (0: first-eigenvector mode)");
  copysynth->add_option("--seed", cs_seed, "Master noise seed");
  copysynth->add_option("--beta", cs_beta, "Noise envelope floor override");
  copysynth->add_option("--noise-gain", cs_noise_gain,
                        "band_gain_ratio override");
  copysynth->add_option("--f0-file", cs_f0, "External pitch file");
  copysynth->add_option("--params-out", cs_params,
                        "Also write the extracted parameter file");

  // vocode
  auto* vocode = app.add_subcommand("vocode", "Synthesize from a parameter file");
  std::filesystem::path vc_model, vc_params, vc_out;
  vocode->add_option("--model", vc_model, "Trained model")->required();
  vocode->add_option("--params", vc_params, "Parameter file")->required();
  vocode->add_option("--out", vc_out, "Output WAV")->required();

  // export
  auto* exp = app.add_subcommand("export", "Emit figure data as CSV");
  std::filesystem::path ex_model, ex_out;
  std::string ex_what;
  exp->add_option("--model", ex_model, "Trained model")->required();
  exp->add_option("--what", ex_what,
                  "dispersion | eigenvector:i | ar-response | "
                  "decomposition:file.wav")
      ->required();
  exp->add_option("--out", ex_out, "Output CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return 1;
  }

  try {
    if (*train) return run_train(cfg, train_out);
    if (*copysynth)
      return run_copysynth(cs_model, cs_in, cs_out, cs_k, cs_seed, cs_beta,
                           cs_noise_gain, cs_f0, cs_params);
    if (*vocode) return run_vocode(vc_model, vc_params, vc_out);
    if (*exp) return run_export(ex_model, ex_what, ex_out);
  } catch (const std::exception& e) {
    std::cerr << "dsmvoc: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
