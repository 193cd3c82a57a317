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

#ifndef DSMVOC_SYNTH_HPP_
#define DSMVOC_SYNTH_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "dsmvoc/model.hpp"
#include "dsmvoc/pitch.hpp"
#include "dsmvoc/types.hpp"

namespace dsmvoc {

struct ParamFrame {
  double time = 0.0;  // seconds
  bool voiced = false;
  double f0 = 0.0;  // Hz, 0 when unvoiced
  std::vector<double> pca_weights;            // length k
  std::vector<double> envelope_coefficients;  // c0..c_order
};

// One parameter line per frame plus the header fields of the params file.
// k = 0 selects first-eigenvector-only synthesis: the weight is implicit
// (the model's training mean |w1|).
struct DsmParams {
  std::vector<ParamFrame> frames;
  size_t k = 0;
  int env_order = 24;
  double alpha = 0.42;
  double gamma = 0.0;
  double frame_shift = 0.005;  // seconds
  uint64_t master_seed = 0;
};

// Parameter file: header `# k=.. env_order=.. alpha=.. gamma=.. shift=..
// seed=..`, then per frame `time_s voiced{0|1} f0_hz w1..wk c0..c_order`.
DsmParams read_params(const std::filesystem::path& path);
void write_params(const DsmParams& params, const std::filesystem::path& path);

struct SynthesisPlan {
  struct Entry {
    long gci = 0;  // target sample index
    double f0 = 0.0;
    std::vector<double> weights;
  };
  std::vector<Entry> entries;
};

// Places one GCI per period inside every voiced run by cumulative period
// integration of the linearly interpolated f0; the phase resets at each
// unvoiced-to-voiced transition. Weights are interpolated alongside.
SynthesisPlan plan_gci_grid(const DsmParams& params, int sample_rate);

struct VocodeStats {
  size_t voiced_frames = 0;
  size_t unvoiced_samples = 0;
  size_t band_edge_warnings = 0;  // target f0 below the model's F0_min
  size_t energy_holes = 0;        // voiced frames failing the low-band check
};

// One voiced excitation frame of twice the target period: the PCA
// reconstruction resampled to length and unit L2 norm, plus the shaped
// noise under a triangle-times-Blackman envelope of unit L2 norm; the sum
// is renormalized to unit L2. An empty weight vector selects the implicit
// first-eigenvector mode.
std::vector<double> synth_voiced_frame(double f0,
                                       const std::vector<double>& weights,
                                       const DsmModel& model, uint64_t seed,
                                       VocodeStats* stats = nullptr);

// Seeded white Gaussian excitation for unvoiced regions; sigma follows the
// voiced energy policy (unit-L2 frames at the normalization pitch).
std::vector<double> synth_unvoiced(size_t length, double sigma, uint64_t seed);

// Adds each frame centered on its GCI target into a zeroed buffer of
// `length` samples; frames sticking out past the ends are clipped.
SpeechSignal overlap_add(const SynthesisPlan& plan,
                         const std::vector<std::vector<double>>& frames,
                         size_t length, int sample_rate);

struct ExcitationResult {
  SpeechSignal excitation;
  VocodeStats stats;
};

// The full DSM excitation: overlap-added voiced frames plus unvoiced
// noise segments. Pure given (params, model).
ExcitationResult build_excitation(const DsmParams& params,
                                  const DsmModel& model);

struct VocodeResult {
  SpeechSignal audio;
  VocodeStats stats;
};

// build_excitation followed by the synthesis filter over the params'
// envelope coefficients.
VocodeResult vocode(const DsmParams& params, const DsmModel& model);

struct CopySynthResult {
  SpeechSignal audio;
  DsmParams params;
  VocodeStats stats;
  size_t skipped_gcis = 0;     // boundary GCIs without a full frame
  size_t rejected_frames = 0;  // zero-energy frames dropped
};

// Analysis followed by resynthesis: envelope, residual, pitch, GCIs,
// normalized frames, PCA weights, then vocode. Per-frame loudness is
// aligned by folding the residual-vs-excitation RMS ratio into c0, so the
// returned params reproduce the returned audio through vocode() exactly.
// `external_pitch` replaces the built-in tracker when provided.
CopySynthResult copy_synthesis(const SpeechSignal& signal,
                               const DsmModel& model, size_t k,
                               uint64_t master_seed,
                               const PitchTrack* external_pitch = nullptr);

}  // namespace dsmvoc

#endif  // DSMVOC_SYNTH_HPP_
