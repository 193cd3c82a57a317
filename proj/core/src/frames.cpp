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

#include "dsmvoc/frames.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "dsmvoc/dsp.hpp"

namespace dsmvoc {

NormalizationConfig compute_normalization(int sample_rate, double f_max_voiced,
                                          double f0_min,
                                          double f0_star_override) {
  if (sample_rate <= 0) throw Error("compute_normalization: bad sample rate");
  if (!(f0_min > 0.0)) throw Error("compute_normalization: f0_min must be > 0");
  NormalizationConfig cfg;
  cfg.f_nyquist = sample_rate / 2.0;
  cfg.f_max_voiced = f_max_voiced;
  cfg.f0_min = f0_min;
  if (!(f_max_voiced > 0.0) || f_max_voiced > cfg.f_nyquist)
    throw Error("compute_normalization: F_m must be in (0, Nyquist]");
  const double bound = cfg.f_nyquist / f_max_voiced * f0_min;
  if (f0_star_override > 0.0) {
    if (f0_star_override > bound + 1e-9)
      throw Error("compute_normalization: f0_star exceeds (F_N/F_m)*f0_min");
    cfg.f0_star = f0_star_override;
  } else {
    cfg.f0_star = bound;
  }
  cfg.normalized_length =
      static_cast<int>(std::lround(2.0 * sample_rate / cfg.f0_star));
  return cfg;
}

ExtractResult extract_frames(const SpeechSignal& residual,
                             const GciSequence& gci, const PitchTrack& pitch) {
  ExtractResult out;
  const int rate = residual.sample_rate;
  const long n = static_cast<long>(residual.samples.size());
  out.frames.reserve(gci.instants.size());
  for (const long g : gci.instants) {
    const double f0 = pitch.f0_at(static_cast<double>(g) / rate);
    if (f0 <= 0.0) {
      ++out.skipped;
      continue;
    }
    const long half = std::lround(rate / f0);
    if (g - half < 0 || g + half > n || half < 4) {
      ++out.skipped;
      continue;
    }
    ResidualFrame frame;
    frame.center_gci = g;
    frame.source_f0 = f0;
    const size_t len = static_cast<size_t>(2 * half);
    const auto window = dsp::blackman_window(len);
    frame.samples.resize(len);
    for (size_t k = 0; k < len; ++k)
      frame.samples[k] =
          residual.samples[static_cast<size_t>(g - half) + k] * window[k];
    out.frames.push_back(std::move(frame));
  }
  return out;
}

ResidualFrame normalize_frame(const ResidualFrame& frame,
                              const NormalizationConfig& cfg) {
  if (frame.normalized) throw Error("normalize_frame: frame already normalized");
  if (cfg.normalized_length <= 0)
    throw Error("normalize_frame: config has no normalized_length");
  ResidualFrame out;
  out.center_gci = frame.center_gci;
  out.source_f0 = frame.source_f0;
  out.samples = dsp::resample(frame.samples,
                              static_cast<size_t>(cfg.normalized_length));
  const double norm = dsp::l2_norm(out.samples);
  if (norm <= 0.0) throw Error("normalize_frame: zero-energy frame");
  for (double& v : out.samples) v /= norm;
  out.normalized = true;
  return out;
}

void write_dataset(const std::vector<ResidualFrame>& frames,
                   const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  auto put_u32 = [&out](uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v & 0xff),
                          static_cast<unsigned char>((v >> 8) & 0xff),
                          static_cast<unsigned char>((v >> 16) & 0xff),
                          static_cast<unsigned char>((v >> 24) & 0xff)};
    out.write(reinterpret_cast<const char*>(b), 4);
  };
  const uint32_t cols =
      frames.empty() ? 0 : static_cast<uint32_t>(frames[0].samples.size());
  put_u32(static_cast<uint32_t>(frames.size()));
  put_u32(cols);
  for (const auto& frame : frames) {
    if (frame.samples.size() != cols)
      throw Error("write_dataset: inconsistent frame lengths");
    for (const double v : frame.samples) {
      uint64_t bits;
      std::memcpy(&bits, &v, sizeof bits);
      unsigned char b[8];
      for (int i = 0; i < 8; ++i)
        b[i] = static_cast<unsigned char>((bits >> (8 * i)) & 0xff);
      out.write(reinterpret_cast<const char*>(b), 8);
    }
  }
  if (!out) throw Error("write failed for " + path.string());
}

}  // namespace dsmvoc
