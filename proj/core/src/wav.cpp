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

#include "dsmvoc/wav.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

namespace dsmvoc {

namespace {

uint32_t le_u32(const unsigned char* p) {
  return static_cast<uint32_t>(p[0]) | static_cast<uint32_t>(p[1]) << 8 |
         static_cast<uint32_t>(p[2]) << 16 | static_cast<uint32_t>(p[3]) << 24;
}

uint16_t le_u16(const unsigned char* p) {
  return static_cast<uint16_t>(p[0] | p[1] << 8);
}

void put_u32(std::string& s, uint32_t v) {
  s.push_back(static_cast<char>(v & 0xff));
  s.push_back(static_cast<char>((v >> 8) & 0xff));
  s.push_back(static_cast<char>((v >> 16) & 0xff));
  s.push_back(static_cast<char>((v >> 24) & 0xff));
}

void put_u16(std::string& s, uint16_t v) {
  s.push_back(static_cast<char>(v & 0xff));
  s.push_back(static_cast<char>((v >> 8) & 0xff));
}

}  // namespace

SpeechSignal read_wav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::vector<unsigned char> bytes{std::istreambuf_iterator<char>(in),
                                   std::istreambuf_iterator<char>()};
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0)
    throw Error(path.string() + ": not a RIFF/WAVE file");

  bool have_fmt = false;
  uint16_t format = 0, channels = 0, bits = 0;
  uint32_t rate = 0;
  const unsigned char* data = nullptr;
  uint32_t data_size = 0;

  size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const uint32_t chunk_size = le_u32(bytes.data() + pos + 4);
    const size_t body = pos + 8;
    if (std::memcmp(bytes.data() + pos, "fmt ", 4) == 0) {
      if (chunk_size < 16 || body + 16 > bytes.size())
        throw Error(path.string() + ": malformed fmt chunk");
      format = le_u16(bytes.data() + body);
      channels = le_u16(bytes.data() + body + 2);
      rate = le_u32(bytes.data() + body + 4);
      bits = le_u16(bytes.data() + body + 14);
      have_fmt = true;
    } else if (std::memcmp(bytes.data() + pos, "data", 4) == 0) {
      if (body + chunk_size > bytes.size())
        throw Error(path.string() + ": data chunk exceeds file size");
      data = bytes.data() + body;
      data_size = chunk_size;
    }
    pos = body + chunk_size + (chunk_size & 1);  // chunks are word-aligned
  }

  if (!have_fmt || data == nullptr)
    throw Error(path.string() + ": missing fmt or data chunk");
  if (format != 1)
    throw Error(path.string() + ": only PCM is supported (format tag " +
                std::to_string(format) + ")");
  if (channels != 1)
    throw Error(path.string() + ": only mono is supported (" +
                std::to_string(channels) + " channels); refusing to downmix");
  if (bits != 16)
    throw Error(path.string() + ": only 16-bit samples are supported (" +
                std::to_string(bits) + "-bit)");
  if (rate == 0) throw Error(path.string() + ": zero sample rate");

  SpeechSignal out;
  out.sample_rate = static_cast<int>(rate);
  const size_t n = data_size / 2;
  out.samples.resize(n);
  for (size_t i = 0; i < n; ++i) {
    const int16_t v = static_cast<int16_t>(
        static_cast<uint16_t>(data[2 * i] | data[2 * i + 1] << 8));
    out.samples[i] = static_cast<double>(v) / 32768.0;
  }
  return out;
}

size_t write_wav(const SpeechSignal& signal, const std::filesystem::path& path) {
  if (signal.sample_rate <= 0) throw Error("write_wav: invalid sample rate");
  size_t clipped = 0;
  const size_t n = signal.samples.size();

  std::string buf;
  buf.reserve(44 + 2 * n);
  buf.append("RIFF");
  put_u32(buf, static_cast<uint32_t>(36 + 2 * n));
  buf.append("WAVE");
  buf.append("fmt ");
  put_u32(buf, 16);
  put_u16(buf, 1);  // PCM
  put_u16(buf, 1);  // mono
  put_u32(buf, static_cast<uint32_t>(signal.sample_rate));
  put_u32(buf, static_cast<uint32_t>(signal.sample_rate) * 2);  // byte rate
  put_u16(buf, 2);   // block align
  put_u16(buf, 16);  // bits
  buf.append("data");
  put_u32(buf, static_cast<uint32_t>(2 * n));

  constexpr double kMax = 32767.0 / 32768.0;
  for (size_t i = 0; i < n; ++i) {
    double x = signal.samples[i];
    if (!std::isfinite(x)) throw Error("write_wav: non-finite sample");
    if (x > kMax) {
      x = kMax;
      ++clipped;
    } else if (x < -1.0) {
      x = -1.0;
      ++clipped;
    }
    const auto q = static_cast<int16_t>(std::lrint(x * 32768.0));
    put_u16(buf, static_cast<uint16_t>(q));
  }

  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) throw Error("write failed for " + path.string());
  return clipped;
}

}  // namespace dsmvoc
