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

#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "dsmvoc/rng.hpp"
#include "dsmvoc/types.hpp"
#include "dsmvoc/wav.hpp"
#include "test_env.hpp"

using namespace dsmvoc;

namespace {

std::vector<unsigned char> slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void spit(const std::filesystem::path& p, const std::vector<unsigned char>& b) {
  std::ofstream out(p, std::ios::binary);
  out.write(reinterpret_cast<const char*>(b.data()),
            static_cast<std::streamsize>(b.size()));
}

// Canonical 44-byte-header PCM16 mono WAV with the given payload.
std::vector<unsigned char> make_wav(uint32_t rate,
                                    const std::vector<int16_t>& pcm) {
  const uint32_t data_bytes = static_cast<uint32_t>(pcm.size() * 2);
  std::vector<unsigned char> b(44 + data_bytes);
  auto put32 = [&](size_t off, uint32_t v) {
    for (int i = 0; i < 4; ++i) b[off + static_cast<size_t>(i)] =
        static_cast<unsigned char>(v >> (8 * i));
  };
  auto put16 = [&](size_t off, uint16_t v) {
    b[off] = static_cast<unsigned char>(v);
    b[off + 1] = static_cast<unsigned char>(v >> 8);
  };
  std::memcpy(b.data(), "RIFF", 4);
  put32(4, 36 + data_bytes);
  std::memcpy(b.data() + 8, "WAVE", 4);
  std::memcpy(b.data() + 12, "fmt ", 4);
  put32(16, 16);
  put16(20, 1);
  put16(22, 1);
  put32(24, rate);
  put32(28, rate * 2);
  put16(32, 2);
  put16(34, 16);
  std::memcpy(b.data() + 36, "data", 4);
  put32(40, data_bytes);
  std::memcpy(b.data() + 44, pcm.data(), data_bytes);
  return b;
}

}  // namespace

TEST_CASE("read_wav: zeros stay zeros, rate preserved") {
  const auto dir = testing::scratch_dir("wav-zeros");
  spit(dir / "z.wav", make_wav(16000, std::vector<int16_t>(16000, 0)));
  const auto sig = read_wav(dir / "z.wav");
  CHECK(sig.sample_rate == 16000);
  REQUIRE(sig.samples.size() == 16000);
  for (double v : sig.samples) CHECK(v == 0.0);
}

TEST_CASE("read_wav: sample 16384 maps to amplitude 0.5 exactly") {
  const auto dir = testing::scratch_dir("wav-scale");
  spit(dir / "s.wav", make_wav(16000, {16384, -16384, 32767, -32768}));
  const auto sig = read_wav(dir / "s.wav");
  REQUIRE(sig.samples.size() == 4);
  CHECK(sig.samples[0] == 0.5);
  CHECK(sig.samples[1] == -0.5);
  CHECK(sig.samples[2] == 32767.0 / 32768.0);
  CHECK(sig.samples[3] == -1.0);
}

TEST_CASE("wav round trip: byte-identical for random canonical files") {
  const auto dir = testing::scratch_dir("wav-roundtrip");
  NoiseSource rng(77);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<int16_t> pcm(1 + (rng.next_u64() % 4096));
    for (auto& v : pcm)
      v = static_cast<int16_t>(static_cast<uint16_t>(rng.next_u64()));
    const auto original = make_wav(16000, pcm);
    const auto p1 = dir / "a.wav";
    const auto p2 = dir / "b.wav";
    spit(p1, original);
    const auto sig = read_wav(p1);
    const size_t clipped = write_wav(sig, p2);
    CHECK(clipped == 0);
    CHECK(slurp(p2) == original);
  }
}

TEST_CASE("write_wav: clipping is applied and counted") {
  const auto dir = testing::scratch_dir("wav-clip");
  SpeechSignal sig;
  sig.sample_rate = 16000;
  sig.samples = {2.0, -2.0, 0.25, 1.0};
  const size_t clipped = write_wav(sig, dir / "c.wav");
  // +2.0, -2.0 and +1.0 all exceed the representable range.
  CHECK(clipped == 3);
  const auto back = read_wav(dir / "c.wav");
  CHECK(back.samples[0] == 32767.0 / 32768.0);
  CHECK(back.samples[1] == -1.0);
  CHECK(back.samples[2] == 0.25);
  CHECK(back.samples[3] == 32767.0 / 32768.0);
}

TEST_CASE("write_wav: quantization error below one LSB") {
  const auto dir = testing::scratch_dir("wav-quant");
  NoiseSource rng(5);
  SpeechSignal sig;
  sig.sample_rate = 16000;
  sig.samples.resize(4096);
  for (auto& v : sig.samples) v = 0.9 * (2.0 * rng.next_uniform() - 1.0);
  write_wav(sig, dir / "q.wav");
  const auto back = read_wav(dir / "q.wav");
  for (size_t i = 0; i < sig.samples.size(); ++i)
    CHECK(std::abs(back.samples[i] - sig.samples[i]) < 1.0 / 32768.0);
}

TEST_CASE("write_wav: all-zero signal gives an all-zero data chunk") {
  const auto dir = testing::scratch_dir("wav-zero-out");
  SpeechSignal sig;
  sig.sample_rate = 16000;
  sig.samples.assign(100, 0.0);
  write_wav(sig, dir / "z.wav");
  const auto bytes = slurp(dir / "z.wav");
  REQUIRE(bytes.size() == 44 + 200);
  for (size_t i = 44; i < bytes.size(); ++i) CHECK(bytes[i] == 0);
}

TEST_CASE("read_wav: descriptive rejection of unsupported formats") {
  const auto dir = testing::scratch_dir("wav-reject");

  SUBCASE("missing file") {
    CHECK_THROWS_AS(read_wav(dir / "absent.wav"), Error);
  }
  SUBCASE("not RIFF") {
    auto b = make_wav(16000, {0, 0});
    b[0] = 'X';
    spit(dir / "x.wav", b);
    CHECK_THROWS_AS(read_wav(dir / "x.wav"), Error);
  }
  SUBCASE("stereo is refused, not downmixed") {
    auto b = make_wav(16000, {0, 0, 0, 0});
    b[22] = 2;  // channel count
    spit(dir / "st.wav", b);
    CHECK_THROWS_WITH_AS(read_wav(dir / "st.wav"),
                         doctest::Contains("downmix"), Error);
  }
  SUBCASE("non-PCM format tag") {
    auto b = make_wav(16000, {0, 0});
    b[20] = 3;  // IEEE float
    spit(dir / "f.wav", b);
    CHECK_THROWS_AS(read_wav(dir / "f.wav"), Error);
  }
  SUBCASE("24-bit depth") {
    auto b = make_wav(16000, {0, 0});
    b[34] = 24;
    spit(dir / "d.wav", b);
    CHECK_THROWS_AS(read_wav(dir / "d.wav"), Error);
  }
  SUBCASE("truncated data chunk") {
    auto b = make_wav(16000, std::vector<int16_t>(64, 1));
    b.resize(b.size() - 10);
    spit(dir / "t.wav", b);
    CHECK_THROWS_AS(read_wav(dir / "t.wav"), Error);
  }
}

TEST_CASE("read_wav: skips unknown chunks before data") {
  // A LIST chunk with odd size (exercises word alignment) between fmt
  // and data.
  auto b = make_wav(22050, {100, -100});
  std::vector<unsigned char> extra = {'L', 'I', 'S', 'T', 3, 0, 0,
                                      0,   'a', 'b', 'c', 0};
  b.insert(b.begin() + 36, extra.begin(), extra.end());
  const uint32_t riff_size = static_cast<uint32_t>(b.size() - 8);
  for (int i = 0; i < 4; ++i)
    b[4 + static_cast<size_t>(i)] =
        static_cast<unsigned char>(riff_size >> (8 * i));
  const auto dir = testing::scratch_dir("wav-chunks");
  spit(dir / "l.wav", b);
  const auto sig = read_wav(dir / "l.wav");
  CHECK(sig.sample_rate == 22050);
  REQUIRE(sig.samples.size() == 2);
  CHECK(sig.samples[0] == doctest::Approx(100.0 / 32768.0));
}
