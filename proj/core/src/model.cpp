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

#include "dsmvoc/model.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

namespace dsmvoc {

namespace {

constexpr char kMagic[4] = {'D', 'S', 'M', 'B'};
constexpr uint16_t kVersion = 1;

class Writer {
 public:
  void u16(uint16_t v) {
    for (int i = 0; i < 2; ++i) buf_.push_back(static_cast<char>(v >> (8 * i)));
  }
  void u32(uint32_t v) {
    for (int i = 0; i < 4; ++i) buf_.push_back(static_cast<char>(v >> (8 * i)));
  }
  void f64(double v) {
    uint64_t bits;
    std::memcpy(&bits, &v, sizeof bits);
    for (int i = 0; i < 8; ++i)
      buf_.push_back(static_cast<char>(bits >> (8 * i)));
  }
  void f64s(const std::vector<double>& v) {
    u32(static_cast<uint32_t>(v.size()));
    for (double x : v) f64(x);
  }
  void str(const std::string& s) {
    u32(static_cast<uint32_t>(s.size()));
    buf_.append(s);
  }
  void raw(const char* p, size_t n) { buf_.append(p, n); }
  const std::string& bytes() const { return buf_; }

 private:
  std::string buf_;
};

class Reader {
 public:
  Reader(std::vector<unsigned char> bytes, std::string file)
      : bytes_(std::move(bytes)), file_(std::move(file)) {}

  void block(const char* name) { block_ = name; }

  uint16_t u16() {
    need(2);
    uint16_t v = static_cast<uint16_t>(bytes_[pos_] | bytes_[pos_ + 1] << 8);
    pos_ += 2;
    return v;
  }
  uint32_t u32() {
    need(4);
    uint32_t v = 0;
    for (int i = 0; i < 4; ++i)
      v |= static_cast<uint32_t>(bytes_[pos_ + static_cast<size_t>(i)])
           << (8 * i);
    pos_ += 4;
    return v;
  }
  double f64() {
    need(8);
    uint64_t bits = 0;
    for (int i = 0; i < 8; ++i)
      bits |= static_cast<uint64_t>(bytes_[pos_ + static_cast<size_t>(i)])
              << (8 * i);
    pos_ += 8;
    double v;
    std::memcpy(&v, &bits, sizeof v);
    return v;
  }
  std::vector<double> f64s() {
    const uint32_t n = u32();
    std::vector<double> v(n);
    for (uint32_t i = 0; i < n; ++i) v[i] = f64();
    return v;
  }
  std::string str() {
    const uint32_t n = u32();
    need(n);
    std::string s(reinterpret_cast<const char*>(bytes_.data() + pos_), n);
    pos_ += n;
    return s;
  }
  void magic() {
    need(4);
    if (std::memcmp(bytes_.data() + pos_, kMagic, 4) != 0)
      throw Error(file_ + ": bad magic, not a DSMB model file");
    pos_ += 4;
  }
  bool at_end() const { return pos_ == bytes_.size(); }

 private:
  void need(size_t n) {
    if (pos_ + n > bytes_.size())
      throw Error(file_ + ": model file truncated in " + block_ + " block");
  }
  std::vector<unsigned char> bytes_;
  std::string file_;
  size_t pos_ = 0;
  std::string block_ = "header";
};

}  // namespace

bool DsmModel::operator==(const DsmModel& other) const {
  return sample_rate == other.sample_rate && f0_min == other.f0_min &&
         f0_max == other.f0_max && norm == other.norm &&
         envelope == other.envelope && noise == other.noise &&
         mean_abs_w1 == other.mean_abs_w1 && basis.mean == other.basis.mean &&
         basis.eigenvectors == other.basis.eigenvectors &&
         basis.eigenvalues == other.basis.eigenvalues &&
         basis.training_frame_count == other.basis.training_frame_count;
}

void save_model(const DsmModel& model, const std::filesystem::path& path) {
  Writer w;
  w.raw(kMagic, 4);
  w.u16(kVersion);

  // config block
  w.u32(static_cast<uint32_t>(model.sample_rate));
  w.f64(model.f0_min);
  w.f64(model.f0_max);
  w.f64(model.norm.f_nyquist);
  w.f64(model.norm.f_max_voiced);
  w.f64(model.norm.f0_min);
  w.f64(model.norm.f0_star);
  w.u32(static_cast<uint32_t>(model.norm.normalized_length));
  w.f64(model.envelope.alpha);
  w.f64(model.envelope.gamma);
  w.u32(static_cast<uint32_t>(model.envelope.order));
  w.f64(model.envelope.frame_shift);
  w.f64(model.envelope.frame_length);
  w.str(model.envelope.window);
  w.f64(model.mean_abs_w1);

  // eigenbasis block
  w.u32(static_cast<uint32_t>(model.basis.training_frame_count));
  w.f64s(model.basis.mean);
  w.f64s(model.basis.eigenvalues);
  w.u32(static_cast<uint32_t>(model.basis.eigenvectors.size()));
  for (const auto& v : model.basis.eigenvectors) w.f64s(v);

  // noise block
  w.f64s(model.noise.ar_coefficients);
  w.f64(model.noise.ar_gain);
  w.f64(model.noise.beta);
  w.f64(model.noise.band_gain_ratio);

  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out.write(w.bytes().data(), static_cast<std::streamsize>(w.bytes().size()));
  if (!out) throw Error("write failed for " + path.string());
}

DsmModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::vector<unsigned char> bytes{std::istreambuf_iterator<char>(in),
                                   std::istreambuf_iterator<char>()};
  Reader r(std::move(bytes), path.string());

  r.magic();
  const uint16_t version = r.u16();
  if (version != kVersion)
    throw Error(path.string() + ": unsupported model version " +
                std::to_string(version));

  DsmModel model;
  r.block("config");
  model.sample_rate = static_cast<int>(r.u32());
  model.f0_min = r.f64();
  model.f0_max = r.f64();
  model.norm.f_nyquist = r.f64();
  model.norm.f_max_voiced = r.f64();
  model.norm.f0_min = r.f64();
  model.norm.f0_star = r.f64();
  model.norm.normalized_length = static_cast<int>(r.u32());
  model.envelope.alpha = r.f64();
  model.envelope.gamma = r.f64();
  model.envelope.order = static_cast<int>(r.u32());
  model.envelope.frame_shift = r.f64();
  model.envelope.frame_length = r.f64();
  model.envelope.window = r.str();
  model.mean_abs_w1 = r.f64();

  r.block("eigenbasis");
  model.basis.training_frame_count = r.u32();
  model.basis.mean = r.f64s();
  model.basis.eigenvalues = r.f64s();
  const uint32_t n_vecs = r.u32();
  model.basis.eigenvectors.resize(n_vecs);
  for (uint32_t i = 0; i < n_vecs; ++i) model.basis.eigenvectors[i] = r.f64s();

  r.block("noise");
  model.noise.ar_coefficients = r.f64s();
  model.noise.ar_gain = r.f64();
  model.noise.beta = r.f64();
  model.noise.band_gain_ratio = r.f64();

  if (!r.at_end())
    throw Error(path.string() + ": trailing bytes after noise block");
  return model;
}

}  // namespace dsmvoc
