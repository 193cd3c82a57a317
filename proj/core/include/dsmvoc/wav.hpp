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

#ifndef DSMVOC_WAV_HPP_
#define DSMVOC_WAV_HPP_

#include <cstddef>
#include <filesystem>

#include "dsmvoc/types.hpp"

namespace dsmvoc {

// Reads a RIFF/WAVE file. Only 16-bit mono PCM is accepted; anything else
// is rejected with a descriptive error rather than converted. Samples are
// scaled to [-1, 1) by 1/32768.
SpeechSignal read_wav(const std::filesystem::path& path);

// Writes 16-bit mono PCM with a canonical 44-byte header. Samples are
// clipped to [-1, 32767/32768] before quantization; returns how many
// samples were clipped. Throws on non-finite samples.
size_t write_wav(const SpeechSignal& signal, const std::filesystem::path& path);

}  // namespace dsmvoc

#endif  // DSMVOC_WAV_HPP_
