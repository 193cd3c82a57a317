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

#ifndef DSMVOC_GCI_HPP_
#define DSMVOC_GCI_HPP_

#include <vector>

#include "dsmvoc/pitch.hpp"
#include "dsmvoc/types.hpp"

namespace dsmvoc {

struct GciSequence {
  std::vector<long> instants;  // sample indices, strictly increasing
  int polarity = 1;            // sign of the dominant residual discontinuity

  size_t size() const { return instants.size(); }
};

// Locates one glottal closure instant per pitch period in voiced regions:
// the residual's dominant-polarity extremum within each period-long search
// window, walked period by period from the strongest peak of each voiced
// run. Polarity is decided globally from the voiced-region extrema.
GciSequence detect_gci(const SpeechSignal& residual, const PitchTrack& pitch);

}  // namespace dsmvoc

#endif  // DSMVOC_GCI_HPP_
