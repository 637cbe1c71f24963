// Copyright 2026 The SpikeForge Authors.
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


#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "spikeforge/dataset.hpp"
#include "spikeforge/spike_stream.hpp"

namespace fixtures {

inline std::string subject_name(int i) {
  std::string n = std::to_string(i);
  return "S" + std::string(n.size() < 2 ? 2 - n.size() : 0, '0') + n;
}

/// Complete corpus: every subject x session x activity x half.
inline std::vector<spikeforge::SampleRecord> full_manifest(int subjects = 44) {
  std::vector<spikeforge::SampleRecord> out;
  for (int s = 1; s <= subjects; ++s)
    for (int session = 1; session <= 2; ++session)
      for (auto activity : spikeforge::kActivities)
        for (int half = 1; half <= 2; ++half) {
          spikeforge::SampleRecord r;
          r.subject_id = subject_name(s);
          r.session = session;
          r.activity = std::string(activity);
          r.half = half;
          r.sample_id = r.subject_id + "_s" + std::to_string(session) + "_" + r.activity + "_h" +
                        std::to_string(half);
          r.spike_path = "spike/" + r.sample_id + ".spks";
          out.push_back(std::move(r));
        }
  return out;
}

/// Moving vertical bar over a dim background, expressed directly as a spike
/// stream: typical of what a static camera sees.
inline spikeforge::SpikeStream structured_stream(std::uint32_t h, std::uint32_t w, std::uint64_t t,
                                                 std::uint64_t seed = 1) {
  spikeforge::SpikeStream s(h, w, t, spikeforge::kCameraTauNs);
  std::mt19937_64 rng(seed);
  std::vector<std::uint32_t> phase(std::size_t{h} * w);
  for (auto& p : phase) p = static_cast<std::uint32_t>(rng() % 16);
  for (std::uint64_t k = 0; k < t; ++k) {
    const std::uint32_t bar = static_cast<std::uint32_t>((k / 20) % w);
    for (std::uint32_t y = 0; y < h; ++y)
      for (std::uint32_t x = 0; x < w; ++x) {
        const std::uint32_t period = (x >= bar && x < bar + 4) ? 2 : 9 + (y % 4);
        if ((k + phase[std::size_t{y} * w + x]) % period == 0) s.set(x, y, k, true);
      }
  }
  return s;
}

}  // namespace fixtures
