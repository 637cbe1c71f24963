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

// Dense encodings of spike streams: rate tensors for frame-based models and
// TFP (texture from playback) gray frames.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "spikeforge/error.hpp"
#include "spikeforge/parallel.hpp"
#include "spikeforge/spike_stream.hpp"

namespace spikeforge {

/// How steps are grouped into rate frames.
///  contiguous:  frame f averages steps [f*L, (f+1)*L)
///  interleaved: frame f averages steps f, f+F, f+2F, ... (row-major reshape
///               to L x F followed by a mean over the first axis)
enum class RateOrder { contiguous, interleaved };

/// Rate frames indexed (frame, y, x); every value is count / chunk_len.
struct RateTensor {
  std::uint32_t height = 0;
  std::uint32_t width = 0;
  std::uint32_t num_frames = 0;
  std::uint64_t chunk_len = 0;
  std::vector<float> values;

  float at(std::uint32_t frame, std::uint32_t x, std::uint32_t y) const {
    return values[(std::size_t{frame} * height + y) * width + x];
  }
};

/// Averages F groups of L = floor(T / F) steps. Only the first F * L steps are used.
inline RateTensor rate_encode(const SpikeStream& stream, std::uint32_t num_frames,
                              RateOrder order = RateOrder::contiguous) {
  if (num_frames == 0) throw RangeError("number of frames must be >= 1");
  if (num_frames > stream.num_steps()) throw RangeError("number of frames exceeds num_steps");
  RateTensor out;
  out.height = stream.height();
  out.width = stream.width();
  out.num_frames = num_frames;
  out.chunk_len = stream.num_steps() / num_frames;
  const std::size_t pixels = stream.pixel_count();
  const std::uint64_t covered = out.chunk_len * num_frames;
  std::vector<std::uint32_t> counts(std::size_t{num_frames} * pixels, 0);

  parallel_for_chunks(
      stream.plane_bytes(),
      [&](std::size_t b0, std::size_t b1) {
        for (std::uint64_t k = 0; k < covered; ++k) {
          const std::uint64_t frame =
              order == RateOrder::contiguous ? k / out.chunk_len : k % num_frames;
          std::uint32_t* row = counts.data() + frame * pixels;
          detail::for_each_set_bit(stream.plane(k), b0, b1, [&](std::size_t p) { ++row[p]; });
        }
      },
      4096);

  out.values.resize(counts.size());
  const double len = static_cast<double>(out.chunk_len);
  for (std::size_t i = 0; i < counts.size(); ++i)
    out.values[i] = static_cast<float>(static_cast<double>(counts[i]) / len);
  return out;
}

/// 8-bit gray image, row-major.
struct GrayFrame {
  std::uint32_t height = 0;
  std::uint32_t width = 0;
  std::vector<std::uint8_t> pixels;

  std::uint8_t at(std::uint32_t x, std::uint32_t y) const {
    return pixels[std::size_t{y} * width + x];
  }
};

/// round-half-up(255 * count / window), in integers.
constexpr std::uint8_t gray_level(std::uint64_t count, std::uint64_t window) noexcept {
  return static_cast<std::uint8_t>((510 * count + window) / (2 * window));
}

inline std::uint64_t tfp_frame_count(std::uint64_t num_steps, std::uint64_t window,
                                     std::uint64_t stride) {
  return (num_steps - window) / stride + 1;
}

/// Frame m covers steps [m*stride, m*stride + window). stride = 0 means stride = window.
inline std::vector<GrayFrame> tfp_reconstruct(const SpikeStream& stream, std::uint64_t window,
                                              std::uint64_t stride = 0) {
  if (window == 0) throw RangeError("TFP window must be >= 1");
  if (window > stream.num_steps()) throw RangeError("TFP window exceeds num_steps");
  if (stride == 0) stride = window;
  const std::uint64_t n = tfp_frame_count(stream.num_steps(), window, stride);
  std::vector<GrayFrame> frames;
  frames.reserve(static_cast<std::size_t>(n));
  for (std::uint64_t m = 0; m < n; ++m) {
    auto counts = window_counts(stream, m * stride, m * stride + window);
    GrayFrame g{stream.height(), stream.width(), std::vector<std::uint8_t>(counts.size())};
    for (std::size_t i = 0; i < counts.size(); ++i) g.pixels[i] = gray_level(counts[i], window);
    frames.push_back(std::move(g));
  }
  return frames;
}

}  // namespace spikeforge
