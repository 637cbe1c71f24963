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

// Discrete-time integrate-and-fire model of a spike-camera pixel.
//
// Each polling step of length tau adds charge q = alpha * I * tau to the
// pixel's membrane V, intensity held constant within a frame. A spike is
// registered at step k iff V >= theta after accumulation; V is then reset to
// zero, or reduced by theta in subtract mode. At most one spike per step.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "spikeforge/error.hpp"
#include "spikeforge/parallel.hpp"
#include "spikeforge/rational.hpp"
#include "spikeforge/spike_stream.hpp"

namespace spikeforge {

/// Nonnegative intensity video, values indexed (frame, y, x).
class IntensityClip {
 public:
  IntensityClip(std::uint32_t height, std::uint32_t width, std::uint32_t num_frames,
                std::uint64_t frame_interval_ns, std::vector<double> values)
      : height_(height),
        width_(width),
        num_frames_(num_frames),
        frame_interval_ns_(frame_interval_ns),
        values_(std::move(values)) {
    if (height == 0 || width == 0 || num_frames == 0)
      throw DimensionError("clip dimensions must be >= 1");
    if (frame_interval_ns == 0) throw ConfigError("frame interval must be > 0");
    if (values_.size() != std::size_t{height} * width * num_frames)
      throw DimensionError("clip value count does not match dimensions");
    for (double v : values_)
      if (!(v >= 0.0) || !std::isfinite(v)) throw DomainError("intensities must be finite and >= 0");
  }

  /// Constant intensity everywhere.
  static IntensityClip constant(std::uint32_t height, std::uint32_t width,
                                std::uint32_t num_frames, std::uint64_t frame_interval_ns,
                                double intensity) {
    return IntensityClip(height, width, num_frames, frame_interval_ns,
                         std::vector<double>(std::size_t{height} * width * num_frames, intensity));
  }

  std::uint32_t height() const noexcept { return height_; }
  std::uint32_t width() const noexcept { return width_; }
  std::uint32_t num_frames() const noexcept { return num_frames_; }
  std::uint64_t frame_interval_ns() const noexcept { return frame_interval_ns_; }
  std::span<const double> values() const noexcept { return values_; }
  double at(std::uint32_t frame, std::uint32_t x, std::uint32_t y) const {
    return values_[(std::size_t{frame} * height_ + y) * width_ + x];
  }

 private:
  std::uint32_t height_;
  std::uint32_t width_;
  std::uint32_t num_frames_;
  std::uint64_t frame_interval_ns_;
  std::vector<double> values_;
};

enum class ResetMode { zero, subtract };

/// alpha and theta have no published values for the physical camera; 1 and 1
/// are placeholders.
struct CameraConfig {
  double alpha = 1.0;  // charge per (intensity * second)
  double theta = 1.0;  // firing threshold
  std::uint64_t tau_ns = kCameraTauNs;
  ResetMode reset_mode = ResetMode::zero;

  void validate() const {
    if (!(alpha > 0.0) || !std::isfinite(alpha)) throw ConfigError("alpha must be > 0");
    if (!(theta > 0.0) || !std::isfinite(theta)) throw ConfigError("theta must be > 0");
    if (tau_ns == 0) throw ConfigError("tau_ns must be > 0");
  }
};

/// Relative slack on the threshold comparison. Accumulating theta/k over k
/// steps in binary floating point can land one ulp short of theta; charges
/// within this fraction of theta count as reaching it.
inline constexpr double kThresholdRelTolerance = 1e-9;

inline SpikeStream simulate(const IntensityClip& clip, const CameraConfig& cfg) {
  cfg.validate();
  if (clip.frame_interval_ns() % cfg.tau_ns != 0)
    throw ConfigError("frame interval must be an integer multiple of tau_ns");
  const std::uint64_t steps_per_frame = clip.frame_interval_ns() / cfg.tau_ns;
  const std::uint64_t num_steps = detail::checked_mul(clip.num_frames(), steps_per_frame,
                                                      "simulated step count overflows");
  SpikeStream out(clip.height(), clip.width(), num_steps, cfg.tau_ns);

  const double charge_scale = cfg.alpha * (static_cast<double>(cfg.tau_ns) * 1e-9);
  const double fire_level = cfg.theta * (1.0 - kThresholdRelTolerance);
  const std::size_t pixels = out.pixel_count();
  const std::size_t plane_bytes = out.plane_bytes();
  auto payload = out.mutable_payload();
  auto values = clip.values();

  // Chunks are whole plane bytes so workers never share an output byte.
  parallel_for_chunks(
      plane_bytes,
      [&](std::size_t b0, std::size_t b1) {
        const std::size_t p0 = b0 * 8;
        const std::size_t p1 = std::min(pixels, b1 * 8);
        std::vector<double> membrane(p1 - p0, 0.0);
        std::vector<double> charge(p1 - p0);
        std::uint64_t k = 0;
        for (std::uint32_t f = 0; f < clip.num_frames(); ++f) {
          const double* frame = values.data() + std::size_t{f} * pixels;
          for (std::size_t p = p0; p < p1; ++p) charge[p - p0] = frame[p] * charge_scale;
          for (std::uint64_t s = 0; s < steps_per_frame; ++s, ++k) {
            std::uint8_t* plane = payload.data() + k * plane_bytes;
            for (std::size_t p = p0; p < p1; ++p) {
              double& v = membrane[p - p0];
              v += charge[p - p0];
              if (v >= fire_level) {
                plane[p >> 3] |= static_cast<std::uint8_t>(1u << (p & 7));
                if (cfg.reset_mode == ResetMode::zero)
                  v = 0.0;
                else
                  v = std::max(0.0, v - cfg.theta);
              }
            }
          }
        }
      },
      64);
  return out;
}

/// Train of a unit-threshold, subtract-reset IF neuron fed the constant input
/// c = p/q every step. Exact: count_prefix(result, l) == floor(l * c) for all l
/// when c <= 1; c > 1 saturates to all ones.
inline SpikeTrain constant_rate_train(Rational c, std::size_t num_steps) {
  c = c.normalized();
  SpikeTrain out(num_steps);
  if (c.num >= c.den) {
    for (std::size_t k = 0; k < num_steps; ++k) out.set(k, true);
    return out;
  }
  const auto p = static_cast<std::uint64_t>(c.num);
  const auto q = static_cast<std::uint64_t>(c.den);
  std::uint64_t v = 0;  // membrane = v / q, kept in [0, 1)
  for (std::size_t k = 0; k < num_steps; ++k) {
    v += p;
    if (v >= q) {
      out.set(k, true);
      v -= q;
    }
  }
  return out;
}

}  // namespace spikeforge
