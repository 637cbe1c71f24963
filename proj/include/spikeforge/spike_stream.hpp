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

// Dense bit-packed spike streams.
//
// A stream holds S(x, y, k) for every pixel and polling step. Steps are
// 0-based here; step k corresponds to index k + 1 in the 1-based convention.
//
// Layout: one plane per time step, pixels row-major (y outer, x inner),
// 8 pixels per byte, least-significant bit first. Each plane is padded to a
// whole byte and padding bits are always zero.

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <initializer_list>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "spikeforge/error.hpp"
#include "spikeforge/parallel.hpp"

namespace spikeforge {

/// Default polling period of the spike camera: 50 us, i.e. 20 kHz.
inline constexpr std::uint64_t kCameraTauNs = 50'000;
inline constexpr std::uint32_t kCameraHeight = 250;
inline constexpr std::uint32_t kCameraWidth = 400;

/// One pixel's spikes as a contiguous 0/1 sequence.
class SpikeTrain {
 public:
  SpikeTrain() = default;
  explicit SpikeTrain(std::size_t length) : bits_(length, 0) {}
  explicit SpikeTrain(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) {
    for (auto b : bits_)
      if (b > 1) throw DomainError("spike train values must be 0 or 1");
  }
  SpikeTrain(std::initializer_list<int> bits) {
    bits_.reserve(bits.size());
    for (int b : bits) {
      if (b != 0 && b != 1) throw DomainError("spike train values must be 0 or 1");
      bits_.push_back(static_cast<std::uint8_t>(b));
    }
  }

  std::size_t size() const noexcept { return bits_.size(); }
  bool empty() const noexcept { return bits_.empty(); }
  bool operator[](std::size_t k) const noexcept { return bits_[k] != 0; }
  void set(std::size_t k, bool bit) noexcept { bits_[k] = bit ? 1 : 0; }
  std::span<const std::uint8_t> bits() const noexcept { return bits_; }

  friend bool operator==(const SpikeTrain&, const SpikeTrain&) = default;

 private:
  std::vector<std::uint8_t> bits_;
};

/// Number of spikes among the first `l` steps.
inline std::uint64_t count_prefix(const SpikeTrain& train, std::size_t l) {
  if (l > train.size()) throw RangeError("prefix length exceeds train length");
  std::uint64_t n = 0;
  for (std::size_t k = 0; k < l; ++k) n += train.bits()[k];
  return n;
}

/// Running spike counts: result[l] = count_prefix(train, l) for l in [0, T].
inline std::vector<std::uint64_t> prefix_counts(const SpikeTrain& train) {
  std::vector<std::uint64_t> out(train.size() + 1, 0);
  for (std::size_t k = 0; k < train.size(); ++k) out[k + 1] = out[k] + train.bits()[k];
  return out;
}

namespace detail {

inline std::uint64_t load_word(const std::uint8_t* p, std::size_t n) noexcept {
  std::uint64_t w = 0;
  if constexpr (std::endian::native == std::endian::little) {
    std::memcpy(&w, p, n);
  } else {
    for (std::size_t i = 0; i < n; ++i) w |= std::uint64_t{p[i]} << (8 * i);
  }
  return w;
}

/// Calls fn(bit_index) for each set bit in bytes [byte_begin, byte_end), with
/// bit indices relative to the start of `bytes`.
template <typename Fn>
void for_each_set_bit(std::span<const std::uint8_t> bytes, std::size_t byte_begin,
                      std::size_t byte_end, Fn&& fn) {
  for (std::size_t b = byte_begin; b < byte_end; b += 8) {
    std::size_t n = std::min<std::size_t>(8, byte_end - b);
    std::uint64_t w = load_word(bytes.data() + b, n);
    while (w) {
      fn(b * 8 + static_cast<std::size_t>(std::countr_zero(w)));
      w &= w - 1;
    }
  }
}

inline std::size_t checked_mul(std::size_t a, std::size_t b, const char* what) {
  if (a != 0 && b > std::numeric_limits<std::size_t>::max() / a) throw DimensionError(what);
  return a * b;
}

}  // namespace detail

/// Binary tensor {0,1}^(H x W x T) with a per-step period in nanoseconds.
class SpikeStream {
 public:
  SpikeStream(std::uint32_t height, std::uint32_t width, std::uint64_t num_steps,
              std::uint64_t tau_ns)
      : height_(height), width_(width), num_steps_(num_steps), tau_ns_(tau_ns) {
    if (height == 0 || width == 0 || num_steps == 0)
      throw DimensionError("stream dimensions must be >= 1");
    if (tau_ns == 0) throw DimensionError("tau_ns must be > 0");
    pixels_ = detail::checked_mul(height, width, "pixel count overflows");
    plane_bytes_ = (pixels_ + 7) / 8;
    if (num_steps > std::numeric_limits<std::size_t>::max())
      throw DimensionError("num_steps overflows");
    data_.assign(detail::checked_mul(plane_bytes_, static_cast<std::size_t>(num_steps),
                                     "payload size overflows"),
                 0);
  }

  std::uint32_t height() const noexcept { return height_; }
  std::uint32_t width() const noexcept { return width_; }
  std::uint64_t num_steps() const noexcept { return num_steps_; }
  std::uint64_t tau_ns() const noexcept { return tau_ns_; }
  std::size_t pixel_count() const noexcept { return pixels_; }
  /// Bytes per time-step plane: ceil(H * W / 8).
  std::size_t plane_bytes() const noexcept { return plane_bytes_; }
  std::uint64_t logical_bits() const noexcept { return pixels_ * num_steps_; }

  std::span<const std::uint8_t> payload() const noexcept { return data_; }
  std::span<std::uint8_t> mutable_payload() noexcept { return data_; }

  std::span<const std::uint8_t> plane(std::uint64_t k) const {
    check_step(k);
    return {data_.data() + k * plane_bytes_, plane_bytes_};
  }
  std::span<std::uint8_t> mutable_plane(std::uint64_t k) {
    check_step(k);
    return {data_.data() + k * plane_bytes_, plane_bytes_};
  }

  bool get(std::uint32_t x, std::uint32_t y, std::uint64_t k) const {
    std::size_t bit = bit_index(x, y, k);
    return (data_[bit >> 3] >> (bit & 7)) & 1u;
  }

  void set(std::uint32_t x, std::uint32_t y, std::uint64_t k, bool value) {
    std::size_t bit = bit_index(x, y, k);
    auto mask = static_cast<std::uint8_t>(1u << (bit & 7));
    if (value)
      data_[bit >> 3] |= mask;
    else
      data_[bit >> 3] &= static_cast<std::uint8_t>(~mask);
  }

  /// Copies pixel (x, y) into a contiguous train.
  SpikeTrain train(std::uint32_t x, std::uint32_t y) const {
    check_pixel(x, y);
    SpikeTrain out(static_cast<std::size_t>(num_steps_));
    std::size_t p = std::size_t{y} * width_ + x;
    for (std::uint64_t k = 0; k < num_steps_; ++k)
      out.set(k, (data_[k * plane_bytes_ + (p >> 3)] >> (p & 7)) & 1u);
    return out;
  }

  void set_train(std::uint32_t x, std::uint32_t y, const SpikeTrain& train) {
    check_pixel(x, y);
    if (train.size() != num_steps_) throw DimensionError("train length differs from num_steps");
    for (std::uint64_t k = 0; k < num_steps_; ++k) set(x, y, k, train[k]);
  }

  std::uint64_t total_spikes() const noexcept {
    std::uint64_t n = 0;
    for (std::size_t b = 0; b < data_.size(); b += 8) {
      std::size_t len = std::min<std::size_t>(8, data_.size() - b);
      n += static_cast<std::uint64_t>(std::popcount(detail::load_word(data_.data() + b, len)));
    }
    return n;
  }

  /// True when every plane's padding bits are zero.
  bool padding_clear() const noexcept {
    std::size_t tail = pixels_ & 7;
    if (tail == 0) return true;
    auto mask = static_cast<std::uint8_t>(0xFFu << tail);
    for (std::uint64_t k = 0; k < num_steps_; ++k)
      if (data_[k * plane_bytes_ + plane_bytes_ - 1] & mask) return false;
    return true;
  }

  friend bool operator==(const SpikeStream&, const SpikeStream&) = default;

 private:
  void check_step(std::uint64_t k) const {
    if (k >= num_steps_) throw IndexError("step index out of range");
  }
  void check_pixel(std::uint32_t x, std::uint32_t y) const {
    if (x >= width_ || y >= height_) throw IndexError("pixel index out of range");
  }
  std::size_t bit_index(std::uint32_t x, std::uint32_t y, std::uint64_t k) const {
    check_pixel(x, y);
    check_step(k);
    return static_cast<std::size_t>(k) * plane_bytes_ * 8 + std::size_t{y} * width_ + x;
  }

  std::uint32_t height_;
  std::uint32_t width_;
  std::uint64_t num_steps_;
  std::uint64_t tau_ns_;
  std::size_t pixels_ = 0;
  std::size_t plane_bytes_ = 0;
  std::vector<std::uint8_t> data_;
};

inline SpikeStream new_stream(std::uint32_t height, std::uint32_t width, std::uint64_t num_steps,
                              std::uint64_t tau_ns = kCameraTauNs) {
  return SpikeStream(height, width, num_steps, tau_ns);
}

/// One byte per spike, shape (T, H, W) row-major. This is the form spike
/// data takes when handed to scripting runtimes.
inline std::vector<std::uint8_t> expand_bits(const SpikeStream& stream) {
  std::vector<std::uint8_t> out(static_cast<std::size_t>(stream.logical_bits()), 0);
  const std::size_t pixels = stream.pixel_count();
  for (std::uint64_t k = 0; k < stream.num_steps(); ++k) {
    std::uint8_t* row = out.data() + k * pixels;
    detail::for_each_set_bit(stream.plane(k), 0, stream.plane_bytes(), [&](std::size_t p) { row[p] = 1; });
  }
  return out;
}

/// Inverse of expand_bits; every value must be 0 or 1.
inline SpikeStream pack_bits(std::uint32_t height, std::uint32_t width, std::uint64_t num_steps,
                             std::uint64_t tau_ns, std::span<const std::uint8_t> bits) {
  SpikeStream s(height, width, num_steps, tau_ns);
  if (bits.size() != s.logical_bits()) throw DimensionError("bit array size does not match dimensions");
  const std::size_t pixels = s.pixel_count();
  const std::size_t pb = s.plane_bytes();
  auto payload = s.mutable_payload();
  for (std::uint64_t k = 0; k < num_steps; ++k)
    for (std::size_t p = 0; p < pixels; ++p) {
      const std::uint8_t b = bits[k * pixels + p];
      if (b > 1) throw DomainError("spike values must be 0 or 1");
      payload[k * pb + (p >> 3)] |= static_cast<std::uint8_t>(b << (p & 7));
    }
  return s;
}

/// Per-pixel spike counts over steps [k_begin, k_end), row-major.
inline std::vector<std::uint32_t> window_counts(const SpikeStream& stream, std::uint64_t k_begin,
                                                std::uint64_t k_end) {
  if (k_begin >= k_end || k_end > stream.num_steps())
    throw RangeError("window must satisfy 0 <= begin < end <= num_steps");
  std::vector<std::uint32_t> counts(stream.pixel_count(), 0);
  const std::size_t plane_bytes = stream.plane_bytes();
  parallel_for_chunks(
      plane_bytes,
      [&](std::size_t b0, std::size_t b1) {
        for (std::uint64_t k = k_begin; k < k_end; ++k)
          detail::for_each_set_bit(stream.plane(k), b0, b1, [&](std::size_t p) { ++counts[p]; });
      },
      4096);
  return counts;
}

/// Per-pixel firing rates over a window; each rate is count / window.
struct RateMap {
  std::uint32_t height = 0;
  std::uint32_t width = 0;
  std::uint64_t window = 0;
  std::vector<std::uint32_t> counts;

  double rate(std::uint32_t x, std::uint32_t y) const {
    if (x >= width || y >= height) throw IndexError("pixel index out of range");
    return static_cast<double>(counts[std::size_t{y} * width + x]) / static_cast<double>(window);
  }
  std::vector<double> rates() const {
    std::vector<double> out(counts.size());
    for (std::size_t i = 0; i < counts.size(); ++i)
      out[i] = static_cast<double>(counts[i]) / static_cast<double>(window);
    return out;
  }
};

inline RateMap firing_rate_map(const SpikeStream& stream, std::uint64_t k_begin,
                               std::uint64_t k_end) {
  RateMap map;
  map.height = stream.height();
  map.width = stream.width();
  map.counts = window_counts(stream, k_begin, k_end);
  map.window = k_end - k_begin;
  return map;
}

}  // namespace spikeforge
