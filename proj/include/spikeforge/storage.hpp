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

// On-disk containers.
//
// .spks spike stream, all integers little-endian:
//
//   offset  size  field
//   0       4     magic "SPKS"
//   4       2     version (1)
//   6       2     flags (bit 0: payload wrapped in xz)
//   8       4     width
//   12      4     height
//   16      8     num_steps
//   24      8     tau_ns
//   32      4     meta_len
//   36      n     meta (UTF-8, meta_len bytes)
//   36+n    ...   payload: ceil(H*W/8) * num_steps bytes in the in-memory
//                 plane layout, or an xz stream decoding to exactly that
//
// .spkt tensor:
//
//   0       4     magic "SPKT"
//   4       2     version (1)
//   6       2     dtype (0: uint8, 1: float32 little-endian)
//   8       4     rank (1..32)
//   12      8*r   dims, outermost first
//   ...           payload: element_size * prod(dims) bytes

#include <array>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <new>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "spikeforge/byte_io.hpp"
#include "spikeforge/camera_sim.hpp"
#include "spikeforge/encodings.hpp"
#include "spikeforge/entropy.hpp"
#include "spikeforge/error.hpp"
#include "spikeforge/spike_stream.hpp"

namespace spikeforge {

inline constexpr std::array<std::uint8_t, 4> kStreamMagic{'S', 'P', 'K', 'S'};
inline constexpr std::array<std::uint8_t, 4> kTensorMagic{'S', 'P', 'K', 'T'};
inline constexpr std::uint16_t kFormatVersion = 1;
inline constexpr std::uint16_t kFlagEntropy = 0x1;
inline constexpr std::size_t kStreamFixedHeaderBytes = 36;
inline constexpr std::uint32_t kMaxTensorRank = 32;

/// Parsed .spks header.
struct StreamHeader {
  std::uint16_t version = kFormatVersion;
  std::uint16_t flags = 0;
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  std::uint64_t num_steps = 0;
  std::uint64_t tau_ns = 0;
  std::string meta;

  bool entropy() const noexcept { return flags & kFlagEntropy; }
  std::uint64_t plane_bytes() const { return (std::uint64_t{width} * height + 7) / 8; }
  /// Uncompressed payload length; throws FormatError on overflow.
  std::uint64_t payload_bytes() const {
    std::uint64_t pb = plane_bytes();
    if (num_steps != 0 && pb > std::numeric_limits<std::uint64_t>::max() / num_steps)
      throw FormatError("payload size overflows");
    return pb * num_steps;
  }
};

inline std::vector<std::uint8_t> encode_stream_header(const StreamHeader& h) {
  std::vector<std::uint8_t> out(kStreamMagic.begin(), kStreamMagic.end());
  detail::put_le(out, h.version);
  detail::put_le(out, h.flags);
  detail::put_le(out, h.width);
  detail::put_le(out, h.height);
  detail::put_le(out, h.num_steps);
  detail::put_le(out, h.tau_ns);
  if (h.meta.size() > std::numeric_limits<std::uint32_t>::max())
    throw FormatError("metadata too long");
  detail::put_le(out, static_cast<std::uint32_t>(h.meta.size()));
  out.insert(out.end(), h.meta.begin(), h.meta.end());
  return out;
}

/// Reads and validates the header; leaves `in` positioned at the payload.
inline StreamHeader read_stream_header(std::istream& in) {
  auto fixed = detail::read_exact(in, kStreamFixedHeaderBytes, "stream header");
  if (!std::equal(kStreamMagic.begin(), kStreamMagic.end(), fixed.begin()))
    throw FormatError("bad magic: not a .spks stream");
  StreamHeader h;
  h.version = detail::get_le<std::uint16_t>(fixed, 4);
  if (h.version != kFormatVersion)
    throw FormatError("unsupported stream version " + std::to_string(h.version));
  h.flags = detail::get_le<std::uint16_t>(fixed, 6);
  if (h.flags & ~kFlagEntropy) throw FormatError("unknown stream flags");
  h.width = detail::get_le<std::uint32_t>(fixed, 8);
  h.height = detail::get_le<std::uint32_t>(fixed, 12);
  h.num_steps = detail::get_le<std::uint64_t>(fixed, 16);
  h.tau_ns = detail::get_le<std::uint64_t>(fixed, 24);
  if (h.width == 0 || h.height == 0 || h.num_steps == 0 || h.tau_ns == 0)
    throw FormatError("stream header has a zero dimension or tau");
  h.payload_bytes();  // overflow check
  const auto meta_len = detail::get_le<std::uint32_t>(fixed, 32);
  if (meta_len > detail::remaining_bytes(in)) throw CorruptionError("truncated metadata");
  auto meta = detail::read_exact(in, meta_len, "metadata");
  h.meta.assign(meta.begin(), meta.end());
  return h;
}

inline StreamHeader read_stream_header(const std::filesystem::path& path) {
  auto in = detail::open_for_read(path);
  return read_stream_header(in);
}

/// Writes `stream`. A non-null backend wraps the payload and sets flag bit 0;
/// the format reads flagged payloads back with the xz backend.
inline void save_stream(const SpikeStream& stream, const std::filesystem::path& path,
                        const EntropyBackend* backend, std::string_view meta = {}) {
  StreamHeader h;
  h.flags = backend ? kFlagEntropy : 0;
  h.width = stream.width();
  h.height = stream.height();
  h.num_steps = stream.num_steps();
  h.tau_ns = stream.tau_ns();
  h.meta = std::string(meta);
  const auto header = encode_stream_header(h);
  std::vector<std::uint8_t> packed;
  if (backend) packed = backend->compress(stream.payload());
  detail::write_atomically(path, [&](std::ostream& out) {
    detail::write_bytes(out, header);
    detail::write_bytes(out, backend ? std::span<const std::uint8_t>(packed) : stream.payload());
  });
}

inline void save_stream(const SpikeStream& stream, const std::filesystem::path& path, bool entropy,
                        std::string_view meta = {}) {
  XzBackend xz;
  save_stream(stream, path, entropy ? &xz : nullptr, meta);
}

struct LoadedStream {
  StreamHeader header;
  SpikeStream stream;
};

inline LoadedStream load_stream_with_header(const std::filesystem::path& path,
                                            const EntropyBackend& backend = XzBackend{}) {
  auto in = detail::open_for_read(path);
  StreamHeader h = read_stream_header(in);
  const std::uint64_t expected = h.payload_bytes();
  const std::uint64_t available = detail::remaining_bytes(in);
  if (!h.entropy()) {
    if (available < expected) throw CorruptionError("truncated payload");
    if (available > expected) throw FormatError("trailing bytes after payload");
  } else if (available == 0) {
    throw CorruptionError("missing compressed payload");
  }
  try {
    SpikeStream s(h.height, h.width, h.num_steps, h.tau_ns);
    if (h.entropy()) {
      auto packed = detail::read_exact(in, static_cast<std::size_t>(available), "payload");
      backend.decompress(packed, s.mutable_payload());
    } else {
      detail::read_exact(in, s.mutable_payload(), "payload");
    }
    if (!s.padding_clear()) throw CorruptionError("nonzero plane padding bits");
    return {std::move(h), std::move(s)};
  } catch (const DimensionError& e) {
    throw FormatError(std::string("invalid stream dimensions: ") + e.what());
  } catch (const std::bad_alloc&) {
    throw FormatError("stream too large to load");
  }
}

inline SpikeStream load_stream(const std::filesystem::path& path) {
  return load_stream_with_header(path).stream;
}

/// Bit order of raw dumps within each byte.
enum class BitOrder { lsb_first, msb_first };
/// plane_padded: every step starts on a byte boundary (ceil(H*W/8) bytes per step).
/// continuous:   H*W*T bits back to back, ceil(H*W*T/8) bytes in total.
enum class RawLayout { plane_padded, continuous };

inline std::uint64_t raw_required_bytes(std::uint32_t height, std::uint32_t width,
                                        std::uint64_t num_steps, RawLayout layout) {
  const std::uint64_t pixels = std::uint64_t{height} * width;
  if (layout == RawLayout::plane_padded) {
    const std::uint64_t pb = (pixels + 7) / 8;
    if (pb > std::numeric_limits<std::uint64_t>::max() / num_steps)
      throw FormatError("raw size overflows");
    return pb * num_steps;
  }
  if (pixels > std::numeric_limits<std::uint64_t>::max() / num_steps)
    throw FormatError("raw size overflows");
  const std::uint64_t bits = pixels * num_steps;
  return bits / 8 + (bits % 8 != 0);
}

/// Interprets a headerless vendor dump; pixel order is row-major, steps outermost.
/// Bytes beyond the required length are ignored.
inline SpikeStream import_raw(const std::filesystem::path& path, std::uint32_t height,
                              std::uint32_t width, std::uint64_t num_steps, std::uint64_t tau_ns,
                              BitOrder order = BitOrder::lsb_first,
                              RawLayout layout = RawLayout::plane_padded) {
  SpikeStream s(height, width, num_steps, tau_ns);
  const std::uint64_t required = raw_required_bytes(height, width, num_steps, layout);
  auto in = detail::open_for_read(path);
  if (detail::remaining_bytes(in) < required)
    throw FormatError("raw file shorter than " + std::to_string(required) + " bytes");
  auto raw = detail::read_exact(in, static_cast<std::size_t>(required), "raw payload");

  auto reverse = [](std::uint8_t b) {
    b = static_cast<std::uint8_t>((b & 0xF0) >> 4 | (b & 0x0F) << 4);
    b = static_cast<std::uint8_t>((b & 0xCC) >> 2 | (b & 0x33) << 2);
    return static_cast<std::uint8_t>((b & 0xAA) >> 1 | (b & 0x55) << 1);
  };
  if (order == BitOrder::msb_first)
    for (auto& b : raw) b = reverse(b);

  auto payload = s.mutable_payload();
  const std::size_t pixels = s.pixel_count();
  const std::size_t pb = s.plane_bytes();
  if (layout == RawLayout::plane_padded) {
    std::copy(raw.begin(), raw.end(), payload.begin());
    if (pixels % 8 != 0) {
      auto mask = static_cast<std::uint8_t>(0xFFu >> (8 - pixels % 8));
      for (std::uint64_t k = 0; k < num_steps; ++k) payload[k * pb + pb - 1] &= mask;
    }
  } else {
    for (std::uint64_t k = 0; k < num_steps; ++k)
      for (std::size_t p = 0; p < pixels; ++p) {
        const std::uint64_t bit = k * pixels + p;
        if ((raw[bit >> 3] >> (bit & 7)) & 1u)
          payload[k * pb + (p >> 3)] |= static_cast<std::uint8_t>(1u << (p & 7));
      }
  }
  return s;
}

enum class DType : std::uint16_t { u8 = 0, f32 = 1 };

inline std::size_t dtype_size(DType t) { return t == DType::u8 ? 1 : 4; }

/// Dense tensor as stored in .spkt; exactly one of u8 / f32 is populated.
struct Tensor {
  DType dtype = DType::f32;
  std::vector<std::uint64_t> dims;
  std::vector<std::uint8_t> u8;
  std::vector<float> f32;

  std::uint64_t element_count() const {
    std::uint64_t n = 1;
    for (auto d : dims) {
      if (d != 0 && n > std::numeric_limits<std::uint64_t>::max() / d)
        throw FormatError("tensor element count overflows");
      n *= d;
    }
    return n;
  }
  std::size_t stored_count() const { return dtype == DType::u8 ? u8.size() : f32.size(); }
  friend bool operator==(const Tensor&, const Tensor&) = default;
};

inline Tensor to_tensor(const RateTensor& r) {
  return {DType::f32, {r.num_frames, r.height, r.width}, {}, r.values};
}

inline Tensor to_tensor(const std::vector<GrayFrame>& frames) {
  if (frames.empty()) throw DimensionError("no frames");
  Tensor t{DType::u8, {frames.size(), frames[0].height, frames[0].width}, {}, {}};
  for (const auto& f : frames) t.u8.insert(t.u8.end(), f.pixels.begin(), f.pixels.end());
  return t;
}

/// Clip from a rank-3 (frames, height, width) tensor. uint8 values map to v / 255.
inline IntensityClip clip_from_tensor(const Tensor& t, std::uint64_t frame_interval_ns) {
  if (t.dims.size() != 3) throw FormatError("intensity tensor must have rank 3");
  for (auto d : t.dims)
    if (d == 0 || d > std::numeric_limits<std::uint32_t>::max())
      throw FormatError("intensity tensor dimension out of range");
  std::vector<double> values;
  if (t.dtype == DType::u8) {
    values.reserve(t.u8.size());
    for (auto v : t.u8) values.push_back(v / 255.0);
  } else {
    values.assign(t.f32.begin(), t.f32.end());
  }
  return IntensityClip(static_cast<std::uint32_t>(t.dims[1]), static_cast<std::uint32_t>(t.dims[2]),
                       static_cast<std::uint32_t>(t.dims[0]), frame_interval_ns, std::move(values));
}

inline void save_tensor(const Tensor& t, const std::filesystem::path& path) {
  if (t.dims.empty() || t.dims.size() > kMaxTensorRank) throw FormatError("tensor rank out of range");
  if (t.element_count() != t.stored_count())
    throw FormatError("tensor dims do not match element count");
  std::vector<std::uint8_t> bytes(kTensorMagic.begin(), kTensorMagic.end());
  detail::put_le(bytes, kFormatVersion);
  detail::put_le(bytes, static_cast<std::uint16_t>(t.dtype));
  detail::put_le(bytes, static_cast<std::uint32_t>(t.dims.size()));
  for (auto d : t.dims) detail::put_le(bytes, d);
  if (t.dtype == DType::u8) {
    bytes.insert(bytes.end(), t.u8.begin(), t.u8.end());
  } else {
    bytes.reserve(bytes.size() + 4 * t.f32.size());
    for (float v : t.f32) detail::put_le(bytes, std::bit_cast<std::uint32_t>(v));
  }
  detail::write_atomically(path, [&](std::ostream& out) { detail::write_bytes(out, bytes); });
}

inline void save_tensor(const RateTensor& r, const std::filesystem::path& path) {
  save_tensor(to_tensor(r), path);
}

inline Tensor load_tensor(const std::filesystem::path& path) {
  auto in = detail::open_for_read(path);
  auto fixed = detail::read_exact(in, 12, "tensor header");
  if (!std::equal(kTensorMagic.begin(), kTensorMagic.end(), fixed.begin()))
    throw FormatError("bad magic: not a .spkt tensor");
  if (detail::get_le<std::uint16_t>(fixed, 4) != kFormatVersion)
    throw FormatError("unsupported tensor version");
  const auto code = detail::get_le<std::uint16_t>(fixed, 6);
  if (code > 1) throw FormatError("unknown tensor dtype " + std::to_string(code));
  Tensor t;
  t.dtype = static_cast<DType>(code);
  const auto rank = detail::get_le<std::uint32_t>(fixed, 8);
  if (rank == 0 || rank > kMaxTensorRank) throw FormatError("tensor rank out of range");
  auto dims = detail::read_exact(in, std::size_t{rank} * 8, "tensor dims");
  for (std::uint32_t i = 0; i < rank; ++i) t.dims.push_back(detail::get_le<std::uint64_t>(dims, i * 8));
  const std::uint64_t count = t.element_count();
  const std::uint64_t esize = dtype_size(t.dtype);
  if (count > std::numeric_limits<std::uint64_t>::max() / esize)
    throw FormatError("tensor payload size overflows");
  const std::uint64_t expected = count * esize;
  const std::uint64_t available = detail::remaining_bytes(in);
  if (available < expected) throw CorruptionError("tensor payload shorter than dims declare");
  if (available > expected) throw FormatError("tensor payload longer than dims declare");
  auto payload = detail::read_exact(in, static_cast<std::size_t>(expected), "tensor payload");
  if (t.dtype == DType::u8) {
    t.u8 = std::move(payload);
  } else {
    t.f32.resize(static_cast<std::size_t>(count));
    for (std::size_t i = 0; i < t.f32.size(); ++i)
      t.f32[i] = std::bit_cast<float>(detail::get_le<std::uint32_t>(payload, 4 * i));
  }
  return t;
}

}  // namespace spikeforge
