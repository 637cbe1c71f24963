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

// Lossless byte-level backends for the optional entropy stage of the
// container. The file format recognises one backend (xz/LZMA, flag bit 0);
// the null backend exists so the framing can be tested without a codec.

#include <lzma.h>

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "spikeforge/error.hpp"

namespace spikeforge {

class EntropyBackend {
 public:
  virtual ~EntropyBackend() = default;
  virtual std::string_view name() const = 0;
  virtual std::vector<std::uint8_t> compress(std::span<const std::uint8_t> raw) const = 0;
  /// Decodes `packed` into `out`, which must be filled exactly.
  virtual void decompress(std::span<const std::uint8_t> packed, std::span<std::uint8_t> out) const = 0;
};

class NullBackend final : public EntropyBackend {
 public:
  std::string_view name() const override { return "null"; }
  std::vector<std::uint8_t> compress(std::span<const std::uint8_t> raw) const override {
    return {raw.begin(), raw.end()};
  }
  void decompress(std::span<const std::uint8_t> packed, std::span<std::uint8_t> out) const override {
    if (packed.size() != out.size()) throw CorruptionError("payload length mismatch");
    std::copy(packed.begin(), packed.end(), out.begin());
  }
};

/// LZMA2 in an .xz container with CRC64 integrity check.
class XzBackend final : public EntropyBackend {
 public:
  explicit XzBackend(std::uint32_t preset = 6) : preset_(preset) {}

  std::string_view name() const override { return "xz"; }

  std::vector<std::uint8_t> compress(std::span<const std::uint8_t> raw) const override {
    std::vector<std::uint8_t> out(lzma_stream_buffer_bound(raw.size()));
    std::size_t out_pos = 0;
    lzma_ret ret = lzma_easy_buffer_encode(preset_, LZMA_CHECK_CRC64, nullptr, raw.data(),
                                           raw.size(), out.data(), &out_pos, out.size());
    if (ret != LZMA_OK) throw Error("xz encoder failed (code " + std::to_string(ret) + ")");
    out.resize(out_pos);
    return out;
  }

  void decompress(std::span<const std::uint8_t> packed, std::span<std::uint8_t> out) const override {
    lzma_stream strm = LZMA_STREAM_INIT;
    if (lzma_stream_decoder(&strm, UINT64_MAX, 0) != LZMA_OK)
      throw Error("xz decoder initialisation failed");
    strm.next_in = packed.data();
    strm.avail_in = packed.size();
    strm.next_out = out.data();
    strm.avail_out = out.size();
    lzma_ret ret = lzma_code(&strm, LZMA_FINISH);
    std::size_t missing = strm.avail_out;
    bool overlong = false;
    if (ret == LZMA_OK && missing == 0) {
      // Output is full but the stream has not ended: probe for excess bytes.
      std::uint8_t probe = 0;
      strm.next_out = &probe;
      strm.avail_out = 1;
      ret = lzma_code(&strm, LZMA_FINISH);
      overlong = strm.avail_out == 0;
    }
    const bool consumed_all = strm.avail_in == 0;
    lzma_end(&strm);
    if (overlong) throw CorruptionError("xz payload longer than declared");
    if (ret != LZMA_STREAM_END) throw CorruptionError("xz payload is corrupt or truncated");
    if (missing != 0) throw CorruptionError("xz payload shorter than declared");
    if (!consumed_all) throw CorruptionError("trailing bytes after xz payload");
  }

 private:
  std::uint32_t preset_;
};

}  // namespace spikeforge
