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

// Interval-rate integrate-and-fire compression of spike trains.
//
// The train is cut into T' = floor(T / d) non-overlapping intervals of d steps
// (the trailing T mod d steps are dropped). Interval i's rate r[i] drives a
// unit-threshold IF neuron:
//
//   v[i]  = v[i-1] + r[i]
//   s'[i] = H(v[i] - 1),  H(0) = 1
//   v[i]  = v[i] - s'[i]
//
// with v[-1] = 0. Since r[i] * d is the interval's spike count, v is held as an
// integer numerator over d and the recurrence is exact. Consequence:
//
//   count_prefix(s', l) == floor(count_prefix(s, l * d) / d)   for all l.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <vector>

#include "spikeforge/camera_sim.hpp"
#include "spikeforge/error.hpp"
#include "spikeforge/parallel.hpp"
#include "spikeforge/rational.hpp"
#include "spikeforge/spike_stream.hpp"

namespace spikeforge {

/// Interval length d and the derived output length.
struct CompressionSpec {
  std::uint64_t d = 1;

  /// Validates against an input of `num_steps` and returns T'.
  std::uint64_t output_steps(std::uint64_t num_steps) const {
    if (d == 0) throw DomainError("interval length d must be >= 1");
    if (d > num_steps) throw RangeError("interval length d exceeds the number of steps");
    return num_steps / d;
  }
  std::uint64_t dropped_steps(std::uint64_t num_steps) const {
    return num_steps - output_steps(num_steps) * d;
  }
};

/// Membrane of the compressing neuron as v_num / d; 0 <= v_num < d between steps.
class CompressorState {
 public:
  explicit CompressorState(std::uint64_t d) : d_(d) {
    if (d == 0) throw DomainError("interval length d must be >= 1");
  }
  /// Feeds an interval's spike count (0..d) and returns the emitted bit.
  bool step(std::uint64_t interval_count) noexcept {
    v_num_ += interval_count;
    if (v_num_ >= d_) {
      v_num_ -= d_;
      return true;
    }
    return false;
  }
  std::uint64_t v_num() const noexcept { return v_num_; }
  std::uint64_t d() const noexcept { return d_; }

 private:
  std::uint64_t d_;
  std::uint64_t v_num_ = 0;
};

inline SpikeTrain compress_train(const SpikeTrain& s, std::uint64_t d) {
  const std::uint64_t out_len = CompressionSpec{d}.output_steps(s.size());
  SpikeTrain out(static_cast<std::size_t>(out_len));
  CompressorState state(d);
  auto bits = s.bits();
  for (std::uint64_t i = 0; i < out_len; ++i) {
    std::uint64_t count = 0;
    for (std::uint64_t t = i * d; t < (i + 1) * d; ++t) count += bits[t];
    out.set(i, state.step(count));
  }
  return out;
}

/// Compresses every pixel independently. Output has floor(T / d) steps and
/// period tau * d.
inline SpikeStream compress_stream(const SpikeStream& stream, std::uint64_t d) {
  const std::uint64_t out_steps = CompressionSpec{d}.output_steps(stream.num_steps());
  if (stream.tau_ns() > std::numeric_limits<std::uint64_t>::max() / d)
    throw DimensionError("compressed tau_ns overflows");
  SpikeStream out(stream.height(), stream.width(), out_steps, stream.tau_ns() * d);

  const std::size_t pixels = stream.pixel_count();
  const std::size_t plane_bytes = stream.plane_bytes();
  auto out_payload = out.mutable_payload();

  parallel_for_chunks(
      plane_bytes,
      [&](std::size_t b0, std::size_t b1) {
        const std::size_t p0 = b0 * 8;
        const std::size_t p1 = std::min(pixels, b1 * 8);
        std::vector<std::uint32_t> counts(p1 - p0);
        std::vector<std::uint64_t> membrane(p1 - p0, 0);
        for (std::uint64_t i = 0; i < out_steps; ++i) {
          std::fill(counts.begin(), counts.end(), 0u);
          for (std::uint64_t k = i * d; k < (i + 1) * d; ++k)
            detail::for_each_set_bit(stream.plane(k), b0, b1,
                                     [&](std::size_t p) { ++counts[p - p0]; });
          std::uint8_t* plane = out_payload.data() + i * plane_bytes;
          for (std::size_t p = p0; p < p1; ++p) {
            std::uint64_t& v = membrane[p - p0];
            v += counts[p - p0];
            if (v >= d) {
              v -= d;
              plane[p >> 3] |= static_cast<std::uint8_t>(1u << (p & 7));
            }
          }
        }
      },
      64);
  return out;
}

/// Result of checking the constant-rate lemma for one (c, d, T).
struct LemmaReport {
  Rational c;
  std::uint64_t d = 0;
  std::uint64_t num_steps = 0;
  std::uint64_t compressed_steps = 0;
  /// count_prefix(s, t) == floor(t * c) for every t of the source train.
  bool source_identity = false;
  std::uint64_t prefix_checks = 0;
  /// Prefix lengths l (1-based) where count_prefix(s', l) != floor(floor(l*d*c) / d).
  std::vector<std::uint64_t> failed_prefixes;
  std::uint64_t compressed_spikes = 0;
  /// |count(s') / T' - c|
  double rate_gap = 0.0;
  bool rate_gap_within_bound = false;  // rate_gap <= 1 / T', decided exactly

  bool all_pass() const {
    return source_identity && failed_prefixes.empty() && rate_gap_within_bound;
  }
};

namespace detail {
using u128 = unsigned __int128;

inline std::uint64_t lemma_expected(std::uint64_t l, std::uint64_t d, std::uint64_t p,
                                    std::uint64_t q) {
  u128 inner = (u128{l} * d * p) / q;  // floor(l*d*c)
  return static_cast<std::uint64_t>(inner / d);
}
}  // namespace detail

inline LemmaReport verify_lemma(Rational c, std::uint64_t d, std::uint64_t num_steps) {
  c = c.normalized();
  if (c.num > c.den) throw DomainError("lemma oracle requires 0 <= c <= 1");
  LemmaReport r;
  r.c = c;
  r.d = d;
  r.num_steps = num_steps;
  r.compressed_steps = CompressionSpec{d}.output_steps(num_steps);
  const auto p = static_cast<std::uint64_t>(c.num);
  const auto q = static_cast<std::uint64_t>(c.den);

  const SpikeTrain s = constant_rate_train(c, static_cast<std::size_t>(num_steps));
  const SpikeTrain compressed = compress_train(s, d);

  auto source_prefix = prefix_counts(s);
  r.source_identity = true;
  for (std::uint64_t t = 1; t <= num_steps; ++t)
    if (source_prefix[t] != static_cast<std::uint64_t>((detail::u128{t} * p) / q)) {
      r.source_identity = false;
      break;
    }

  std::uint64_t running = 0;
  for (std::uint64_t l = 1; l <= r.compressed_steps; ++l) {
    running += compressed.bits()[l - 1];
    ++r.prefix_checks;
    if (running != detail::lemma_expected(l, d, p, q)) r.failed_prefixes.push_back(l);
  }
  r.compressed_spikes = running;

  // gap = |T'p - q n| / (q T'); bound 1/T' <=> |T'p - q n| <= q.
  const auto tp = static_cast<__int128>(r.compressed_steps) * p;
  const auto qn = static_cast<__int128>(q) * running;
  const __int128 diff = tp > qn ? tp - qn : qn - tp;
  r.rate_gap_within_bound = diff <= static_cast<__int128>(q);
  r.rate_gap = static_cast<double>(diff) / (static_cast<double>(q) *
                                             static_cast<double>(r.compressed_steps));
  return r;
}

/// Two-stage compression compared against the single-stage equivalent.
/// By the prefix identity and floor(floor(n / a) / b) == floor(n / (a b)), the
/// two prefix curves coincide, so the Hamming distance is expected to be 0; the
/// report measures it rather than assuming it.
struct RecompressReport {
  std::uint64_t d1 = 0;
  std::uint64_t d2 = 0;
  std::uint64_t hamming_distance = 0;
  std::vector<std::uint64_t> two_stage_prefix;   // length floor(T/(d1 d2)) + 1
  std::vector<std::uint64_t> single_stage_prefix;
  bool stage1_identity = false;
  bool stage2_identity = false;
  bool single_stage_identity = false;
};

namespace detail {
inline bool prefix_identity_holds(const SpikeTrain& source, const SpikeTrain& compressed,
                                  std::uint64_t d) {
  auto src = prefix_counts(source);
  auto out = prefix_counts(compressed);
  for (std::uint64_t l = 0; l < out.size(); ++l)
    if (out[l] != src[l * d] / d) return false;
  return true;
}
}  // namespace detail

inline RecompressReport recompress_report(const SpikeTrain& s, std::uint64_t d1, std::uint64_t d2) {
  if (d1 == 0 || d2 == 0) throw DomainError("interval length d must be >= 1");
  if (d1 > s.size() / d2) throw RangeError("d1 * d2 exceeds the number of steps");
  RecompressReport r;
  r.d1 = d1;
  r.d2 = d2;
  const SpikeTrain stage1 = compress_train(s, d1);
  const SpikeTrain stage2 = compress_train(stage1, d2);
  const SpikeTrain direct = compress_train(s, d1 * d2);
  r.stage1_identity = detail::prefix_identity_holds(s, stage1, d1);
  r.stage2_identity = detail::prefix_identity_holds(stage1, stage2, d2);
  r.single_stage_identity = detail::prefix_identity_holds(s, direct, d1 * d2);
  // floor(floor(T/d1)/d2) == floor(T/(d1 d2)), so both outputs have equal length.
  for (std::size_t i = 0; i < direct.size(); ++i) r.hamming_distance += stage2[i] != direct[i];
  r.two_stage_prefix = prefix_counts(stage2);
  r.single_stage_prefix = prefix_counts(direct);
  return r;
}

}  // namespace spikeforge
