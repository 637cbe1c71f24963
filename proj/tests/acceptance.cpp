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


// Acceptance suite. Prints one PASS/FAIL line per criterion and exits nonzero
// if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstring>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "spikeforge/spikeforge.hpp"

namespace {

using namespace spikeforge;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = true;
  std::string detail;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Lemma: every prefix identity exact, terminal gap <= 1/T', under a minute.
Outcome lemma_reproduction() {
  const auto t0 = Clock::now();
  std::size_t cases = 0, checks = 0;
  Outcome o;
  for (std::int64_t q = 1; q <= 12; ++q)
    for (std::int64_t p = 0; p <= q; ++p)
      for (std::uint64_t d : {1, 2, 5, 10, 16}) {
        LemmaReport r = verify_lemma({p, q}, d, 10'000);
        ++cases;
        checks += r.prefix_checks;
        // Independent restatement of both conditions.
        SpikeTrain s = constant_rate_train({p, q}, 10'000);
        SpikeTrain c = compress_train(s, d);
        std::uint64_t n = 0;
        bool ok = r.all_pass();
        for (std::uint64_t l = 1; l <= c.size(); ++l) {
          n += c[l - 1];
          const std::uint64_t expected = (l * d * static_cast<std::uint64_t>(p) / static_cast<std::uint64_t>(q)) / d;
          ok = ok && n == expected;
        }
        const double gap = std::abs(static_cast<double>(n) / static_cast<double>(c.size()) -
                                    static_cast<double>(p) / static_cast<double>(q));
        ok = ok && gap <= 1.0 / static_cast<double>(c.size()) + 1e-15;
        if (!ok) {
          o.pass = false;
          o.detail += " fail c=" + std::to_string(p) + "/" + std::to_string(q) + " d=" + std::to_string(d);
        }
      }
  const double secs = seconds_since(t0);
  if (secs >= 60.0) o.pass = false;
  o.detail = std::to_string(cases) + " (c,d) cases, " + std::to_string(checks) + " prefix identities, " +
             std::to_string(secs) + " s (limit 60 s)" + o.detail;
  return o;
}

// Compression invariant: zero-tolerance prefix identity, fuzzed and exhaustive.
Outcome exact_compression_invariant() {
  Outcome o;
  std::mt19937_64 rng(20260101);
  std::size_t fuzz = 0, exhaustive = 0, violations = 0;
  for (; fuzz < 10'000; ++fuzz) {
    const std::size_t n = rng() % 2000 + 1;
    const std::size_t d = rng() % std::min<std::size_t>(n, 128) + 1;
    auto bits = oracle::random_train(rng, n, static_cast<double>(rng() % 1001) / 1000.0);
    SpikeTrain s(std::vector<std::uint8_t>(bits.begin(), bits.end()));
    SpikeTrain c = compress_train(s, d);
    if (c.size() != n / d) ++violations;
    std::uint64_t running_out = 0, running_in = 0;
    std::size_t t = 0;
    for (std::size_t l = 1; l <= c.size(); ++l) {
      running_out += c[l - 1];
      for (; t < l * d; ++t) running_in += static_cast<std::uint64_t>(bits[t]);
      if (running_out != running_in / d) ++violations;
    }
  }
  for (std::size_t n = 1; n <= 12; ++n)
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
      std::vector<int> bits(n);
      for (std::size_t i = 0; i < n; ++i) bits[i] = (mask >> i) & 1u;
      SpikeTrain s(std::vector<std::uint8_t>(bits.begin(), bits.end()));
      for (std::size_t d = 1; d <= std::min<std::size_t>(4, n); ++d) {
        ++exhaustive;
        SpikeTrain c = compress_train(s, d);
        auto pre = prefix_counts(c);
        for (std::size_t l = 1; l <= c.size(); ++l)
          if (pre[l] != oracle::compressed_prefix_closed_form(bits, d, l)) ++violations;
      }
    }
  o.pass = violations == 0;
  o.detail = std::to_string(fuzz) + " fuzzed trains (T<=2000), " + std::to_string(exhaustive) +
             " exhaustive (train,d) pairs (T<=12, d<=4), violations=" + std::to_string(violations);
  return o;
}

// Camera-sized stream at the two published compression factors.
Outcome paper_regimes() {
  const auto t0 = Clock::now();
  SpikeStream raw(kCameraHeight, kCameraWidth, 100'000, kCameraTauNs);
  {
    // splitmix64, three words ANDed: density 1/8.
    std::uint64_t state = 0x5EED;
    auto next = [&] {
      std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
      z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
      z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
      return z ^ (z >> 31);
    };
    auto payload = raw.mutable_payload();
    for (std::size_t i = 0; i + 8 <= payload.size(); i += 8) {
      std::uint64_t w = next() & next() & next();
      std::memcpy(payload.data() + i, &w, 8);
    }
  }
  const double gen_secs = seconds_since(t0);
  const auto t1 = Clock::now();
  SpikeStream c10 = compress_stream(raw, 10);
  SpikeStream c100 = compress_stream(raw, 100);
  const double secs = seconds_since(t1);

  auto payload_of = [](const SpikeStream& s) {
    StreamHeader h;
    h.width = s.width();
    h.height = s.height();
    h.num_steps = s.num_steps();
    return h.payload_bytes();
  };
  const std::uint64_t p_raw = payload_of(raw), p10 = payload_of(c10), p100 = payload_of(c100);
  Outcome o;
  o.pass = c10.num_steps() == 10'000 && c100.num_steps() == 1'000 && p_raw == 10 * p10 &&
           p_raw == 100 * p100 && p_raw == raw.payload().size() && p10 == c10.payload().size() &&
           p100 == c100.payload().size() && c10.tau_ns() == 500'000 && c100.tau_ns() == 5'000'000 &&
           secs < 30.0;
  // Spot-check a few pixels against the per-train path.
  for (std::uint32_t i = 0; i < 5 && o.pass; ++i) {
    const std::uint32_t x = (i * 97) % kCameraWidth, y = (i * 53) % kCameraHeight;
    SpikeTrain t = raw.train(x, y);
    o.pass = c10.train(x, y) == compress_train(t, 10) && c100.train(x, y) == compress_train(t, 100);
  }
  o.detail = "250x400x100000 -> T=" + std::to_string(c10.num_steps()) + " / " +
             std::to_string(c100.num_steps()) + ", payload " + std::to_string(p_raw) + " -> " +
             std::to_string(p10) + " / " + std::to_string(p100) + " bytes, compress " +
             std::to_string(secs) + " s (limit 30 s; generation " + std::to_string(gen_secs) + " s)";
  return o;
}

float f32_ulp(float v) { return std::nextafter(v, 2.0f) - v; }

// Rate tensors for the 10k and 1k regimes.
Outcome rate_encoding_shapes() {
  Outcome o;
  SpikeStream raw = fixtures::structured_stream(25, 40, 100'000, 3);
  std::ostringstream d;
  for (std::uint64_t factor : {10, 100}) {
    SpikeStream s = compress_stream(raw, factor);
    RateTensor r = rate_encode(s, 100);
    const double chunk = static_cast<double>(r.chunk_len);
    bool quantized = true;
    double sum = 0.0;
    for (float v : r.values) {
      const double scaled = static_cast<double>(v) * chunk;
      quantized = quantized && std::abs(scaled - std::round(scaled)) < 1e-4 && v >= 0.0f && v <= 1.0f;
      sum += v;
    }
    const double mean = sum / static_cast<double>(r.values.size());
    const double rate = static_cast<double>(s.total_spikes()) /
                        static_cast<double>(s.pixel_count() * r.num_frames * r.chunk_len);
    const double err = std::abs(mean - rate);
    const double ulp = f32_ulp(static_cast<float>(rate));
    const bool ok = r.num_frames == 100 && r.chunk_len == 100'000 / factor / 100 &&
                    r.values.size() == 100u * 25u * 40u && quantized && err <= ulp;
    o.pass = o.pass && ok;
    d << "T=" << s.num_steps() << ": frames=" << r.num_frames << " L=" << r.chunk_len
      << " quantized=" << quantized << " |mean-rate|=" << err << " (1 ulp=" << ulp << "); ";
  }
  o.detail = d.str();
  return o;
}

// Simulator fires every k steps for q = theta/k; TFP(200) gives round(255/k).
Outcome simulator_closed_form() {
  Outcome o;
  std::vector<double> intensities;
  CameraConfig cfg;
  cfg.theta = 1.0;
  cfg.alpha = 1.0;
  const double tau_s = static_cast<double>(cfg.tau_ns) * 1e-9;
  for (int k = 1; k <= 20; ++k) intensities.push_back(cfg.theta / k / (cfg.alpha * tau_s));
  IntensityClip clip(1, 20, 1, 10'000 * cfg.tau_ns, intensities);
  SpikeStream s = simulate(clip, cfg);
  auto frames = tfp_reconstruct(s, 200);

  std::vector<int> firing_bad, tfp_bad;
  for (std::uint32_t k = 1; k <= 20; ++k) {
    const std::uint32_t x = k - 1;
    bool every_k = true;
    for (std::uint64_t t = 0; t < s.num_steps(); ++t) every_k = every_k && s.get(x, 0, t) == ((t + 1) % k == 0);
    if (!every_k) firing_bad.push_back(static_cast<int>(k));
    const auto target = static_cast<std::uint8_t>(std::floor(255.0 / k + 0.5));
    std::set<int> levels;
    for (const auto& f : frames) levels.insert(f.at(x, 0));
    if (levels != std::set<int>{target}) tfp_bad.push_back(static_cast<int>(k));
  }
  std::ostringstream d;
  d << "fires every k steps for " << (20 - firing_bad.size()) << "/20 k; TFP(window=200) == round(255/k) in every frame for "
    << (20 - tfp_bad.size()) << "/20 k";
  if (!tfp_bad.empty()) {
    d << "; mismatched k:";
    for (int k : tfp_bad) d << ' ' << k;
    d << " (200 not a multiple of k: window counts alternate floor/ceil(200/k))";
  }
  o.pass = firing_bad.empty() && tfp_bad.empty();
  o.detail = d.str();
  return o;
}

// Storage: bit-identical round trips; entropy ratio reported only.
Outcome storage_round_trip() {
  Outcome o;
  const fs::path dir = fs::temp_directory_path() / "spikeforge_acceptance_storage";
  fs::create_directories(dir);
  std::mt19937_64 rng(99);
  std::size_t cycles = 0, mismatches = 0;
  for (int i = 0; i < 1000; ++i)
    for (bool entropy : {false, true}) {
      const auto h = static_cast<std::uint32_t>(rng() % 24 + 1);
      const auto w = static_cast<std::uint32_t>(rng() % 24 + 1);
      const std::uint64_t t = rng() % 64 + 1;
      SpikeStream s(h, w, t, rng() % 1'000'000 + 1);
      const unsigned density = static_cast<unsigned>(rng() % 9);
      for (std::uint64_t k = 0; k < t; ++k)
        for (std::uint32_t y = 0; y < h; ++y)
          for (std::uint32_t x = 0; x < w; ++x) s.set(x, y, k, rng() % 8 < density);
      const std::string meta = "{\"i\":" + std::to_string(i) + "}";
      const fs::path file = dir / "cycle.spks";
      save_stream(s, file, entropy, meta);
      auto back = load_stream_with_header(file);
      ++cycles;
      if (!(back.stream == s) || back.header.meta != meta || back.header.entropy() != entropy) ++mismatches;
    }

  SpikeStream structured = fixtures::structured_stream(50, 80, 10'000, 5);
  SpikeStream structured10 = compress_stream(structured, 10);
  XzBackend xz;
  const double ratio_raw = static_cast<double>(xz.compress(structured.payload()).size()) /
                           static_cast<double>(structured.payload().size());
  const double ratio_10 = static_cast<double>(xz.compress(structured10.payload()).size()) /
                          static_cast<double>(structured10.payload().size());
  fs::remove_all(dir);
  o.pass = mismatches == 0;
  std::ostringstream d;
  d << cycles << " save/load cycles, mismatches=" << mismatches << "; xz ratio on structured synthetic data: original "
    << ratio_raw << ", d=10 " << ratio_10 << " (reference, not asserted: 425/3891=" << 425.0 / 3891.0
    << ", 42.43/377.63=" << 42.43 / 377.63 << ")";
  o.detail = d.str();
  return o;
}

// Subject-wise split for 44 subjects.
Outcome split_integrity() {
  Outcome o;
  std::vector<std::string> ids;
  for (int i = 1; i <= 44; ++i) ids.push_back(fixtures::subject_name(i));
  auto records = fixtures::full_manifest();
  bool sizes = true, deterministic = true, leak_free = true;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    auto a = split_subjects(ids, seed);
    auto b = split_subjects(ids, seed);
    sizes = sizes && a.count(Split::train) == 36 && a.count(Split::val) == 4 && a.count(Split::test) == 4;
    deterministic = deterministic && a.assignment == b.assignment;
    std::map<std::string, std::set<Split>> seen;
    for (const auto& r : records) seen[r.subject_id].insert(a.assignment.at(r.subject_id));
    for (const auto& [id, splits] : seen) leak_free = leak_free && splits.size() == 1;
    std::set<std::string> train, val, test;
    for (const auto& s : a.subjects_in(Split::train)) train.insert(s);
    for (const auto& s : a.subjects_in(Split::val)) leak_free = leak_free && !train.count(s) && val.insert(s).second;
    for (const auto& s : a.subjects_in(Split::test))
      leak_free = leak_free && !train.count(s) && !val.count(s) && test.insert(s).second;
    leak_free = leak_free && train.size() + val.size() + test.size() == 44;
  }
  o.pass = sizes && deterministic && leak_free;
  o.detail = std::string("100 seeds: 36/4/4=") + (sizes ? "yes" : "no") + ", deterministic=" +
             (deterministic ? "yes" : "no") + ", no leakage=" + (leak_free ? "yes" : "no");
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"lemma_reproduction", lemma_reproduction},
      {"exact_compression_invariant", exact_compression_invariant},
      {"paper_regimes_d10_d100", paper_regimes},
      {"rate_encoding_shapes", rate_encoding_shapes},
      {"simulator_closed_form_and_tfp", simulator_closed_form},
      {"storage_round_trip", storage_round_trip},
      {"split_integrity", split_integrity},
  };
  int failures = 0;
  for (const auto& [name, fn] : criteria) {
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    std::cout << (o.pass ? "[PASS] " : "[FAIL] ") << name << ": " << o.detail << std::endl;
  }
  std::cout << (criteria.size() - static_cast<std::size_t>(failures)) << "/" << criteria.size()
            << " criteria passed" << std::endl;
  return failures == 0 ? 0 : 1;
}
