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

// The spikeforge command-line tool.
//
// Exit codes: 0 success, 1 usage error, 2 data/format error. Diagnostics go to
// `err`; info, verify-lemma and stats print one JSON document to `out`.

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "spikeforge/camera_sim.hpp"
#include "spikeforge/compress.hpp"
#include "spikeforge/dataset.hpp"
#include "spikeforge/encodings.hpp"
#include "spikeforge/error.hpp"
#include "spikeforge/parallel.hpp"
#include "spikeforge/pgm.hpp"
#include "spikeforge/rational.hpp"
#include "spikeforge/spike_stream.hpp"
#include "spikeforge/storage.hpp"

namespace spikeforge::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;

/// Everything the parser collects; each subcommand reads the fields it owns.
struct CommandConfig {
  std::string subcommand;
  std::string input;
  std::string output;
  std::uint64_t d = 0;
  std::uint64_t window = 200;
  std::uint64_t stride = 0;
  std::uint32_t frames = 100;
  double alpha = 1.0;
  double theta = 1.0;
  std::uint64_t tau_ns = kCameraTauNs;
  std::uint64_t frame_interval_ns = 0;
  std::string reset = "zero";
  std::uint64_t seed = 0;
  bool entropy = false;
  bool interleaved = false;
  bool contiguous = false;
  std::string bit_order = "lsb";
  std::string layout = "padded";
  std::uint32_t height = 0;
  std::uint32_t width = 0;
  std::uint64_t steps = 0;
  std::string c = "0";
  std::uint64_t lemma_steps = 0;
  std::string meta;
};

namespace detail {

inline nlohmann::json meta_json(const std::string& meta) {
  if (meta.empty()) return nullptr;
  try {
    return nlohmann::json::parse(meta);
  } catch (const nlohmann::json::exception&) {
    return meta;
  }
}

inline int cmd_simulate(const CommandConfig& c, std::ostream&, std::ostream& err) {
  CameraConfig cam{c.alpha, c.theta, c.tau_ns,
                   c.reset == "subtract" ? ResetMode::subtract : ResetMode::zero};
  std::filesystem::path in(c.input);
  IntensityClip clip = std::filesystem::is_directory(in)
                           ? load_clip_from_pgm_dir(in, c.frame_interval_ns)
                           : clip_from_tensor(load_tensor(in), c.frame_interval_ns);
  SpikeStream s = simulate(clip, cam);
  save_stream(s, c.output, c.entropy, c.meta);
  err << "simulated " << clip.num_frames() << " frames into " << s.num_steps() << " steps\n";
  return kExitOk;
}

inline int cmd_compress(const CommandConfig& c, std::ostream&, std::ostream& err) {
  auto loaded = load_stream_with_header(c.input);
  const CompressionSpec spec{c.d};
  const std::uint64_t dropped = spec.dropped_steps(loaded.stream.num_steps());
  if (dropped != 0)
    err << "warning: dropping " << dropped << " trailing steps (T=" << loaded.stream.num_steps()
        << " is not a multiple of d=" << c.d << ")\n";
  SpikeStream out = compress_stream(loaded.stream, c.d);
  save_stream(out, c.output, c.entropy, loaded.header.meta);
  err << "compressed T=" << loaded.stream.num_steps() << " -> T'=" << out.num_steps() << '\n';
  return kExitOk;
}

inline int cmd_rate_encode(const CommandConfig& c, std::ostream&, std::ostream& err) {
  SpikeStream s = load_stream(c.input);
  RateTensor r = rate_encode(s, c.frames, c.interleaved ? RateOrder::interleaved : RateOrder::contiguous);
  save_tensor(r, c.output);
  err << "rate-encoded " << r.num_frames << " frames of " << r.chunk_len << " steps\n";
  return kExitOk;
}

inline int cmd_reconstruct(const CommandConfig& c, std::ostream&, std::ostream& err) {
  SpikeStream s = load_stream(c.input);
  auto frames = tfp_reconstruct(s, c.window, c.stride);
  write_pgm_sequence(frames, c.output);
  err << "wrote " << frames.size() << " TFP frames to " << c.output << '\n';
  return kExitOk;
}

inline int cmd_pack(const CommandConfig& c, bool entropy) {
  auto loaded = load_stream_with_header(c.input);
  save_stream(loaded.stream, c.output, entropy, loaded.header.meta);
  return kExitOk;
}

inline int cmd_import_raw(const CommandConfig& c, std::ostream&, std::ostream&) {
  SpikeStream s = import_raw(c.input, c.height, c.width, c.steps, c.tau_ns,
                             c.bit_order == "msb" ? BitOrder::msb_first : BitOrder::lsb_first,
                             c.layout == "continuous" ? RawLayout::continuous : RawLayout::plane_padded);
  save_stream(s, c.output, c.entropy, c.meta);
  return kExitOk;
}

inline int cmd_info(const CommandConfig& c, std::ostream& out, std::ostream&) {
  auto loaded = load_stream_with_header(c.input);
  const SpikeStream& s = loaded.stream;
  const std::uint64_t spikes = s.total_spikes();
  nlohmann::json j;
  j["width"] = s.width();
  j["height"] = s.height();
  j["num_steps"] = s.num_steps();
  j["tau_ns"] = s.tau_ns();
  j["duration_ns"] = static_cast<double>(s.num_steps()) * static_cast<double>(s.tau_ns());
  j["entropy"] = loaded.header.entropy();
  j["payload_bytes"] = loaded.header.payload_bytes();
  j["total_spikes"] = spikes;
  j["global_rate"] = static_cast<double>(spikes) / static_cast<double>(s.logical_bits());
  j["meta"] = meta_json(loaded.header.meta);
  if (j["meta"].is_object()) {
    nlohmann::json sample = nlohmann::json::object();
    for (const char* key : {"sample_id", "subject_id", "session", "activity", "half"})
      if (j["meta"].contains(key)) sample[key] = j["meta"][key];
    if (!sample.empty()) j["sample"] = sample;
  }
  out << j.dump(2) << '\n';
  return kExitOk;
}

inline int cmd_verify_lemma(const CommandConfig& c, std::ostream& out, std::ostream& err) {
  Rational rate = Rational::parse(c.c);
  LemmaReport r = verify_lemma(rate, c.d, c.lemma_steps);
  nlohmann::json j;
  j["c"] = r.c.str();
  j["d"] = r.d;
  j["T"] = r.num_steps;
  j["compressed_steps"] = r.compressed_steps;
  j["source_identity"] = r.source_identity;
  j["prefix_checks"] = r.prefix_checks;
  j["prefix_failures"] = r.failed_prefixes.size();
  std::vector<std::uint64_t> first(r.failed_prefixes.begin(),
                                   r.failed_prefixes.begin() +
                                       static_cast<std::ptrdiff_t>(std::min<std::size_t>(10, r.failed_prefixes.size())));
  j["first_failed_prefixes"] = first;
  j["compressed_spikes"] = r.compressed_spikes;
  j["rate_gap"] = r.rate_gap;
  j["rate_gap_bound"] = 1.0 / static_cast<double>(r.compressed_steps);
  j["rate_gap_within_bound"] = r.rate_gap_within_bound;
  j["all_pass"] = r.all_pass();
  out << j.dump(2) << '\n';
  if (!r.all_pass()) {
    err << "lemma check failed\n";
    return kExitData;
  }
  return kExitOk;
}

inline int cmd_split(const CommandConfig& c, std::ostream& out, std::ostream& err) {
  auto records = load_manifest(c.input);
  SplitAssignment split = split_manifest(records, c.seed);
  if (c.output.empty()) {
    write_split_csv(split, out);
  } else {
    spikeforge::detail::write_atomically(c.output, [&](std::ostream& o) { write_split_csv(split, o); });
  }
  err << "split " << split.assignment.size() << " subjects: " << split.count(Split::train) << " train, "
      << split.count(Split::val) << " val, " << split.count(Split::test) << " test\n";
  return kExitOk;
}

inline int cmd_stats(const CommandConfig& c, std::ostream& out, std::ostream&) {
  DatasetStats s = stats(load_manifest(c.input));
  nlohmann::json j;
  j["num_samples"] = s.num_samples;
  j["num_subjects"] = s.per_subject.size();
  j["per_activity"] = s.per_activity;
  j["per_subject"] = s.per_subject;
  nlohmann::json sessions = nlohmann::json::object();
  for (const auto& [session, n] : s.per_session) sessions[std::to_string(session)] = n;
  j["per_session"] = sessions;
  j["modal_activity_count"] = s.modal_activity_count;
  j["imbalanced_activities"] = s.imbalanced_activities;
  j["balanced"] = s.balanced();
  out << j.dump(2) << '\n';
  return kExitOk;
}

}  // namespace detail

/// Runs one command. Never throws.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  if (const char* env = std::getenv(kThreadsEnvVar); env && !parse_thread_cap(env)) {
    err << "error: " << kThreadsEnvVar << " must be a positive integer, got '" << env << "'\n";
    return kExitUsage;
  }

  CommandConfig cfg;
  CLI::App app{"spikeforge: spike-camera stream simulation, compression and packing"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  const auto positive = CLI::PositiveNumber;
  auto inout = [&](CLI::App* sub, const std::string& in_desc, const std::string& out_desc) {
    sub->add_option("input", cfg.input, in_desc)->required();
    sub->add_option("output", cfg.output, out_desc)->required();
  };

  auto* sim = app.add_subcommand("simulate", "integrate-and-fire simulation of an intensity clip");
  inout(sim, "directory of P5 PGM frames or a rank-3 .spkt tensor", "output .spks");
  sim->add_option("--frame-interval-ns", cfg.frame_interval_ns, "nanoseconds per input frame")
      ->required()->check(positive);
  sim->add_option("--alpha", cfg.alpha, "photoelectric conversion rate")->check(positive);
  sim->add_option("--theta", cfg.theta, "firing threshold")->check(positive);
  sim->add_option("--tau-ns", cfg.tau_ns, "polling period in ns")->check(positive);
  sim->add_option("--reset", cfg.reset, "membrane reset: zero or subtract")
      ->check(CLI::IsMember({"zero", "subtract"}));
  sim->add_flag("--entropy", cfg.entropy, "xz-compress the payload");
  sim->add_option("--meta", cfg.meta, "metadata string stored in the header");

  auto* comp = app.add_subcommand("compress", "interval-rate IF compression with factor d");
  inout(comp, "input .spks", "output .spks");
  comp->add_option("--d", cfg.d, "steps per interval")->required()->check(positive);
  comp->add_flag("--entropy", cfg.entropy, "xz-compress the payload");

  auto* rate = app.add_subcommand("rate-encode", "average contiguous chunks into rate frames");
  inout(rate, "input .spks", "output .spkt");
  rate->add_option("--frames", cfg.frames, "number of output frames")->check(positive);
  auto* inter = rate->add_flag("--interleaved", cfg.interleaved, "row-major reshape order");
  auto* contig = rate->add_flag("--contiguous", cfg.contiguous, "contiguous chunks (default)");
  inter->excludes(contig);

  auto* rec = app.add_subcommand("reconstruct", "TFP reconstruction to numbered PGM frames");
  inout(rec, "input .spks", "output directory");
  rec->add_option("--window", cfg.window, "TFP window in steps")->check(positive);
  rec->add_option("--stride", cfg.stride, "steps between frames (default: window)")
      ->check(CLI::NonNegativeNumber);

  auto* pack = app.add_subcommand("pack", "rewrite a stream with an xz payload");
  inout(pack, "input .spks", "output .spks");
  auto* unpack = app.add_subcommand("unpack", "rewrite a stream with a raw payload");
  inout(unpack, "input .spks", "output .spks");

  auto* imp = app.add_subcommand("import-raw", "convert a headerless bit dump");
  inout(imp, "raw input file", "output .spks");
  imp->add_option("--height", cfg.height)->required()->check(positive);
  imp->add_option("--width", cfg.width)->required()->check(positive);
  imp->add_option("--steps", cfg.steps)->required()->check(positive);
  imp->add_option("--tau-ns", cfg.tau_ns)->check(positive);
  imp->add_option("--bit-order", cfg.bit_order, "lsb or msb")->check(CLI::IsMember({"lsb", "msb"}));
  imp->add_option("--layout", cfg.layout, "padded or continuous")
      ->check(CLI::IsMember({"padded", "continuous"}));
  imp->add_flag("--entropy", cfg.entropy, "xz-compress the payload");
  imp->add_option("--meta", cfg.meta, "metadata string stored in the header");

  auto* info = app.add_subcommand("info", "print stream summary as JSON");
  info->add_option("input", cfg.input, "input .spks")->required();

  auto* lemma = app.add_subcommand("verify-lemma", "check the constant-rate compression identity");
  lemma->add_option("--c", cfg.c, "rate as p/q")->required();
  lemma->add_option("--d", cfg.d)->required()->check(positive);
  lemma->add_option("--T,--steps", cfg.lemma_steps)->required()->check(positive);

  auto* split = app.add_subcommand("split", "subject-wise 80/10/10 split of a manifest");
  split->add_option("input", cfg.input, "manifest CSV or JSON-lines")->required();
  split->add_option("output", cfg.output, "split CSV (default: stdout)");
  split->add_option("--seed", cfg.seed, "shuffle seed");

  auto* st = app.add_subcommand("stats", "manifest statistics as JSON");
  st->add_option("input", cfg.input, "manifest CSV or JSON-lines")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  for (auto* sub : app.get_subcommands()) cfg.subcommand = sub->get_name();
  if (cfg.subcommand == "verify-lemma") {
    try {
      Rational::parse(cfg.c).normalized();
    } catch (const Error& e) {
      err << "error: --c: " << e.what() << '\n';
      return kExitUsage;
    }
  }

  try {
    const auto& s = cfg.subcommand;
    if (s == "simulate") return detail::cmd_simulate(cfg, out, err);
    if (s == "compress") return detail::cmd_compress(cfg, out, err);
    if (s == "rate-encode") return detail::cmd_rate_encode(cfg, out, err);
    if (s == "reconstruct") return detail::cmd_reconstruct(cfg, out, err);
    if (s == "pack") return detail::cmd_pack(cfg, true);
    if (s == "unpack") return detail::cmd_pack(cfg, false);
    if (s == "import-raw") return detail::cmd_import_raw(cfg, out, err);
    if (s == "info") return detail::cmd_info(cfg, out, err);
    if (s == "verify-lemma") return detail::cmd_verify_lemma(cfg, out, err);
    if (s == "split") return detail::cmd_split(cfg, out, err);
    if (s == "stats") return detail::cmd_stats(cfg, out, err);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
  err << "error: unknown subcommand\n";
  return kExitUsage;
}

}  // namespace spikeforge::cli
