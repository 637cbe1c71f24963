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

// Binary 8-bit PGM (P5) frames.

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "spikeforge/byte_io.hpp"
#include "spikeforge/camera_sim.hpp"
#include "spikeforge/encodings.hpp"
#include "spikeforge/error.hpp"

namespace spikeforge {

inline void write_pgm(const GrayFrame& frame, const std::filesystem::path& path) {
  detail::write_atomically(path, [&](std::ostream& out) {
    out << "P5\n" << frame.width << ' ' << frame.height << "\n255\n";
    detail::write_bytes(out, frame.pixels);
  });
}

namespace detail {
inline std::uint64_t read_pgm_field(std::istream& in) {
  int c = in.get();
  while (c != EOF && (std::isspace(c) || c == '#')) {
    if (c == '#')
      while (c != EOF && c != '\n') c = in.get();
    c = in.get();
  }
  if (c == EOF || !std::isdigit(c)) throw FormatError("malformed PGM header");
  std::uint64_t v = 0;
  while (c != EOF && std::isdigit(c)) {
    v = v * 10 + static_cast<std::uint64_t>(c - '0');
    if (v > 0xFFFFFFFFull) throw FormatError("PGM dimension too large");
    c = in.get();
  }
  if (c == EOF || !std::isspace(c)) throw FormatError("malformed PGM header");
  return v;
}
}  // namespace detail

/// Reads a P5 file with maxval 255.
inline GrayFrame read_pgm(const std::filesystem::path& path) {
  auto in = detail::open_for_read(path);
  char magic[2] = {};
  in.read(magic, 2);
  if (in.gcount() != 2 || magic[0] != 'P' || magic[1] != '5')
    throw FormatError("'" + path.string() + "' is not a binary PGM (P5)");
  GrayFrame f;
  f.width = static_cast<std::uint32_t>(detail::read_pgm_field(in));
  f.height = static_cast<std::uint32_t>(detail::read_pgm_field(in));
  if (detail::read_pgm_field(in) != 255) throw FormatError("only 8-bit PGM with maxval 255 is supported");
  if (f.width == 0 || f.height == 0) throw FormatError("PGM has a zero dimension");
  f.pixels = detail::read_exact(in, std::size_t{f.width} * f.height, "PGM pixels");
  return f;
}

/// Frames are the directory's *.pgm files in filename order; v maps to v / 255.
inline IntensityClip load_clip_from_pgm_dir(const std::filesystem::path& dir,
                                            std::uint64_t frame_interval_ns) {
  if (!std::filesystem::is_directory(dir)) throw IoError("'" + dir.string() + "' is not a directory");
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".pgm") files.push_back(entry.path());
  if (files.empty()) throw FormatError("no .pgm frames in '" + dir.string() + "'");
  std::sort(files.begin(), files.end());
  std::vector<double> values;
  std::uint32_t h = 0, w = 0;
  for (const auto& file : files) {
    GrayFrame f = read_pgm(file);
    if (values.empty()) {
      h = f.height;
      w = f.width;
    } else if (f.height != h || f.width != w) {
      throw FormatError("frame '" + file.string() + "' has different dimensions");
    }
    for (auto v : f.pixels) values.push_back(v / 255.0);
  }
  return IntensityClip(h, w, static_cast<std::uint32_t>(files.size()), frame_interval_ns,
                       std::move(values));
}

/// Writes frames as <dir>/<prefix>NNNNNN.pgm and returns the paths.
inline std::vector<std::filesystem::path> write_pgm_sequence(const std::vector<GrayFrame>& frames,
                                                             const std::filesystem::path& dir,
                                                             const std::string& prefix = "frame_") {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> paths;
  for (std::size_t i = 0; i < frames.size(); ++i) {
    std::string idx = std::to_string(i);
    idx.insert(0, idx.size() < 6 ? 6 - idx.size() : 0, '0');
    paths.push_back(dir / (prefix + idx + ".pgm"));
    write_pgm(frames[i], paths.back());
  }
  return paths;
}

}  // namespace spikeforge
