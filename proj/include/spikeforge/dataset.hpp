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

// Sample manifests and subject-wise splitting.
//
// CSV manifest columns (header row required, order free):
//   sample_id, subject_id, session, activity, half, spike_path, rgb_path, thermal_path
// The three path columns are optional. A JSON-lines file with the same keys
// is accepted as well.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "spikeforge/byte_io.hpp"
#include "spikeforge/error.hpp"

namespace spikeforge {

inline constexpr std::array<std::string_view, 18> kActivities{
    "running_in_place", "walking",        "jogging",        "clapping",
    "waving_right_hand", "waving_left_hand", "drinking",     "playing_drums",
    "rolling_hands",    "playing_guitar", "jumping",        "squats",
    "hand_circling",    "side_butterfly", "front_butterfly", "standing_abs",
    "boxing",           "jumping_jacks"};

inline bool is_activity(std::string_view label) {
  return std::find(kActivities.begin(), kActivities.end(), label) != kActivities.end();
}

struct SampleRecord {
  std::string sample_id;
  std::string subject_id;
  int session = 1;  // 1 or 2
  std::string activity;
  int half = 1;  // 1 or 2
  std::optional<std::string> spike_path;
  std::optional<std::string> rgb_path;
  std::optional<std::string> thermal_path;

  friend bool operator==(const SampleRecord&, const SampleRecord&) = default;
};

namespace detail {

inline std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

/// Splits one CSV line; supports double-quoted fields with "" escapes.
inline std::vector<std::string> split_csv_line(std::string_view line, std::size_t line_no) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (quoted) throw ParseError("line " + std::to_string(line_no) + ": unterminated quote");
  fields.push_back(trim(cur));
  return fields;
}

inline int parse_one_or_two(const std::string& text, const char* field, std::size_t line_no) {
  if (text == "1") return 1;
  if (text == "2") return 2;
  throw ParseError("line " + std::to_string(line_no) + ": " + field + " must be 1 or 2, got '" +
                   text + "'");
}

inline void validate_record(const SampleRecord& r, std::size_t line_no) {
  auto where = "line " + std::to_string(line_no) + ": ";
  if (r.sample_id.empty()) throw ParseError(where + "empty sample_id");
  if (r.subject_id.empty()) throw ParseError(where + "empty subject_id");
  if (!is_activity(r.activity)) throw ParseError(where + "unknown activity '" + r.activity + "'");
}

inline std::vector<SampleRecord> parse_jsonl(std::istream& in) {
  std::vector<SampleRecord> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto where = "line " + std::to_string(line_no) + ": ";
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(where + "invalid JSON: " + e.what());
    }
    if (!j.is_object()) throw ParseError(where + "expected a JSON object");
    auto text = [&](const char* key, bool required) -> std::optional<std::string> {
      if (!j.contains(key) || j[key].is_null()) {
        if (required) throw ParseError(where + "missing '" + key + "'");
        return std::nullopt;
      }
      if (j[key].is_string()) return j[key].get<std::string>();
      if (j[key].is_number_integer()) return std::to_string(j[key].get<long long>());
      throw ParseError(where + "'" + key + "' must be a string");
    };
    SampleRecord r;
    r.sample_id = *text("sample_id", true);
    r.subject_id = *text("subject_id", true);
    r.session = parse_one_or_two(*text("session", true), "session", line_no);
    r.activity = *text("activity", true);
    r.half = parse_one_or_two(*text("half", true), "half", line_no);
    r.spike_path = text("spike_path", false);
    r.rgb_path = text("rgb_path", false);
    r.thermal_path = text("thermal_path", false);
    validate_record(r, line_no);
    out.push_back(std::move(r));
  }
  return out;
}

inline std::vector<SampleRecord> parse_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (!trim(line).empty()) {
      header = split_csv_line(line, line_no);
      break;
    }
  }
  std::vector<SampleRecord> out;
  if (header.empty()) return out;
  std::map<std::string, std::size_t> col;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (col.count(header[i]))
      throw ParseError("line " + std::to_string(line_no) + ": duplicate column '" + header[i] + "'");
    col[header[i]] = i;
  }
  for (const char* required : {"sample_id", "subject_id", "session", "activity", "half"})
    if (!col.count(required))
      throw ParseError("line " + std::to_string(line_no) + ": missing column '" + required + "'");

  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto fields = split_csv_line(line, line_no);
    if (fields.size() != header.size())
      throw ParseError("line " + std::to_string(line_no) + ": expected " +
                       std::to_string(header.size()) + " fields, got " +
                       std::to_string(fields.size()));
    auto get = [&](const char* name) { return fields[col.at(name)]; };
    auto opt = [&](const char* name) -> std::optional<std::string> {
      auto it = col.find(name);
      if (it == col.end() || fields[it->second].empty()) return std::nullopt;
      return fields[it->second];
    };
    SampleRecord r;
    r.sample_id = get("sample_id");
    r.subject_id = get("subject_id");
    r.session = parse_one_or_two(get("session"), "session", line_no);
    r.activity = get("activity");
    r.half = parse_one_or_two(get("half"), "half", line_no);
    r.spike_path = opt("spike_path");
    r.rgb_path = opt("rgb_path");
    r.thermal_path = opt("thermal_path");
    validate_record(r, line_no);
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace detail

/// Parses a manifest from text. JSON-lines is detected by a leading '{'.
inline std::vector<SampleRecord> parse_manifest(std::istream& in) {
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  std::istringstream body(text);
  auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') return detail::parse_jsonl(body);
  return detail::parse_csv(body);
}

inline std::vector<SampleRecord> load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open manifest '" + path.string() + "'");
  return parse_manifest(in);
}

inline void write_manifest_csv(const std::vector<SampleRecord>& records, std::ostream& out) {
  out << "sample_id,subject_id,session,activity,half,spike_path,rgb_path,thermal_path\n";
  for (const auto& r : records)
    out << r.sample_id << ',' << r.subject_id << ',' << r.session << ',' << r.activity << ','
        << r.half << ',' << r.spike_path.value_or("") << ',' << r.rgb_path.value_or("") << ','
        << r.thermal_path.value_or("") << '\n';
}

enum class Split { train, val, test };

inline std::string_view split_name(Split s) {
  switch (s) {
    case Split::train: return "train";
    case Split::val: return "val";
    case Split::test: return "test";
  }
  return "train";
}

/// Identifies the shuffle so other implementations can reproduce a split:
/// std::mt19937_64 seeded with `seed`, then Fisher-Yates from the last index
/// down, each j drawn uniformly from [0, i] by rejection on raw 64-bit outputs.
inline constexpr std::string_view kSplitAlgorithm = "mt19937_64/fisher-yates-desc/rejection";

struct SplitAssignment {
  std::uint64_t seed = 0;
  std::map<std::string, Split> assignment;

  std::vector<std::string> subjects_in(Split s) const {
    std::vector<std::string> out;
    for (const auto& [id, split] : assignment)
      if (split == s) out.push_back(id);
    return out;
  }
  std::size_t count(Split s) const {
    return static_cast<std::size_t>(std::count_if(
        assignment.begin(), assignment.end(), [&](const auto& kv) { return kv.second == s; }));
  }
};

namespace detail {
inline std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound) {
  // Largest multiple of bound that fits, for rejection.
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % bound;
}
}  // namespace detail

/// Sizes for N subjects: test = val = max(1, round(N / 10)), rest train.
inline std::array<std::size_t, 3> split_sizes(std::size_t n) {
  const std::size_t tenth = std::max<std::size_t>(1, (n + 5) / 10);
  return {n - 2 * tenth, tenth, tenth};
}

/// Shuffles the sorted ids, then assigns the first n_test to test, the next
/// n_val to val and the remainder to train.
inline SplitAssignment split_subjects(std::vector<std::string> subject_ids, std::uint64_t seed) {
  std::sort(subject_ids.begin(), subject_ids.end());
  if (std::adjacent_find(subject_ids.begin(), subject_ids.end()) != subject_ids.end())
    throw InputError("duplicate subject id");
  if (subject_ids.size() < 3) throw SizeError("need at least 3 subjects to split");
  std::mt19937_64 rng(seed);
  for (std::size_t i = subject_ids.size() - 1; i > 0; --i)
    std::swap(subject_ids[i], subject_ids[detail::uniform_below(rng, i + 1)]);
  auto [n_train, n_val, n_test] = split_sizes(subject_ids.size());
  (void)n_train;
  SplitAssignment out;
  out.seed = seed;
  for (std::size_t i = 0; i < subject_ids.size(); ++i) {
    Split s = i < n_test ? Split::test : i < n_test + n_val ? Split::val : Split::train;
    out.assignment.emplace(subject_ids[i], s);
  }
  return out;
}

/// Distinct subject ids in first-seen order.
inline std::vector<std::string> subjects_of(const std::vector<SampleRecord>& records) {
  std::vector<std::string> out;
  std::set<std::string> seen;
  for (const auto& r : records)
    if (seen.insert(r.subject_id).second) out.push_back(r.subject_id);
  return out;
}

inline SplitAssignment split_manifest(const std::vector<SampleRecord>& records, std::uint64_t seed) {
  return split_subjects(subjects_of(records), seed);
}

/// "# seed=..." comment line, then subject_id,split rows sorted by id.
inline void write_split_csv(const SplitAssignment& split, std::ostream& out) {
  out << "# seed=" << split.seed << " algorithm=" << kSplitAlgorithm << '\n';
  out << "subject_id,split\n";
  for (const auto& [id, s] : split.assignment) out << id << ',' << split_name(s) << '\n';
}

struct DatasetStats {
  std::size_t num_samples = 0;
  std::map<std::string, std::size_t> per_activity;  // every label, zero counts included
  std::map<std::string, std::size_t> per_subject;
  std::map<int, std::size_t> per_session;
  std::size_t modal_activity_count = 0;
  std::vector<std::string> imbalanced_activities;

  bool balanced() const { return imbalanced_activities.empty(); }
};

inline DatasetStats stats(const std::vector<SampleRecord>& records) {
  DatasetStats s;
  if (records.empty()) return s;
  s.num_samples = records.size();
  for (auto a : kActivities) s.per_activity[std::string(a)] = 0;
  for (const auto& r : records) {
    ++s.per_activity[r.activity];
    ++s.per_subject[r.subject_id];
    ++s.per_session[r.session];
  }
  // Mode of the per-activity counts; ties resolve to the larger count.
  std::map<std::size_t, std::size_t> freq;
  for (const auto& [label, n] : s.per_activity) ++freq[n];
  std::size_t best = 0;
  for (const auto& [count, times] : freq)
    if (times >= best) {
      best = times;
      s.modal_activity_count = count;
    }
  for (const auto& [label, n] : s.per_activity)
    if (n != s.modal_activity_count) s.imbalanced_activities.push_back(label);
  return s;
}

}  // namespace spikeforge
