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


#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "fixtures.hpp"
#include "json.hpp"
#include "spikeforge/cli.hpp"

namespace spikeforge {
namespace {

namespace fs = std::filesystem;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "spikeforge");
  std::vector<const char*> argv;
  for (auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::vector<char> bytes_of(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           (std::string("spikeforge_cli_") + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string p(const std::string& name) const { return (dir_ / name).string(); }
  fs::path dir_;
};

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(run_cli({}).code, cli::kExitUsage);
  EXPECT_EQ(run_cli({"frobnicate"}).code, cli::kExitUsage);
  EXPECT_EQ(run_cli({"compress", "a", "b"}).code, cli::kExitUsage);               // --d missing
  EXPECT_EQ(run_cli({"compress", "--d", "0", "a", "b"}).code, cli::kExitUsage);   // not positive
  EXPECT_EQ(run_cli({"compress", "--d", "10", "--bogus", "a", "b"}).code, cli::kExitUsage);
  EXPECT_EQ(run_cli({"rate-encode", "--interleaved", "--contiguous", "a", "b"}).code, cli::kExitUsage);
  EXPECT_EQ(run_cli({"verify-lemma", "--c", "x", "--d", "1", "--T", "5"}).code, cli::kExitUsage);
  auto r = run_cli({"import-raw", "--height", "1", "--width", "1", "--steps", "1", "--bit-order", "mid",
                    "a", "b"});
  EXPECT_EQ(r.code, cli::kExitUsage);
  EXPECT_FALSE(r.err.empty());
  EXPECT_TRUE(r.out.empty());
  EXPECT_EQ(run_cli({"--help"}).code, cli::kExitOk);
}

TEST_F(CliTest, ThreadEnvValidated) {
  setenv(kThreadsEnvVar, "zero", 1);
  EXPECT_EQ(run_cli({"verify-lemma", "--c", "1/2", "--d", "2", "--T", "10"}).code, cli::kExitUsage);
  setenv(kThreadsEnvVar, "2", 1);
  EXPECT_EQ(run_cli({"verify-lemma", "--c", "1/2", "--d", "2", "--T", "10"}).code, cli::kExitOk);
  unsetenv(kThreadsEnvVar);
}

TEST_F(CliTest, DataErrorsLeaveNoOutput) {
  auto r = run_cli({"compress", "--d", "10", p("missing.spks"), p("out.spks")});
  EXPECT_EQ(r.code, cli::kExitData);
  EXPECT_FALSE(fs::exists(p("out.spks")));
  {
    std::ofstream bad(p("bad.spks"), std::ios::binary);
    bad << "NOPE and some more bytes to exceed the header length......";
  }
  r = run_cli({"compress", "--d", "10", p("bad.spks"), p("out.spks")});
  EXPECT_EQ(r.code, cli::kExitData);
  EXPECT_FALSE(fs::exists(p("out.spks")));
  EXPECT_FALSE(fs::exists(p("out.spks.tmp")));

  save_stream(new_stream(1, 1, 5, 1), p("short.spks"), false);
  r = run_cli({"compress", "--d", "10", p("short.spks"), p("out.spks")});
  EXPECT_EQ(r.code, cli::kExitData);
  EXPECT_FALSE(fs::exists(p("out.spks")));
}

TEST_F(CliTest, CompressMatchesLibraryBitForBit) {
  SpikeStream s = fixtures::structured_stream(9, 11, 1'005);
  save_stream(s, p("in.spks"), false, R"({"subject_id":"S01","activity":"boxing"})");
  auto r = run_cli({"compress", "--d", "10", p("in.spks"), p("out.spks")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.err.find("dropping 5 trailing steps"), std::string::npos) << r.err;
  save_stream(compress_stream(s, 10), p("golden.spks"), false, R"({"subject_id":"S01","activity":"boxing"})");
  EXPECT_EQ(bytes_of(p("out.spks")), bytes_of(p("golden.spks")));
  auto out = load_stream(p("out.spks"));
  EXPECT_EQ(out.num_steps(), 100u);
  EXPECT_EQ(out.tau_ns(), 500'000u);
}

TEST_F(CliTest, InfoReportsJson) {
  save_stream(new_stream(3, 4, 10, 50'000), p("empty.spks"), false);
  auto r = run_cli({"info", p("empty.spks")});
  ASSERT_EQ(r.code, 0) << r.err;
  auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["total_spikes"], 0);
  EXPECT_EQ(j["global_rate"], 0.0);
  EXPECT_EQ(j["width"], 4);
  EXPECT_EQ(j["height"], 3);
  EXPECT_EQ(j["num_steps"], 10);
  EXPECT_EQ(j["tau_ns"], 50'000);
  EXPECT_TRUE(j["meta"].is_null());

  SpikeStream s = new_stream(1, 2, 4, 1);
  s.set(0, 0, 1, true);
  save_stream(s, p("meta.spks"), true, R"({"subject_id":"S02","session":1,"activity":"jogging"})");
  j = nlohmann::json::parse(run_cli({"info", p("meta.spks")}).out);
  EXPECT_EQ(j["total_spikes"], 1);
  EXPECT_DOUBLE_EQ(j["global_rate"].get<double>(), 0.125);
  EXPECT_EQ(j["entropy"], true);
  EXPECT_EQ(j["sample"]["activity"], "jogging");
}

TEST_F(CliTest, VerifyLemma) {
  auto r = run_cli({"verify-lemma", "--c", "2/5", "--d", "10", "--T", "100000"});
  ASSERT_EQ(r.code, 0) << r.err;
  auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["all_pass"], true);
  EXPECT_EQ(j["prefix_checks"], 10'000);
  EXPECT_EQ(j["c"], "2/5");
  EXPECT_EQ(run_cli({"verify-lemma", "--c", "3/2", "--d", "10", "--T", "100"}).code, cli::kExitData);
  EXPECT_EQ(run_cli({"verify-lemma", "--c", "1/2", "--d", "101", "--T", "100"}).code, cli::kExitData);
}

TEST_F(CliTest, PackUnpackIsIdempotent) {
  save_stream(fixtures::structured_stream(8, 8, 300), p("a.spks"), false, "m");
  ASSERT_EQ(run_cli({"pack", p("a.spks"), p("b.spks")}).code, 0);
  ASSERT_EQ(run_cli({"unpack", p("b.spks"), p("c.spks")}).code, 0);
  ASSERT_EQ(run_cli({"pack", p("c.spks"), p("d.spks")}).code, 0);
  EXPECT_EQ(bytes_of(p("a.spks")), bytes_of(p("c.spks")));
  EXPECT_EQ(bytes_of(p("b.spks")), bytes_of(p("d.spks")));
  EXPECT_LT(fs::file_size(p("b.spks")), fs::file_size(p("a.spks")));
}

TEST_F(CliTest, SimulateReconstructRateEncode) {
  fs::create_directories(p("frames"));
  for (int f = 0; f < 3; ++f)
    write_pgm(GrayFrame{2, 2, {0, 85, 170, 255}}, dir_ / "frames" / ("f" + std::to_string(f) + ".pgm"));
  // alpha = 1/tau makes the per-step charge equal the intensity.
  auto r = run_cli({"simulate", "--frame-interval-ns", "20000000", "--alpha", "20000", p("frames"),
                    p("sim.spks")});
  ASSERT_EQ(r.code, 0) << r.err;
  SpikeStream s = load_stream(p("sim.spks"));
  EXPECT_EQ(s.num_steps(), 3u * 400u);
  EXPECT_EQ(count_prefix(s.train(1, 1), 1200), 1200u);
  EXPECT_EQ(count_prefix(s.train(0, 0), 1200), 0u);

  r = run_cli({"reconstruct", "--window", "200", p("sim.spks"), p("tfp")});
  ASSERT_EQ(r.code, 0) << r.err;
  std::size_t n = 0;
  for (auto& e : fs::directory_iterator(p("tfp"))) n += e.path().extension() == ".pgm";
  EXPECT_EQ(n, 6u);
  GrayFrame g = read_pgm(dir_ / "tfp" / "frame_000000.pgm");
  EXPECT_EQ(g.at(1, 1), 255);
  EXPECT_EQ(g.at(0, 0), 0);
  EXPECT_EQ(g.at(1, 0), gray_level(count_prefix(s.train(1, 0), 200), 200));

  r = run_cli({"rate-encode", "--frames", "100", p("sim.spks"), p("rate.spkt")});
  ASSERT_EQ(r.code, 0) << r.err;
  Tensor t = load_tensor(p("rate.spkt"));
  EXPECT_EQ(t.dims, (std::vector<std::uint64_t>{100, 2, 2}));
  EXPECT_EQ(t.f32[3], 1.0f);

  // Tensor input path for simulate.
  save_tensor(Tensor{DType::u8, {1, 1, 2}, {255, 0}, {}}, p("clip.spkt"));
  r = run_cli({"simulate", "--frame-interval-ns", "500000", "--alpha", "20000", p("clip.spkt"), p("t.spks")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(load_stream(p("t.spks")).total_spikes(), 10u);

  EXPECT_EQ(run_cli({"simulate", "--frame-interval-ns", "70000", p("clip.spkt"), p("bad.spks")}).code,
            cli::kExitData);
}

TEST_F(CliTest, ImportRaw) {
  {
    std::ofstream raw(p("x.raw"), std::ios::binary);
    raw.put(0b00000101);
  }
  auto r = run_cli({"import-raw", "--height", "1", "--width", "8", "--steps", "1", "--bit-order", "msb",
                    p("x.raw"), p("x.spks")});
  ASSERT_EQ(r.code, 0) << r.err;
  SpikeStream s = load_stream(p("x.spks"));
  EXPECT_TRUE(s.get(5, 0, 0));
  EXPECT_TRUE(s.get(7, 0, 0));
  EXPECT_EQ(s.total_spikes(), 2u);
  EXPECT_EQ(run_cli({"import-raw", "--height", "2", "--width", "8", "--steps", "1", p("x.raw"), p("y.spks")}).code,
            cli::kExitData);
}

TEST_F(CliTest, SplitAndStats) {
  {
    std::ofstream m(p("m.csv"));
    write_manifest_csv(fixtures::full_manifest(), m);
  }
  auto r = run_cli({"split", "--seed", "7", p("m.csv"), p("split.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  std::ifstream in(p("split.csv"));
  std::string first;
  std::getline(in, first);
  EXPECT_EQ(first.rfind("# seed=7", 0), 0u);
  std::map<std::string, int> per_split;
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) ++per_split[line.substr(line.find(',') + 1)];
  EXPECT_EQ(per_split["train"], 36);
  EXPECT_EQ(per_split["val"], 4);
  EXPECT_EQ(per_split["test"], 4);

  auto to_stdout = run_cli({"split", "--seed", "7", p("m.csv")});
  std::ifstream again(p("split.csv"));
  std::string file_text((std::istreambuf_iterator<char>(again)), std::istreambuf_iterator<char>());
  EXPECT_EQ(to_stdout.out, file_text);

  r = run_cli({"stats", p("m.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["num_samples"], 3168);
  EXPECT_EQ(j["num_subjects"], 44);
  EXPECT_EQ(j["per_activity"]["walking"], 176);
  EXPECT_EQ(j["balanced"], true);

  {
    std::ofstream m(p("bad.csv"));
    m << "sample_id,subject_id,session,activity,half\nx,S1,1,flying,1\n";
  }
  r = run_cli({"stats", p("bad.csv")});
  EXPECT_EQ(r.code, cli::kExitData);
  EXPECT_NE(r.err.find("line 2"), std::string::npos);
}

}  // namespace
}  // namespace spikeforge
