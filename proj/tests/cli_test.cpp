// Copyright 2026 The momsnet Authors.
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

// Drives the momsnet executable end to end on the bundled fixture.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>
#include <json.hpp>

#include "moms/hetero.hpp"

namespace {

namespace fs = std::filesystem;

const std::string kData = MOMS_TEST_DATA_DIR;

struct CommandResult {
  int code;
  std::string out;
};

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("momsnet_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  CommandResult run(const std::string& args) {
    const std::string out = (dir_ / "stdout.txt").string();
    std::string cmd = std::string(MOMS_CLI) + " " + args + " > " + out + " 2> " + (dir_ / "stderr.txt").string();
    int status = std::system(cmd.c_str());
    return {WEXITSTATUS(status), read(out)};
  }

  static std::string read(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  void write(const std::string& name, const std::string& text) const { std::ofstream(dir_ / name) << text; }

  std::string train_config(const std::string& name, const std::string& extra = "") const {
    std::string text = "{\"corpus\": \"" + kData + "/fixture_molecules.tsv\", \"spectra\": \"" + kData +
                       "/fixture_spectra.msp\", \"output_dir\": \"" + path(name) +
                       "\", \"epochs\": 4, \"hidden\": 16" + extra + "}";
    write(name + ".json", text);
    return path(name + ".json");
  }

  fs::path dir_;
};

TEST_F(CliTest, MineIsDeterministicAndRejectsEmptyCorpus) {
  auto a = run("mine --corpus " + kData + "/fixture_molecules.tsv --out " + path("v1.tsv"));
  ASSERT_EQ(a.code, 0);
  EXPECT_NE(a.out.find("frequency"), std::string::npos);
  ASSERT_EQ(run("mine --corpus " + kData + "/fixture_molecules.tsv --k 300 --out " + path("v2.tsv")).code, 0);
  EXPECT_EQ(read(path("v1.tsv")), read(path("v2.tsv")));
  EXPECT_FALSE(read(path("v1.tsv")).empty());
  write("empty.tsv", "");
  EXPECT_EQ(run("mine --corpus " + path("empty.tsv") + " --out " + path("v3.tsv")).code, 2);
  write("bad.tsv", "a\tCC\nb\tC1CC\n");
  EXPECT_EQ(run("mine --corpus " + path("bad.tsv") + " --out " + path("v3.tsv")).code, 2);
  EXPECT_NE(read(path("stderr.txt")).find("bad.tsv:2"), std::string::npos);
}

TEST_F(CliTest, BuildGraphWritesValidManifest) {
  ASSERT_EQ(run("mine --corpus " + kData + "/fixture_molecules.tsv --out " + path("v.tsv")).code, 0);
  ASSERT_EQ(run("build-graph --corpus " + kData + "/fixture_molecules.tsv --vocab " + path("v.tsv") + " --out " +
                path("g"))
                .code,
            0);
  std::string manifest = read(path("g/manifest.json"));
  EXPECT_NO_THROW(moms::hetero::validate_graph_manifest(manifest));
  auto j = nlohmann::json::parse(manifest);
  EXPECT_EQ(j["molecules"], 64);
  EXPECT_EQ(j["nodes"].get<int>(), 64 + j["motifs"].get<int>());
  EXPECT_EQ(run("build-graph --corpus " + kData + "/fixture_molecules.tsv --vocab " + path("missing.tsv") +
                " --out " + path("g2"))
                .code,
            2);
}

TEST_F(CliTest, TrainPredictEvalRankPipeline) {
  ASSERT_EQ(run("train --config " + train_config("run")).code, 0);
  EXPECT_TRUE(fs::exists(path("run/checkpoint/manifest.json")));
  EXPECT_TRUE(fs::exists(path("run/split.json")));
  std::istringstream log(read(path("run/train_log.jsonl")));
  int lines = 0;
  for (std::string line; std::getline(log, line); ++lines) {
    auto j = nlohmann::json::parse(line);
    EXPECT_TRUE(j.contains("epoch") && j.contains("train_loss") && j.contains("valid_similarity") &&
                j.contains("wall_ms"));
  }
  EXPECT_EQ(lines, 4);

  ASSERT_EQ(run("predict --checkpoint " + path("run/checkpoint") + " --in " + kData + "/fixture_molecules.tsv --out " +
                path("pred.msp"))
                .code,
            0);
  auto ev = run("eval --pred " + path("pred.msp") + " --truth " + kData + "/fixture_spectra.msp --out " +
                path("eval.json"));
  ASSERT_EQ(ev.code, 0);
  auto report = nlohmann::json::parse(read(path("eval.json")));
  EXPECT_EQ(report["count"], 64);
  EXPECT_GT(report["mean"].get<double>(), 0.0);

  auto same = run("eval --pred " + kData + "/fixture_spectra.msp --truth " + kData + "/fixture_spectra.msp");
  ASSERT_EQ(same.code, 0);
  EXPECT_NE(same.out.find("mean similarity 1.000000"), std::string::npos);

  auto rank = run("rank --queries " + kData + "/fixture_spectra.msp --refs " + path("pred.msp") + " --out " +
                  path("rank.json") + " --svg " + path("rank.svg"));
  ASSERT_EQ(rank.code, 0);
  auto rj = nlohmann::json::parse(read(path("rank.json")));
  EXPECT_EQ(rj["queries"], 64);
  EXPECT_NE(read(path("rank.svg")).find("<svg"), std::string::npos);
  auto perfect = run("rank --queries " + kData + "/fixture_spectra.msp --refs " + kData + "/fixture_spectra.msp");
  auto at = perfect.out.find("top-5%");
  ASSERT_NE(at, std::string::npos);
  EXPECT_EQ(perfect.out.substr(perfect.out.find('\n', at) - 6, 6), "1.0000") << perfect.out;
}

TEST_F(CliTest, TrainIsRerunDeterministic) {
  ASSERT_EQ(run("train --config " + train_config("a") + " --model gcn_only").code, 0);
  ASSERT_EQ(run("train --config " + train_config("b") + " --model gcn_only").code, 0);
  for (const char* f : {"manifest.json", "params.bin", "vocab.tsv", "motif_spectra.bin", "graph_corpus.tsv"}) {
    EXPECT_EQ(read(path(std::string("a/checkpoint/") + f)), read(path(std::string("b/checkpoint/") + f))) << f;
  }
  auto manifest = nlohmann::json::parse(read(path("a/checkpoint/manifest.json")));
  EXPECT_EQ(manifest["config"]["variant"], "gcn_only");
}

TEST_F(CliTest, ExitCodes) {
  write("bad.json", "{\"corpus\": \"x\", \"spectra\": \"y\", \"output_dir\": \"o\", \"hiden\": 3}");
  EXPECT_EQ(run("train --config " + path("bad.json")).code, 2);
  write("broken.json", "{\"corpus\": ");
  EXPECT_EQ(run("train --config " + path("broken.json")).code, 2);
  EXPECT_EQ(run("train --config " + train_config("m") + " --model transformer").code, 2);
  EXPECT_EQ(run("no-such-command").code, 2);
  // A corpus molecule without a spectrum.
  std::ifstream in(kData + "/fixture_spectra.msp");
  std::string all((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  write("partial.msp", all.substr(all.find("\n\n") + 2));
  write("partial.json", "{\"corpus\": \"" + kData + "/fixture_molecules.tsv\", \"spectra\": \"" + path("partial.msp") +
                            "\", \"output_dir\": \"" + path("p") + "\", \"epochs\": 1, \"hidden\": 8}");
  EXPECT_EQ(run("train --config " + path("partial.json")).code, 3);
  EXPECT_EQ(run("eval --pred " + kData + "/fixture_spectra.msp --truth " + path("partial.msp")).code, 3);
}

}  // namespace
