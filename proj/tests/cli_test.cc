// Copyright 2026 The Shortcut Audit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Drives the shortcut-audit binary and checks files and exit codes.

#include <sys/wait.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "gtest/gtest.h"
#include "shortcut/pipeline.h"
#include "test_support.h"

namespace shortcut {
namespace {

namespace fs = std::filesystem;

const fs::path kFixture = fs::path(SHORTCUT_TEST_DATA_DIR) / "fixture";

struct Result {
  int code = -1;
  std::string out;
};

Result Cli(const std::string& args) {
  const std::string cmd = std::string(SHORTCUT_CLI_PATH) + " " + args + " 2>&1";
  Result r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  char buf[4096];
  size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string Slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string Config() { return "--config " + (kFixture / "config.json").string(); }

TEST(CliTest, StagesRunAndRerunIdentically) {
  testing::TempDir a, b;
  for (const auto* dir : {&a, &b}) {
    const std::string out = " --out " + dir->path().string();
    ASSERT_EQ(Cli("mine " + Config() + out).code, 0);
    ASSERT_EQ(Cli("score " + Config() + out).code, 0);
    const Result id = Cli("identify " + Config() + out);
    ASSERT_EQ(id.code, 0) << id.out;
    EXPECT_NE(id.out.find("2 shortcut pattern(s)"), std::string::npos) << id.out;
  }
  for (const char* f : {kCandidatesFile, kStatsFile, kReportJsonFile,
                        kReportMarkdownFile}) {
    EXPECT_EQ(Slurp(a.path() / f), Slurp(b.path() / f)) << f;
  }
  EXPECT_EQ(Slurp(a.path() / kCandidatesFile),
            Slurp(kFixture / "golden_candidates.json"));

  const Result md = Cli("report --input " + (a.path() / kReportJsonFile).string());
  EXPECT_EQ(md.code, 0);
  EXPECT_EQ(md.out, Slurp(a.path() / kReportMarkdownFile));
}

TEST(CliTest, FlagOverridesReachTheConfig) {
  testing::TempDir dir;
  const std::string out = " --out " + dir.path().string();
  ASSERT_EQ(Cli("run " + Config() + out + " --seed 3 --lambda1 60 --contiguous-match "
                "--include-fallback --workers 1")
                .code,
            0);
  const auto report = ReadJsonFile(dir.path() / kReportJsonFile);
  EXPECT_EQ(report["config"]["seed"], 3);
  EXPECT_EQ(report["config"]["include_fallback"], true);
  EXPECT_EQ(report["config"]["match_mode"], "contiguous");
  EXPECT_EQ(report["config"]["thresholds"]["lambda1"], 60.0);
  const auto resolved = ReadJsonFile(dir.path() / "mine_config.json");
  EXPECT_EQ(resolved["seed"], 3);
  EXPECT_EQ(resolved["workers"], 1);
}

TEST(CliTest, ConfigurationErrorsExitWithTwo) {
  testing::TempDir dir;
  const std::string out = " --out " + dir.path().string();
  EXPECT_EQ(Cli("mine " + Config() + out + " --n-samples 0").code, 2);
  EXPECT_EQ(Cli("score " + Config() + out + " --candidates " +
                (dir.path() / "missing.json").string())
                .code,
            2);
  EXPECT_EQ(Cli("identify " + Config() + out + " --lambda3 1").code, 2);
  EXPECT_EQ(Cli("mine --config " + (dir.path() / "none.json").string()).code, 2);
  EXPECT_EQ(Cli("mine " + Config() + " --bogus-flag").code, 2);
  EXPECT_EQ(Cli("").code, 2);

  WriteFile(dir.path() / "bad_spec.json", "{\"n_iid\": 10}");
  EXPECT_EQ(Cli("bench --spec " + (dir.path() / "bad_spec.json").string()).code, 2);
  WriteFile(dir.path() / "broken.json", "{");
  EXPECT_EQ(Cli("bench --spec " + (dir.path() / "broken.json").string()).code, 2);
}

TEST(CliTest, EmptyCandidateFileGivesEmptyStats) {
  testing::TempDir dir;
  WriteFile(dir.path() / "empty.json", "[]\n");
  const Result r = Cli("score " + Config() + " --out " + dir.path().string() +
                       " --candidates " + (dir.path() / "empty.json").string());
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_TRUE(ReadJsonFile(dir.path() / kStatsFile)["rows"].empty());
}

TEST(CliTest, BenchPrintsTableAndSummary) {
  testing::TempDir dir;
  const Result r = Cli("bench --sweep 3 --out " + dir.path().string());
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("aggregate over 3 seed(s)"), std::string::npos);
  const auto summary = ReadJsonFile(dir.path() / "summary.json");
  EXPECT_EQ(summary["runs"].size(), 3u);
  EXPECT_TRUE(fs::exists(dir.path() / "seed-2" / "report.json"));

  WriteFile(dir.path() / "no_plants.json", R"({"seed": 2, "plants": []})");
  const Result none = Cli("bench --spec " + (dir.path() / "no_plants.json").string());
  EXPECT_EQ(none.code, 0) << none.out;
  EXPECT_NE(none.out.find("n/a"), std::string::npos);
}

TEST(CliTest, RemoteAdapterAndTransportFailure) {
  const ToyLexiconModel model =
      ToyLexiconModel::Load(kFixture / "model.json");
  testing::ModelServer server(model, "fixture-model");
  testing::TempDir dir;
  nlohmann::json config = ReadJsonFile(kFixture / "config.json");
  config["iid_path"] = (kFixture / "iid.jsonl").string();
  config["ood_path"] = (kFixture / "ood.jsonl").string();
  config["adapter"] = {{"remote", server.url()}, {"batch_size", 16}};
  WriteFile(dir.path() / "remote.json", config.dump());
  const std::string args = "--config " + (dir.path() / "remote.json").string() +
                           " --out " + (dir.path() / "out").string();
  const Result r = Cli("mine " + args);
  ASSERT_EQ(r.code, 0) << r.out;
  // Same model behind the wire: same patterns as the golden local run.
  const CandidateSet remote =
      CandidatesFromJson(ReadJsonFile(dir.path() / "out" / kCandidatesFile));
  const CandidateSet local =
      CandidatesFromJson(ReadJsonFile(kFixture / "golden_candidates.json"));
  EXPECT_EQ(CandidatesToJson(remote), CandidatesToJson(local));

  const int port = testing::ClosedPort();
  config["adapter"] = {{"remote", "http://127.0.0.1:" + std::to_string(port)}};
  WriteFile(dir.path() / "dead.json", config.dump());
  const Result dead = Cli("mine --config " + (dir.path() / "dead.json").string() +
                          " --out " + (dir.path() / "dead").string());
  EXPECT_EQ(dead.code, 3) << dead.out;
}

}  // namespace
}  // namespace shortcut
