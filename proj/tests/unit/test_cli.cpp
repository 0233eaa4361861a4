/*
 * Copyright 2026 The FaceForge Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <gtest/gtest.h>

#include <array>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "temp_dir.hpp"

namespace {

namespace fs = std::filesystem;

struct RunResult {
  int exit_code = -1;
  std::string output;
};

RunResult run(const std::string& args) {
  const std::string cmd = std::string(FACEFORGE_CLI_PATH) + " " + args + " 2>&1";
  RunResult r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  std::array<char, 4096> buf{};
  while (std::fgets(buf.data(), buf.size(), pipe)) r.output += buf.data();
  const int status = pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int count_lines(const fs::path& p) {
  std::ifstream in(p);
  std::string line;
  int n = 0;
  while (std::getline(in, line)) n += !line.empty();
  return n;
}

// One small corpus shared by every test; the suite runs the binary end to end.
class Cli : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = new faceforge::testing::TempDir("faceforge_cli");
    fs::create_directories(data());
    fs::create_directories(runs());
    std::ofstream(config()) << R"({
      "seed": 5,
      "data_dir": ")" << data().string() << R"(",
      "out_dir": ")" << runs().string() << R"(",
      "synthetic": {"n_real_videos": 8, "frames_per_video": 4, "image_side": 40, "n_train": 4, "n_val": 2, "n_test": 2},
      "backbone": {"input_side": 32, "feature_dim": 16},
      "train": {"max_iterations": 1, "val_every": 1, "val_samples": 8, "batch_per_class": 2,
                "triplets_per_batch": 2, "frames_per_video": 2, "val_frames_per_video": 2, "initial_lr": 0.001},
      "evaluation": {"frames_per_video": 2},
      "attn": {"n_faces": 2},
      "project": {"n_samples": 8}
    })";
    gen_ = new RunResult(run("--config " + config().string() + " gen-data"));
  }
  static void TearDownTestSuite() {
    delete gen_;
    delete dir_;
  }

  static fs::path data() { return dir_->path() / "data"; }
  static fs::path runs() { return dir_->path() / "runs"; }
  static fs::path config() { return dir_->path() / "run.json"; }
  static std::string base() { return "--config " + config().string() + " "; }

  static faceforge::testing::TempDir* dir_;
  static RunResult* gen_;
};

faceforge::testing::TempDir* Cli::dir_ = nullptr;
RunResult* Cli::gen_ = nullptr;

TEST_F(Cli, GenDataWritesOneManifestLinePerVideo) {
  ASSERT_EQ(gen_->exit_code, 0) << gen_->output;
  EXPECT_EQ(count_lines(data() / "manifest.jsonl"), 16);
  EXPECT_TRUE(fs::exists(data() / "faces.jsonl"));
}

TEST_F(Cli, GenDataIsReproducible) {
  faceforge::testing::TempDir other;
  const auto r = run(base() + "--out " + other.path().string() + " gen-data");
  ASSERT_EQ(r.exit_code, 0) << r.output;
  EXPECT_EQ(slurp(other / "manifest.jsonl"), slurp(data() / "manifest.jsonl"));
  faceforge::testing::TempDir reseeded;
  ASSERT_EQ(run(base() + "--seed 6 --out " + reseeded.path().string() + " gen-data").exit_code, 0);
  EXPECT_NE(slurp(reseeded / "faces.jsonl"), slurp(data() / "faces.jsonl"));
}

TEST_F(Cli, GenDataIntoMissingDirectoryFails) {
  const auto r = run(base() + "--out " + (dir_->path() / "no" / "such").string() + " gen-data");
  EXPECT_NE(r.exit_code, 0);
  EXPECT_NE(r.output.find("error:"), std::string::npos) << r.output;
}

TEST_F(Cli, UsageErrors) {
  EXPECT_NE(run(base() + "train --variant B9").exit_code, 0);
  EXPECT_NE(run(base() + "train").exit_code, 0);
  EXPECT_NE(run("train --variant B").exit_code, 0);
  EXPECT_NE(run(base() + "fpv-sweep --fpv \"\"").exit_code, 0);
  EXPECT_NE(run(base() + "fpv-sweep --fpv 0").exit_code, 0);
}

TEST_F(Cli, TrainEvaluateAttnProject) {
  ASSERT_EQ(gen_->exit_code, 0);
  for (const char* v : {"B", "BAtt", "BST"}) {
    const auto r = run(base() + "train --variant " + v);
    ASSERT_EQ(r.exit_code, 0) << r.output;
    EXPECT_TRUE(fs::exists(runs() / (std::string(v) + ".ckpt")));
  }
  EXPECT_TRUE(fs::exists(runs() / "B_history.csv"));
  EXPECT_TRUE(fs::exists(runs() / "BST_siamese_history.csv"));
  EXPECT_TRUE(fs::exists(runs() / "BST_finetune_history.csv"));
  EXPECT_EQ(count_lines(runs() / "B_history.csv"), 2);

  const auto b = (runs() / "B.ckpt").string();
  const auto batt = (runs() / "BAtt.ckpt").string();
  const auto bst = (runs() / "BST.ckpt").string();

  auto r = run(base() + "evaluate " + b);
  ASSERT_EQ(r.exit_code, 0) << r.output;
  EXPECT_EQ(count_lines(runs() / "results.csv"), 2);

  r = run(base() + "evaluate " + b + " " + batt + " " + bst);
  ASSERT_EQ(r.exit_code, 0) << r.output;
  const std::string forward = slurp(runs() / "results.csv");
  EXPECT_EQ(count_lines(runs() / "results.csv"), 8);
  r = run(base() + "evaluate " + bst + " " + b + " " + batt);
  ASSERT_EQ(r.exit_code, 0) << r.output;
  EXPECT_EQ(slurp(runs() / "results.csv"), forward);

  r = run(base() + "evaluate " + b + " " + batt + " --subsets B,B+BAtt");
  ASSERT_EQ(r.exit_code, 0) << r.output;
  EXPECT_EQ(count_lines(runs() / "results.csv"), 3);
  EXPECT_NE(run(base() + "evaluate " + b + " " + b).exit_code, 0);

  r = run(base() + "attn " + b);
  EXPECT_NE(r.exit_code, 0);
  EXPECT_NE(r.output.find("attention"), std::string::npos) << r.output;
  r = run(base() + "attn " + batt);
  ASSERT_EQ(r.exit_code, 0) << r.output;
  int pngs = 0;
  for (const auto& e : fs::directory_iterator(runs()))
    pngs += e.path().filename().string().rfind("attn_", 0) == 0 && e.path().extension() == ".png";
  EXPECT_EQ(pngs, 2);

  r = run(base() + "project " + bst);
  ASSERT_EQ(r.exit_code, 0) << r.output;
  EXPECT_EQ(count_lines(runs() / "projection_BST.csv"), 9);
}

TEST_F(Cli, ProjectNeedsAtLeastThreeSamples) {
  ASSERT_EQ(gen_->exit_code, 0);
  const auto r = run(base() + "train --variant B");
  ASSERT_EQ(r.exit_code, 0) << r.output;
  std::string text = slurp(config());
  text.replace(text.find("\"n_samples\": 8"), 14, "\"n_samples\": 2");
  std::ofstream(dir_->path() / "small.json") << text;
  const auto p = run("--config " + (dir_->path() / "small.json").string() + " project " + (runs() / "B.ckpt").string());
  EXPECT_NE(p.exit_code, 0);
  EXPECT_NE(p.output.find("error:"), std::string::npos);
}

TEST_F(Cli, FpvSweepWritesOneHistoryPerValue) {
  ASSERT_EQ(gen_->exit_code, 0);
  faceforge::testing::TempDir out;
  const auto r = run(base() + "--out " + out.path().string() + " fpv-sweep --fpv 2");
  ASSERT_EQ(r.exit_code, 0) << r.output;
  EXPECT_TRUE(fs::exists(out / "fpv_2_history.csv"));
  int files = 0;
  for (const auto& e : fs::directory_iterator(out.path())) files += e.path().filename().string().rfind("fpv_", 0) == 0;
  EXPECT_EQ(files, 1);
}

}  // namespace
