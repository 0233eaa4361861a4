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

#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "faceforge/commands.hpp"
#include "faceforge/error.hpp"

namespace {

using faceforge::ErrorKind;

std::vector<std::string> split_on(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, sep)) {
    if (!part.empty()) parts.push_back(part);
  }
  return parts;
}

// "all" or comma-separated subsets whose members are joined by '+'.
std::vector<std::vector<std::string>> parse_subsets(const std::string& text) {
  if (text == "all") return {};
  std::vector<std::vector<std::string>> subsets;
  for (const auto& s : split_on(text, ',')) subsets.push_back(split_on(s, '+'));
  FACEFORGE_CHECK(!subsets.empty(), ErrorKind::InvalidArgument, "--subsets is empty");
  return subsets;
}

std::vector<int> parse_fpv(const std::string& text) {
  std::vector<int> out;
  for (const auto& s : split_on(text, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stoi(s, &used));
      FACEFORGE_CHECK(used == s.size(), ErrorKind::InvalidArgument, "bad --fpv entry '" + s + "'");
    } catch (const std::logic_error&) {
      throw faceforge::Error(ErrorKind::InvalidArgument, "bad --fpv entry '" + s + "'");
    }
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"faceforge: face-manipulation detector toolkit"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string variant_name;
  std::string out_dir;
  std::optional<std::string> fpv_text;
  std::string subsets_text;
  std::vector<std::string> checkpoints;

  app.add_option("--config", config_path, "Run config JSON")->required()->check(CLI::ExistingFile);
  app.add_option("--seed", seed, "Override the global seed");
  app.add_option("--out", out_dir, "Output directory (the corpus directory for gen-data)");

  auto* gen = app.add_subcommand("gen-data", "Generate the synthetic corpus and its split manifest");
  auto* train = app.add_subcommand("train", "Train one model variant");
  train->add_option("--variant", variant_name, "B, BAtt, BST or BAttST")->required();
  auto* evaluate = app.add_subcommand("evaluate", "Score the test split and evaluate ensembles");
  evaluate->add_option("checkpoints", checkpoints, "Checkpoint files")->required()->check(CLI::ExistingFile);
  evaluate->add_option("--subsets", subsets_text, "'all' or e.g. B,B+BAtt");
  auto* attn = app.add_subcommand("attn", "Render attention overlays for test faces");
  attn->add_option("checkpoint", checkpoints, "Checkpoint file")->required()->expected(1)->check(CLI::ExistingFile);
  auto* project = app.add_subcommand("project", "Project test features to 2-D");
  project->add_option("checkpoint", checkpoints, "Checkpoint file")->required()->expected(1)->check(CLI::ExistingFile);
  auto* sweep = app.add_subcommand("fpv-sweep", "Train once per frames-per-video value");
  sweep->add_option("--fpv", fpv_text, "Comma-separated list, e.g. 4,8,15,32");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << "error: invalid_argument: " << e.what() << '\n';
    return 2;
  }

  try {
    auto config = faceforge::RunConfig::load(config_path);
    if (seed) config.apply_seed(*seed);
    if (!out_dir.empty()) {
      if (gen->parsed()) {
        config.data_dir = out_dir;
      } else {
        config.out_dir = out_dir;
      }
    }
    if (gen->parsed()) {
      faceforge::cmd_gen_data(config, std::cout);
    } else if (train->parsed()) {
      faceforge::cmd_train(config, faceforge::parse_variant(variant_name), std::cout);
    } else if (evaluate->parsed()) {
      if (!subsets_text.empty()) config.evaluation.subsets = parse_subsets(subsets_text);
      faceforge::cmd_evaluate(config, {checkpoints.begin(), checkpoints.end()}, std::cout);
    } else if (attn->parsed()) {
      faceforge::cmd_attn(config, checkpoints.front(), std::cout);
    } else if (project->parsed()) {
      faceforge::cmd_project(config, checkpoints.front(), std::cout);
    } else if (sweep->parsed()) {
      faceforge::cmd_fpv_sweep(config, fpv_text ? parse_fpv(*fpv_text) : config.fpv_list, std::cout);
    }
  } catch (const faceforge::Error& e) {
    std::cerr << "error: " << faceforge::to_string(e.kind()) << ": " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: internal: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
