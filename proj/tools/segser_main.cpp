// Copyright 2026 The segser Authors. All Rights Reserved.
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

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "segser/config.hpp"
#include "segser/error.hpp"
#include "segser/evaluation.hpp"
#include "segser/feature_cache.hpp"
#include "segser/manifest.hpp"

namespace {

std::optional<std::vector<std::string>> split_classes(const std::string& list) {
  if (list.empty()) return std::nullopt;
  std::vector<std::string> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

void write_json(const std::string& path, const nlohmann::json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw segser::Error(path + ": cannot open for writing");
  out << j.dump(2) << '\n';
  if (!out) throw segser::Error(path + ": write failed");
}

struct Common {
  std::string manifest;
  std::string classes;
  std::string scope;
  bool skip_bad = false;
  bool quiet = false;
};

void add_common(CLI::App* cmd, Common& c, bool with_scope) {
  cmd->add_option("--manifest", c.manifest, "CSV manifest with header path,label,speaker")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--classes", c.classes, "Comma-separated class set (default: labels found in the manifest)");
  cmd->add_flag("--skip-bad-utterances", c.skip_bad, "Skip utterances whose extraction fails instead of aborting");
  cmd->add_flag("-q,--quiet", c.quiet, "Suppress progress output on stderr");
  if (with_scope) {
    cmd->add_option("--preprocessing-scope", c.scope, "Override the config's preprocessing scope")
        ->check(CLI::IsMember({"per-fold", "global"}));
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Segmental speech emotion recognition: feature extraction and leave-one-out evaluation"};
  app.require_subcommand(1);

  Common extract_opts;
  std::string extract_config, extract_out;
  auto* extract = app.add_subcommand("extract", "Extract utterance feature vectors into a CSV cache");
  add_common(extract, extract_opts, false);
  extract->add_option("--config", extract_config, "Experiment config JSON")->required()->check(CLI::ExistingFile);
  extract->add_option("--out", extract_out, "Output feature CSV")->required();

  Common eval_opts;
  std::string eval_config, eval_report, eval_cache;
  auto* evaluate = app.add_subcommand("evaluate", "Leave-one-out evaluation of one config");
  add_common(evaluate, eval_opts, true);
  evaluate->add_option("--config", eval_config, "Experiment config JSON")->required()->check(CLI::ExistingFile);
  evaluate->add_option("--report", eval_report, "Output report JSON")->required();
  evaluate->add_option("--cache-dir", eval_cache, "Directory for reusable feature caches");

  Common grid_opts;
  std::string grid_file, grid_report, grid_cache;
  auto* grid = app.add_subcommand("grid", "Leave-one-out evaluation of every config in a grid");
  add_common(grid, grid_opts, true);
  grid->add_option("--grid", grid_file, "Grid JSON (array of configs or {\"configs\": [...]})")
      ->required()
      ->check(CLI::ExistingFile);
  grid->add_option("--report", grid_report, "Output report JSON")->required();
  grid->add_option("--cache-dir", grid_cache, "Directory for reusable feature caches");

  std::string emodb_dir, emodb_out;
  auto* emodb = app.add_subcommand("emodb-manifest", "Build a manifest from Emo-DB file names");
  emodb->add_option("--dir", emodb_dir, "Directory holding the corpus .wav files")->required()->check(CLI::ExistingDirectory);
  emodb->add_option("--out", emodb_out, "Output manifest CSV")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    auto load_manifest = [](const Common& c) { return segser::parse_manifest(c.manifest, split_classes(c.classes)); };
    auto log_of = [](const Common& c) -> std::ostream* { return c.quiet ? nullptr : &std::cerr; };
    auto apply_scope = [](const Common& c, segser::ExperimentConfig& cfg) {
      if (!c.scope.empty()) cfg.scope = segser::parse_scope(c.scope);
    };

    if (*extract) {
      const auto manifest = load_manifest(extract_opts);
      const auto config = segser::load_config(extract_config);
      const auto table = segser::extract_features(manifest, config.extraction, extract_opts.skip_bad, log_of(extract_opts));
      segser::write_feature_cache(extract_out, segser::to_cache(table, manifest));
      std::cout << "wrote " << table.ids.size() << " x " << table.X.cols() << " features to " << extract_out << '\n';
    } else if (*evaluate) {
      const auto manifest = load_manifest(eval_opts);
      auto config = segser::load_config(eval_config);
      apply_scope(eval_opts, config);
      segser::GridOptions options;
      options.skip_bad = eval_opts.skip_bad;
      options.log = log_of(eval_opts);
      if (!eval_cache.empty()) options.cache_dir = eval_cache;
      const auto result = segser::run_experiment_grid(manifest, {config}, options);
      const auto& report = result.rows.front().report;
      write_json(eval_report, segser::to_json(report));
      std::cout << segser::format_report(report);
    } else if (*grid) {
      const auto manifest = load_manifest(grid_opts);
      auto configs = segser::load_grid(grid_file);
      for (auto& c : configs) apply_scope(grid_opts, c);
      segser::GridOptions options;
      options.skip_bad = grid_opts.skip_bad;
      options.log = log_of(grid_opts);
      if (!grid_cache.empty()) options.cache_dir = grid_cache;
      const auto result = segser::run_experiment_grid(manifest, configs, options);
      write_json(grid_report, segser::to_json(result));
      std::cout << segser::format_grid(result);
    } else if (*emodb) {
      std::vector<std::string> skipped;
      const auto manifest = segser::emodb_manifest_from_directory(emodb_dir, &skipped);
      for (const auto& s : skipped) std::cerr << "warning: not an Emo-DB file name: " << s << '\n';
      if (manifest.entries.empty()) throw segser::Error(emodb_dir + ": no Emo-DB files found");
      segser::write_manifest(emodb_out, manifest);
      std::cout << "wrote " << manifest.size() << " entries to " << emodb_out << '\n';
    }
  } catch (const segser::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
