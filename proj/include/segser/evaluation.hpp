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

#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "segser/config.hpp"
#include "segser/feature_cache.hpp"
#include "segser/features.hpp"
#include "segser/manifest.hpp"

namespace segser {

/// Rows are true classes, columns predicted classes.
using ConfusionMatrix = std::vector<std::vector<std::size_t>>;

struct Metrics {
  /// trace / total
  double wa = 0.0;
  /// mean recall over classes with at least one instance
  double ua = 0.0;
  /// diag / row sum; 0 for empty rows
  std::vector<double> recall;
};

Metrics compute_metrics(const ConfusionMatrix& confusion);

struct Prediction {
  std::string id;
  std::string truth;
  std::string predicted;
};

struct EvaluationReport {
  std::vector<std::string> classes;
  ConfusionMatrix confusion;
  double wa = 0.0;
  double ua = 0.0;
  std::vector<double> per_class_recall;
  std::size_t dims_before = 0;
  /// Most frequent per-fold dimension after preprocessing (equals
  /// dims_before without PCA). The fold range is kept alongside.
  std::size_t dims_after = 0;
  std::size_t dims_after_min = 0;
  std::size_t dims_after_max = 0;
  nlohmann::json config;
  std::vector<Prediction> predictions;
  std::vector<std::string> warnings;
  std::vector<std::string> skipped;
};

/// Report carrying only a confusion matrix and the metrics derived from it.
EvaluationReport report_from_confusion(std::vector<std::string> classes, ConfusionMatrix confusion);

nlohmann::json to_json(const EvaluationReport& report);

struct RecallChange {
  std::string label;
  double baseline = 0.0;
  double candidate = 0.0;
  double change = 0.0;
};

/// candidate recall - baseline recall per class, largest gain first.
std::vector<RecallChange> ua_delta_report(const EvaluationReport& baseline,
                                          const EvaluationReport& candidate);

/// Extracted features for the usable part of a manifest.
struct FeatureTable {
  std::vector<std::string> ids;
  std::vector<int> labels;
  Eigen::MatrixXd X;
  std::shared_ptr<const FeatureLayout> layout;
  std::string config_hash;
  std::vector<std::string> skipped;
};

/// Loads and assembles every manifest entry. A failing utterance aborts
/// with an error naming it, unless `skip_bad` is set, in which case it is
/// listed in `skipped`.
FeatureTable extract_features(const DatasetManifest& manifest, const ExtractionConfig& config,
                              bool skip_bad = false, std::ostream* log = nullptr);

FeatureCacheData to_cache(const FeatureTable& table, const DatasetManifest& manifest);
/// Rebuilds a table from cache data, checking the hash and column layout
/// against `config`.
FeatureTable from_cache(const FeatureCacheData& data, const DatasetManifest& manifest,
                        const ExtractionConfig& config);

struct LoocvHooks {
  /// Called before every fit with the held-out row (or nullopt for a
  /// single global fit) and the rows the fit reads.
  std::function<void(std::optional<std::size_t> held_out, std::span<const std::size_t> fit_rows)> on_fit;
};

/// Leave-one-out over the rows of `table`: z-score, optional PCA and a
/// one-vs-one linear SVM are fitted without the held-out row (per-fold
/// scope) or once on everything (global scope).
EvaluationReport loocv_features(const FeatureTable& table, const std::vector<std::string>& classes,
                                const ExperimentConfig& config, const LoocvHooks& hooks = {},
                                std::ostream* log = nullptr);

EvaluationReport loocv(const DatasetManifest& manifest, const ExperimentConfig& config,
                       bool skip_bad = false, std::ostream* log = nullptr);

struct GridOptions {
  bool skip_bad = false;
  /// Directory of `features-<hash>.csv` files reused across runs.
  std::optional<std::filesystem::path> cache_dir;
  std::ostream* log = nullptr;
};

struct GridRow {
  ExperimentConfig config;
  EvaluationReport report;
};

struct GridReport {
  std::vector<GridRow> rows;
};

/// One LOOCV per config; extraction is shared between configs with equal
/// extraction hashes.
GridReport run_experiment_grid(const DatasetManifest& manifest, const std::vector<ExperimentConfig>& grid,
                               const GridOptions& options = {});

/// Relative UA error reduction of `candidate` against `baseline`
/// ((1 - ua_b) - (1 - ua_c)) / (1 - ua_b).
double relative_ua_error_reduction(double baseline_ua, double candidate_ua);

nlohmann::json to_json(const GridReport& report);

/// Fixed-width text tables, percentages at two decimals.
std::string format_report(const EvaluationReport& report);
std::string format_grid(const GridReport& report);
std::string format_recall_changes(const std::vector<RecallChange>& changes);

}  // namespace segser
