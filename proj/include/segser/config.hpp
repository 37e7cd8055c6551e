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

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "segser/features.hpp"

namespace segser {

enum class PreprocessingScope { PerFold, Global };

PreprocessingScope parse_scope(const std::string& s);
std::string to_string(PreprocessingScope scope);

/// One experiment: feature extraction settings plus the preprocessing and
/// classifier settings applied during cross-validation.
struct ExperimentConfig {
  std::string name;
  ExtractionConfig extraction;
  /// Cumulative share threshold; nullopt disables PCA.
  std::optional<double> pca;
  double svm_c = 1.0;
  PreprocessingScope scope = PreprocessingScope::PerFold;

  void validate() const;
};

/// JSON keys: scheme ("gti" | {"rti": n}), include_hist, hist {a, b, h},
/// pca (null | fraction), svm_c, frame_ms, hop_ms, preprocessing_scope
/// ("per-fold" | "global"). Optional extras: name, hist_segments. Missing
/// keys take the defaults of ExperimentConfig.
ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ExperimentConfig& config);

ExperimentConfig load_config(const std::filesystem::path& path);

/// A grid file is either a JSON array of configs or {"configs": [...]}.
std::vector<ExperimentConfig> grid_from_json(const nlohmann::json& j);
std::vector<ExperimentConfig> load_grid(const std::filesystem::path& path);

/// The five experiment rows of the reference comparison table: GTI, GTI with
/// 3-segment histograms, RTI(3), RTI(3) with histograms, and the last with
/// PCA at 99%.
std::vector<ExperimentConfig> reference_table_grid();

/// RTI n in {3, 4, 5} x h in {50, 25}, with histograms and PCA at 99%.
std::vector<ExperimentConfig> segment_bin_grid();

}  // namespace segser
