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
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace segser {

/// On-disk form of an extracted feature matrix. The CSV header is
/// `id,label,config_hash,<layout names...>`, one row per utterance, values
/// printed with 17 significant digits so they read back bit-exactly.
struct FeatureCacheData {
  std::vector<std::string> ids;
  std::vector<std::string> labels;
  std::string config_hash;
  std::vector<std::string> names;
  Eigen::MatrixXd values;
};

void write_feature_cache(const std::filesystem::path& path, const FeatureCacheData& data);
FeatureCacheData read_feature_cache(const std::filesystem::path& path);

}  // namespace segser
