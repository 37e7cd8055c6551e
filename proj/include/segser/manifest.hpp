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
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace segser {

struct ManifestEntry {
  std::filesystem::path path;
  std::string label;
  std::string speaker;
};

struct DatasetManifest {
  std::vector<ManifestEntry> entries;
  /// Declared class set; class indices are positions in this list.
  std::vector<std::string> classes;

  std::size_t size() const { return entries.size(); }
  /// Throws for labels not in `classes`.
  int class_index(std::string_view label) const;
};

/// Parses a UTF-8 CSV with header `path,label,speaker`. Relative paths are
/// resolved against `base_dir`. Without a class set, the classes are the
/// sorted distinct labels. Rejects duplicate paths, labels outside the class
/// set and manifests with fewer than 2 classes present.
DatasetManifest parse_manifest_text(std::string_view text, const std::filesystem::path& base_dir,
                                    const std::optional<std::vector<std::string>>& class_set = {});

DatasetManifest parse_manifest(const std::filesystem::path& path,
                               const std::optional<std::vector<std::string>>& class_set = {});

void write_manifest(const std::filesystem::path& path, const DatasetManifest& manifest);

/// Emo-DB emotion names in the order happiness, neutral, anger, sadness,
/// fear, boredom, disgust.
const std::vector<std::string>& emodb_classes();

struct EmodbLabel {
  std::string emotion;
  std::string speaker;
  bool operator==(const EmodbLabel&) const = default;
};

/// Decodes Emo-DB file names such as "03a01Fa.wav": characters 1-2 are the
/// speaker, 3-5 the text code, 6 the emotion letter (W L E A F T N), 7 the
/// take. Anything else yields nullopt.
std::optional<EmodbLabel> emodb_label_from_filename(std::string_view name);

/// Builds a manifest from every decodable .wav file in `dir`, sorted by file
/// name. Files that do not decode are appended to `skipped` when given.
DatasetManifest emodb_manifest_from_directory(const std::filesystem::path& dir,
                                              std::vector<std::string>* skipped = nullptr);

}  // namespace segser
