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

#include "segser/manifest.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include "segser/error.hpp"

namespace segser {
namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

// One CSV record; double-quoted fields may contain commas and "" escapes.
std::vector<std::string> split_csv_line(std::string_view line, std::size_t line_no) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  bool was_quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur.push_back(c);
      }
    } else if (c == '"') {
      if (!trim(cur).empty()) throw Error("manifest line " + std::to_string(line_no) + ": stray quote");
      cur.clear();
      quoted = true;
      was_quoted = true;
    } else if (c == ',') {
      fields.push_back(was_quoted ? cur : trim(cur));
      cur.clear();
      was_quoted = false;
    } else {
      cur.push_back(c);
    }
  }
  if (quoted) throw Error("manifest line " + std::to_string(line_no) + ": unterminated quote");
  fields.push_back(was_quoted ? cur : trim(cur));
  return fields;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  return out + "\"";
}

}  // namespace

int DatasetManifest::class_index(std::string_view label) const {
  const auto it = std::find(classes.begin(), classes.end(), label);
  if (it == classes.end()) throw Error("unknown class label '" + std::string(label) + "'");
  return static_cast<int>(it - classes.begin());
}

DatasetManifest parse_manifest_text(std::string_view text, const std::filesystem::path& base_dir,
                                    const std::optional<std::vector<std::string>>& class_set) {
  if (text.size() >= 3 && static_cast<unsigned char>(text[0]) == 0xEF &&
      static_cast<unsigned char>(text[1]) == 0xBB && static_cast<unsigned char>(text[2]) == 0xBF) {
    text.remove_prefix(3);
  }
  DatasetManifest m;
  std::set<std::string> seen_paths;
  std::set<std::string> seen_labels;
  bool header = false;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (trim(line).empty()) continue;

    const auto fields = split_csv_line(line, line_no);
    if (!header) {
      if (fields.size() != 3 || fields[0] != "path" || fields[1] != "label" || fields[2] != "speaker") {
        throw Error("manifest: header must be 'path,label,speaker'");
      }
      header = true;
      continue;
    }
    if (fields.size() != 3) {
      throw Error("manifest line " + std::to_string(line_no) + ": expected 3 fields, got " +
                  std::to_string(fields.size()));
    }
    if (fields[0].empty()) throw Error("manifest line " + std::to_string(line_no) + ": empty path");
    if (fields[1].empty()) throw Error("manifest line " + std::to_string(line_no) + ": empty label");

    std::filesystem::path p(fields[0]);
    if (p.is_relative()) p = base_dir / p;
    p = p.lexically_normal();
    if (!seen_paths.insert(p.string()).second) {
      throw Error("manifest line " + std::to_string(line_no) + ": duplicate path '" + fields[0] + "'");
    }
    if (class_set && std::find(class_set->begin(), class_set->end(), fields[1]) == class_set->end()) {
      throw Error("manifest line " + std::to_string(line_no) + ": label '" + fields[1] +
                  "' is not in the class set");
    }
    seen_labels.insert(fields[1]);
    m.entries.push_back({p, fields[1], fields[2]});
  }
  if (!header) throw Error("manifest: missing header");
  if (seen_labels.size() < 2) throw Error("manifest: need at least 2 classes present");
  m.classes = class_set ? *class_set : std::vector<std::string>(seen_labels.begin(), seen_labels.end());
  return m;
}

DatasetManifest parse_manifest(const std::filesystem::path& path,
                               const std::optional<std::vector<std::string>>& class_set) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(path.string() + ": cannot open manifest");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_manifest_text(ss.str(), path.parent_path(), class_set);
}

void write_manifest(const std::filesystem::path& path, const DatasetManifest& manifest) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(path.string() + ": cannot open for writing");
  out << "path,label,speaker\n";
  for (const auto& e : manifest.entries) {
    out << csv_field(e.path.string()) << ',' << csv_field(e.label) << ',' << csv_field(e.speaker) << '\n';
  }
  if (!out) throw Error(path.string() + ": write failed");
}

const std::vector<std::string>& emodb_classes() {
  static const std::vector<std::string> classes = {"happiness", "neutral", "anger",  "sadness",
                                                   "fear",      "boredom", "disgust"};
  return classes;
}

std::optional<EmodbLabel> emodb_label_from_filename(std::string_view name) {
  const auto slash = name.find_last_of("/\\");
  if (slash != std::string_view::npos) name.remove_prefix(slash + 1);
  if (name.size() != 11) return std::nullopt;
  std::string ext(name.substr(7));
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  if (ext != ".wav") return std::nullopt;

  auto digit = [&](std::size_t i) { return std::isdigit(static_cast<unsigned char>(name[i])) != 0; };
  auto lower = [&](std::size_t i) { return std::islower(static_cast<unsigned char>(name[i])) != 0; };
  if (!digit(0) || !digit(1) || !lower(2) || !digit(3) || !digit(4) || !lower(6)) return std::nullopt;

  std::string emotion;
  switch (name[5]) {
    case 'W': emotion = "anger"; break;
    case 'L': emotion = "boredom"; break;
    case 'E': emotion = "disgust"; break;
    case 'A': emotion = "fear"; break;
    case 'F': emotion = "happiness"; break;
    case 'T': emotion = "sadness"; break;
    case 'N': emotion = "neutral"; break;
    default: return std::nullopt;
  }
  return EmodbLabel{emotion, std::string(name.substr(0, 2))};
}

DatasetManifest emodb_manifest_from_directory(const std::filesystem::path& dir,
                                              std::vector<std::string>* skipped) {
  if (!std::filesystem::is_directory(dir)) throw Error(dir.string() + ": not a directory");
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file()) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end(),
            [](const auto& a, const auto& b) { return a.filename().string() < b.filename().string(); });

  DatasetManifest m;
  m.classes = emodb_classes();
  for (const auto& f : files) {
    const auto decoded = emodb_label_from_filename(f.filename().string());
    if (!decoded) {
      if (skipped) skipped->push_back(f.filename().string());
      continue;
    }
    m.entries.push_back({std::filesystem::absolute(f).lexically_normal(), decoded->emotion, decoded->speaker});
  }
  return m;
}

}  // namespace segser
