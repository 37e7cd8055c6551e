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

#include "segser/feature_cache.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "segser/error.hpp"

namespace segser {
namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream ss(line);
  while (std::getline(ss, cur, ',')) out.push_back(cur);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

void require_plain(const std::string& s, const char* what) {
  if (s.find_first_of(",\n\r") != std::string::npos) {
    throw Error(std::string("feature cache: ") + what + " '" + s + "' contains a separator");
  }
}

}  // namespace

void write_feature_cache(const std::filesystem::path& path, const FeatureCacheData& data) {
  const auto rows = static_cast<std::size_t>(data.values.rows());
  if (data.ids.size() != rows || data.labels.size() != rows ||
      data.names.size() != static_cast<std::size_t>(data.values.cols())) {
    throw Error("feature cache: inconsistent shapes");
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(path.string() + ": cannot open for writing");
  out << "id,label,config_hash";
  for (const auto& n : data.names) {
    require_plain(n, "column");
    out << ',' << n;
  }
  out << '\n';
  char buf[32];
  for (std::size_t r = 0; r < rows; ++r) {
    require_plain(data.ids[r], "id");
    require_plain(data.labels[r], "label");
    out << data.ids[r] << ',' << data.labels[r] << ',' << data.config_hash;
    for (Eigen::Index c = 0; c < data.values.cols(); ++c) {
      std::snprintf(buf, sizeof buf, "%.17g", data.values(static_cast<Eigen::Index>(r), c));
      out << ',' << buf;
    }
    out << '\n';
  }
  if (!out) throw Error(path.string() + ": write failed");
}

FeatureCacheData read_feature_cache(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(path.string() + ": cannot open feature cache");
  std::string line;
  if (!std::getline(in, line)) throw Error(path.string() + ": empty feature cache");
  auto header = split(line);
  if (header.size() < 3 || header[0] != "id" || header[1] != "label" || header[2] != "config_hash") {
    throw Error(path.string() + ": bad feature cache header");
  }
  FeatureCacheData data;
  data.names.assign(header.begin() + 3, header.end());
  std::vector<std::vector<double>> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split(line);
    if (fields.size() != header.size()) {
      throw Error(path.string() + ": line " + std::to_string(line_no) + " has " +
                  std::to_string(fields.size()) + " fields, expected " + std::to_string(header.size()));
    }
    if (data.ids.empty()) data.config_hash = fields[2];
    else if (fields[2] != data.config_hash) throw Error(path.string() + ": mixed config hashes");
    data.ids.push_back(fields[0]);
    data.labels.push_back(fields[1]);
    std::vector<double> v;
    v.reserve(data.names.size());
    for (std::size_t i = 3; i < fields.size(); ++i) {
      char* end = nullptr;
      const double x = std::strtod(fields[i].c_str(), &end);
      if (end == fields[i].c_str() || *end != '\0') {
        throw Error(path.string() + ": line " + std::to_string(line_no) + ": bad number '" + fields[i] + "'");
      }
      v.push_back(x);
    }
    rows.push_back(std::move(v));
  }
  data.values.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(data.names.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < rows[r].size(); ++c) {
      data.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
    }
  }
  return data;
}

}  // namespace segser
