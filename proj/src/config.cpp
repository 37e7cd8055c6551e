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

#include "segser/config.hpp"

#include <algorithm>
#include <fstream>

#include "segser/error.hpp"

namespace segser {
namespace {

nlohmann::json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(path.string() + ": cannot open");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(path.string() + ": " + e.what());
  }
}

ExperimentConfig make(std::string name, SegmentationScheme scheme, bool hist, double h,
                      std::optional<double> pca) {
  ExperimentConfig c;
  c.name = std::move(name);
  c.extraction.scheme = scheme;
  c.extraction.include_hist = hist;
  c.extraction.hist.h = h;
  c.pca = pca;
  return c;
}

}  // namespace

PreprocessingScope parse_scope(const std::string& s) {
  if (s == "per-fold") return PreprocessingScope::PerFold;
  if (s == "global") return PreprocessingScope::Global;
  throw Error("preprocessing scope must be 'per-fold' or 'global', got '" + s + "'");
}

std::string to_string(PreprocessingScope scope) {
  return scope == PreprocessingScope::PerFold ? "per-fold" : "global";
}

void ExperimentConfig::validate() const {
  extraction.validate();
  if (pca && !(*pca > 0.0 && *pca <= 1.0)) throw Error("config: pca threshold must be in (0, 1]");
  if (!(svm_c > 0.0)) throw Error("config: svm_c must be positive");
}

ExperimentConfig config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw Error("config: expected a JSON object");
  static const std::vector<std::string> known = {"name",   "scheme",   "include_hist",       "hist",
                                                 "pca",    "svm_c",    "frame_ms",           "hop_ms",
                                                 "preprocessing_scope", "hist_segments"};
  for (const auto& [key, value] : j.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw Error("config: unknown key '" + key + "'");
    }
  }

  ExperimentConfig c;
  try {
    c.name = j.value("name", std::string{});
    if (j.contains("scheme")) {
      const auto& s = j.at("scheme");
      if (s.is_string() && s.get<std::string>() == "gti") {
        c.extraction.scheme = SegmentationScheme::gti();
      } else if (s.is_object() && s.size() == 1 && s.contains("rti")) {
        c.extraction.scheme = SegmentationScheme::rti(s.at("rti").get<int>());
      } else {
        throw Error("config: scheme must be \"gti\" or {\"rti\": n}");
      }
    }
    c.extraction.include_hist = j.value("include_hist", false);
    if (j.contains("hist")) {
      const auto& h = j.at("hist");
      c.extraction.hist.a = h.value("a", c.extraction.hist.a);
      c.extraction.hist.b = h.value("b", c.extraction.hist.b);
      c.extraction.hist.h = h.value("h", c.extraction.hist.h);
    }
    c.extraction.hist_segments = j.value("hist_segments", c.extraction.hist_segments);
    if (j.contains("pca") && !j.at("pca").is_null()) c.pca = j.at("pca").get<double>();
    c.svm_c = j.value("svm_c", c.svm_c);
    c.extraction.frame_ms = j.value("frame_ms", c.extraction.frame_ms);
    c.extraction.hop_ms = j.value("hop_ms", c.extraction.hop_ms);
    if (j.contains("preprocessing_scope")) c.scope = parse_scope(j.at("preprocessing_scope").get<std::string>());
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("config: ") + e.what());
  }
  c.validate();
  return c;
}

nlohmann::json to_json(const ExperimentConfig& c) {
  nlohmann::json j;
  j["name"] = c.name;
  if (c.extraction.scheme.kind == SegmentationScheme::Kind::Gti) {
    j["scheme"] = "gti";
  } else {
    j["scheme"] = {{"rti", c.extraction.scheme.n}};
  }
  j["include_hist"] = c.extraction.include_hist;
  j["hist"] = {{"a", c.extraction.hist.a}, {"b", c.extraction.hist.b}, {"h", c.extraction.hist.h}};
  j["hist_segments"] = c.extraction.hist_segments;
  j["pca"] = c.pca ? nlohmann::json(*c.pca) : nlohmann::json(nullptr);
  j["svm_c"] = c.svm_c;
  j["frame_ms"] = c.extraction.frame_ms;
  j["hop_ms"] = c.extraction.hop_ms;
  j["preprocessing_scope"] = to_string(c.scope);
  return j;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  return config_from_json(read_json(path));
}

std::vector<ExperimentConfig> grid_from_json(const nlohmann::json& j) {
  const nlohmann::json* list = &j;
  if (j.is_object()) {
    if (!j.contains("configs")) throw Error("grid: expected an array or {\"configs\": [...]}");
    list = &j.at("configs");
  }
  if (!list->is_array()) throw Error("grid: configs must be an array");
  std::vector<ExperimentConfig> out;
  for (const auto& item : *list) out.push_back(config_from_json(item));
  return out;
}

std::vector<ExperimentConfig> load_grid(const std::filesystem::path& path) {
  return grid_from_json(read_json(path));
}

std::vector<ExperimentConfig> reference_table_grid() {
  return {
      make("gti", SegmentationScheme::gti(), false, 50.0, std::nullopt),
      make("gti+hist", SegmentationScheme::gti(), true, 50.0, std::nullopt),
      make("rti3", SegmentationScheme::rti(3), false, 50.0, std::nullopt),
      make("rti3+hist", SegmentationScheme::rti(3), true, 50.0, std::nullopt),
      make("rti3+hist+pca", SegmentationScheme::rti(3), true, 50.0, 0.99),
  };
}

std::vector<ExperimentConfig> segment_bin_grid() {
  std::vector<ExperimentConfig> out;
  for (double h : {50.0, 25.0}) {
    for (int n : {3, 4, 5}) {
      out.push_back(make("rti" + std::to_string(n) + "+hist" + std::to_string(static_cast<int>(h)) + "+pca",
                         SegmentationScheme::rti(n), true, h, 0.99));
    }
  }
  return out;
}

}  // namespace segser
