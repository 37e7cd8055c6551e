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

#include "segser/evaluation.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "segser/audio_io.hpp"
#include "segser/classifier.hpp"
#include "segser/error.hpp"
#include "segser/preprocess.hpp"

namespace segser {
namespace {

Eigen::MatrixXd select_rows(const Eigen::MatrixXd& X, std::span<const std::size_t> rows) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), X.cols());
  for (std::size_t r = 0; r < rows.size(); ++r) out.row(static_cast<Eigen::Index>(r)) = X.row(static_cast<Eigen::Index>(rows[r]));
  return out;
}

std::string percent(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", 100.0 * v);
  return buf;
}

std::string signed_percent(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%+.2f", 100.0 * v);
  // -0.00 and +0.00 both read as 0.00
  if (std::string(buf) == "+0.00" || std::string(buf) == "-0.00") return "0.00";
  return buf;
}

std::string pad(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : s + std::string(width - s.size(), ' ');
}

std::string lpad(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : std::string(width - s.size(), ' ') + s;
}

std::vector<std::string> utterance_ids(const DatasetManifest& manifest) {
  std::vector<std::string> ids;
  std::set<std::string> seen;
  bool unique = true;
  for (const auto& e : manifest.entries) {
    ids.push_back(e.path.stem().string());
    unique = unique && seen.insert(ids.back()).second;
  }
  if (!unique) {
    for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = manifest.entries[i].path.string();
  }
  return ids;
}

}  // namespace

Metrics compute_metrics(const ConfusionMatrix& confusion) {
  const std::size_t k = confusion.size();
  for (const auto& row : confusion) {
    if (row.size() != k) throw Error("compute_metrics: confusion matrix must be square");
  }
  Metrics m;
  m.recall.assign(k, 0.0);
  std::size_t total = 0, correct = 0, present = 0;
  double recall_sum = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    std::size_t row_sum = 0;
    for (std::size_t v : confusion[i]) row_sum += v;
    total += row_sum;
    correct += confusion[i][i];
    if (row_sum > 0) {
      m.recall[i] = static_cast<double>(confusion[i][i]) / static_cast<double>(row_sum);
      recall_sum += m.recall[i];
      ++present;
    }
  }
  if (total == 0) throw Error("compute_metrics: confusion matrix is all zero");
  m.wa = static_cast<double>(correct) / static_cast<double>(total);
  m.ua = recall_sum / static_cast<double>(present);
  return m;
}

EvaluationReport report_from_confusion(std::vector<std::string> classes, ConfusionMatrix confusion) {
  if (classes.size() != confusion.size()) throw Error("report: class count does not match confusion matrix");
  EvaluationReport r;
  const Metrics m = compute_metrics(confusion);
  r.classes = std::move(classes);
  r.confusion = std::move(confusion);
  r.wa = m.wa;
  r.ua = m.ua;
  r.per_class_recall = m.recall;
  return r;
}

nlohmann::json to_json(const EvaluationReport& r) {
  nlohmann::json preds = nlohmann::json::array();
  for (const auto& p : r.predictions) preds.push_back({{"id", p.id}, {"true", p.truth}, {"predicted", p.predicted}});
  nlohmann::json recall = nlohmann::json::object();
  for (std::size_t i = 0; i < r.classes.size(); ++i) recall[r.classes[i]] = r.per_class_recall[i];
  return {{"classes", r.classes},
          {"confusion", r.confusion},
          {"wa", r.wa},
          {"ua", r.ua},
          {"per_class_recall", recall},
          {"dims_before", r.dims_before},
          {"dims_after", r.dims_after},
          {"dims_after_range", {r.dims_after_min, r.dims_after_max}},
          {"config", r.config},
          {"predictions", preds},
          {"warnings", r.warnings},
          {"skipped", r.skipped}};
}

std::vector<RecallChange> ua_delta_report(const EvaluationReport& baseline,
                                          const EvaluationReport& candidate) {
  if (baseline.classes != candidate.classes) throw Error("ua_delta_report: class sets differ");
  std::vector<RecallChange> out;
  for (std::size_t i = 0; i < baseline.classes.size(); ++i) {
    const double b = baseline.per_class_recall.at(i);
    const double c = candidate.per_class_recall.at(i);
    out.push_back({baseline.classes[i], b, c, c - b});
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const RecallChange& x, const RecallChange& y) { return x.change > y.change; });
  return out;
}

FeatureTable extract_features(const DatasetManifest& manifest, const ExtractionConfig& config,
                              bool skip_bad, std::ostream* log) {
  config.validate();
  FeatureTable table;
  table.layout = std::make_shared<const FeatureLayout>(build_layout(config));
  table.config_hash = config.hash_hex();
  const auto ids = utterance_ids(manifest);
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < manifest.size(); ++i) {
    const auto& entry = manifest.entries[i];
    try {
      AudioClip clip = load_wav(entry.path);
      clip.source_id = ids[i];
      auto fv = assemble(clip, config, table.layout);
      rows.push_back(std::move(fv.values));
      table.ids.push_back(ids[i]);
      table.labels.push_back(manifest.class_index(entry.label));
    } catch (const Error& e) {
      if (!skip_bad) throw Error("extraction failed for '" + entry.path.string() + "': " + e.what());
      table.skipped.push_back(entry.path.string());
      if (log) *log << "warning: skipping " << entry.path.string() << ": " << e.what() << '\n';
    }
  }
  table.X.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(table.layout->size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    table.X.row(static_cast<Eigen::Index>(r)) =
        Eigen::Map<const Eigen::RowVectorXd>(rows[r].data(), static_cast<Eigen::Index>(rows[r].size()));
  }
  return table;
}

FeatureCacheData to_cache(const FeatureTable& table, const DatasetManifest& manifest) {
  FeatureCacheData d;
  d.ids = table.ids;
  for (int l : table.labels) d.labels.push_back(manifest.classes.at(static_cast<std::size_t>(l)));
  d.config_hash = table.config_hash;
  d.names = table.layout->names;
  d.values = table.X;
  return d;
}

FeatureTable from_cache(const FeatureCacheData& data, const DatasetManifest& manifest,
                        const ExtractionConfig& config) {
  FeatureTable t;
  t.layout = std::make_shared<const FeatureLayout>(build_layout(config));
  t.config_hash = config.hash_hex();
  if (!data.ids.empty() && data.config_hash != t.config_hash) {
    throw Error("feature cache: config hash " + data.config_hash + " does not match " + t.config_hash);
  }
  if (data.names != t.layout->names) throw Error("feature cache: column layout does not match config");
  const auto ids = utterance_ids(manifest);
  std::map<std::string, std::size_t> row_of;
  for (std::size_t r = 0; r < data.ids.size(); ++r) row_of[data.ids[r]] = r;
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < manifest.size(); ++i) {
    const auto it = row_of.find(ids[i]);
    if (it == row_of.end()) {
      t.skipped.push_back(manifest.entries[i].path.string());
      continue;
    }
    if (data.labels[it->second] != manifest.entries[i].label) {
      throw Error("feature cache: label of '" + ids[i] + "' differs from manifest");
    }
    rows.push_back(it->second);
    t.ids.push_back(ids[i]);
    t.labels.push_back(manifest.class_index(manifest.entries[i].label));
  }
  t.X = select_rows(data.values, rows);
  return t;
}

EvaluationReport loocv_features(const FeatureTable& table, const std::vector<std::string>& classes,
                                const ExperimentConfig& config, const LoocvHooks& hooks,
                                std::ostream* log) {
  config.validate();
  const std::size_t n = static_cast<std::size_t>(table.X.rows());
  const std::size_t k = classes.size();
  if (table.labels.size() != n || table.ids.size() != n) throw Error("loocv: table shape mismatch");
  if (n < 2) throw Error("loocv: need at least 2 utterances");

  EvaluationReport report;
  report.classes = classes;
  report.confusion.assign(k, std::vector<std::size_t>(k, 0));
  report.dims_before = static_cast<std::size_t>(table.X.cols());
  report.config = to_json(config);
  report.config["extraction_hash"] = table.config_hash;
  report.skipped = table.skipped;

  std::vector<std::size_t> counts(k, 0);
  for (int l : table.labels) {
    if (l < 0 || static_cast<std::size_t>(l) >= k) throw Error("loocv: label index out of range");
    ++counts[static_cast<std::size_t>(l)];
  }
  std::size_t present = 0;
  for (std::size_t c = 0; c < k; ++c) {
    if (counts[c] > 0) ++present;
    if (counts[c] == 1) {
      report.warnings.push_back("class '" + classes[c] +
                                "' has a single instance; its fold trains without that class");
      if (log) *log << "warning: " << report.warnings.back() << '\n';
    }
  }
  if (present < 2) throw Error("loocv: need at least 2 classes present");

  SvmOptions svm;
  svm.C = config.svm_c;

  auto preprocess = [&](std::span<const std::size_t> fit_rows, std::optional<std::size_t> held_out) {
    if (hooks.on_fit) hooks.on_fit(held_out, fit_rows);
    const ZScoreModel z = zscore_fit(select_rows(table.X, fit_rows));
    Eigen::MatrixXd out = z.apply_rows(table.X);
    if (config.pca) {
      if (hooks.on_fit) hooks.on_fit(held_out, fit_rows);
      const PcaModel p = pca_fit(select_rows(out, fit_rows), *config.pca);
      out = p.transform_rows(out);
    }
    return out;
  };

  std::vector<std::size_t> all(n);
  for (std::size_t i = 0; i < n; ++i) all[i] = i;

  Eigen::MatrixXd global_features;
  Eigen::MatrixXd global_gram;
  if (config.scope == PreprocessingScope::Global) {
    global_features = preprocess(all, std::nullopt);
    global_gram = global_features * global_features.transpose();
  }

  std::map<std::size_t, std::size_t> dims_seen;
  std::vector<std::size_t> train;
  train.reserve(n - 1);
  for (std::size_t u = 0; u < n; ++u) {
    train.clear();
    for (std::size_t i = 0; i < n; ++i) {
      if (i != u) train.push_back(i);
    }

    Eigen::MatrixXd features;
    Eigen::MatrixXd train_x;
    Eigen::MatrixXd gram;
    if (config.scope == PreprocessingScope::Global) {
      train_x = select_rows(global_features, train);
      gram.resize(static_cast<Eigen::Index>(train.size()), static_cast<Eigen::Index>(train.size()));
      for (std::size_t r = 0; r < train.size(); ++r) {
        for (std::size_t c = 0; c < train.size(); ++c) {
          gram(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
              global_gram(static_cast<Eigen::Index>(train[r]), static_cast<Eigen::Index>(train[c]));
        }
      }
    } else {
      features = preprocess(train, u);
      train_x = select_rows(features, train);
      gram = train_x * train_x.transpose();
    }
    const Eigen::VectorXd test_x = config.scope == PreprocessingScope::Global
                                       ? Eigen::VectorXd(global_features.row(static_cast<Eigen::Index>(u)).transpose())
                                       : Eigen::VectorXd(features.row(static_cast<Eigen::Index>(u)).transpose());
    ++dims_seen[static_cast<std::size_t>(train_x.cols())];

    std::vector<int> train_labels;
    train_labels.reserve(train.size());
    for (std::size_t r : train) train_labels.push_back(table.labels[r]);
    const MulticlassSvmModel model = train_multiclass_gram(train_x, gram, train_labels, svm);
    const int predicted = model.predict(test_x);

    const auto truth = static_cast<std::size_t>(table.labels[u]);
    ++report.confusion[truth][static_cast<std::size_t>(predicted)];
    report.predictions.push_back({table.ids[u], classes[truth], classes[static_cast<std::size_t>(predicted)]});
    if (log && ((u + 1) % 50 == 0 || u + 1 == n)) *log << "  fold " << (u + 1) << "/" << n << '\n';
  }

  const Metrics m = compute_metrics(report.confusion);
  report.wa = m.wa;
  report.ua = m.ua;
  report.per_class_recall = m.recall;
  std::size_t best_count = 0;
  for (const auto& [dims, count] : dims_seen) {
    if (count > best_count) {
      best_count = count;
      report.dims_after = dims;
    }
  }
  report.dims_after_min = dims_seen.begin()->first;
  report.dims_after_max = dims_seen.rbegin()->first;
  return report;
}

EvaluationReport loocv(const DatasetManifest& manifest, const ExperimentConfig& config, bool skip_bad,
                       std::ostream* log) {
  const FeatureTable table = extract_features(manifest, config.extraction, skip_bad, log);
  return loocv_features(table, manifest.classes, config, {}, log);
}

GridReport run_experiment_grid(const DatasetManifest& manifest, const std::vector<ExperimentConfig>& grid,
                               const GridOptions& options) {
  GridReport out;
  std::map<std::string, FeatureTable> tables;
  for (const auto& config : grid) {
    config.validate();
    const std::string hash = config.extraction.hash_hex();
    auto it = tables.find(hash);
    if (it == tables.end()) {
      std::optional<FeatureTable> table;
      std::filesystem::path cache_file;
      if (options.cache_dir) {
        cache_file = *options.cache_dir / ("features-" + hash + ".csv");
        if (std::filesystem::exists(cache_file)) {
          if (options.log) *options.log << "reusing feature cache " << cache_file.string() << '\n';
          table = from_cache(read_feature_cache(cache_file), manifest, config.extraction);
        }
      }
      if (!table) {
        if (options.log) *options.log << "extracting features for " << config.extraction.canonical() << '\n';
        table = extract_features(manifest, config.extraction, options.skip_bad, options.log);
        if (options.cache_dir) {
          std::filesystem::create_directories(*options.cache_dir);
          write_feature_cache(cache_file, to_cache(*table, manifest));
        }
      }
      it = tables.emplace(hash, std::move(*table)).first;
    }
    if (options.log) *options.log << "evaluating " << (config.name.empty() ? hash : config.name) << '\n';
    out.rows.push_back({config, loocv_features(it->second, manifest.classes, config, {}, options.log)});
  }
  return out;
}

double relative_ua_error_reduction(double baseline_ua, double candidate_ua) {
  const double base_err = 1.0 - baseline_ua;
  if (!(base_err > 0.0)) throw Error("relative_ua_error_reduction: baseline UA must be below 1");
  return (base_err - (1.0 - candidate_ua)) / base_err;
}

nlohmann::json to_json(const GridReport& report) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : report.rows) {
    nlohmann::json r = {{"config", row.report.config},
                        {"wa", row.report.wa},
                        {"ua", row.report.ua},
                        {"dims_before", row.report.dims_before},
                        {"dims_after", row.report.dims_after},
                        {"report", to_json(row.report)}};
    if (!report.rows.empty() && report.rows.front().report.ua < 1.0) {
      r["relative_ua_error_reduction_vs_first"] =
          relative_ua_error_reduction(report.rows.front().report.ua, row.report.ua);
    }
    rows.push_back(std::move(r));
  }
  return {{"results", rows}};
}

std::string format_report(const EvaluationReport& r) {
  std::ostringstream os;
  std::size_t width = 8;
  for (const auto& c : r.classes) width = std::max(width, c.size() + 2);
  os << pad("", width);
  for (const auto& c : r.classes) os << lpad(c, width);
  os << '\n';
  for (std::size_t i = 0; i < r.classes.size(); ++i) {
    std::size_t row_sum = 0;
    for (std::size_t v : r.confusion[i]) row_sum += v;
    os << pad(r.classes[i], width);
    for (std::size_t j = 0; j < r.classes.size(); ++j) {
      const double share = row_sum ? static_cast<double>(r.confusion[i][j]) / static_cast<double>(row_sum) : 0.0;
      os << lpad(percent(share), width);
    }
    os << '\n';
  }
  os << "WA " << percent(r.wa) << "%  UA " << percent(r.ua) << "%  dims " << r.dims_before;
  if (r.dims_after != r.dims_before) os << " -> " << r.dims_after;
  os << '\n';
  return os.str();
}

std::string format_grid(const GridReport& report) {
  std::ostringstream os;
  os << pad("No.", 5) << pad("Config", 22) << pad("Feature dimensions", 22) << lpad("WA (%)", 9)
     << lpad("UA (%)", 9) << '\n';
  for (std::size_t i = 0; i < report.rows.size(); ++i) {
    const auto& row = report.rows[i];
    std::string dims = std::to_string(row.report.dims_before);
    if (row.report.dims_after != row.report.dims_before) dims += "->" + std::to_string(row.report.dims_after);
    const std::string name = row.config.name.empty() ? row.config.extraction.hash_hex() : row.config.name;
    os << pad(std::to_string(i + 1), 5) << pad(name, 22) << pad(dims, 22) << lpad(percent(row.report.wa), 9)
       << lpad(percent(row.report.ua), 9) << '\n';
  }
  return os.str();
}

std::string format_recall_changes(const std::vector<RecallChange>& changes) {
  std::ostringstream os;
  os << pad("Emotion", 12) << lpad("Baseline", 10) << lpad("Candidate", 11) << lpad("Change", 9) << '\n';
  for (const auto& c : changes) {
    os << pad(c.label, 12) << lpad(percent(c.baseline), 10) << lpad(percent(c.candidate), 11)
       << lpad(signed_percent(c.change), 9) << '\n';
  }
  return os.str();
}

}  // namespace segser
