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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include "segser/classifier.hpp"
#include "segser/error.hpp"
#include "segser/evaluation.hpp"
#include "segser/preprocess.hpp"
#include "support/reference_tables.hpp"
#include "support/synth_corpus.hpp"

using namespace segser;
using doctest::Approx;
namespace fs = std::filesystem;

namespace {

FeatureTable blob_table(std::uint64_t seed, int classes, int per, int dims, double sd, double spacing) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::MatrixXd centers(classes, dims);
  for (int c = 0; c < classes; ++c)
    for (int d = 0; d < dims; ++d) centers(c, d) = spacing * g(rng);
  FeatureTable t;
  t.X.resize(classes * per, dims);
  int r = 0;
  for (int c = 0; c < classes; ++c) {
    for (int i = 0; i < per; ++i, ++r) {
      for (int d = 0; d < dims; ++d) t.X(r, d) = centers(c, d) + sd * g(rng);
      t.labels.push_back(c);
      t.ids.push_back("u" + std::to_string(r));
    }
  }
  t.config_hash = "test";
  return t;
}

std::vector<std::string> class_names(int k) {
  std::vector<std::string> v;
  for (int c = 0; c < k; ++c) v.push_back("k" + std::to_string(c));
  return v;
}

// Leave-one-out nearest class centroid on raw features.
double nearest_centroid_wa(const FeatureTable& t, int classes) {
  std::size_t correct = 0;
  const auto n = t.X.rows();
  for (Eigen::Index u = 0; u < n; ++u) {
    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(classes, t.X.cols());
    std::vector<int> counts(static_cast<std::size_t>(classes), 0);
    for (Eigen::Index i = 0; i < n; ++i) {
      if (i == u) continue;
      sums.row(t.labels[static_cast<std::size_t>(i)]) += t.X.row(i);
      ++counts[static_cast<std::size_t>(t.labels[static_cast<std::size_t>(i)])];
    }
    int best = -1;
    double best_d = 0;
    for (int c = 0; c < classes; ++c) {
      if (counts[static_cast<std::size_t>(c)] == 0) continue;
      const double d = (t.X.row(u) - sums.row(c) / counts[static_cast<std::size_t>(c)]).squaredNorm();
      if (best < 0 || d < best_d) {
        best = c;
        best_d = d;
      }
    }
    correct += best == t.labels[static_cast<std::size_t>(u)];
  }
  return static_cast<double>(correct) / static_cast<double>(n);
}

ExperimentConfig plain_config(std::optional<double> pca = std::nullopt) {
  ExperimentConfig c;
  c.pca = pca;
  return c;
}

}  // namespace

TEST_CASE("metric examples") {
  const auto a = compute_metrics({{9, 1}, {5, 5}});
  CHECK(a.wa == Approx(0.7));
  CHECK(a.ua == Approx(0.7));
  CHECK(a.recall[0] == Approx(0.9));
  CHECK(a.recall[1] == Approx(0.5));

  const auto id = compute_metrics({{4, 0, 0}, {0, 2, 0}, {0, 0, 9}});
  CHECK(id.wa == 1.0);
  CHECK(id.ua == 1.0);

  // Empty rows are left out of UA.
  const auto e = compute_metrics({{3, 1, 0}, {0, 0, 0}, {0, 0, 2}});
  CHECK(e.ua == Approx((0.75 + 1.0) / 2));
  CHECK(e.recall[1] == 0.0);

  CHECK_THROWS_AS(compute_metrics({{0, 0}, {0, 0}}), Error);
  CHECK_THROWS_AS(compute_metrics({{1, 0}}), Error);
}

TEST_CASE("metrics are invariant to relabelling and duplication") {
  std::mt19937_64 rng(2);
  std::uniform_int_distribution<int> cell(0, 9);
  for (int trial = 0; trial < 100; ++trial) {
    ConfusionMatrix m(5, std::vector<std::size_t>(5));
    for (auto& row : m)
      for (auto& v : row) v = static_cast<std::size_t>(cell(rng));
    for (auto& row : m) row[0] += 1;
    std::vector<std::size_t> perm(5);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    ConfusionMatrix p(5, std::vector<std::size_t>(5));
    for (std::size_t i = 0; i < 5; ++i)
      for (std::size_t j = 0; j < 5; ++j) p[perm[i]][perm[j]] = m[i][j];
    const auto a = compute_metrics(m), b = compute_metrics(p);
    CHECK(a.wa == Approx(b.wa));
    CHECK(a.ua == Approx(b.ua));
    auto dup = m;
    for (auto& v : dup[2]) v *= 3;
    CHECK(compute_metrics(dup).ua == Approx(a.ua));
  }
}

TEST_CASE("reference confusion matrices reproduce the reference WA and UA") {
  const auto base = compute_metrics(testing::counts_from_percent(testing::kBaselinePercent));
  CHECK(std::abs(100.0 * base.ua - 81.53) <= 0.05);
  CHECK(std::abs(100.0 * base.wa - 82.80) <= 0.05);
  const auto best = compute_metrics(testing::counts_from_percent(testing::kBestPercent));
  CHECK(std::abs(100.0 * best.ua - 84.87) <= 0.05);
  CHECK(std::abs(100.0 * best.wa - 85.42) <= 0.05);
  // The stated relative error reduction.
  CHECK(std::abs(100.0 * relative_ua_error_reduction(0.8153, 0.8487) - 18.08) <= 0.05);
}

TEST_CASE("recall change report") {
  const auto base = report_from_confusion(testing::table_classes(), testing::counts_from_percent(testing::kBaselinePercent));
  const auto best = report_from_confusion(testing::table_classes(), testing::counts_from_percent(testing::kBestPercent));
  const auto changes = ua_delta_report(base, best);
  const auto& expected = testing::reference_recall_changes();
  REQUIRE(changes.size() == expected.size());
  for (std::size_t i = 0; i < changes.size(); ++i) {
    CHECK(changes[i].label == expected[i].first);
    CHECK(std::abs(100.0 * changes[i].change - expected[i].second) <= 0.01);
  }
  for (const auto& c : ua_delta_report(base, base)) CHECK(c.change == 0.0);
  const auto back = ua_delta_report(best, base);
  for (const auto& c : back) {
    const auto it = std::find_if(changes.begin(), changes.end(), [&](const RecallChange& x) { return x.label == c.label; });
    CHECK(c.change == -it->change);
  }
  auto other = base;
  other.classes[0] = "joy";
  CHECK_THROWS_AS(ua_delta_report(base, other), Error);
  const auto text = format_recall_changes(changes);
  CHECK(text.find("+6.52") != std::string::npos);
  CHECK(text.find("-2.36") != std::string::npos);
}

TEST_CASE("separable toy LOOCV") {
  FeatureTable t;
  t.X.resize(6, 2);
  t.X << 0, 0, 0.2, 0.1, -0.1, 0.2, 5, 5, 5.2, 4.9, 4.8, 5.1;
  t.labels = {0, 0, 0, 1, 1, 1};
  t.ids = {"a", "b", "c", "d", "e", "f"};
  const auto r = loocv_features(t, {"x", "y"}, plain_config());
  CHECK(r.wa == 1.0);
  CHECK(r.ua == 1.0);
  CHECK(r.confusion == ConfusionMatrix{{3, 0}, {0, 3}});
  CHECK(r.predictions.size() == 6);
  CHECK(r.predictions[4].id == "e");
  CHECK(r.predictions[4].predicted == "y");
  CHECK(r.dims_before == 2);
  CHECK(r.dims_after == 2);
}

TEST_CASE("seven-blob LOOCV agrees with a nearest-centroid oracle") {
  const auto t = blob_table(13, 7, 20, 6, 0.3, 3.0);
  const double oracle = nearest_centroid_wa(t, 7);
  const auto r = loocv_features(t, class_names(7), plain_config());
  CHECK(oracle >= 0.95);
  CHECK(r.wa >= 0.95);
  CHECK(std::abs(r.wa - oracle) <= 0.05);
  for (std::size_t c = 0; c < 7; ++c) {
    CHECK(std::accumulate(r.confusion[c].begin(), r.confusion[c].end(), std::size_t{0}) == 20);
  }
}

TEST_CASE("single-instance class warns and is misclassified") {
  auto t = blob_table(3, 3, 6, 3, 0.2, 4.0);
  // Keep one member of class 2.
  t.X.conservativeResize(13, Eigen::NoChange);
  t.labels.resize(13);
  t.ids.resize(13);
  const auto r = loocv_features(t, class_names(3), plain_config());
  REQUIRE(r.warnings.size() == 1);
  CHECK(r.warnings[0].find("k2") != std::string::npos);
  CHECK(r.confusion[2][2] == 0);
  CHECK(r.confusion[2][0] + r.confusion[2][1] == 1);
}

TEST_CASE("per-fold fits never see the held-out row") {
  const auto t = blob_table(5, 3, 8, 10, 1.0, 2.0);
  std::size_t fits = 0;
  LoocvHooks hooks;
  hooks.on_fit = [&](std::optional<std::size_t> held_out, std::span<const std::size_t> rows) {
    REQUIRE(held_out.has_value());
    CHECK(rows.size() == static_cast<std::size_t>(t.X.rows()) - 1);
    CHECK(std::find(rows.begin(), rows.end(), *held_out) == rows.end());
    ++fits;
  };
  loocv_features(t, class_names(3), plain_config(0.9), hooks);
  CHECK(fits == 2 * static_cast<std::size_t>(t.X.rows()));

  // Global scope fits once, on everything.
  auto global = plain_config(0.9);
  global.scope = PreprocessingScope::Global;
  std::size_t global_fits = 0;
  hooks.on_fit = [&](std::optional<std::size_t> held_out, std::span<const std::size_t> rows) {
    CHECK_FALSE(held_out.has_value());
    CHECK(rows.size() == static_cast<std::size_t>(t.X.rows()));
    ++global_fits;
  };
  loocv_features(t, class_names(3), global, hooks);
  CHECK(global_fits == 2);
}

TEST_CASE("each fold equals a hand-composed fold") {
  const auto t = blob_table(21, 3, 6, 8, 1.2, 1.5);
  const auto config = plain_config(0.95);
  const auto r = loocv_features(t, class_names(3), config);
  const auto n = t.X.rows();
  for (Eigen::Index u = 0; u < n; ++u) {
    Eigen::MatrixXd train(n - 1, t.X.cols());
    std::vector<int> labels;
    for (Eigen::Index i = 0, k = 0; i < n; ++i) {
      if (i == u) continue;
      train.row(k++) = t.X.row(i);
      labels.push_back(t.labels[static_cast<std::size_t>(i)]);
    }
    const auto z = zscore_fit(train);
    const auto p = pca_fit(z.apply_rows(train), 0.95);
    const auto model = train_multiclass(p.transform_rows(z.apply_rows(train)), labels);
    const int predicted = model.predict(p.transform(z.apply(t.X.row(u).transpose())));
    CHECK(r.predictions[static_cast<std::size_t>(u)].predicted == class_names(3)[static_cast<std::size_t>(predicted)]);
  }
  CHECK(r.dims_after_min <= r.dims_after);
  CHECK(r.dims_after <= r.dims_after_max);
  CHECK(r.dims_after_max < r.dims_before);
}

TEST_CASE("report JSON shape") {
  const auto t = blob_table(8, 2, 4, 2, 0.1, 5.0);
  const auto r = loocv_features(t, {"p", "q"}, plain_config());
  const auto j = to_json(r);
  for (const char* key : {"confusion", "wa", "ua", "per_class_recall", "dims_before", "dims_after", "config", "predictions"}) {
    CHECK(j.contains(key));
  }
  CHECK(j["per_class_recall"].contains("q"));
  CHECK(j["predictions"][0].contains("true"));
  CHECK(j["config"]["preprocessing_scope"] == "per-fold");
  CHECK(format_report(r).find("WA 100.00%") != std::string::npos);
}

TEST_CASE("end-to-end corpus, cache and grid determinism") {
  const fs::path dir = fs::temp_directory_path() / "segser_test_evaluation";
  fs::remove_all(dir);
  const auto manifest_path = testing::write_synth_corpus(dir / "corpus", 4, 3, 3);
  const auto manifest = parse_manifest(manifest_path);
  REQUIRE(manifest.size() == 12);

  ExtractionConfig ex;
  ex.scheme = SegmentationScheme::rti(3);
  ex.include_hist = true;
  const auto table = extract_features(manifest, ex);
  CHECK(table.X.cols() == 1179);
  CHECK(table.ids.front() == "c0_0");

  // Cache round trip is bit exact.
  write_feature_cache(dir / "cache.csv", to_cache(table, manifest));
  const auto cached = from_cache(read_feature_cache(dir / "cache.csv"), manifest, ex);
  CHECK(cached.X == table.X);
  CHECK(cached.labels == table.labels);
  auto other = ex;
  other.hist.h = 25.0;
  CHECK_THROWS_AS(from_cache(read_feature_cache(dir / "cache.csv"), manifest, other), Error);

  std::vector<ExperimentConfig> grid(2);
  grid[0].name = "gti";
  grid[1].name = "rti3+hist";
  grid[1].extraction = ex;
  GridOptions with_cache;
  with_cache.cache_dir = dir / "features";
  const auto first = to_json(run_experiment_grid(manifest, grid, with_cache)).dump(2);
  CHECK(fs::exists(dir / "features" / ("features-" + ex.hash_hex() + ".csv")));
  const auto second = to_json(run_experiment_grid(manifest, grid, with_cache)).dump(2);
  const auto fresh = to_json(run_experiment_grid(manifest, grid)).dump(2);
  CHECK(first == second);
  CHECK(first == fresh);
  CHECK(run_experiment_grid(manifest, {}).rows.empty());

  const auto direct = loocv(manifest, grid[1]);
  CHECK(direct.confusion == run_experiment_grid(manifest, {grid[1]}).rows[0].report.confusion);
}

TEST_CASE("bad utterances abort or are skipped") {
  const fs::path dir = fs::temp_directory_path() / "segser_test_evaluation_bad";
  fs::remove_all(dir);
  const auto manifest_path = testing::write_synth_corpus(dir, 3, 4, 2);
  auto manifest = parse_manifest(manifest_path);
  std::ofstream(dir / "broken.wav") << "not audio";
  manifest.entries.push_back({dir / "broken.wav", "c0", "spk9"});
  ExtractionConfig ex;
  try {
    extract_features(manifest, ex);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("broken.wav") != std::string::npos);
  }
  std::ostringstream log;
  const auto t = extract_features(manifest, ex, true, &log);
  CHECK(t.X.rows() == 6);
  REQUIRE(t.skipped.size() == 1);
  CHECK(log.str().find("skipping") != std::string::npos);
  const auto r = loocv(manifest, ExperimentConfig{}, true);
  CHECK(r.skipped.size() == 1);
  CHECK(std::accumulate(r.confusion[0].begin(), r.confusion[0].end(), std::size_t{0}) == 3);
}
