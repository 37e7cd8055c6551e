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

#include <Eigen/Dense>
#include <json.hpp>

namespace segser {

/// Per-dimension population mean and standard deviation.
struct ZScoreModel {
  Eigen::VectorXd mu;
  Eigen::VectorXd sigma;

  std::size_t dimension() const { return static_cast<std::size_t>(mu.size()); }
  /// (x - mu) / sigma; dimensions with sigma == 0 map to 0.
  Eigen::VectorXd apply(const Eigen::VectorXd& x) const;
  /// Row-wise apply.
  Eigen::MatrixXd apply_rows(const Eigen::MatrixXd& X) const;
};

/// Rows of X are observations.
ZScoreModel zscore_fit(const Eigen::MatrixXd& X);

/// Principal components of mean-centred data, largest variance first.
struct PcaModel {
  Eigen::VectorXd mean;
  /// k x d, orthonormal rows. Each row's largest-magnitude entry is positive.
  Eigen::MatrixXd components;
  /// k leading eigenvalue shares.
  Eigen::VectorXd explained_ratio;
  /// Shares of the full spectrum (zero-padded past the data rank); sums to 1.
  Eigen::VectorXd spectrum_ratio;
  /// Variances along the k retained directions.
  Eigen::VectorXd eigenvalues;
  double threshold = 0.99;

  std::size_t k() const { return static_cast<std::size_t>(components.rows()); }
  std::size_t dimension() const { return static_cast<std::size_t>(mean.size()); }

  Eigen::VectorXd transform(const Eigen::VectorXd& x) const;
  Eigen::MatrixXd transform_rows(const Eigen::MatrixXd& X) const;
  /// Maps a reduced vector back into feature space.
  Eigen::VectorXd reconstruct(const Eigen::VectorXd& z) const;
};

/// PCA over the population covariance (1/N) of X's rows. Retains the
/// smallest k whose cumulative share reaches `threshold`. When there are
/// fewer rows than columns the decomposition is done on the N x N Gram
/// matrix instead of the d x d covariance; both give the same subspace.
PcaModel pca_fit(const Eigen::MatrixXd& X, double threshold = 0.99);

/// Reference route: always decomposes the d x d covariance.
PcaModel pca_fit_covariance(const Eigen::MatrixXd& X, double threshold = 0.99);

nlohmann::json to_json(const ZScoreModel& model);
nlohmann::json to_json(const PcaModel& model);
ZScoreModel zscore_from_json(const nlohmann::json& j);
PcaModel pca_from_json(const nlohmann::json& j);

}  // namespace segser
