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
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

namespace segser {

struct SvmOptions {
  double C = 1.0;
  /// Stop when the maximal KKT violation m(a) - M(a) falls below tol.
  double tol = 1e-3;
  /// Cap on pair updates.
  std::size_t max_iterations = 100000;
  /// Keep the dual objective after every update (diagnostics only).
  bool record_objective = false;
};

/// Linear decision function d(x) = w.x + b.
struct BinarySvmModel {
  Eigen::VectorXd w;
  double b = 0.0;
  double C = 1.0;
  bool converged = false;
  std::size_t iterations = 0;

  double decision(const Eigen::VectorXd& x) const;
  /// +1 when d(x) > 0, otherwise -1.
  int predict(const Eigen::VectorXd& x) const { return decision(x) > 0.0 ? 1 : -1; }
};

struct BinaryTrainResult {
  BinarySvmModel model;
  Eigen::VectorXd alpha;
  double dual_objective = 0.0;
  std::vector<double> objective_trace;
};

/// Soft-margin dual solved by SMO with second-order working-set selection.
/// Rows of X are examples, y holds +1/-1.
BinaryTrainResult train_binary_detailed(const Eigen::MatrixXd& X, std::span<const int> y,
                                        const SvmOptions& options = {});

BinarySvmModel train_binary(const Eigen::MatrixXd& X, std::span<const int> y,
                            const SvmOptions& options = {});

/// Same solver on a precomputed Gram matrix K (K_ij = x_i.x_j). Only alpha,
/// b and the bookkeeping fields are filled; the caller forms w.
BinaryTrainResult train_binary_gram(const Eigen::MatrixXd& K, std::span<const int> y,
                                    const SvmOptions& options = {});

struct PairwiseModel {
  /// Positions in MulticlassSvmModel::classes; `first` < `second`.
  /// `first` is the -1 side, `second` the +1 side.
  std::size_t first = 0;
  std::size_t second = 0;
  BinarySvmModel model;
};

struct Vote {
  std::vector<std::size_t> votes;
  std::vector<double> margin_sum;
  /// Winning position in `classes`.
  std::size_t winner = 0;
};

/// One-vs-one ensemble over sorted integer class labels.
struct MulticlassSvmModel {
  std::vector<int> classes;
  std::vector<PairwiseModel> pairwise;

  std::size_t dimension() const;
  /// Most votes wins; ties go to the larger sum of |d(x)| over the votes a
  /// class collected, then to the lower class position.
  Vote vote(const Eigen::VectorXd& x) const;
  int predict(const Eigen::VectorXd& x) const;
};

MulticlassSvmModel train_multiclass(const Eigen::MatrixXd& X, std::span<const int> labels,
                                    const SvmOptions& options = {});

/// Same as train_multiclass with the full Gram matrix of X precomputed.
MulticlassSvmModel train_multiclass_gram(const Eigen::MatrixXd& X, const Eigen::MatrixXd& K,
                                         std::span<const int> labels,
                                         const SvmOptions& options = {});

nlohmann::json to_json(const MulticlassSvmModel& model);
MulticlassSvmModel multiclass_from_json(const nlohmann::json& j);

}  // namespace segser
