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

#include "segser/preprocess.hpp"

#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "segser/error.hpp"

namespace segser {
namespace {

void require_finite(const Eigen::MatrixXd& X, const char* who) {
  if (!X.allFinite()) throw Error(std::string(who) + ": non-finite input");
}

void require_dimension(std::size_t got, std::size_t want, const char* who) {
  if (got != want) {
    throw Error(std::string(who) + ": dimension " + std::to_string(got) + " does not match model " +
                std::to_string(want));
  }
}

nlohmann::json vector_json(const Eigen::VectorXd& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

Eigen::VectorXd vector_from(const nlohmann::json& j) {
  const auto v = j.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

// Eigen's solver returns ascending eigenvalues; this takes the relevant
// columns in descending order along with their values.
struct Spectrum {
  Eigen::VectorXd values;   // descending, clamped at 0
  Eigen::MatrixXd vectors;  // d x r, columns match values
};

void fix_signs(Eigen::MatrixXd& rows) {
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    Eigen::Index arg = 0;
    rows.row(i).cwiseAbs().maxCoeff(&arg);
    if (rows(i, arg) < 0.0) rows.row(i) *= -1.0;
  }
}

std::size_t retained_count(const Eigen::VectorXd& shares, double threshold) {
  // Shares below this are numerical noise on rank-deficient data.
  constexpr double kNoise = 1e-12;
  std::size_t positive = 0;
  for (Eigen::Index i = 0; i < shares.size(); ++i) {
    if (shares[i] > kNoise) ++positive;
  }
  double cumulative = 0.0;
  for (std::size_t k = 0; k < positive; ++k) {
    cumulative += shares[static_cast<Eigen::Index>(k)];
    if (cumulative >= threshold - 1e-12) return k + 1;
  }
  return std::max<std::size_t>(positive, 1);
}

PcaModel finish(const Eigen::VectorXd& mean, const Spectrum& spectrum, std::size_t d,
                double threshold) {
  const double total = spectrum.values.sum();
  PcaModel model;
  model.mean = mean;
  model.threshold = threshold;
  model.spectrum_ratio = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(d));
  if (total > 0.0) {
    model.spectrum_ratio.head(spectrum.values.size()) = spectrum.values / total;
  }
  const auto k = static_cast<Eigen::Index>(
      total > 0.0 ? retained_count(model.spectrum_ratio, threshold) : 0);
  model.components = spectrum.vectors.leftCols(k).transpose();
  fix_signs(model.components);
  model.explained_ratio = model.spectrum_ratio.head(k);
  model.eigenvalues = spectrum.values.head(k);
  return model;
}

void check_fit_input(const Eigen::MatrixXd& X, double threshold) {
  if (X.rows() < 2) throw Error("pca_fit: need at least 2 rows");
  if (!(threshold > 0.0 && threshold <= 1.0)) throw Error("pca_fit: threshold must be in (0, 1]");
  require_finite(X, "pca_fit");
}

}  // namespace

Eigen::VectorXd ZScoreModel::apply(const Eigen::VectorXd& x) const {
  require_dimension(static_cast<std::size_t>(x.size()), dimension(), "zscore_apply");
  Eigen::VectorXd out(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    out[i] = sigma[i] > 0.0 ? (x[i] - mu[i]) / sigma[i] : 0.0;
  }
  return out;
}

Eigen::MatrixXd ZScoreModel::apply_rows(const Eigen::MatrixXd& X) const {
  require_dimension(static_cast<std::size_t>(X.cols()), dimension(), "zscore_apply");
  Eigen::MatrixXd out(X.rows(), X.cols());
  for (Eigen::Index r = 0; r < X.rows(); ++r) out.row(r) = apply(X.row(r).transpose()).transpose();
  return out;
}

ZScoreModel zscore_fit(const Eigen::MatrixXd& X) {
  if (X.rows() < 1 || X.cols() < 1) throw Error("zscore_fit: empty matrix");
  require_finite(X, "zscore_fit");
  ZScoreModel model;
  model.mu = X.colwise().mean().transpose();
  const Eigen::MatrixXd centred = X.rowwise() - model.mu.transpose();
  model.sigma = (centred.colwise().squaredNorm() / static_cast<double>(X.rows())).cwiseSqrt().transpose();
  return model;
}

Eigen::VectorXd PcaModel::transform(const Eigen::VectorXd& x) const {
  require_dimension(static_cast<std::size_t>(x.size()), dimension(), "pca_transform");
  return components * (x - mean);
}

Eigen::MatrixXd PcaModel::transform_rows(const Eigen::MatrixXd& X) const {
  require_dimension(static_cast<std::size_t>(X.cols()), dimension(), "pca_transform");
  return (X.rowwise() - mean.transpose()) * components.transpose();
}

Eigen::VectorXd PcaModel::reconstruct(const Eigen::VectorXd& z) const {
  require_dimension(static_cast<std::size_t>(z.size()), k(), "pca_reconstruct");
  return mean + components.transpose() * z;
}

PcaModel pca_fit_covariance(const Eigen::MatrixXd& X, double threshold) {
  check_fit_input(X, threshold);
  const Eigen::VectorXd mean = X.colwise().mean().transpose();
  const Eigen::MatrixXd centred = X.rowwise() - mean.transpose();
  const Eigen::MatrixXd cov = centred.transpose() * centred / static_cast<double>(X.rows());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  if (solver.info() != Eigen::Success) throw Error("pca_fit: eigendecomposition failed");

  Spectrum s;
  s.values = solver.eigenvalues().reverse().cwiseMax(0.0);
  s.vectors = solver.eigenvectors().rowwise().reverse();
  return finish(mean, s, static_cast<std::size_t>(X.cols()), threshold);
}

PcaModel pca_fit(const Eigen::MatrixXd& X, double threshold) {
  if (X.rows() >= X.cols()) return pca_fit_covariance(X, threshold);
  check_fit_input(X, threshold);

  const auto n = static_cast<double>(X.rows());
  const Eigen::VectorXd mean = X.colwise().mean().transpose();
  const Eigen::MatrixXd centred = X.rowwise() - mean.transpose();
  const Eigen::MatrixXd gram = centred * centred.transpose() / n;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(gram);
  if (solver.info() != Eigen::Success) throw Error("pca_fit: eigendecomposition failed");

  // Nonzero eigenpairs (l, u) of the Gram matrix map to covariance
  // eigenvectors X^T u / sqrt(n l).
  Spectrum s;
  s.values = solver.eigenvalues().reverse().cwiseMax(0.0);
  const Eigen::MatrixXd u = solver.eigenvectors().rowwise().reverse();
  const double top = s.values.size() > 0 ? s.values[0] : 0.0;
  Eigen::Index rank = 0;
  while (rank < s.values.size() && s.values[rank] > 1e-12 * top) ++rank;
  s.values.conservativeResize(rank);
  s.vectors.resize(X.cols(), rank);
  for (Eigen::Index i = 0; i < rank; ++i) {
    Eigen::VectorXd v = centred.transpose() * u.col(i);
    s.vectors.col(i) = v / v.norm();
  }
  return finish(mean, s, static_cast<std::size_t>(X.cols()), threshold);
}

nlohmann::json to_json(const ZScoreModel& model) {
  return {{"mu", vector_json(model.mu)}, {"sigma", vector_json(model.sigma)}};
}

nlohmann::json to_json(const PcaModel& model) {
  nlohmann::json comps = nlohmann::json::array();
  for (Eigen::Index i = 0; i < model.components.rows(); ++i) {
    comps.push_back(vector_json(model.components.row(i).transpose()));
  }
  return {{"mean", vector_json(model.mean)},
          {"components", comps},
          {"explained_ratio", vector_json(model.explained_ratio)},
          {"spectrum_ratio", vector_json(model.spectrum_ratio)},
          {"eigenvalues", vector_json(model.eigenvalues)},
          {"threshold", model.threshold}};
}

ZScoreModel zscore_from_json(const nlohmann::json& j) {
  ZScoreModel m{vector_from(j.at("mu")), vector_from(j.at("sigma"))};
  if (m.mu.size() != m.sigma.size()) throw Error("zscore model: mu/sigma length mismatch");
  return m;
}

PcaModel pca_from_json(const nlohmann::json& j) {
  PcaModel m;
  m.mean = vector_from(j.at("mean"));
  const auto& comps = j.at("components");
  m.components.resize(static_cast<Eigen::Index>(comps.size()), m.mean.size());
  for (std::size_t i = 0; i < comps.size(); ++i) {
    const Eigen::VectorXd row = vector_from(comps[i]);
    if (row.size() != m.mean.size()) throw Error("pca model: component length mismatch");
    m.components.row(static_cast<Eigen::Index>(i)) = row.transpose();
  }
  m.explained_ratio = vector_from(j.at("explained_ratio"));
  m.spectrum_ratio = vector_from(j.at("spectrum_ratio"));
  m.eigenvalues = vector_from(j.at("eigenvalues"));
  m.threshold = j.at("threshold").get<double>();
  return m;
}

}  // namespace segser
