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

#include "segser/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>

#include "segser/error.hpp"

namespace segser {
namespace {

constexpr double kTau = 1e-12;
constexpr double kInf = std::numeric_limits<double>::infinity();

void check_labels(std::span<const int> y, Eigen::Index rows) {
  if (static_cast<Eigen::Index>(y.size()) != rows) {
    throw Error("train_binary: " + std::to_string(y.size()) + " labels for " +
                std::to_string(rows) + " examples");
  }
  bool pos = false, neg = false;
  for (int v : y) {
    if (v == 1) pos = true;
    else if (v == -1) neg = true;
    else throw Error("train_binary: labels must be +1 or -1");
  }
  if (!pos || !neg) throw Error("train_binary: need at least one example of each class");
}

// Dual: min f(a) = 1/2 a'Qa - e'a, 0 <= a <= C, y'a = 0, Q_ij = y_i y_j K_ij.
// G = Qa - e is kept up to date after every pair update.
class SmoSolver {
 public:
  SmoSolver(const Eigen::MatrixXd& K, std::span<const int> y, const SvmOptions& opt)
      : K_(K), y_(y.begin(), y.end()), C_(opt.C), n_(static_cast<Eigen::Index>(y.size())),
        alpha_(Eigen::VectorXd::Zero(n_)), grad_(Eigen::VectorXd::Constant(n_, -1.0)) {}

  BinaryTrainResult run(const SvmOptions& opt) {
    BinaryTrainResult result;
    std::size_t iter = 0;
    bool converged = false;
    while (iter < opt.max_iterations) {
      Eigen::Index i = -1, j = -1;
      if (select_pair(opt.tol, i, j)) {
        converged = true;
        break;
      }
      update_pair(i, j);
      ++iter;
      if (opt.record_objective) result.objective_trace.push_back(dual_objective());
    }
    if (!converged) {
      Eigen::Index i = -1, j = -1;
      converged = select_pair(opt.tol, i, j);
    }
    result.alpha = alpha_;
    result.dual_objective = dual_objective();
    result.model.b = -rho();
    result.model.C = C_;
    result.model.converged = converged;
    result.model.iterations = iter;
    return result;
  }

 private:
  bool upper(Eigen::Index t) const { return alpha_[t] >= C_; }
  bool lower(Eigen::Index t) const { return alpha_[t] <= 0.0; }
  double q(Eigen::Index a, Eigen::Index b) const { return y_[a] * y_[b] * K_(a, b); }

  double dual_objective() const {
    // sum(a) - 1/2 a'Qa with a'Qa = sum a_i (G_i + 1)
    return 0.5 * alpha_.dot(Eigen::VectorXd::Ones(n_) - grad_);
  }

  // Returns true when optimal within tol.
  bool select_pair(double tol, Eigen::Index& out_i, Eigen::Index& out_j) const {
    double gmax = -kInf;
    Eigen::Index i = -1;
    for (Eigen::Index t = 0; t < n_; ++t) {
      if (y_[t] == 1) {
        if (!upper(t) && -grad_[t] > gmax) { gmax = -grad_[t]; i = t; }
      } else {
        if (!lower(t) && grad_[t] > gmax) { gmax = grad_[t]; i = t; }
      }
    }
    double gmax2 = -kInf;
    double best = kInf;
    Eigen::Index j = -1;
    for (Eigen::Index t = 0; t < n_; ++t) {
      if (y_[t] == 1) {
        if (lower(t)) continue;
        const double diff = gmax + grad_[t];
        gmax2 = std::max(gmax2, grad_[t]);
        if (i >= 0 && diff > 0.0) {
          const double a = K_(i, i) + K_(t, t) - 2.0 * y_[i] * q(i, t);
          const double obj = -(diff * diff) / (a > 0.0 ? a : kTau);
          if (obj < best) { best = obj; j = t; }
        }
      } else {
        if (upper(t)) continue;
        const double diff = gmax - grad_[t];
        gmax2 = std::max(gmax2, -grad_[t]);
        if (i >= 0 && diff > 0.0) {
          const double a = K_(i, i) + K_(t, t) + 2.0 * y_[i] * q(i, t);
          const double obj = -(diff * diff) / (a > 0.0 ? a : kTau);
          if (obj < best) { best = obj; j = t; }
        }
      }
    }
    out_i = i;
    out_j = j;
    return i < 0 || j < 0 || gmax + gmax2 < tol;
  }

  void update_pair(Eigen::Index i, Eigen::Index j) {
    const double old_i = alpha_[i], old_j = alpha_[j];
    double& ai = alpha_[i];
    double& aj = alpha_[j];
    const double c = C_;
    if (y_[i] != y_[j]) {
      double quad = K_(i, i) + K_(j, j) + 2.0 * q(i, j);
      if (quad <= 0.0) quad = kTau;
      const double step = (-grad_[i] - grad_[j]) / quad;
      const double diff = ai - aj;
      ai += step;
      aj += step;
      if (diff > 0.0) {
        if (aj < 0.0) { aj = 0.0; ai = diff; }
      } else {
        if (ai < 0.0) { ai = 0.0; aj = -diff; }
      }
      if (diff > 0.0) {
        if (ai > c) { ai = c; aj = c - diff; }
      } else {
        if (aj > c) { aj = c; ai = c + diff; }
      }
    } else {
      double quad = K_(i, i) + K_(j, j) - 2.0 * q(i, j);
      if (quad <= 0.0) quad = kTau;
      const double step = (grad_[i] - grad_[j]) / quad;
      const double sum = ai + aj;
      ai -= step;
      aj += step;
      if (sum > c) {
        if (ai > c) { ai = c; aj = sum - c; }
      } else {
        if (aj < 0.0) { aj = 0.0; ai = sum; }
      }
      if (sum > c) {
        if (aj > c) { aj = c; ai = sum - c; }
      } else {
        if (ai < 0.0) { ai = 0.0; aj = sum; }
      }
    }
    const double di = ai - old_i, dj = aj - old_j;
    for (Eigen::Index k = 0; k < n_; ++k) grad_[k] += q(i, k) * di + q(j, k) * dj;
  }

  double rho() const {
    double ub = kInf, lb = -kInf, sum = 0.0;
    std::size_t free = 0;
    for (Eigen::Index t = 0; t < n_; ++t) {
      const double yg = y_[t] * grad_[t];
      if (upper(t)) {
        if (y_[t] == -1) ub = std::min(ub, yg); else lb = std::max(lb, yg);
      } else if (lower(t)) {
        if (y_[t] == 1) ub = std::min(ub, yg); else lb = std::max(lb, yg);
      } else {
        ++free;
        sum += yg;
      }
    }
    if (free > 0) return sum / static_cast<double>(free);
    return 0.5 * (ub + lb);
  }

  const Eigen::MatrixXd& K_;
  std::vector<int> y_;
  double C_;
  Eigen::Index n_;
  Eigen::VectorXd alpha_;
  Eigen::VectorXd grad_;
};

Eigen::VectorXd weights(const Eigen::MatrixXd& X, std::span<const int> y, const Eigen::VectorXd& alpha) {
  Eigen::VectorXd coef(alpha.size());
  for (Eigen::Index i = 0; i < alpha.size(); ++i) coef[i] = alpha[i] * y[static_cast<std::size_t>(i)];
  return X.transpose() * coef;
}

}  // namespace

double BinarySvmModel::decision(const Eigen::VectorXd& x) const {
  if (x.size() != w.size()) {
    throw Error("svm decision: dimension " + std::to_string(x.size()) + " does not match model " +
                std::to_string(w.size()));
  }
  return w.dot(x) + b;
}

BinaryTrainResult train_binary_gram(const Eigen::MatrixXd& K, std::span<const int> y,
                                    const SvmOptions& options) {
  if (K.rows() != K.cols()) throw Error("train_binary: Gram matrix must be square");
  check_labels(y, K.rows());
  if (!(options.C > 0.0)) throw Error("train_binary: C must be positive");
  if (!K.allFinite()) throw Error("train_binary: non-finite features");
  SmoSolver solver(K, y, options);
  return solver.run(options);
}

BinaryTrainResult train_binary_detailed(const Eigen::MatrixXd& X, std::span<const int> y,
                                        const SvmOptions& options) {
  if (!X.allFinite()) throw Error("train_binary: non-finite features");
  check_labels(y, X.rows());
  const Eigen::MatrixXd K = X * X.transpose();
  BinaryTrainResult result = train_binary_gram(K, y, options);
  result.model.w = weights(X, y, result.alpha);
  return result;
}

BinarySvmModel train_binary(const Eigen::MatrixXd& X, std::span<const int> y,
                            const SvmOptions& options) {
  return train_binary_detailed(X, y, options).model;
}

std::size_t MulticlassSvmModel::dimension() const {
  return pairwise.empty() ? 0 : static_cast<std::size_t>(pairwise.front().model.w.size());
}

Vote MulticlassSvmModel::vote(const Eigen::VectorXd& x) const {
  if (static_cast<std::size_t>(x.size()) != dimension()) {
    throw Error("predict: dimension " + std::to_string(x.size()) + " does not match model " +
                std::to_string(dimension()));
  }
  Vote v;
  v.votes.assign(classes.size(), 0);
  v.margin_sum.assign(classes.size(), 0.0);
  for (const auto& p : pairwise) {
    const double d = p.model.decision(x);
    const std::size_t to = d > 0.0 ? p.second : p.first;
    ++v.votes[to];
    v.margin_sum[to] += std::abs(d);
  }
  for (std::size_t c = 1; c < classes.size(); ++c) {
    const std::size_t w = v.winner;
    if (v.votes[c] > v.votes[w] || (v.votes[c] == v.votes[w] && v.margin_sum[c] > v.margin_sum[w])) {
      v.winner = c;
    }
  }
  return v;
}

int MulticlassSvmModel::predict(const Eigen::VectorXd& x) const {
  return classes[vote(x).winner];
}

MulticlassSvmModel train_multiclass_gram(const Eigen::MatrixXd& X, const Eigen::MatrixXd& K,
                                         std::span<const int> labels, const SvmOptions& options) {
  if (static_cast<Eigen::Index>(labels.size()) != X.rows()) {
    throw Error("train_multiclass: label count does not match example count");
  }
  std::map<int, std::vector<Eigen::Index>> members;
  for (std::size_t i = 0; i < labels.size(); ++i) members[labels[i]].push_back(static_cast<Eigen::Index>(i));
  if (members.size() < 2) throw Error("train_multiclass: need at least 2 classes");

  MulticlassSvmModel model;
  std::vector<const std::vector<Eigen::Index>*> rows;
  for (const auto& [label, idx] : members) {
    model.classes.push_back(label);
    rows.push_back(&idx);
  }

  for (std::size_t a = 0; a < model.classes.size(); ++a) {
    for (std::size_t b = a + 1; b < model.classes.size(); ++b) {
      std::vector<Eigen::Index> idx(*rows[a]);
      idx.insert(idx.end(), rows[b]->begin(), rows[b]->end());
      std::sort(idx.begin(), idx.end());
      std::vector<int> y;
      y.reserve(idx.size());
      for (Eigen::Index r : idx) y.push_back(labels[static_cast<std::size_t>(r)] == model.classes[b] ? 1 : -1);

      const auto m = static_cast<Eigen::Index>(idx.size());
      Eigen::MatrixXd sub_k(m, m);
      Eigen::MatrixXd sub_x(m, X.cols());
      for (Eigen::Index r = 0; r < m; ++r) {
        sub_x.row(r) = X.row(idx[static_cast<std::size_t>(r)]);
        for (Eigen::Index c = 0; c < m; ++c) {
          sub_k(r, c) = K(idx[static_cast<std::size_t>(r)], idx[static_cast<std::size_t>(c)]);
        }
      }
      BinaryTrainResult res = train_binary_gram(sub_k, y, options);
      res.model.w = weights(sub_x, y, res.alpha);
      model.pairwise.push_back({a, b, std::move(res.model)});
    }
  }
  return model;
}

MulticlassSvmModel train_multiclass(const Eigen::MatrixXd& X, std::span<const int> labels,
                                    const SvmOptions& options) {
  if (!X.allFinite()) throw Error("train_multiclass: non-finite features");
  const Eigen::MatrixXd K = X * X.transpose();
  return train_multiclass_gram(X, K, labels, options);
}

nlohmann::json to_json(const MulticlassSvmModel& model) {
  nlohmann::json pairs = nlohmann::json::array();
  for (const auto& p : model.pairwise) {
    pairs.push_back({{"negative", model.classes[p.first]},
                     {"positive", model.classes[p.second]},
                     {"w", std::vector<double>(p.model.w.data(), p.model.w.data() + p.model.w.size())},
                     {"b", p.model.b},
                     {"C", p.model.C},
                     {"converged", p.model.converged},
                     {"iterations", p.model.iterations}});
  }
  return {{"classes", model.classes}, {"pairwise", pairs}};
}

MulticlassSvmModel multiclass_from_json(const nlohmann::json& j) {
  MulticlassSvmModel model;
  model.classes = j.at("classes").get<std::vector<int>>();
  auto position = [&](int label) {
    const auto it = std::find(model.classes.begin(), model.classes.end(), label);
    if (it == model.classes.end()) throw Error("svm model: unknown class " + std::to_string(label));
    return static_cast<std::size_t>(it - model.classes.begin());
  };
  for (const auto& p : j.at("pairwise")) {
    PairwiseModel pm;
    pm.first = position(p.at("negative").get<int>());
    pm.second = position(p.at("positive").get<int>());
    const auto w = p.at("w").get<std::vector<double>>();
    pm.model.w = Eigen::Map<const Eigen::VectorXd>(w.data(), static_cast<Eigen::Index>(w.size()));
    pm.model.b = p.at("b").get<double>();
    pm.model.C = p.at("C").get<double>();
    pm.model.converged = p.at("converged").get<bool>();
    pm.model.iterations = p.at("iterations").get<std::size_t>();
    model.pairwise.push_back(std::move(pm));
  }
  return model;
}

}  // namespace segser
