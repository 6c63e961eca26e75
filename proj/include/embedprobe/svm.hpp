#pragma once

// RBF-kernel support vector machine trained by sequential minimal
// optimization on the dual. Working-set selection is the second-order rule
// (maximal violating i, then the j with the largest guaranteed objective
// decrease). Three or more classes are handled one-vs-rest, predicting the
// machine with the largest decision value.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "embedprobe/error.hpp"
#include "embedprobe/linalg.hpp"

namespace embedprobe {

inline double rbf_kernel(std::span<const double> x, std::span<const double> z, double gamma) {
  if (x.size() != z.size()) throw ArgumentError("rbf_kernel: length mismatch");
  if (!(gamma > 0.0)) throw ArgumentError("rbf_kernel: gamma must be positive");
  double d2 = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double t = x[i] - z[i];
    d2 += t * t;
  }
  return std::exp(-gamma * d2);
}

// Pairwise squared Euclidean distances between rows of a and rows of b.
inline Matrix squared_distances(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.cols()) throw ArgumentError("squared_distances: dimension mismatch");
  const Vector na = a.rowwise().squaredNorm();
  const Vector nb = b.rowwise().squaredNorm();
  Matrix d = -2.0 * (a * b.transpose());
  d.colwise() += na;
  d.rowwise() += nb.transpose();
  return d.cwiseMax(0.0);
}

// Squared distances among the rows of a, with an exact zero diagonal.
inline Matrix squared_distances(const Matrix& a) {
  Matrix d = squared_distances(a, a);
  d.diagonal().setZero();
  return d;
}

// One binary machine: f(x) = sum_k coef_k K(sv_k, x) + bias, where
// coef_k = alpha_k * y_k and y = +1 marks positive_class.
struct SvmMachine {
  Matrix support_vectors;
  Vector dual_coefs;
  double bias = 0.0;
  int positive_class = 1;
  long iterations = 0;
};

struct SvmModel {
  std::vector<SvmMachine> machines;  // one for 2 classes, one per class otherwise
  double gamma = 1.0;
  double C = 1.0;
  int num_classes = 2;
  std::size_t num_features = 0;
};

struct SvmOptions {
  double tol = 1e-3;       // stop when the maximal KKT violation falls below this
  long max_passes = 10;    // iteration cap is max_passes * n * n pair updates
};

namespace svm_detail {

// Solves min 1/2 a'Qa - e'a, 0 <= a <= C, y'a = 0 with Q_ij = y_i y_j K_ij.
// Returns alpha; iterations receives the number of pair updates.
inline Vector smo_solve(const Matrix& kernel, const std::vector<int>& ypm, double C, const SvmOptions& opt,
                        long& iterations, double& rho) {
  constexpr double kTau = 1e-12;
  const auto n = static_cast<Eigen::Index>(ypm.size());
  Vector alpha = Vector::Zero(n);
  Vector grad = Vector::Constant(n, -1.0);  // gradient of the dual objective, Q alpha - e
  auto y = [&](Eigen::Index t) { return static_cast<double>(ypm[static_cast<std::size_t>(t)]); };
  auto at_upper = [&](Eigen::Index t) { return alpha[t] >= C; };
  auto at_lower = [&](Eigen::Index t) { return alpha[t] <= 0.0; };

  const long cap = opt.max_passes * static_cast<long>(n) * static_cast<long>(n);
  iterations = 0;
  bool optimal = false;
  while (iterations < cap) {
    // i: maximal violator in the "up" set.
    double gmax = -std::numeric_limits<double>::infinity();
    Eigen::Index i = -1;
    for (Eigen::Index t = 0; t < n; ++t) {
      if (ypm[static_cast<std::size_t>(t)] == 1) {
        if (!at_upper(t) && -grad[t] >= gmax) { gmax = -grad[t]; i = t; }
      } else {
        if (!at_lower(t) && grad[t] >= gmax) { gmax = grad[t]; i = t; }
      }
    }
    // j: largest second-order decrease among the "low" set.
    double gmax2 = -std::numeric_limits<double>::infinity();
    double best = std::numeric_limits<double>::infinity();
    Eigen::Index j = -1;
    for (Eigen::Index t = 0; t < n; ++t) {
      double grad_diff;
      if (ypm[static_cast<std::size_t>(t)] == 1) {
        if (at_lower(t)) continue;
        gmax2 = std::max(gmax2, grad[t]);
        grad_diff = gmax + grad[t];
      } else {
        if (at_upper(t)) continue;
        gmax2 = std::max(gmax2, -grad[t]);
        grad_diff = gmax - grad[t];
      }
      if (i < 0 || grad_diff <= 0.0) continue;
      double quad = kernel(i, i) + kernel(t, t) - 2.0 * kernel(i, t);
      if (quad <= 0.0) quad = kTau;
      const double obj = -(grad_diff * grad_diff) / quad;
      if (obj <= best) { best = obj; j = t; }
    }
    if (i < 0 || j < 0 || gmax + gmax2 < opt.tol) {
      optimal = true;
      break;
    }

    const double old_i = alpha[i];
    const double old_j = alpha[j];
    double quad = kernel(i, i) + kernel(j, j) - 2.0 * kernel(i, j);
    if (quad <= 0.0) quad = kTau;
    if (ypm[static_cast<std::size_t>(i)] != ypm[static_cast<std::size_t>(j)]) {
      const double delta = (-grad[i] - grad[j]) / quad;
      const double diff = alpha[i] - alpha[j];
      alpha[i] += delta;
      alpha[j] += delta;
      if (diff > 0.0) {
        if (alpha[j] < 0.0) { alpha[j] = 0.0; alpha[i] = diff; }
      } else {
        if (alpha[i] < 0.0) { alpha[i] = 0.0; alpha[j] = -diff; }
      }
      if (diff > 0.0) {
        if (alpha[i] > C) { alpha[i] = C; alpha[j] = C - diff; }
      } else {
        if (alpha[j] > C) { alpha[j] = C; alpha[i] = C + diff; }
      }
    } else {
      const double delta = (grad[i] - grad[j]) / quad;
      const double sum = alpha[i] + alpha[j];
      alpha[i] -= delta;
      alpha[j] += delta;
      if (sum > C) {
        if (alpha[i] > C) { alpha[i] = C; alpha[j] = sum - C; }
      } else {
        if (alpha[j] < 0.0) { alpha[j] = 0.0; alpha[i] = sum; }
      }
      if (sum > C) {
        if (alpha[j] > C) { alpha[j] = C; alpha[i] = sum - C; }
      } else {
        if (alpha[i] < 0.0) { alpha[i] = 0.0; alpha[j] = sum; }
      }
    }

    const double di = (alpha[i] - old_i) * y(i);
    const double dj = (alpha[j] - old_j) * y(j);
    for (Eigen::Index t = 0; t < n; ++t) grad[t] += y(t) * (kernel(i, t) * di + kernel(j, t) * dj);
    ++iterations;
  }
  if (!optimal)
    throw ConvergenceError("SMO did not reach tolerance within " + std::to_string(cap) + " updates");

  // Offset: average over free vectors, else the midpoint of the feasible interval.
  double upper = std::numeric_limits<double>::infinity();
  double lower = -std::numeric_limits<double>::infinity();
  double free_sum = 0.0;
  long free_count = 0;
  for (Eigen::Index t = 0; t < n; ++t) {
    const double yg = y(t) * grad[t];
    if (at_upper(t)) {
      if (y(t) < 0) upper = std::min(upper, yg); else lower = std::max(lower, yg);
    } else if (at_lower(t)) {
      if (y(t) > 0) upper = std::min(upper, yg); else lower = std::max(lower, yg);
    } else {
      free_sum += yg;
      ++free_count;
    }
  }
  rho = free_count > 0 ? free_sum / static_cast<double>(free_count) : (upper + lower) / 2.0;
  return alpha;
}

inline void check_training_inputs(const Matrix& x, const std::vector<int>& y, int classes, double C, double gamma) {
  if (!(C > 0.0) || !std::isfinite(C)) throw ArgumentError("svm: C must be positive");
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw ArgumentError("svm: gamma must be positive");
  if (x.rows() != static_cast<Eigen::Index>(y.size())) throw ArgumentError("svm: feature/label count mismatch");
  if (x.rows() < 2) throw ArgumentError("svm: need at least 2 samples");
  if (!x.allFinite()) throw ArgumentError("svm: non-finite feature value");
  std::vector<int> seen(static_cast<std::size_t>(std::max(classes, 0)), 0);
  for (int label : y) {
    if (label < 0 || label >= classes) throw ArgumentError("svm: label out of range");
    seen[static_cast<std::size_t>(label)] = 1;
  }
  if (std::count(seen.begin(), seen.end(), 1) < 2) throw ArgumentError("svm: training data has a single class");
}

inline SvmMachine fit_machine(const Matrix& x, const Matrix& kernel, const std::vector<int>& y, int positive,
                              double C, const SvmOptions& opt) {
  std::vector<int> ypm(y.size());
  for (std::size_t t = 0; t < y.size(); ++t) ypm[t] = y[t] == positive ? 1 : -1;
  SvmMachine m;
  m.positive_class = positive;
  double rho = 0.0;
  const Vector alpha = smo_solve(kernel, ypm, C, opt, m.iterations, rho);
  m.bias = -rho;
  std::vector<Eigen::Index> sv;
  for (Eigen::Index t = 0; t < alpha.size(); ++t)
    if (alpha[t] > 0.0) sv.push_back(t);
  m.support_vectors.resize(static_cast<Eigen::Index>(sv.size()), x.cols());
  m.dual_coefs.resize(static_cast<Eigen::Index>(sv.size()));
  for (std::size_t k = 0; k < sv.size(); ++k) {
    m.support_vectors.row(static_cast<Eigen::Index>(k)) = x.row(sv[k]);
    m.dual_coefs[static_cast<Eigen::Index>(k)] = alpha[sv[k]] * ypm[static_cast<std::size_t>(sv[k])];
  }
  return m;
}

}  // namespace svm_detail

// Same as train_svm_rbf, reusing a precomputed training distance matrix.
inline SvmModel train_svm_rbf_with_distances(const Matrix& x, const Matrix& sqdist, const std::vector<int>& y,
                                             double C, double gamma, int num_classes = 0,
                                             const SvmOptions& opt = {}) {
  if (num_classes == 0) num_classes = y.empty() ? 0 : *std::max_element(y.begin(), y.end()) + 1;
  svm_detail::check_training_inputs(x, y, num_classes, C, gamma);
  if (sqdist.rows() != x.rows() || sqdist.cols() != x.rows()) throw ArgumentError("svm: distance matrix shape");
  const Matrix kernel = (-gamma * sqdist.array()).exp().matrix();

  SvmModel model;
  model.gamma = gamma;
  model.C = C;
  model.num_classes = num_classes;
  model.num_features = static_cast<std::size_t>(x.cols());
  if (num_classes == 2) {
    model.machines.push_back(svm_detail::fit_machine(x, kernel, y, 1, C, opt));
  } else {
    for (int k = 0; k < num_classes; ++k) model.machines.push_back(svm_detail::fit_machine(x, kernel, y, k, C, opt));
  }
  return model;
}

// The seed is unused: working-set selection is deterministic.
inline SvmModel train_svm_rbf(const Matrix& x, const std::vector<int>& y, double C, double gamma,
                              std::uint64_t seed = 0, int num_classes = 0, const SvmOptions& opt = {}) {
  (void)seed;
  if (!x.allFinite()) throw ArgumentError("svm: non-finite feature value");
  return train_svm_rbf_with_distances(x, squared_distances(x), y, C, gamma, num_classes, opt);
}

// Rows are samples, columns machines.
inline Matrix decision_values(const SvmModel& model, const Matrix& x) {
  if (static_cast<std::size_t>(x.cols()) != model.num_features)
    throw ArgumentError("svm: expected " + std::to_string(model.num_features) + " features, got " +
                        std::to_string(x.cols()));
  Matrix out(x.rows(), static_cast<Eigen::Index>(model.machines.size()));
  for (std::size_t k = 0; k < model.machines.size(); ++k) {
    const auto& m = model.machines[k];
    if (m.support_vectors.rows() == 0) {
      out.col(static_cast<Eigen::Index>(k)).setConstant(m.bias);
      continue;
    }
    const Matrix kern = (-model.gamma * squared_distances(x, m.support_vectors).array()).exp().matrix();
    out.col(static_cast<Eigen::Index>(k)) = (kern * m.dual_coefs).array() + m.bias;
  }
  return out;
}

inline std::vector<int> predict(const SvmModel& model, const Matrix& x) {
  const Matrix dv = decision_values(model, x);
  std::vector<int> out(static_cast<std::size_t>(x.rows()));
  for (Eigen::Index i = 0; i < dv.rows(); ++i) {
    if (model.machines.size() == 1) {
      out[static_cast<std::size_t>(i)] = dv(i, 0) > 0.0 ? 1 : 0;
    } else {
      Eigen::Index best = 0;
      dv.row(i).maxCoeff(&best);
      out[static_cast<std::size_t>(i)] = model.machines[static_cast<std::size_t>(best)].positive_class;
    }
  }
  return out;
}

// Dual objective sum(alpha) - 1/2 alpha'Q alpha of one machine, recovered from
// its support expansion.
inline double dual_objective(const SvmMachine& m, double gamma) {
  const Matrix kern = (-gamma * squared_distances(m.support_vectors).array()).exp().matrix();
  return m.dual_coefs.cwiseAbs().sum() - 0.5 * m.dual_coefs.dot(kern * m.dual_coefs);
}

}  // namespace embedprobe
