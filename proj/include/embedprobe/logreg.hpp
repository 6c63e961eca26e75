#pragma once

// L2-regularized multinomial logistic regression trained by full-batch
// gradient descent. Step sizes come from the Barzilai-Borwein rule and are
// accepted only under an Armijo sufficient-decrease test, so the objective
// never increases between iterations.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "embedprobe/error.hpp"
#include "embedprobe/linalg.hpp"

namespace embedprobe {

struct LogRegModel {
  Matrix weights;  // classes x features
  Vector biases;   // classes
  double C = 1.0;  // inverse regularization strength
  int iterations = 0;
  bool converged = false;

  std::size_t num_classes() const { return static_cast<std::size_t>(weights.rows()); }
  std::size_t num_features() const { return static_cast<std::size_t>(weights.cols()); }

  Matrix scores(const Matrix& x) const {
    if (x.cols() != weights.cols())
      throw ArgumentError("logreg: expected " + std::to_string(weights.cols()) + " features, got " +
                          std::to_string(x.cols()));
    Matrix s = x * weights.transpose();
    s.rowwise() += biases.transpose();
    return s;
  }
};

namespace logreg_detail {

// Row-wise softmax, in place, stable under large scores.
inline void softmax_rows(Matrix& s) {
  for (Eigen::Index i = 0; i < s.rows(); ++i) {
    auto row = s.row(i);
    const double mx = row.maxCoeff();
    row = (row.array() - mx).exp();
    row /= row.sum();
  }
}

inline void check_inputs(const Matrix& x, const std::vector<int>& y, int classes) {
  if (x.rows() != static_cast<Eigen::Index>(y.size())) throw ArgumentError("logreg: feature/label count mismatch");
  if (x.rows() < 2) throw ArgumentError("logreg: need at least 2 samples");
  if (!x.allFinite()) throw ArgumentError("logreg: non-finite feature value");
  std::vector<int> seen(static_cast<std::size_t>(classes), 0);
  for (int label : y) {
    if (label < 0 || label >= classes) throw ArgumentError("logreg: label out of range");
    seen[static_cast<std::size_t>(label)] = 1;
  }
  if (std::count(seen.begin(), seen.end(), 1) < 2) throw ArgumentError("logreg: training data has a single class");
}

}  // namespace logreg_detail

// Mean cross-entropy plus ||W||^2 / (2 C n). Biases are not penalized.
inline double logreg_objective(const Matrix& w, const Vector& b, const Matrix& x, const std::vector<int>& y,
                               double C) {
  Matrix s = x * w.transpose();
  s.rowwise() += b.transpose();
  double loss = 0.0;
  for (Eigen::Index i = 0; i < s.rows(); ++i) {
    const double mx = s.row(i).maxCoeff();
    const double lse = mx + std::log((s.row(i).array() - mx).exp().sum());
    loss += lse - s(i, y[static_cast<std::size_t>(i)]);
  }
  const double n = static_cast<double>(x.rows());
  return loss / n + w.squaredNorm() / (2.0 * C * n);
}

// Gradient of logreg_objective with respect to (W, b).
inline void logreg_gradient(const Matrix& w, const Vector& b, const Matrix& x, const std::vector<int>& y, double C,
                            Matrix& grad_w, Vector& grad_b) {
  Matrix p = x * w.transpose();
  p.rowwise() += b.transpose();
  logreg_detail::softmax_rows(p);
  for (Eigen::Index i = 0; i < p.rows(); ++i) p(i, y[static_cast<std::size_t>(i)]) -= 1.0;
  const double n = static_cast<double>(x.rows());
  grad_w = p.transpose() * x / n + w / (C * n);
  grad_b = p.colwise().sum().transpose() / n;
}

struct LogRegOptions {
  double grad_tol = 1e-6;  // max-norm of the gradient
  int max_iterations = 2000;
};

// Zero initialization makes the result independent of seed; the parameter is
// kept so every trainer has the same signature. loss_history, if given,
// receives the objective before the first step and after every step.
inline LogRegModel train_logreg(const Matrix& x, const std::vector<int>& y, double C, std::uint64_t seed = 0,
                                int num_classes = 0, const LogRegOptions& opt = {},
                                std::vector<double>* loss_history = nullptr) {
  (void)seed;
  if (!(C > 0.0) || !std::isfinite(C)) throw ArgumentError("logreg: C must be positive");
  if (num_classes == 0) num_classes = y.empty() ? 0 : *std::max_element(y.begin(), y.end()) + 1;
  logreg_detail::check_inputs(x, y, num_classes);

  LogRegModel m;
  m.C = C;
  m.weights = Matrix::Zero(num_classes, x.cols());
  m.biases = Vector::Zero(num_classes);

  Matrix gw, gw_new;
  Vector gb, gb_new;
  logreg_gradient(m.weights, m.biases, x, y, C, gw, gb);
  double loss = logreg_objective(m.weights, m.biases, x, y, C);
  if (loss_history) loss_history->push_back(loss);
  double step = 1.0;

  for (int it = 0; it < opt.max_iterations; ++it) {
    const double gmax = std::max(gw.cwiseAbs().maxCoeff(), gb.cwiseAbs().maxCoeff());
    if (gmax <= opt.grad_tol) {
      m.converged = true;
      break;
    }
    const double gnorm2 = gw.squaredNorm() + gb.squaredNorm();
    Matrix w_new;
    Vector b_new;
    double loss_new = loss;
    bool accepted = false;
    for (int halvings = 0; halvings < 60; ++halvings) {
      w_new = m.weights - step * gw;
      b_new = m.biases - step * gb;
      loss_new = logreg_objective(w_new, b_new, x, y, C);
      if (loss_new <= loss - 1e-4 * step * gnorm2) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;  // no representable decrease left

    logreg_gradient(w_new, b_new, x, y, C, gw_new, gb_new);
    const double ss = (w_new - m.weights).squaredNorm() + (b_new - m.biases).squaredNorm();
    const double sy = ((w_new - m.weights).cwiseProduct(gw_new - gw)).sum() +
                      (b_new - m.biases).dot(gb_new - gb);
    step = (sy > 0.0 && std::isfinite(ss / sy)) ? std::clamp(ss / sy, 1e-10, 1e10) : step * 2.0;

    m.weights.swap(w_new);
    m.biases.swap(b_new);
    gw.swap(gw_new);
    gb.swap(gb_new);
    loss = loss_new;
    m.iterations = it + 1;
    if (loss_history) loss_history->push_back(loss);
  }
  if (!m.converged) {
    const double gmax = std::max(gw.cwiseAbs().maxCoeff(), gb.cwiseAbs().maxCoeff());
    m.converged = gmax <= opt.grad_tol;
  }
  return m;
}

// Softmax of the affine scores; each row sums to 1.
inline Matrix predict_proba(const LogRegModel& m, const Matrix& x) {
  Matrix s = m.scores(x);
  logreg_detail::softmax_rows(s);
  return s;
}

// Arg-max class per row; ties go to the lower class index.
inline std::vector<int> predict(const LogRegModel& m, const Matrix& x) {
  Matrix s = m.scores(x);
  std::vector<int> out(static_cast<std::size_t>(s.rows()));
  for (Eigen::Index i = 0; i < s.rows(); ++i) {
    Eigen::Index best = 0;
    s.row(i).maxCoeff(&best);
    out[static_cast<std::size_t>(i)] = static_cast<int>(best);
  }
  return out;
}

}  // namespace embedprobe
