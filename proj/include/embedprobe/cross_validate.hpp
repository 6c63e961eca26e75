#pragma once

// Development-set grid search and 4-fold cross-validation. For fold i the
// test quarter is fold i, the development quarter is fold i+1 (mod 4) and the
// remaining half trains the models.

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "embedprobe/error.hpp"
#include "embedprobe/linalg.hpp"
#include "embedprobe/logreg.hpp"
#include "embedprobe/metrics.hpp"
#include "embedprobe/svm.hpp"
#include "embedprobe/task_corpus.hpp"

namespace embedprobe {

enum class ClassifierKind { logreg, svm_rbf };

inline const char* to_string(ClassifierKind k) { return k == ClassifierKind::logreg ? "logreg" : "svm-rbf"; }

inline ClassifierKind parse_classifier(const std::string& s) {
  if (s == "logreg") return ClassifierKind::logreg;
  if (s == "svm-rbf") return ClassifierKind::svm_rbf;
  throw ArgumentError("unknown classifier '" + s + "' (expected logreg or svm-rbf)");
}

// Candidate values. SVM gamma values are multiplied by 1/d, d being the
// feature count of the data searched.
struct ParamGrid {
  std::vector<double> C;
  std::vector<double> gamma_scaled;
};

inline ParamGrid default_grid(ClassifierKind kind) {
  if (kind == ClassifierKind::logreg) return {{0.01, 0.1, 1.0, 10.0, 100.0}, {}};
  return {{0.1, 1.0, 10.0, 100.0}, {0x1.0p-7, 0x1.0p-5, 0x1.0p-3, 0x1.0p-1, 0x1.0p1}};
}

struct ParamPoint {
  double C = 1.0;
  double gamma = 0.0;  // resolved kernel width; 0 for logreg

  friend bool operator==(const ParamPoint&, const ParamPoint&) = default;
};

using ClassifierModel = std::variant<LogRegModel, SvmModel>;

struct GridSearchResult {
  ParamPoint best;
  double dev_accuracy = 0.0;
  ClassifierModel model;
  std::vector<std::string> warnings;  // skipped grid points
};

inline std::vector<int> predict(const ClassifierModel& model, const Matrix& x) {
  return std::visit([&](const auto& m) { return predict(m, x); }, model);
}

inline double accuracy(const std::vector<int>& truth, const std::vector<int>& predicted) {
  if (truth.empty() || truth.size() != predicted.size()) throw ArgumentError("accuracy: size mismatch");
  std::size_t hit = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) hit += truth[i] == predicted[i];
  return static_cast<double>(hit) / static_cast<double>(truth.size());
}

namespace cv_detail {

// Higher accuracy wins; ties prefer smaller C, then smaller gamma.
inline bool better(double acc, const ParamPoint& p, double best_acc, const ParamPoint& best) {
  if (acc != best_acc) return acc > best_acc;
  if (p.C != best.C) return p.C < best.C;
  return p.gamma < best.gamma;
}

}  // namespace cv_detail

// Trains one model per grid point on the training slice and keeps the one
// with the best development accuracy. A point that fails to train is skipped
// with a warning; if every point fails the last error is rethrown.
inline GridSearchResult grid_search_models(const Matrix& train_x, const std::vector<int>& train_y,
                                           const Matrix& dev_x, const std::vector<int>& dev_y, ClassifierKind kind,
                                           const ParamGrid& grid, std::uint64_t seed, int num_classes = 0) {
  if (grid.C.empty() || (kind == ClassifierKind::svm_rbf && grid.gamma_scaled.empty()))
    throw ArgumentError("grid_search: empty grid");
  if (dev_y.empty()) throw ArgumentError("grid_search: empty development set");

  std::vector<ParamPoint> points;
  const double d = static_cast<double>(train_x.cols());
  for (double c : grid.C) {
    if (kind == ClassifierKind::logreg) {
      points.push_back({c, 0.0});
    } else {
      for (double g : grid.gamma_scaled) points.push_back({c, g / d});
    }
  }

  Matrix sqdist;
  if (kind == ClassifierKind::svm_rbf) sqdist = squared_distances(train_x);

  std::optional<GridSearchResult> result;
  std::vector<std::string> warnings;
  std::string last_error;
  for (const auto& p : points) {
    try {
      ClassifierModel model = kind == ClassifierKind::logreg
                                  ? ClassifierModel(train_logreg(train_x, train_y, p.C, seed, num_classes))
                                  : ClassifierModel(train_svm_rbf_with_distances(train_x, sqdist, train_y, p.C,
                                                                                 p.gamma, num_classes));
      const double acc = accuracy(dev_y, predict(model, dev_x));
      if (!result || cv_detail::better(acc, p, result->dev_accuracy, result->best))
        result = GridSearchResult{p, acc, std::move(model), {}};
    } catch (const ConvergenceError& e) {
      last_error = e.what();
      warnings.push_back("skipped C=" + std::to_string(p.C) + " gamma=" + std::to_string(p.gamma) + ": " + e.what());
    }
  }
  if (!result) throw ConvergenceError("grid_search: every grid point failed; last error: " + last_error);
  result->warnings = std::move(warnings);
  return std::move(*result);
}

inline ParamPoint grid_search(const Matrix& train_x, const std::vector<int>& train_y, const Matrix& dev_x,
                              const std::vector<int>& dev_y, ClassifierKind kind, const ParamGrid& grid,
                              std::uint64_t seed, int num_classes = 0) {
  return grid_search_models(train_x, train_y, dev_x, dev_y, kind, grid, seed, num_classes).best;
}

struct ItemProbability {
  std::string item;
  int true_class = 0;
  int predicted_class = 0;
  double probability = 0.0;  // of the predicted class
  int fold = 0;
};

struct EvalReport {
  std::string embedding;
  std::string task;
  std::string mode;
  std::string classifier;
  std::string reduction;
  std::vector<std::string> classes;
  std::size_t items = 0;
  std::size_t oov_dropped = 0;
  std::array<double, kNumFolds> fold_accuracies{};
  double mean_accuracy = 0.0;
  double macro_f1 = 0.0;
  std::vector<ParamPoint> best_params;  // per fold
  ConfusionMatrix confusion;
  std::vector<ItemProbability> item_probs;  // logreg only
  std::vector<std::string> warnings;
};

struct Split {
  Matrix x;
  std::vector<int> y;
  std::vector<std::size_t> index;
};

inline Split take_folds(const Dataset& ds, std::initializer_list<int> folds) {
  Split s;
  for (std::size_t i = 0; i < ds.size(); ++i)
    for (int f : folds)
      if (ds.fold_of[i] == f) s.index.push_back(i);
  s.x.resize(static_cast<Eigen::Index>(s.index.size()), ds.features.cols());
  for (std::size_t k = 0; k < s.index.size(); ++k) {
    s.x.row(static_cast<Eigen::Index>(k)) = ds.features.row(static_cast<Eigen::Index>(s.index[k]));
    s.y.push_back(ds.labels[s.index[k]]);
  }
  return s;
}

inline EvalReport cross_validate(const Dataset& ds, ClassifierKind kind, const ParamGrid& grid, std::uint64_t seed) {
  if (ds.fold_of.size() != ds.size()) throw ArgumentError("cross_validate: folds not assigned");
  const int classes = static_cast<int>(ds.num_classes());

  EvalReport r;
  r.embedding = ds.embedding_name;
  r.task = ds.task_name;
  r.mode = to_string(ds.mode);
  r.classifier = to_string(kind);
  r.reduction = ds.reduction;
  r.classes = ds.classes;
  r.items = ds.size();
  r.oov_dropped = ds.oov_dropped;
  r.confusion = ConfusionMatrix(ds.num_classes());

  for (int f = 0; f < kNumFolds; ++f) {
    const int dev_fold = (f + 1) % kNumFolds;
    const int t1 = (f + 2) % kNumFolds;
    const int t2 = (f + 3) % kNumFolds;
    const Split test = take_folds(ds, {f});
    const Split dev = take_folds(ds, {dev_fold});
    const Split train = take_folds(ds, {t1, t2});

    auto search = grid_search_models(train.x, train.y, dev.x, dev.y, kind, grid, seed, classes);
    for (auto& w : search.warnings) r.warnings.push_back("fold " + std::to_string(f) + ": " + w);
    r.best_params.push_back(search.best);

    const std::vector<int> pred = predict(search.model, test.x);
    ConfusionMatrix cm(ds.num_classes());
    for (std::size_t k = 0; k < pred.size(); ++k) cm.add(test.y[k], pred[k]);
    r.fold_accuracies[static_cast<std::size_t>(f)] = metrics(cm).accuracy;
    r.confusion += cm;

    if (const auto* lr = std::get_if<LogRegModel>(&search.model)) {
      const Matrix proba = predict_proba(*lr, test.x);
      for (std::size_t k = 0; k < pred.size(); ++k)
        r.item_probs.push_back({ds.items[test.index[k]], test.y[k], pred[k],
                                proba(static_cast<Eigen::Index>(k), pred[k]), f});
    }
  }
  r.mean_accuracy = arithmetic_mean(r.fold_accuracies);
  r.macro_f1 = metrics(r.confusion).macro_f1;
  return r;
}

}  // namespace embedprobe
