#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <vector>

#include "embedprobe/error.hpp"

namespace embedprobe {

// Square count matrix; rows are true classes, columns predicted classes.
class ConfusionMatrix {
 public:
  explicit ConfusionMatrix(std::size_t classes = 2) : n_(classes), counts_(classes * classes, 0) {}

  void add(int truth, int predicted, std::int64_t count = 1) {
    counts_.at(static_cast<std::size_t>(truth) * n_ + static_cast<std::size_t>(predicted)) += count;
  }

  std::int64_t operator()(std::size_t truth, std::size_t predicted) const { return counts_[truth * n_ + predicted]; }
  std::int64_t& operator()(std::size_t truth, std::size_t predicted) { return counts_[truth * n_ + predicted]; }

  std::size_t classes() const { return n_; }
  std::int64_t total() const { return std::accumulate(counts_.begin(), counts_.end(), std::int64_t{0}); }

  std::int64_t row_sum(std::size_t truth) const {
    std::int64_t s = 0;
    for (std::size_t p = 0; p < n_; ++p) s += (*this)(truth, p);
    return s;
  }

  std::int64_t col_sum(std::size_t predicted) const {
    std::int64_t s = 0;
    for (std::size_t t = 0; t < n_; ++t) s += (*this)(t, predicted);
    return s;
  }

  ConfusionMatrix& operator+=(const ConfusionMatrix& o) {
    if (o.n_ != n_) throw ArgumentError("confusion matrix size mismatch");
    for (std::size_t i = 0; i < counts_.size(); ++i) counts_[i] += o.counts_[i];
    return *this;
  }

  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;

 private:
  std::size_t n_;
  std::vector<std::int64_t> counts_;
};

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

struct Metrics {
  double accuracy = 0.0;
  double macro_f1 = 0.0;
  std::vector<ClassMetrics> per_class;
};

// Ratios with a zero denominator are defined as 0.
inline Metrics metrics(const ConfusionMatrix& cm) {
  const auto total = cm.total();
  if (total <= 0) throw ArgumentError("metrics: confusion matrix is empty");
  Metrics m;
  std::int64_t trace = 0;
  double f1_sum = 0.0;
  for (std::size_t c = 0; c < cm.classes(); ++c) {
    if (cm(c, c) < 0) throw ArgumentError("metrics: negative count");
    trace += cm(c, c);
    const auto tp = static_cast<double>(cm(c, c));
    const auto predicted = static_cast<double>(cm.col_sum(c));
    const auto actual = static_cast<double>(cm.row_sum(c));
    ClassMetrics k;
    k.precision = predicted > 0 ? tp / predicted : 0.0;
    k.recall = actual > 0 ? tp / actual : 0.0;
    k.f1 = (k.precision + k.recall) > 0 ? 2.0 * k.precision * k.recall / (k.precision + k.recall) : 0.0;
    f1_sum += k.f1;
    m.per_class.push_back(k);
  }
  m.accuracy = static_cast<double>(trace) / static_cast<double>(total);
  m.macro_f1 = f1_sum / static_cast<double>(cm.classes());
  return m;
}

inline double geometric_mean(std::span<const double> values) {
  if (values.empty()) throw ArgumentError("geometric_mean: no values");
  double log_sum = 0.0;
  for (double v : values) {
    if (!(v > 0.0)) throw ArgumentError("geometric_mean: values must be positive");
    log_sum += std::log(v);
  }
  return std::exp(log_sum / static_cast<double>(values.size()));
}

inline double arithmetic_mean(std::span<const double> values) {
  if (values.empty()) throw ArgumentError("arithmetic_mean: no values");
  double s = 0.0;
  for (double v : values) s += v;
  return s / static_cast<double>(values.size());
}

}  // namespace embedprobe
