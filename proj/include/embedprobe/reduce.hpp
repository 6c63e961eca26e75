#pragma once

// Information-reducing transforms over embedding sets: low-bit truncation of
// integer-scaled values, sign binarization, PCA projection and
// standardization, composable as a left-to-right pipeline written as
// "standardize,pca:10" or "truncate:31".

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "embedprobe/embedding_store.hpp"
#include "embedprobe/error.hpp"
#include "embedprobe/linalg.hpp"

namespace embedprobe {

// Largest integer magnitude used when scaling values to 32-bit integers.
inline constexpr std::int64_t kInt32Max = 2147483647;

// Removes the b low-order bits of every value after scaling the set to signed
// 32-bit integers by its global max-abs s:
//   i = round(x / s * (2^31 - 1)),  q = floor(i / 2^b),
// then maps the quotient range [-L, L-1], L = 2^(31-b), affinely onto [-1, 1].
// At b = 31 only the levels -1 and +1 remain.
inline EmbeddingSet truncate_bits(const EmbeddingSet& set, int bits) {
  if (bits < 0 || bits > 31) throw ArgumentError("truncate_bits: b must be in [0, 31], got " + std::to_string(bits));
  const double s = set.vectors().cwiseAbs().maxCoeff();
  if (!(s > 0.0)) throw ArgumentError("truncate_bits: embedding set '" + set.name() + "' is all zeros");
  const std::int64_t levels = std::int64_t{1} << (31 - bits);
  const double span = 2.0 * static_cast<double>(levels) - 1.0;
  Matrix out = set.vectors().unaryExpr([&](double x) {
    const std::int64_t i = std::llround(x / s * static_cast<double>(kInt32Max));
    const std::int64_t q = i >> bits;  // arithmetic shift: floor division by 2^b
    return 2.0 * static_cast<double>(q + levels) / span - 1.0;
  });
  return set.with_vectors(std::move(out));
}

// +1 for x >= 0, -1 otherwise.
inline EmbeddingSet sign_binarize(const EmbeddingSet& set) {
  Matrix out = set.vectors().unaryExpr([](double x) { return x >= 0.0 ? 1.0 : -1.0; });
  return set.with_vectors(std::move(out));
}

struct PcaModel {
  Vector mean;                // d
  Matrix components;          // k x d, orthonormal rows
  Vector explained_variance;  // k, descending
};

// Top-k eigenvectors of the population covariance of the set's vectors. Each
// component is signed so its largest-magnitude coordinate is positive.
inline PcaModel pca_fit(const EmbeddingSet& set, std::size_t k) {
  const std::size_t d = set.dim();
  if (k < 1 || k > d) throw ArgumentError("pca_fit: k must be in [1, " + std::to_string(d) + "], got " + std::to_string(k));
  if (set.size() < 2) throw ArgumentError("pca_fit: need at least 2 entries");

  PcaModel m;
  m.mean = set.vectors().colwise().mean().transpose();
  Matrix centered = set.vectors();
  centered.rowwise() -= m.mean.transpose();
  const Eigen::MatrixXd cov = (centered.transpose() * centered) / static_cast<double>(set.size());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  if (eig.info() != Eigen::Success) throw Error("pca_fit: eigendecomposition failed");

  m.components.resize(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(d));
  m.explained_variance.resize(static_cast<Eigen::Index>(k));
  for (std::size_t r = 0; r < k; ++r) {
    const auto src = static_cast<Eigen::Index>(d - 1 - r);  // eigenvalues come ascending
    Vector v = eig.eigenvectors().col(src);
    Eigen::Index arg = 0;
    v.cwiseAbs().maxCoeff(&arg);
    if (v[arg] < 0.0) v = -v;
    m.components.row(static_cast<Eigen::Index>(r)) = v.transpose();
    m.explained_variance[static_cast<Eigen::Index>(r)] = std::max(0.0, eig.eigenvalues()[src]);
  }
  return m;
}

inline EmbeddingSet pca_transform(const PcaModel& model, const EmbeddingSet& set) {
  if (static_cast<Eigen::Index>(set.dim()) != model.mean.size())
    throw ArgumentError("pca_transform: set has dimension " + std::to_string(set.dim()) + ", model expects " +
                        std::to_string(model.mean.size()));
  Matrix centered = set.vectors();
  centered.rowwise() -= model.mean.transpose();
  Matrix projected = centered * model.components.transpose();
  return EmbeddingSet(set.name(), set.words(), std::move(projected));
}

struct ReductionStage {
  enum class Kind { none, truncate, sign, pca, standardize };
  Kind kind = Kind::none;
  int param = 0;  // bits for truncate, components for pca

  std::string describe() const {
    switch (kind) {
      case Kind::none: return "none";
      case Kind::truncate: return "truncate:" + std::to_string(param);
      case Kind::sign: return "sign";
      case Kind::pca: return "pca:" + std::to_string(param);
      case Kind::standardize: return "standardize";
    }
    return "?";
  }

  friend bool operator==(const ReductionStage&, const ReductionStage&) = default;
};

struct ReductionSpec {
  std::vector<ReductionStage> stages;

  std::string describe() const {
    if (stages.empty()) return "none";
    std::string s;
    for (const auto& st : stages) {
      if (!s.empty()) s += ',';
      s += st.describe();
    }
    return s;
  }
};

namespace reduce_detail {

inline int parse_int(std::string_view tok, std::string_view whole) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (tok.empty() || ec != std::errc() || ptr != tok.data() + tok.size())
    throw ArgumentError("malformed reduction spec '" + std::string(whole) + "'");
  return v;
}

}  // namespace reduce_detail

inline ReductionSpec parse_reduction(std::string_view text) {
  ReductionSpec spec;
  std::size_t start = 0;
  for (;;) {
    const auto comma = text.find(',', start);
    std::string_view tok = text.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
    while (!tok.empty() && tok.front() == ' ') tok.remove_prefix(1);
    while (!tok.empty() && tok.back() == ' ') tok.remove_suffix(1);
    ReductionStage st;
    if (tok == "none") {
      st.kind = ReductionStage::Kind::none;
    } else if (tok == "sign") {
      st.kind = ReductionStage::Kind::sign;
    } else if (tok == "standardize") {
      st.kind = ReductionStage::Kind::standardize;
    } else if (tok.starts_with("truncate:")) {
      st.kind = ReductionStage::Kind::truncate;
      st.param = reduce_detail::parse_int(tok.substr(9), text);
      if (st.param < 0 || st.param > 31)
        throw ArgumentError("reduction '" + std::string(text) + "': truncate bits must be in [0, 31]");
    } else if (tok.starts_with("pca:")) {
      st.kind = ReductionStage::Kind::pca;
      st.param = reduce_detail::parse_int(tok.substr(4), text);
      if (st.param < 1) throw ArgumentError("reduction '" + std::string(text) + "': pca components must be >= 1");
    } else {
      throw ArgumentError("malformed reduction spec '" + std::string(text) + "'");
    }
    if (st.kind != ReductionStage::Kind::none) spec.stages.push_back(st);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return spec;
}

// Applies the stages left to right. PCA stages are fit on the set they receive.
inline EmbeddingSet apply_reduction(const EmbeddingSet& set, const ReductionSpec& spec) {
  EmbeddingSet cur = set;
  for (const auto& st : spec.stages) {
    switch (st.kind) {
      case ReductionStage::Kind::none: break;
      case ReductionStage::Kind::truncate: cur = truncate_bits(cur, st.param); break;
      case ReductionStage::Kind::sign: cur = sign_binarize(cur); break;
      case ReductionStage::Kind::standardize: cur = standardize(cur); break;
      case ReductionStage::Kind::pca: {
        if (static_cast<std::size_t>(st.param) > cur.dim())
          throw ArgumentError("pca:" + std::to_string(st.param) + " exceeds the dimension " +
                              std::to_string(cur.dim()) + " of '" + cur.name() + "'");
        cur = pca_transform(pca_fit(cur, static_cast<std::size_t>(st.param)), cur);
        break;
      }
    }
  }
  return cur;
}

}  // namespace embedprobe
