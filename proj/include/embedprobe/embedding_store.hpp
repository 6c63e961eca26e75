#pragma once

// Word-embedding sets: text-format loading (with optional multi-prototype
// collapse), write-back, vocabulary intersection and per-dimension
// standardization.
//
// Text format: one record per line, a word followed by whitespace separated
// decimal numbers. Blank lines and lines starting with '#' are skipped; CRLF
// endings are accepted.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "embedprobe/error.hpp"
#include "embedprobe/linalg.hpp"

namespace embedprobe {

// Immutable vocabulary-to-vector map. Words are kept in lexicographic order;
// row i of vectors() belongs to words()[i].
class EmbeddingSet {
 public:
  EmbeddingSet(std::string name, std::vector<std::string> words, Matrix vectors)
      : name_(std::move(name)) {
    if (words.empty()) throw ArgumentError("embedding set '" + name_ + "' has no entries");
    if (static_cast<Eigen::Index>(words.size()) != vectors.rows())
      throw ArgumentError("embedding set '" + name_ + "': word count does not match row count");
    if (vectors.cols() < 1) throw ArgumentError("embedding set '" + name_ + "': dimension must be >= 1");
    if (!vectors.allFinite()) throw ArgumentError("embedding set '" + name_ + "': non-finite value");

    std::vector<std::size_t> order(words.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return words[a] < words[b]; });

    words_.reserve(words.size());
    vectors_.resize(vectors.rows(), vectors.cols());
    for (std::size_t r = 0; r < order.size(); ++r) {
      std::string& w = words[order[r]];
      if (w.empty()) throw ArgumentError("embedding set '" + name_ + "': empty word");
      if (!words_.empty() && words_.back() == w)
        throw ArgumentError("embedding set '" + name_ + "': duplicate word '" + w + "'");
      vectors_.row(static_cast<Eigen::Index>(r)) = vectors.row(static_cast<Eigen::Index>(order[r]));
      words_.push_back(std::move(w));
    }
  }

  const std::string& name() const { return name_; }
  std::size_t dim() const { return static_cast<std::size_t>(vectors_.cols()); }
  std::size_t size() const { return words_.size(); }
  const std::vector<std::string>& words() const { return words_; }
  const Matrix& vectors() const { return vectors_; }

  std::optional<std::size_t> index_of(std::string_view word) const {
    auto it = std::lower_bound(words_.begin(), words_.end(), word);
    if (it == words_.end() || *it != word) return std::nullopt;
    return static_cast<std::size_t>(it - words_.begin());
  }

  bool contains(std::string_view word) const { return index_of(word).has_value(); }

  // The stored vector, or nullopt. Never a zero-vector fallback.
  std::optional<std::span<const double>> lookup(std::string_view word) const {
    auto i = index_of(word);
    if (!i) return std::nullopt;
    return std::span<const double>(vectors_.data() + *i * dim(), dim());
  }

  // Same vocabulary and name, new values (used by transforms).
  EmbeddingSet with_vectors(Matrix vectors) const {
    if (vectors.rows() != vectors_.rows())
      throw ArgumentError("with_vectors: row count mismatch");
    return EmbeddingSet(name_, words_, std::move(vectors));
  }

  friend bool operator==(const EmbeddingSet& a, const EmbeddingSet& b) {
    return a.name_ == b.name_ && a.words_ == b.words_ &&
           a.vectors_.rows() == b.vectors_.rows() && a.vectors_.cols() == b.vectors_.cols() &&
           a.vectors_ == b.vectors_;
  }

 private:
  std::string name_;
  std::vector<std::string> words_;
  Matrix vectors_;
};

namespace detail {

inline bool is_field_space(char c) { return c == ' ' || c == '\t'; }

inline std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && is_field_space(line[i])) ++i;
    std::size_t j = i;
    while (j < line.size() && !is_field_space(line[j])) ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

inline double parse_real(std::string_view tok, const std::string& where) {
  double v = 0.0;
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  if (!tok.empty() && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || !std::isfinite(v))
    throw InputError(where + ": not a finite number: '" + std::string(tok) + "'");
  return v;
}

// Reads the file and hands each content line (CR stripped, comments and blanks
// skipped) to fn(line, line_number).
template <typename Fn>
void for_each_record(const std::filesystem::path& path, Fn&& fn) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::string_view sv(line);
    std::size_t k = 0;
    while (k < sv.size() && is_field_space(sv[k])) ++k;
    if (k == sv.size() || sv[k] == '#') continue;
    fn(sv, lineno);
  }
}

}  // namespace detail

// Loads a text embedding file. With collapse set, repeated words are
// prototypes and are averaged into one vector; otherwise a repeat is an error.
// The set name defaults to the file stem.
inline EmbeddingSet load_embeddings(const std::filesystem::path& path, bool collapse,
                                    std::string name = {}) {
  if (name.empty()) name = path.stem().string();
  if (!std::filesystem::exists(path)) throw InputError("embedding file not found: '" + path.string() + "'");

  std::vector<std::string> words;
  std::vector<std::vector<double>> sums;
  std::vector<std::size_t> counts;
  std::unordered_map<std::string, std::size_t> slot;
  std::size_t dim = 0;

  detail::for_each_record(path, [&](std::string_view line, std::size_t lineno) {
    const std::string where = path.string() + ":" + std::to_string(lineno);
    auto fields = detail::split_fields(line);
    if (fields.size() < 2) throw InputError(where + ": expected a word followed by numbers");
    const std::size_t len = fields.size() - 1;
    if (dim == 0) {
      dim = len;
    } else if (len != dim) {
      throw InputError(where + ": vector has " + std::to_string(len) + " values, expected " +
                       std::to_string(dim));
    }
    std::string word(fields[0]);
    auto [it, fresh] = slot.try_emplace(word, words.size());
    if (fresh) {
      words.push_back(word);
      sums.emplace_back(dim, 0.0);
      counts.push_back(0);
    } else if (!collapse) {
      throw InputError(where + ": duplicate word '" + word + "' (prototype collapse is off)");
    }
    auto& acc = sums[it->second];
    for (std::size_t j = 0; j < dim; ++j) acc[j] += detail::parse_real(fields[j + 1], where);
    ++counts[it->second];
  });

  if (words.empty()) throw InputError("embedding file is empty: '" + path.string() + "'");

  Matrix m(static_cast<Eigen::Index>(words.size()), static_cast<Eigen::Index>(dim));
  for (std::size_t i = 0; i < words.size(); ++i)
    for (std::size_t j = 0; j < dim; ++j)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          sums[i][j] / static_cast<double>(counts[i]);
  return EmbeddingSet(std::move(name), std::move(words), std::move(m));
}

// Single-space separators, 9 significant digits, LF endings.
inline void write_embeddings(const EmbeddingSet& set, std::ostream& out) {
  char buf[40];
  for (std::size_t i = 0; i < set.size(); ++i) {
    out << set.words()[i];
    for (std::size_t j = 0; j < set.dim(); ++j) {
      std::snprintf(buf, sizeof buf, " %.9g",
                    set.vectors()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
      out << buf;
    }
    out << '\n';
  }
}

inline void write_embeddings(const EmbeddingSet& set, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write '" + path.string() + "'");
  write_embeddings(set, out);
  if (!out) throw InputError("write failed: '" + path.string() + "'");
}

// Restricts every set to the words all of them share (exact string match).
inline std::vector<EmbeddingSet> intersect_vocab(const std::vector<EmbeddingSet>& sets) {
  if (sets.empty()) throw ArgumentError("intersect_vocab: no sets given");
  std::vector<std::string> common = sets.front().words();
  for (std::size_t s = 1; s < sets.size(); ++s) {
    std::vector<std::string> next;
    std::set_intersection(common.begin(), common.end(), sets[s].words().begin(),
                          sets[s].words().end(), std::back_inserter(next));
    common = std::move(next);
  }
  if (common.empty()) throw ArgumentError("intersect_vocab: vocabularies share no words");

  std::vector<EmbeddingSet> out;
  out.reserve(sets.size());
  for (const auto& set : sets) {
    Matrix m(static_cast<Eigen::Index>(common.size()), static_cast<Eigen::Index>(set.dim()));
    for (std::size_t i = 0; i < common.size(); ++i)
      m.row(static_cast<Eigen::Index>(i)) =
          set.vectors().row(static_cast<Eigen::Index>(*set.index_of(common[i])));
    out.emplace_back(set.name(), common, std::move(m));
  }
  return out;
}

// Per-dimension zero mean and unit population standard deviation. Constant
// dimensions become all zeros.
inline EmbeddingSet standardize(const EmbeddingSet& set) {
  if (set.size() < 2) throw ArgumentError("standardize: need at least 2 entries");
  Matrix m = set.vectors();
  const double n = static_cast<double>(m.rows());
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    auto col = m.col(j);
    const double scale = col.cwiseAbs().maxCoeff();
    const double mean = col.sum() / n;
    col.array() -= mean;
    const double sd = std::sqrt(col.squaredNorm() / n);
    // Rounding in the mean leaves ~1e-16 residue on constant columns.
    if (sd > 1e-12 * scale)
      col /= sd;
    else
      col.setZero();
  }
  return set.with_vectors(std::move(m));
}

}  // namespace embedprobe
