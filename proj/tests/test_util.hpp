#pragma once

#include <unistd.h>

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "embedprobe/embedprobe.hpp"

namespace testutil {

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("embedprobe-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline std::filesystem::path write_file(const std::filesystem::path& p, const std::string& content) {
  std::ofstream out(p, std::ios::binary);
  out << content;
  return p;
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline embedprobe::Matrix gaussian_matrix(int rows, int cols, std::mt19937_64& rng, double sd = 1.0) {
  std::normal_distribution<double> nd(0.0, sd);
  embedprobe::Matrix m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = nd(rng);
  return m;
}

inline std::vector<std::string> numbered_words(const std::string& prefix, std::size_t n) {
  std::vector<std::string> w;
  for (std::size_t i = 0; i < n; ++i) w.push_back(prefix + std::to_string(i));
  return w;
}

// Zero-padded so lexicographic order matches row order.
inline std::vector<std::string> ordered_words(const std::string& prefix, std::size_t n) {
  std::vector<std::string> w;
  char buf[24];
  for (std::size_t i = 0; i < n; ++i) {
    std::snprintf(buf, sizeof buf, "%07zu", i);
    w.push_back(prefix + buf);
  }
  return w;
}

}  // namespace testutil

namespace testutil {

// Small on-disk experiment: two embedding sets with partly shared
// vocabularies, a term task and a pair task whose labels are planted in the
// vectors. Returns the config path.
inline std::filesystem::path write_fixture(const std::filesystem::path& dir, const std::string& extra_config = "") {
  std::mt19937_64 rng(99);
  std::normal_distribution<double> nd(0.0, 1.0);
  std::ostringstream a, b, term, pair;
  const int words = 48;
  std::vector<std::vector<double>> va(words);
  for (int i = 0; i < words; ++i) {
    const double sign = i % 2 ? 1.0 : -1.0;
    for (int j = 0; j < 4; ++j) va[static_cast<std::size_t>(i)].push_back(nd(rng) + (j == 0 ? 1.5 * sign : 0.0));
    a << "w" << i;
    for (double v : va[static_cast<std::size_t>(i)]) a << ' ' << v;
    a << '\n';
    if (i < words - 4) {
      b << "w" << i;
      for (int j = 0; j < 3; ++j) b << ' ' << nd(rng) + (j == 1 ? 1.0 * sign : 0.0);
      b << '\n';
    }
    term << "w" << i << '\t' << (i % 2 ? "POS" : "NEG") << '\n';
  }
  a << "extra_only_in_a 1 2 3 4\n";
  for (int i = 0; i + 1 < words; i += 2) {
    pair << "w" << i << "\tw" << i + 1 << "\tUP\n";
    pair << "w" << i + 1 << "\tw" << i << "\tDOWN\n";
  }
  write_file(dir / "emb_a.txt", a.str());
  write_file(dir / "emb_b.txt", b.str());
  write_file(dir / "term.tsv", term.str());
  write_file(dir / "pair.tsv", pair.str());
  const std::string cfg = R"({
  "embeddings": [{"name": "A", "path": "emb_a.txt"}, {"name": "B", "path": "emb_b.txt"}],
  "tasks": [
    {"name": "sentiment", "path": "term.tsv", "mode": "term", "classes": ["POS", "NEG"]},
    {"name": "direction", "path": "pair.tsv", "mode": "pair", "classes": ["UP", "DOWN"]}
  ],
  "classifiers": ["logreg", "svm-rbf"],
  "reductions": ["none", "truncate:31"],
  "grids": {"logreg": {"C": [0.1, 10]}, "svm-rbf": {"C": [1, 10], "gamma_scaled": [0.5, 2]}},
  "output_dir": "out")" + extra_config + R"(
})";
  return write_file(dir / "config.json", cfg);
}

}  // namespace testutil
