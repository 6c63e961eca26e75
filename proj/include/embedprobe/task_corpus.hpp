#pragma once

// Labeled term and pair tasks, balancing, unrelated-pair sampling, feature
// construction over an embedding set and stratified 4-fold assignment.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "embedprobe/embedding_store.hpp"
#include "embedprobe/error.hpp"
#include "embedprobe/linalg.hpp"
#include "embedprobe/rng.hpp"

namespace embedprobe {

enum class TaskMode { term, pair };

inline const char* to_string(TaskMode m) { return m == TaskMode::term ? "term" : "pair"; }

struct TaskItem {
  std::string first;
  std::string second;  // empty for term items
  int label = 0;

  std::string display() const { return second.empty() ? first : first + " " + second; }

  friend auto operator<=>(const TaskItem&, const TaskItem&) = default;
};

struct LabeledTask {
  std::string name;
  TaskMode mode = TaskMode::term;
  std::vector<std::string> classes;
  std::vector<TaskItem> items;

  std::vector<std::size_t> class_counts() const {
    std::vector<std::size_t> counts(classes.size(), 0);
    for (const auto& it : items) ++counts.at(static_cast<std::size_t>(it.label));
    return counts;
  }

  bool balanced() const {
    auto c = class_counts();
    return std::adjacent_find(c.begin(), c.end(), std::not_equal_to<>()) == c.end();
  }
};

using WordPair = std::pair<std::string, std::string>;

namespace detail {

inline std::vector<std::string> split_tabs(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    auto pos = line.find('\t', start);
    auto field = line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start);
    // Trim stray spaces around a field.
    while (!field.empty() && field.front() == ' ') field.remove_prefix(1);
    while (!field.empty() && field.back() == ' ') field.remove_suffix(1);
    out.emplace_back(field);
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

inline void check_classes(const std::vector<std::string>& classes) {
  if (classes.size() < 2) throw ArgumentError("a task needs at least 2 classes");
  std::set<std::string> seen;
  for (const auto& c : classes) {
    if (c.empty()) throw ArgumentError("class labels must be non-empty");
    if (!seen.insert(c).second) throw ArgumentError("duplicate class label '" + c + "'");
  }
}

inline int class_index(const std::vector<std::string>& classes, const std::string& label,
                       const std::string& where) {
  auto it = std::find(classes.begin(), classes.end(), label);
  if (it == classes.end()) throw InputError(where + ": unknown label '" + label + "'");
  return static_cast<int>(it - classes.begin());
}

// Removes repeated items, keeping first occurrences in order.
inline void dedupe(std::vector<TaskItem>& items) {
  std::set<TaskItem> seen;
  std::vector<TaskItem> kept;
  kept.reserve(items.size());
  for (auto& it : items)
    if (seen.insert(it).second) kept.push_back(std::move(it));
  items = std::move(kept);
}

}  // namespace detail

// Subsamples every class without replacement down to the smallest class
// count. Survivors keep their original relative order.
inline LabeledTask balance_classes(const LabeledTask& task, std::uint64_t seed) {
  auto counts = task.class_counts();
  for (std::size_t c = 0; c < counts.size(); ++c)
    if (counts[c] == 0) throw ArgumentError("task '" + task.name + "': class '" + task.classes[c] + "' has no items");
  const std::size_t target = *std::min_element(counts.begin(), counts.end());

  Rng rng(seed);
  std::vector<bool> keep(task.items.size(), false);
  for (std::size_t c = 0; c < counts.size(); ++c) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < task.items.size(); ++i)
      if (task.items[i].label == static_cast<int>(c)) idx.push_back(i);
    if (idx.size() > target) seeded_shuffle(idx, rng);
    for (std::size_t k = 0; k < target; ++k) keep[idx[k]] = true;
  }

  LabeledTask out{task.name, task.mode, task.classes, {}};
  out.items.reserve(target * counts.size());
  for (std::size_t i = 0; i < task.items.size(); ++i)
    if (keep[i]) out.items.push_back(task.items[i]);
  return out;
}

// Lines are "word<TAB>label".
inline LabeledTask load_term_task(const std::filesystem::path& path, const std::vector<std::string>& classes,
                                  std::uint64_t seed = 0, std::string name = {}) {
  detail::check_classes(classes);
  LabeledTask task{name.empty() ? path.stem().string() : std::move(name), TaskMode::term, classes, {}};
  detail::for_each_record(path, [&](std::string_view line, std::size_t lineno) {
    const std::string where = path.string() + ":" + std::to_string(lineno);
    auto f = detail::split_tabs(line);
    if (f.size() != 2 || f[0].empty() || f[1].empty())
      throw InputError(where + ": expected 'word<TAB>label'");
    task.items.push_back({f[0], {}, detail::class_index(classes, f[1], where)});
  });
  detail::dedupe(task.items);
  return balance_classes(task, seed);
}

// Lines are "word1<TAB>word2<TAB>label". With symmetric set, (a,b) also adds
// (b,a) with the same label before balancing.
inline LabeledTask load_pair_task(const std::filesystem::path& path, const std::vector<std::string>& classes,
                                  bool symmetric, std::uint64_t seed = 0, std::string name = {}) {
  detail::check_classes(classes);
  LabeledTask task{name.empty() ? path.stem().string() : std::move(name), TaskMode::pair, classes, {}};
  detail::for_each_record(path, [&](std::string_view line, std::size_t lineno) {
    const std::string where = path.string() + ":" + std::to_string(lineno);
    auto f = detail::split_tabs(line);
    if (f.size() != 3 || f[0].empty() || f[1].empty() || f[2].empty())
      throw InputError(where + ": expected 'word1<TAB>word2<TAB>label'");
    if (f[0] == f[1]) throw InputError(where + ": pair of identical words '" + f[0] + "'");
    const int label = detail::class_index(classes, f[2], where);
    task.items.push_back({f[0], f[1], label});
    if (symmetric) task.items.push_back({f[1], f[0], label});
  });
  detail::dedupe(task.items);
  return balance_classes(task, seed);
}

// n distinct ordered pairs of distinct words, none of which appears in
// exclusions in either order. Rejection sampling, capped at 1000*n draws.
inline std::vector<WordPair> sample_unrelated_pairs(const std::vector<std::string>& vocab, std::size_t n,
                                                    const std::set<WordPair>& exclusions, std::uint64_t seed) {
  std::vector<WordPair> out;
  if (n == 0) return out;
  std::vector<std::string> words(vocab);
  std::sort(words.begin(), words.end());
  words.erase(std::unique(words.begin(), words.end()), words.end());
  if (words.size() < 2) throw ArgumentError("sample_unrelated_pairs: vocabulary needs at least 2 words");

  Rng rng(seed);
  std::set<WordPair> chosen;
  const std::size_t cap = 1000 * n;
  for (std::size_t attempt = 0; attempt < cap && out.size() < n; ++attempt) {
    const auto& a = words[uniform_index(rng, words.size())];
    const auto& b = words[uniform_index(rng, words.size())];
    if (a == b) continue;
    WordPair p{a, b};
    if (exclusions.count(p) || exclusions.count({b, a}) || chosen.count(p)) continue;
    chosen.insert(p);
    out.push_back(std::move(p));
  }
  if (out.size() < n)
    throw ArgumentError("sample_unrelated_pairs: found only " + std::to_string(out.size()) + " of " +
                        std::to_string(n) + " pairs within the attempt cap");
  return out;
}

// Adds a "no relation" class to a balanced pair task, filled with sampled
// pairs over the task's own words so its count matches the other classes.
inline LabeledTask with_unrelated_class(const LabeledTask& task, const std::string& label, std::uint64_t seed) {
  if (task.mode != TaskMode::pair) throw ArgumentError("unrelated pairs apply to pair tasks only");
  if (std::find(task.classes.begin(), task.classes.end(), label) != task.classes.end())
    throw ArgumentError("class '" + label + "' already present in task '" + task.name + "'");
  std::set<WordPair> exclusions;
  std::vector<std::string> vocab;
  for (const auto& it : task.items) {
    exclusions.insert({it.first, it.second});
    vocab.push_back(it.first);
    vocab.push_back(it.second);
  }
  const std::size_t per_class = task.class_counts().at(0);
  LabeledTask out = task;
  out.classes.push_back(label);
  const int idx = static_cast<int>(out.classes.size()) - 1;
  for (auto& [a, b] : sample_unrelated_pairs(vocab, per_class, exclusions, seed))
    out.items.push_back({std::move(a), std::move(b), idx});
  return out;
}

// Numeric view of a task over one embedding set.
struct Dataset {
  Matrix features;
  std::vector<int> labels;
  std::vector<int> fold_of;  // empty until make_folds
  std::vector<std::string> items;
  std::vector<std::string> classes;
  TaskMode mode = TaskMode::term;
  std::string task_name;
  std::string embedding_name;
  std::string reduction = "none";
  std::size_t oov_dropped = 0;        // items with a word missing from the set
  std::size_t rebalance_dropped = 0;  // items dropped to restore balance

  std::size_t size() const { return labels.size(); }
  std::size_t num_classes() const { return classes.size(); }
};

// Term rows are the word's vector; pair rows are vector(first) followed by
// vector(second). Items with out-of-vocabulary words are dropped, then the
// classes are rebalanced.
inline Dataset build_features(const LabeledTask& task, const EmbeddingSet& set, std::uint64_t seed = 0) {
  LabeledTask present{task.name, task.mode, task.classes, {}};
  for (const auto& it : task.items) {
    if (!set.contains(it.first)) continue;
    if (task.mode == TaskMode::pair && !set.contains(it.second)) continue;
    present.items.push_back(it);
  }
  Dataset ds;
  ds.classes = task.classes;
  ds.mode = task.mode;
  ds.task_name = task.name;
  ds.embedding_name = set.name();
  ds.oov_dropped = task.items.size() - present.items.size();

  auto counts = present.class_counts();
  if (present.items.empty() || *std::min_element(counts.begin(), counts.end()) == 0)
    throw ArgumentError("task '" + task.name + "' has no usable items over embedding set '" + set.name() + "'");
  LabeledTask kept = present.balanced() ? std::move(present) : balance_classes(present, seed);
  ds.rebalance_dropped = task.items.size() - ds.oov_dropped - kept.items.size();

  const auto d = static_cast<Eigen::Index>(set.dim());
  const Eigen::Index width = task.mode == TaskMode::term ? d : 2 * d;
  ds.features.resize(static_cast<Eigen::Index>(kept.items.size()), width);
  for (std::size_t i = 0; i < kept.items.size(); ++i) {
    const auto& it = kept.items[i];
    const auto r = static_cast<Eigen::Index>(i);
    ds.features.row(r).head(d) = set.vectors().row(static_cast<Eigen::Index>(*set.index_of(it.first)));
    if (task.mode == TaskMode::pair)
      ds.features.row(r).tail(d) = set.vectors().row(static_cast<Eigen::Index>(*set.index_of(it.second)));
    ds.labels.push_back(it.label);
    ds.items.push_back(it.display());
  }
  return ds;
}

inline constexpr int kNumFolds = 4;

// Stratified assignment into 4 folds: each class is shuffled, then dealt
// round-robin, continuing the rotation across classes so fold sizes differ by
// at most one.
inline Dataset make_folds(const Dataset& dataset, std::uint64_t seed) {
  if (dataset.size() < 2 * kNumFolds)
    throw ArgumentError("make_folds: need at least 8 items, have " + std::to_string(dataset.size()));
  Dataset out = dataset;
  out.fold_of.assign(dataset.size(), -1);
  Rng rng(seed);
  std::size_t next = 0;
  for (std::size_t c = 0; c < dataset.num_classes(); ++c) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < dataset.size(); ++i)
      if (dataset.labels[i] == static_cast<int>(c)) idx.push_back(i);
    seeded_shuffle(idx, rng);
    for (auto i : idx) out.fold_of[i] = static_cast<int>(next++ % kNumFolds);
  }
  return out;
}

}  // namespace embedprobe
