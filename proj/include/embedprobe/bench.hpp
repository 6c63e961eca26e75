#pragma once

// Experiment runner: a JSON config names embedding sets, tasks, classifiers
// and reduction pipelines; every (embedding, task, classifier, reduction) cell
// is cross-validated on a bounded worker pool and the results are written as
// JSON and CSV.
//
// Per-cell randomness: cell_seed = seed XOR fnv1a64(cell key), where the key is
// "embedding|task|classifier|reduction".

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "json.hpp"

#include "embedprobe/cross_validate.hpp"
#include "embedprobe/embedding_store.hpp"
#include "embedprobe/error.hpp"
#include "embedprobe/metrics.hpp"
#include "embedprobe/reduce.hpp"
#include "embedprobe/rng.hpp"
#include "embedprobe/task_corpus.hpp"

namespace embedprobe {

struct EmbeddingSource {
  std::string name;
  std::filesystem::path path;
  bool collapse = false;
};

struct TaskSource {
  std::string name;
  std::filesystem::path path;
  TaskMode mode = TaskMode::term;
  std::vector<std::string> classes;
  bool symmetric = false;
  std::string unrelated_class;  // pair tasks: extra class filled by sampled unrelated pairs
};

struct ReductionEntry {
  std::string text;  // canonical description
  ReductionSpec spec;
};

struct ExperimentConfig {
  std::vector<EmbeddingSource> embeddings;
  std::vector<TaskSource> tasks;
  std::vector<ClassifierKind> classifiers;
  std::vector<ReductionEntry> reductions;
  bool intersect = false;
  std::uint64_t seed = 42;
  std::map<ClassifierKind, ParamGrid> grids;
  std::filesystem::path output_dir = "embedprobe-out";

  const ParamGrid& grid(ClassifierKind k) const { return grids.at(k); }
};

namespace bench_detail {

using nlohmann::json;

inline void check_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) throw InputError(where + ": expected an object");
  for (const auto& [key, _] : obj.items())
    if (!allowed.count(key)) throw InputError(where + ": unknown key '" + key + "'");
}

inline const json& required(const json& obj, const std::string& key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) throw InputError(where + ": missing required field '" + key + "'");
  return *it;
}

template <typename T>
T get_as(const json& v, const std::string& where) {
  try {
    return v.get<T>();
  } catch (const json::exception& e) {
    throw InputError(where + ": " + e.what());
  }
}

inline std::vector<double> positive_list(const json& v, const std::string& where) {
  auto out = get_as<std::vector<double>>(v, where);
  if (out.empty()) throw InputError(where + ": must be a non-empty list");
  for (double x : out)
    if (!(x > 0.0)) throw InputError(where + ": values must be positive");
  return out;
}

}  // namespace bench_detail

// Strict: unknown keys are errors. Relative paths resolve against base_dir.
inline ExperimentConfig parse_config_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {}) {
  using namespace bench_detail;
  check_keys(j, {"embeddings", "tasks", "classifiers", "reductions", "intersect", "seed", "grids", "output_dir"},
             "config");
  ExperimentConfig cfg;
  auto resolve = [&](const std::string& p) {
    std::filesystem::path path(p);
    return path.is_absolute() || base_dir.empty() ? path : base_dir / path;
  };

  const auto& embs = required(j, "embeddings", "config");
  if (!embs.is_array() || embs.empty()) throw InputError("config: 'embeddings' must be a non-empty list");
  std::set<std::string> names;
  for (std::size_t i = 0; i < embs.size(); ++i) {
    const std::string where = "embeddings[" + std::to_string(i) + "]";
    check_keys(embs[i], {"name", "path", "collapse"}, where);
    EmbeddingSource e;
    e.path = resolve(get_as<std::string>(required(embs[i], "path", where), where + ".path"));
    e.name = embs[i].contains("name") ? get_as<std::string>(embs[i]["name"], where + ".name") : e.path.stem().string();
    e.collapse = embs[i].value("collapse", false);
    if (e.name.empty() || !names.insert(e.name).second) throw InputError(where + ": empty or duplicate name");
    cfg.embeddings.push_back(std::move(e));
  }

  const auto& tasks = required(j, "tasks", "config");
  if (!tasks.is_array() || tasks.empty()) throw InputError("config: 'tasks' must be a non-empty list");
  names.clear();
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    const std::string where = "tasks[" + std::to_string(i) + "]";
    check_keys(tasks[i], {"name", "path", "mode", "classes", "symmetric", "unrelated_class"}, where);
    TaskSource t;
    t.path = resolve(get_as<std::string>(required(tasks[i], "path", where), where + ".path"));
    t.name = tasks[i].contains("name") ? get_as<std::string>(tasks[i]["name"], where + ".name") : t.path.stem().string();
    const auto mode = get_as<std::string>(required(tasks[i], "mode", where), where + ".mode");
    if (mode == "term") t.mode = TaskMode::term;
    else if (mode == "pair") t.mode = TaskMode::pair;
    else throw InputError(where + ": mode must be 'term' or 'pair'");
    t.classes = get_as<std::vector<std::string>>(required(tasks[i], "classes", where), where + ".classes");
    t.symmetric = get_as<bool>(tasks[i].value("symmetric", json(false)), where + ".symmetric");
    t.unrelated_class = get_as<std::string>(tasks[i].value("unrelated_class", json("")), where + ".unrelated_class");
    if (t.mode == TaskMode::term && (t.symmetric || !t.unrelated_class.empty()))
      throw InputError(where + ": 'symmetric' and 'unrelated_class' apply to pair tasks only");
    const std::size_t total = t.classes.size() + (t.unrelated_class.empty() ? 0 : 1);
    if (total < 2 || total > 3) throw InputError(where + ": tasks have 2 or 3 classes");
    if (t.name.empty() || !names.insert(t.name).second) throw InputError(where + ": empty or duplicate name");
    cfg.tasks.push_back(std::move(t));
  }

  const auto& cls = required(j, "classifiers", "config");
  const auto cls_names = get_as<std::vector<std::string>>(cls, "classifiers");
  if (cls_names.empty()) throw InputError("config: 'classifiers' must be non-empty");
  for (const auto& c : cls_names) {
    ClassifierKind k;
    try {
      k = parse_classifier(c);
    } catch (const ArgumentError& e) {
      throw InputError(std::string("classifiers: ") + e.what());
    }
    if (std::find(cfg.classifiers.begin(), cfg.classifiers.end(), k) != cfg.classifiers.end())
      throw InputError("classifiers: duplicate '" + c + "'");
    cfg.classifiers.push_back(k);
  }

  const auto red = j.contains("reductions") ? get_as<std::vector<std::string>>(j["reductions"], "reductions")
                                            : std::vector<std::string>{"none"};
  if (red.empty()) throw InputError("config: 'reductions' must be non-empty when given");
  std::set<std::string> seen_red;
  for (const auto& r : red) {
    ReductionEntry e;
    try {
      e.spec = parse_reduction(r);
    } catch (const ArgumentError& err) {
      throw InputError(std::string("reductions: ") + err.what());
    }
    e.text = e.spec.describe();
    if (!seen_red.insert(e.text).second) throw InputError("reductions: duplicate pipeline '" + e.text + "'");
    cfg.reductions.push_back(std::move(e));
  }

  cfg.intersect = j.contains("intersect") ? get_as<bool>(j["intersect"], "intersect") : cfg.embeddings.size() > 1;
  if (j.contains("seed")) cfg.seed = get_as<std::uint64_t>(j["seed"], "seed");
  if (j.contains("output_dir")) cfg.output_dir = resolve(get_as<std::string>(j["output_dir"], "output_dir"));
  else cfg.output_dir = resolve(cfg.output_dir.string());

  for (auto k : {ClassifierKind::logreg, ClassifierKind::svm_rbf}) cfg.grids[k] = default_grid(k);
  if (j.contains("grids")) {
    const auto& g = j["grids"];
    check_keys(g, {"logreg", "svm-rbf"}, "grids");
    if (g.contains("logreg")) {
      check_keys(g["logreg"], {"C"}, "grids.logreg");
      if (g["logreg"].contains("C")) cfg.grids[ClassifierKind::logreg].C = positive_list(g["logreg"]["C"], "grids.logreg.C");
    }
    if (g.contains("svm-rbf")) {
      const auto& s = g["svm-rbf"];
      check_keys(s, {"C", "gamma_scaled"}, "grids.svm-rbf");
      if (s.contains("C")) cfg.grids[ClassifierKind::svm_rbf].C = positive_list(s["C"], "grids.svm-rbf.C");
      if (s.contains("gamma_scaled"))
        cfg.grids[ClassifierKind::svm_rbf].gamma_scaled = positive_list(s["gamma_scaled"], "grids.svm-rbf.gamma_scaled");
    }
  }
  return cfg;
}

inline ExperimentConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config '" + path.string() + "'");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError("config '" + path.string() + "': " + e.what());
  }
  return parse_config_json(j, path.parent_path());
}

struct CellKey {
  std::string embedding;
  std::string task;
  std::string classifier;
  std::string reduction;

  std::string str() const { return embedding + "|" + task + "|" + classifier + "|" + reduction; }
  auto tie() const { return std::tie(embedding, task, classifier, reduction); }
  friend bool operator<(const CellKey& a, const CellKey& b) { return a.tie() < b.tie(); }
};

inline std::uint64_t cell_seed(std::uint64_t seed, const CellKey& key) { return seed ^ stable_hash(key.str()); }

struct CellError {
  CellKey key;
  std::string message;
};

struct Aggregate {
  std::string embedding;
  std::string task;  // empty for across-task rows
  std::string reduction;
  std::optional<double> geometric_mean;  // absent when a member value is 0
  double arithmetic_mean = 0.0;
  std::vector<std::string> members;  // classifiers or tasks included
  std::vector<std::string> omitted;  // expected members with no report
};

struct RunMatrixResult {
  std::size_t cell_count = 0;
  std::vector<EvalReport> reports;  // sorted by cell key
  std::vector<CellError> errors;    // sorted by cell key
  std::vector<Aggregate> across_classifiers;  // per (embedding, task, reduction)
  std::vector<Aggregate> across_tasks;        // per (embedding, reduction)
};

namespace bench_detail {

inline CellKey key_of(const EvalReport& r) { return {r.embedding, r.task, r.classifier, r.reduction}; }

inline Aggregate make_aggregate(std::string emb, std::string task, std::string red,
                                const std::vector<std::pair<std::string, double>>& values,
                                const std::vector<std::string>& expected) {
  Aggregate a{std::move(emb), std::move(task), std::move(red), std::nullopt, 0.0, {}, {}};
  std::vector<double> v;
  for (const auto& [name, x] : values) {
    a.members.push_back(name);
    v.push_back(x);
  }
  for (const auto& e : expected)
    if (std::find(a.members.begin(), a.members.end(), e) == a.members.end()) a.omitted.push_back(e);
  if (!v.empty()) {
    a.arithmetic_mean = arithmetic_mean(v);
    if (std::all_of(v.begin(), v.end(), [](double x) { return x > 0.0; })) a.geometric_mean = geometric_mean(v);
  }
  return a;
}

}  // namespace bench_detail

// Geometric means of mean accuracy: across classifiers for every
// (embedding, task, reduction), then across tasks (of those per-task values)
// for every (embedding, reduction). Only completed cells contribute.
inline void compute_aggregates(RunMatrixResult& result, const std::vector<std::string>& classifiers,
                               const std::vector<std::string>& tasks) {
  using Triple = std::tuple<std::string, std::string, std::string>;
  std::map<Triple, std::vector<std::pair<std::string, double>>> by_task;
  for (const auto& r : result.reports) by_task[{r.embedding, r.task, r.reduction}].emplace_back(r.classifier, r.mean_accuracy);

  result.across_classifiers.clear();
  result.across_tasks.clear();
  std::map<std::pair<std::string, std::string>, std::vector<std::pair<std::string, double>>> by_emb;
  for (const auto& [k, vals] : by_task) {
    auto agg = bench_detail::make_aggregate(std::get<0>(k), std::get<1>(k), std::get<2>(k), vals, classifiers);
    if (agg.geometric_mean) by_emb[{std::get<0>(k), std::get<2>(k)}].emplace_back(std::get<1>(k), *agg.geometric_mean);
    else by_emb[{std::get<0>(k), std::get<2>(k)}];
    result.across_classifiers.push_back(std::move(agg));
  }
  for (const auto& [k, vals] : by_emb)
    result.across_tasks.push_back(bench_detail::make_aggregate(k.first, "", k.second, vals, tasks));
}

struct LoadedInputs {
  std::vector<EmbeddingSet> embeddings;
  std::vector<LabeledTask> tasks;
};

// Any failure here is fatal for the run.
inline LoadedInputs load_inputs(const ExperimentConfig& cfg) {
  for (const auto& e : cfg.embeddings)
    if (!std::filesystem::exists(e.path)) throw InputError("embedding file not found: '" + e.path.string() + "'");
  for (const auto& t : cfg.tasks)
    if (!std::filesystem::exists(t.path)) throw InputError("task file not found: '" + t.path.string() + "'");

  LoadedInputs in;
  for (const auto& e : cfg.embeddings) in.embeddings.push_back(load_embeddings(e.path, e.collapse, e.name));
  if (cfg.intersect && in.embeddings.size() > 1) in.embeddings = intersect_vocab(in.embeddings);

  for (const auto& t : cfg.tasks) {
    const std::uint64_t task_seed = cfg.seed ^ stable_hash(t.name);
    LabeledTask task = t.mode == TaskMode::term ? load_term_task(t.path, t.classes, task_seed, t.name)
                                                : load_pair_task(t.path, t.classes, t.symmetric, task_seed, t.name);
    if (!t.unrelated_class.empty()) task = with_unrelated_class(task, t.unrelated_class, task_seed + 1);
    in.tasks.push_back(std::move(task));
  }
  return in;
}

// Deterministic for a fixed config regardless of worker count.
inline RunMatrixResult run_experiment(const ExperimentConfig& cfg, unsigned workers = 1) {
  const LoadedInputs in = load_inputs(cfg);

  struct Job {
    CellKey key;
    std::size_t emb, task, red;
    ClassifierKind kind;
  };
  std::vector<Job> jobs;
  for (std::size_t e = 0; e < cfg.embeddings.size(); ++e)
    for (std::size_t t = 0; t < cfg.tasks.size(); ++t)
      for (auto kind : cfg.classifiers)
        for (std::size_t r = 0; r < cfg.reductions.size(); ++r)
          jobs.push_back({{in.embeddings[e].name(), in.tasks[t].name, to_string(kind), cfg.reductions[r].text}, e, t, r, kind});

  // Reduced sets are shared read-only by every cell that needs them.
  std::vector<std::vector<std::optional<EmbeddingSet>>> reduced(in.embeddings.size());
  std::vector<std::vector<std::string>> reduce_errors(in.embeddings.size());
  for (std::size_t e = 0; e < in.embeddings.size(); ++e) {
    for (const auto& r : cfg.reductions) {
      try {
        reduced[e].emplace_back(apply_reduction(in.embeddings[e], r.spec));
        reduce_errors[e].emplace_back();
      } catch (const std::exception& ex) {
        reduced[e].emplace_back(std::nullopt);
        reduce_errors[e].emplace_back(std::string("reduction failed: ") + ex.what());
      }
    }
  }

  std::vector<std::optional<EvalReport>> reports(jobs.size());
  std::vector<std::string> failures(jobs.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      const Job& job = jobs[i];
      const auto& set = reduced[job.emb][job.red];
      if (!set) {
        failures[i] = reduce_errors[job.emb][job.red];
        continue;
      }
      try {
        const std::uint64_t s = cell_seed(cfg.seed, job.key);
        Dataset ds = build_features(in.tasks[job.task], *set, s);
        ds.reduction = job.key.reduction;
        ds = make_folds(ds, s);
        reports[i] = cross_validate(ds, job.kind, cfg.grid(job.kind), s);
      } catch (const std::exception& ex) {
        failures[i] = ex.what();
      }
    }
  };
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(jobs.size(), 1))));
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  }

  RunMatrixResult result;
  result.cell_count = jobs.size();
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    if (reports[i]) result.reports.push_back(std::move(*reports[i]));
    else result.errors.push_back({jobs[i].key, failures[i]});
  }
  std::sort(result.reports.begin(), result.reports.end(),
            [](const EvalReport& a, const EvalReport& b) { return bench_detail::key_of(a) < bench_detail::key_of(b); });
  std::sort(result.errors.begin(), result.errors.end(),
            [](const CellError& a, const CellError& b) { return a.key < b.key; });

  std::vector<std::string> cls, tasks;
  for (auto k : cfg.classifiers) cls.emplace_back(to_string(k));
  for (const auto& t : in.tasks) tasks.push_back(t.name);
  compute_aggregates(result, cls, tasks);
  return result;
}

// ---------------------------------------------------------------------------
// Serialization

inline nlohmann::ordered_json to_json(const EvalReport& r) {
  using nlohmann::ordered_json;
  ordered_json j;
  j["embedding"] = r.embedding;
  j["task"] = r.task;
  j["mode"] = r.mode;
  j["classifier"] = r.classifier;
  j["reduction"] = r.reduction;
  j["classes"] = r.classes;
  j["items"] = r.items;
  j["oov_dropped"] = r.oov_dropped;
  j["fold_accuracies"] = r.fold_accuracies;
  j["mean_accuracy"] = r.mean_accuracy;
  j["macro_f1"] = r.macro_f1;
  ordered_json params = ordered_json::array();
  for (const auto& p : r.best_params) {
    ordered_json q;
    q["C"] = p.C;
    if (r.classifier == "svm-rbf") q["gamma"] = p.gamma;
    params.push_back(q);
  }
  j["best_params"] = params;
  ordered_json cm = ordered_json::array();
  for (std::size_t t = 0; t < r.confusion.classes(); ++t) {
    ordered_json row = ordered_json::array();
    for (std::size_t p = 0; p < r.confusion.classes(); ++p) row.push_back(r.confusion(t, p));
    cm.push_back(row);
  }
  j["confusion"] = cm;
  const Metrics m = metrics(r.confusion);
  ordered_json per = ordered_json::array();
  for (std::size_t c = 0; c < m.per_class.size(); ++c)
    per.push_back({{"class", r.classes[c]}, {"precision", m.per_class[c].precision},
                   {"recall", m.per_class[c].recall}, {"f1", m.per_class[c].f1}});
  j["per_class"] = per;
  ordered_json probs = ordered_json::array();
  for (const auto& ip : r.item_probs)
    probs.push_back({{"item", ip.item}, {"true", r.classes[static_cast<std::size_t>(ip.true_class)]},
                     {"predicted", r.classes[static_cast<std::size_t>(ip.predicted_class)]},
                     {"probability", ip.probability}, {"fold", ip.fold}});
  j["item_probs"] = probs;
  j["warnings"] = r.warnings;
  return j;
}

inline nlohmann::ordered_json to_json(const Aggregate& a) {
  nlohmann::ordered_json j;
  j["embedding"] = a.embedding;
  if (!a.task.empty()) j["task"] = a.task;
  j["reduction"] = a.reduction;
  j["geometric_mean"] = a.geometric_mean ? nlohmann::ordered_json(*a.geometric_mean) : nlohmann::ordered_json(nullptr);
  j["arithmetic_mean"] = a.arithmetic_mean;
  j["members"] = a.members;
  j["omitted"] = a.omitted;
  return j;
}

inline std::string results_json(const RunMatrixResult& result) {
  nlohmann::ordered_json j;
  j["reports"] = nlohmann::ordered_json::array();
  for (const auto& r : result.reports) j["reports"].push_back(to_json(r));
  j["errors"] = nlohmann::ordered_json::array();
  for (const auto& e : result.errors)
    j["errors"].push_back({{"embedding", e.key.embedding}, {"task", e.key.task}, {"classifier", e.key.classifier},
                           {"reduction", e.key.reduction}, {"message", e.message}});
  j["aggregates"]["across_classifiers"] = nlohmann::ordered_json::array();
  for (const auto& a : result.across_classifiers) j["aggregates"]["across_classifiers"].push_back(to_json(a));
  j["aggregates"]["across_tasks"] = nlohmann::ordered_json::array();
  for (const auto& a : result.across_tasks) j["aggregates"]["across_tasks"].push_back(to_json(a));
  return j.dump(2) + "\n";
}

namespace bench_detail {

inline std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return buf;
}

// Quotes a CSV field when it holds a separator, quote or newline.
inline std::string csv(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline std::string file_token(const std::string& s) {
  std::string out;
  for (char c : s) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '-' || c == '.';
    out += ok ? c : '_';
  }
  return out;
}

// Curve axis from the last reduction stage.
inline std::pair<std::string, std::string> curve_axis(const std::string& reduction) {
  const ReductionSpec spec = parse_reduction(reduction);
  if (spec.stages.empty()) return {"full", ""};
  const auto& last = spec.stages.back();
  switch (last.kind) {
    case ReductionStage::Kind::truncate: return {"bits", std::to_string(last.param)};
    case ReductionStage::Kind::sign: return {"sign", ""};
    case ReductionStage::Kind::pca: return {"components", std::to_string(last.param)};
    default: return {"full", ""};
  }
}

inline void write_file(const std::filesystem::path& p, const std::string& content) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw InputError("cannot write '" + p.string() + "'");
  out << content;
  if (!out) throw InputError("write failed: '" + p.string() + "'");
}

}  // namespace bench_detail

inline std::string ranking_file_name(const EvalReport& r) {
  using bench_detail::file_token;
  return file_token(r.embedding) + "__" + file_token(r.task) + "__" + file_token(r.classifier) + "__" +
         file_token(r.reduction) + ".csv";
}

// Items sorted by predicted-class probability, highest first.
inline std::vector<ItemProbability> ranked_items(const EvalReport& r) {
  auto items = r.item_probs;
  std::stable_sort(items.begin(), items.end(), [](const ItemProbability& a, const ItemProbability& b) {
    if (a.probability != b.probability) return a.probability > b.probability;
    return a.item < b.item;
  });
  return items;
}

// Writes results.json, summary.csv, curves.csv and rankings/<cell>.csv.
inline void emit_reports(const RunMatrixResult& result, const std::filesystem::path& dir) {
  using namespace bench_detail;
  std::error_code ec;
  std::filesystem::create_directories(dir / "rankings", ec);
  if (ec) throw InputError("cannot create '" + (dir / "rankings").string() + "': " + ec.message());

  write_file(dir / "results.json", results_json(result));

  std::ostringstream summary;
  summary << "embedding,task,mode,classifier,reduction,items,fold0,fold1,fold2,fold3,mean_accuracy,macro_f1\n";
  for (const auto& r : result.reports) {
    summary << csv(r.embedding) << ',' << csv(r.task) << ',' << r.mode << ',' << r.classifier << ','
            << csv(r.reduction) << ',' << r.items;
    for (double a : r.fold_accuracies) summary << ',' << num(a);
    summary << ',' << num(r.mean_accuracy) << ',' << num(r.macro_f1) << '\n';
  }
  write_file(dir / "summary.csv", summary.str());

  std::ostringstream curves;
  curves << "embedding,task,classifier,reduction,axis,value,mean_accuracy,macro_f1\n";
  for (const auto& r : result.reports) {
    auto [axis, value] = curve_axis(r.reduction);
    curves << csv(r.embedding) << ',' << csv(r.task) << ',' << r.classifier << ',' << csv(r.reduction) << ',' << axis
           << ',' << value << ',' << num(r.mean_accuracy) << ',' << num(r.macro_f1) << '\n';
  }
  for (const auto& a : result.across_classifiers) {
    if (!a.geometric_mean) continue;
    auto [axis, value] = curve_axis(a.reduction);
    curves << csv(a.embedding) << ',' << csv(a.task) << ",geomean," << csv(a.reduction) << ',' << axis << ',' << value
           << ',' << num(*a.geometric_mean) << ",\n";
  }
  write_file(dir / "curves.csv", curves.str());

  for (const auto& r : result.reports) {
    if (r.item_probs.empty()) continue;
    std::ostringstream rank;
    rank << "rank,item,true_class,predicted_class,probability,fold\n";
    std::size_t k = 0;
    for (const auto& ip : ranked_items(r))
      rank << ++k << ',' << csv(ip.item) << ',' << csv(r.classes[static_cast<std::size_t>(ip.true_class)]) << ','
           << csv(r.classes[static_cast<std::size_t>(ip.predicted_class)]) << ',' << num(ip.probability) << ','
           << ip.fold << '\n';
    write_file(dir / "rankings" / ranking_file_name(r), rank.str());
  }
}

}  // namespace embedprobe
