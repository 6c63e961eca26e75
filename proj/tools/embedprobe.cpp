// embedprobe: run probing experiments, apply reductions, inspect embedding files.

#include <cstdio>
#include <iostream>
#include <thread>

#include "CLI11.hpp"

#include "embedprobe/embedprobe.hpp"

namespace {

int run(const std::string& config_path, unsigned workers, std::optional<std::uint64_t> seed,
        const std::string& out) {
  auto cfg = embedprobe::parse_config(config_path);
  if (seed) cfg.seed = *seed;
  if (!out.empty()) cfg.output_dir = out;
  const auto result = embedprobe::run_experiment(cfg, workers);
  embedprobe::emit_reports(result, cfg.output_dir);

  std::cerr << "cells: " << result.cell_count << ", reports: " << result.reports.size()
            << ", errors: " << result.errors.size() << ", output: " << cfg.output_dir.string() << "\n";
  for (const auto& e : result.errors) std::cerr << "  failed " << e.key.str() << ": " << e.message << "\n";
  return result.errors.empty() ? 0 : 2;
}

int reduce(const std::string& in, bool collapse, const std::string& spec, const std::string& out) {
  const auto set = embedprobe::load_embeddings(in, collapse);
  const auto reduced = embedprobe::apply_reduction(set, embedprobe::parse_reduction(spec));
  embedprobe::write_embeddings(reduced, std::filesystem::path(out));
  return 0;
}

int inspect(const std::string& in, bool collapse) {
  const auto set = embedprobe::load_embeddings(in, collapse);
  const auto& v = set.vectors();
  std::printf("name: %s\nvocabulary: %zu\ndimensions: %zu\nmin: %.9g\nmax: %.9g\nmax_abs: %.9g\n", set.name().c_str(),
              set.size(), set.dim(), v.minCoeff(), v.maxCoeff(), v.cwiseAbs().maxCoeff());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"embedprobe: probe word embeddings with term and pair classification tasks"};
  app.require_subcommand(1);

  std::string config, out;
  unsigned workers = std::max(1u, std::thread::hardware_concurrency());
  std::optional<std::uint64_t> seed;
  auto* run_cmd = app.add_subcommand("run", "Run an experiment matrix from a JSON config");
  run_cmd->add_option("--config", config, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
  run_cmd->add_option("--workers", workers, "Worker threads")->check(CLI::PositiveNumber);
  run_cmd->add_option("--seed", seed, "Override the config seed");
  run_cmd->add_option("--out", out, "Override the output directory");

  std::string emb_path, spec, reduce_out;
  bool collapse = false;
  auto* reduce_cmd = app.add_subcommand("reduce", "Apply a reduction pipeline to an embedding file");
  reduce_cmd->add_option("--embeddings", emb_path, "Embedding text file")->required();
  reduce_cmd->add_option("--spec", spec, "Pipeline, e.g. standardize,pca:10")->required();
  reduce_cmd->add_option("--out", reduce_out, "Output embedding file")->required();
  reduce_cmd->add_flag("--collapse", collapse, "Average repeated words (multi-prototype input)");

  auto* inspect_cmd = app.add_subcommand("inspect", "Print vocabulary size, dimensions and value range");
  inspect_cmd->add_option("--embeddings", emb_path, "Embedding text file")->required();
  inspect_cmd->add_flag("--collapse", collapse, "Average repeated words (multi-prototype input)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*run_cmd) return run(config, workers, seed, out);
    if (*reduce_cmd) return reduce(emb_path, collapse, spec, reduce_out);
    if (*inspect_cmd) return inspect(emb_path, collapse);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
