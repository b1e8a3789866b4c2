// halfic: run incomplete-Cholesky preconditioned refinement experiments on
// Matrix Market files and print the statistics as CSV or JSON.
//
//   halfic --matrix HB/bcsstk27.mtx --level 3 --format fp16 --solver cg
//   halfic --suite runs.jsonl --jobs 4 --output json --out results.json

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "halfic/experiment.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Half-precision incomplete Cholesky preconditioned iterative refinement"};

  halfic::RunConfig cfg;
  std::string solver = "cg", output = "csv", out_path, suite;
  std::optional<int> inner_maxit, outer_itmax;
  std::optional<double> tau;
  int jobs = 1;
  bool summary = false;

  app.add_option("--matrix", cfg.matrix_path, "Matrix Market file (symmetric, real)");
  app.add_option("--level", cfg.level, "Level of fill l for IC(l)")->check(CLI::NonNegativeNumber);
  app.add_option("--format", cfg.format, "Factorization format")
      ->check(CLI::IsMember({"fp16", "bf16", "fp32", "fp64"}));
  app.add_option("--solver", solver, "Refinement driver")
      ->check(CLI::IsMember({"cg", "gmres", "lu-ir", "plain-krylov"}));
  app.add_option("--delta", cfg.delta, "Outer backward-error tolerance");
  app.add_option("--delta-krylov", cfg.delta_krylov, "Inner Krylov tolerance");
  app.add_option("--inner-maxit", inner_maxit, "Inner iteration cap (1000; 2000 for plain-krylov)");
  app.add_option("--outer-itmax", outer_itmax, "Outer iteration cap (20; 1 for plain-krylov)");
  app.add_option("--tau", tau, "Pivot threshold (1e-5 for fp16/bf16, else 1e-20)");
  app.add_option("--shift-init", cfg.shift_init, "First nonzero diagonal shift");
  app.add_option("--max-restarts", cfg.max_restarts, "Shifted restarts before giving up");
  app.add_option("--output", output, "Record format")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--out", out_path, "Write records here instead of stdout");
  app.add_option("--suite", suite, "Manifest with one JSON config per line")
      ->check(CLI::ExistingFile);
  app.add_option("--jobs", jobs, "Concurrent runs in suite mode")->check(CLI::PositiveNumber);
  app.add_flag("--summary", summary, "Also print a table to stderr");
  CLI11_PARSE(app, argc, argv);

  std::vector<halfic::RunRecord> records;
  try {
    if (!suite.empty()) {
      if (!cfg.matrix_path.empty()) throw CLI::ValidationError("--suite and --matrix are exclusive");
      std::ifstream manifest(suite);
      records = halfic::run_manifest(manifest, jobs);
    } else {
      if (cfg.matrix_path.empty()) throw CLI::RequiredError("--matrix or --suite");
      cfg.solver = halfic::solver_from_name(solver);
      cfg.output = halfic::output_format_from_name(output);
      cfg.inner_maxit = inner_maxit;
      cfg.outer_itmax = outer_itmax;
      cfg.tau = tau;
      cfg.validate();
      records.push_back(halfic::run_experiment(cfg));
    }
  } catch (const CLI::Error& e) {
    return app.exit(e);
  } catch (const halfic::ConfigError& e) {
    std::fprintf(stderr, "halfic: %s\n", e.what());
    return 2;
  }

  std::ofstream file;
  if (!out_path.empty()) {
    file.open(out_path);
    if (!file) {
      std::fprintf(stderr, "halfic: cannot write '%s'\n", out_path.c_str());
      return 2;
    }
  }
  std::ostream& out = out_path.empty() ? std::cout : file;
  if (output == "json")
    halfic::write_json(out, records);
  else
    halfic::write_csv(out, records);
  if (summary) halfic::write_summary(std::cerr, records);

  int failures = 0;
  for (const auto& r : records) {
    if (r.status != "error") continue;
    ++failures;
    std::fprintf(stderr, "halfic: %s: %s\n", r.identifier.c_str(), r.error.c_str());
  }
  return failures == 0 ? 0 : 1;
}
