#pragma once

// Experiment harness: one run reads a matrix, scales it, squeezes it into the
// factor format, builds the IC(level) pattern, factorizes with shifts and
// solves the scaled system with the chosen refinement driver.

#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "halfic/refine.hpp"
#include "halfic/sparse.hpp"

namespace halfic {

enum class Solver { cg, gmres, lu_ir, plain_krylov };
enum class OutputFormat { csv, json };

const char* to_string(Solver solver);
Solver solver_from_name(std::string_view name);  // "cg", "gmres", "lu-ir", "plain-krylov"
const char* to_string(OutputFormat format);
OutputFormat output_format_from_name(std::string_view name);

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct RunConfig {
  std::string matrix_path;
  int level = 0;
  std::string format = "fp16";
  Solver solver = Solver::cg;
  double delta = 1e3 * kU64;
  double delta_krylov = default_delta_krylov();
  std::optional<int> inner_maxit;  // 1000, or 2000 for plain-krylov
  std::optional<int> outer_itmax;  // 20, or 1 for plain-krylov
  std::optional<double> tau;       // default_tau(format)
  double shift_init = 1e-3;
  int max_restarts = 40;
  OutputFormat output = OutputFormat::csv;

  int effective_inner_maxit() const;
  int effective_outer_itmax() const;

  /// Throws ConfigError naming the offending field.
  void validate() const;
};

/// Parse one manifest line: a JSON object whose keys are the RunConfig field
/// names (matrix, level, format, solver, delta, delta_krylov, inner_maxit,
/// outer_itmax, tau, shift_init, max_restarts, output). Unknown keys and
/// wrong types are rejected with ConfigError.
RunConfig parse_run_config(std::string_view json_text);

/// Result of one run. Residuals refer to the scaled system the solver works
/// on; resfinal_unscaled is the same backward error for the original system
/// after undoing the scaling. normA, normb and nnz_A describe the original
/// matrix (nnz_A counts the stored lower triangle).
struct RunRecord {
  std::string identifier;
  std::string format;
  int level = 0;
  std::string solver;
  int n = 0;
  long long nnz_A = 0;
  double normA = 0.0;
  double normb = 0.0;
  long long nnz_L = 0;
  double alpha = 0.0;
  int nmod = 0;
  int nscal = 0;
  int nofl = 0;
  int restarts = 0;
  double resinit = 0.0;
  double resfinal = 0.0;
  double resfinal_unscaled = 0.0;
  int iouter = 0;
  int totits = 0;
  int maxbasis = 0;
  int fallbacks = 0;
  // converged, not_converged, diverged, small_curvature, stagnated or error
  std::string status;
  std::string error;
  double wall_seconds = 0.0;

  bool operator==(const RunRecord&) const = default;
};

/// "Group/name" for ".../Group/name.mtx", or just "name" without a parent.
std::string identifier_from_path(const std::string& path);

/// x_true = ones(n), b = A x_true.
std::pair<std::vector<double>, std::vector<double>> build_rhs(const SparseSpd& a);

/// The pipeline on an already loaded matrix. Errors (factorization budget
/// exhausted, squeeze overflow, ...) come back as a record with status
/// "error" and the message in `error`.
RunRecord run_on_matrix(const SparseSpd& a, const std::string& identifier, const RunConfig& config);

/// Reads config.matrix_path, then run_on_matrix. Never throws for run-level
/// problems.
RunRecord run_experiment(const RunConfig& config);

/// Runs every config, `jobs` at a time, and returns records in input order.
std::vector<RunRecord> run_suite(std::span<const RunConfig> configs, int jobs = 1);

/// Reads a manifest (one JSON config per line, blank lines and lines starting
/// with '#' ignored) and runs it. A line that fails to parse becomes an error
/// record in its place.
std::vector<RunRecord> run_manifest(std::istream& manifest, int jobs = 1);

/// Fixed column order, header first, numbers printed with 17 significant
/// digits so that read_csv restores them exactly.
const std::vector<std::string>& csv_columns();
void write_csv(std::ostream& out, std::span<const RunRecord> records);
std::vector<RunRecord> read_csv(std::istream& in);

/// JSON array of flat objects keyed by the CSV column names.
void write_json(std::ostream& out, std::span<const RunRecord> records);
std::vector<RunRecord> read_json(std::istream& in);

/// Human-readable table, one row per record.
void write_summary(std::ostream& out, std::span<const RunRecord> records);

}  // namespace halfic
