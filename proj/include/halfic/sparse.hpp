#pragma once

#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "halfic/precision.hpp"

namespace halfic {

/// Symmetric matrix held as the compressed-sparse-column lower triangle,
/// diagonal included. Row indices are sorted within each column, so the
/// diagonal is always the first entry of its column.
struct SparseSpd {
  int n = 0;
  std::vector<int> col_ptr{0};
  std::vector<int> row_idx;
  std::vector<double> values;

  std::size_t nnz() const { return row_idx.size(); }
  double diag(int j) const { return values[col_ptr[j]]; }

  /// Checks the structural invariants: sorted unique rows in [j, n), the
  /// diagonal leading every column, finite values. With
  /// `require_nonzero_diagonal` a zero diagonal value is also rejected.
  /// Throws std::invalid_argument describing the first violation.
  void validate(bool require_nonzero_diagonal = true) const;

  /// Build from (row, col, value) triplets, 0-based. Entries above the
  /// diagonal are mirrored, duplicates are summed, then validate() runs.
  static SparseSpd from_triplets(int n, std::span<const int> rows, std::span<const int> cols,
                                 std::span<const double> vals);
};

class MatrixMarketError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parse a Matrix Market "coordinate real symmetric" (or integer symmetric)
/// stream. Throws MatrixMarketError on malformed input, unsupported
/// qualifiers, out-of-range indices or a missing diagonal entry.
SparseSpd read_matrix_market(std::istream& in);
SparseSpd read_matrix_market_file(const std::string& path);

/// Diagonal of the symmetric scaling S; s[j] > 0.
struct ScalingVector {
  std::vector<double> s;
};

/// s_j = sqrt(||A(:, j)||_2) over the full symmetric column and
/// Ahat = S^{-1} A S^{-1}, so every |Ahat_ij| <= 1.
/// Throws std::invalid_argument on a zero or non-finite column norm.
std::pair<SparseSpd, ScalingVector> l2_scale(const SparseSpd& a);

struct SqueezeReport {
  std::size_t kept = 0;
  std::size_t dropped_underflow = 0;
  std::size_t flushed_subnormal = 0;
};

/// Round every entry into `f`. Off-diagonal entries that round to zero are
/// dropped, off-diagonal subnormals are flushed and dropped. Diagonal entries
/// always stay (possibly as an explicit 0 so the factorization sees B1).
/// Throws std::overflow_error if any entry overflows.
std::pair<SparseSpd, SqueezeReport> squeeze(const SparseSpd& a_hat, const FpFormat& f);

/// y = A x with the full symmetric matrix, fp64.
std::vector<double> matvec_f64(const SparseSpd& a, std::span<const double> x);
void matvec_f64(const SparseSpd& a, std::span<const double> x, std::span<double> y);

/// Largest absolute row sum of the full symmetric matrix.
double inf_norm_matrix(const SparseSpd& a);
double inf_norm_vector(std::span<const double> v);

}  // namespace halfic
