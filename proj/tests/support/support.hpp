#pragma once

// Test-only helpers: dense reference linear algebra, an integer-only fp16
// converter, a level-of-fill recurrence, and matrix generators.

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "halfic/sparse.hpp"
#include "halfic/symbolic.hpp"

namespace halfic::testing {

/// Row-major dense square matrix.
struct Dense {
  int n = 0;
  std::vector<double> a;

  explicit Dense(int n_ = 0) : n(n_), a(static_cast<std::size_t>(n_) * n_, 0.0) {}
  double& operator()(int i, int j) { return a[static_cast<std::size_t>(i) * n + j]; }
  double operator()(int i, int j) const { return a[static_cast<std::size_t>(i) * n + j]; }
};

Dense to_dense(const SparseSpd& s);

/// Lower Cholesky factor computed column by column with inner products
/// (left-looking). nullopt if a pivot is not positive.
std::optional<Dense> dense_cholesky(const Dense& a);

/// Solve (L L^T) x = b with a dense lower factor.
std::vector<double> cholesky_solve(const Dense& l, const std::vector<double>& b);

/// Solve L y = b and L^T y = b by plain substitution.
std::vector<double> lower_solve(const Dense& l, const std::vector<double>& b);
std::vector<double> upper_solve_transposed(const Dense& l, const std::vector<double>& b);

/// fp16 reference conversion working only on the integer bit patterns.
/// Returns the binary16 encoding; `overflow` is set (and the result is the
/// signed infinity encoding) when the rounded magnitude exceeds 65504.
struct HalfBits {
  std::uint16_t bits = 0;
  bool overflow = false;
};
HalfBits fp16_reference(double x);
double fp16_bits_to_double(std::uint16_t bits);

/// Fill levels from the symbolic elimination recurrence
/// lev(i,j) = min(lev(i,j), lev(i,k) + lev(k,j) + 1), returning the lower
/// pattern of entries with level <= `level` (dense boolean, row-major).
std::vector<char> level_oracle(const SparseSpd& structure, int level);

/// Random symmetric structure with a nonzero diagonal. `density` is the
/// probability of each strictly lower position.
SparseSpd random_structure(int n, double density, std::mt19937_64& rng);

/// Random sparse SPD matrix: random off-diagonal values in [-1, 1], a
/// strictly dominant diagonal, then a symmetric diagonal rescaling with
/// factors 10^[-spread, spread].
SparseSpd random_spd(int n, double density, double spread, std::mt19937_64& rng);

/// The finite element matrix of the `wathen` test gallery on an nx-by-ny
/// grid of 8-node serendipity elements with random densities in [0, 100).
/// Dimension 3 nx ny + 2 nx + 2 ny + 1.
SparseSpd wathen(int nx, int ny, std::mt19937_64& rng);

/// 5-point Laplacian on an m-by-m grid.
SparseSpd laplacian_2d(int m);

/// A directory searched for SuiteSparse Matrix Market files: the
/// HALFIC_MATRIX_DIR environment variable if set, else the build default.
std::string matrix_dir();

/// Finds Group/name.mtx, name.mtx or name/name.mtx under matrix_dir().
std::optional<std::string> find_matrix(const std::string& group, const std::string& name);

}  // namespace halfic::testing
