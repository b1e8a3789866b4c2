#include "support.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <limits>
#include <stdexcept>

#ifndef HALFIC_DEFAULT_MATRIX_DIR
#define HALFIC_DEFAULT_MATRIX_DIR "data/matrices"
#endif

namespace halfic::testing {

Dense to_dense(const SparseSpd& s) {
  Dense d(s.n);
  for (int j = 0; j < s.n; ++j)
    for (int p = s.col_ptr[j]; p < s.col_ptr[j + 1]; ++p) {
      const int i = s.row_idx[p];
      d(i, j) = s.values[p];
      d(j, i) = s.values[p];
    }
  return d;
}

std::optional<Dense> dense_cholesky(const Dense& a) {
  const int n = a.n;
  Dense l(n);
  for (int j = 0; j < n; ++j) {
    double s = a(j, j);
    for (int k = 0; k < j; ++k) s -= l(j, k) * l(j, k);
    if (!(s > 0.0)) return std::nullopt;
    const double d = std::sqrt(s);
    l(j, j) = d;
    for (int i = j + 1; i < n; ++i) {
      double t = a(i, j);
      for (int k = 0; k < j; ++k) t -= l(i, k) * l(j, k);
      l(i, j) = t / d;
    }
  }
  return l;
}

std::vector<double> lower_solve(const Dense& l, const std::vector<double>& b) {
  std::vector<double> y(b);
  for (int i = 0; i < l.n; ++i) {
    for (int k = 0; k < i; ++k) y[i] -= l(i, k) * y[k];
    y[i] /= l(i, i);
  }
  return y;
}

std::vector<double> upper_solve_transposed(const Dense& l, const std::vector<double>& b) {
  std::vector<double> y(b);
  for (int i = l.n - 1; i >= 0; --i) {
    for (int k = i + 1; k < l.n; ++k) y[i] -= l(k, i) * y[k];
    y[i] /= l(i, i);
  }
  return y;
}

std::vector<double> cholesky_solve(const Dense& l, const std::vector<double>& b) {
  return upper_solve_transposed(l, lower_solve(l, b));
}

HalfBits fp16_reference(double x) {
  const std::uint64_t bits = std::bit_cast<std::uint64_t>(x);
  const std::uint16_t sign = static_cast<std::uint16_t>((bits >> 48) & 0x8000u);
  const int exp_field = static_cast<int>((bits >> 52) & 0x7ff);
  const std::uint64_t frac = bits & ((std::uint64_t{1} << 52) - 1);

  if (exp_field == 0x7ff) return {static_cast<std::uint16_t>(sign | 0x7c00u), true};
  if (exp_field == 0) return {sign, false};  // fp64 subnormals are far below half's range

  const int e = exp_field - 1023;
  const std::uint64_t m = frac | (std::uint64_t{1} << 52);  // 53-bit significand

  // Keep `keep` bits of m, rounding the rest to nearest even.
  auto round_shift = [](std::uint64_t v, int shift) -> std::uint64_t {
    if (shift >= 64) return 0;
    const std::uint64_t q = v >> shift;
    const std::uint64_t rem = v & ((std::uint64_t{1} << shift) - 1);
    const std::uint64_t half = std::uint64_t{1} << (shift - 1);
    return (rem > half || (rem == half && (q & 1))) ? q + 1 : q;
  };

  if (e >= -14) {
    std::uint64_t q = round_shift(m, 42);  // 11 significant bits
    int eh = e;
    if (q == (std::uint64_t{1} << 11)) {
      q >>= 1;
      ++eh;
    }
    if (eh > 15) return {static_cast<std::uint16_t>(sign | 0x7c00u), true};
    return {static_cast<std::uint16_t>(sign | ((eh + 15) << 10) | (q & 0x3ffu)), false};
  }
  // Subnormal range: count units of 2^-24. A carry into bit 10 lands exactly
  // on the smallest normal encoding.
  const std::uint64_t q = round_shift(m, 28 - e);
  return {static_cast<std::uint16_t>(sign | q), false};
}

double fp16_bits_to_double(std::uint16_t bits) {
  const int e = (bits >> 10) & 0x1f;
  const int f = bits & 0x3ff;
  double v;
  if (e == 0)
    v = std::ldexp(static_cast<double>(f), -24);
  else if (e == 31)
    v = f ? std::numeric_limits<double>::quiet_NaN() : std::numeric_limits<double>::infinity();
  else
    v = std::ldexp(static_cast<double>(1024 + f), e - 25);
  return (bits & 0x8000) ? -v : v;
}

std::vector<char> level_oracle(const SparseSpd& s, int level) {
  const int n = s.n;
  const int inf = std::numeric_limits<int>::max() / 4;
  std::vector<int> lev(static_cast<std::size_t>(n) * n, inf);
  auto at = [&](int i, int j) -> int& { return lev[static_cast<std::size_t>(i) * n + j]; };
  for (int j = 0; j < n; ++j)
    for (int p = s.col_ptr[j]; p < s.col_ptr[j + 1]; ++p) {
      at(s.row_idx[p], j) = 0;
      at(j, s.row_idx[p]) = 0;
    }
  for (int k = 0; k < n; ++k)
    for (int i = k + 1; i < n; ++i) {
      if (at(i, k) >= inf) continue;
      for (int j = k + 1; j <= i; ++j) {
        if (at(j, k) >= inf) continue;
        const int cand = at(i, k) + at(j, k) + 1;
        if (cand < at(i, j)) {
          at(i, j) = cand;
          at(j, i) = cand;
        }
      }
    }
  std::vector<char> keep(static_cast<std::size_t>(n) * n, 0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= i; ++j)
      keep[static_cast<std::size_t>(i) * n + j] = (i == j || at(i, j) <= level);
  return keep;
}

SparseSpd random_structure(int n, double density, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<int> r, c;
  std::vector<double> v;
  for (int j = 0; j < n; ++j) {
    r.push_back(j);
    c.push_back(j);
    v.push_back(1.0);
    for (int i = j + 1; i < n; ++i)
      if (u(rng) < density) {
        r.push_back(i);
        c.push_back(j);
        v.push_back(1.0);
      }
  }
  return SparseSpd::from_triplets(n, r, c, v);
}

SparseSpd random_spd(int n, double density, double spread, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0), val(-1.0, 1.0), ex(-spread, spread);
  std::vector<int> r, c;
  std::vector<double> v;
  std::vector<double> rowsum(n, 0.0);
  for (int j = 0; j < n; ++j)
    for (int i = j + 1; i < n; ++i)
      if (u(rng) < density) {
        const double x = val(rng);
        r.push_back(i);
        c.push_back(j);
        v.push_back(x);
        rowsum[i] += std::fabs(x);
        rowsum[j] += std::fabs(x);
      }
  for (int j = 0; j < n; ++j) {
    r.push_back(j);
    c.push_back(j);
    v.push_back(rowsum[j] + 0.1 + u(rng));
  }
  std::vector<double> d(n);
  for (double& x : d) x = std::pow(10.0, ex(rng));
  for (std::size_t k = 0; k < v.size(); ++k) v[k] *= d[r[k]] * d[c[k]];
  return SparseSpd::from_triplets(n, r, c, v);
}

SparseSpd wathen(int nx, int ny, std::mt19937_64& rng) {
  static const double e1[4][4] = {
      {6, -6, 2, -8}, {-6, 32, -6, 20}, {2, -6, 6, -6}, {-8, 20, -6, 32}};
  static const double e2[4][4] = {
      {3, -8, 2, -6}, {-8, 16, -8, 20}, {2, -8, 3, -8}, {-6, 20, -8, 16}};
  double e[8][8];
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      e[i][j] = e1[i][j] / 45.0;
      e[i + 4][j + 4] = e1[i][j] / 45.0;
      e[i][j + 4] = e2[i][j] / 45.0;
      e[i + 4][j] = e2[j][i] / 45.0;
    }

  const int n = 3 * nx * ny + 2 * nx + 2 * ny + 1;
  std::uniform_real_distribution<double> rho(0.0, 100.0);
  std::vector<int> r, c;
  std::vector<double> v;
  for (int j = 1; j <= ny; ++j)
    for (int i = 1; i <= nx; ++i) {
      int nn[8];
      nn[0] = 3 * j * nx + 2 * i + 2 * j + 1;
      nn[1] = nn[0] - 1;
      nn[2] = nn[1] - 1;
      nn[3] = (3 * j - 1) * nx + 2 * j + i - 1;
      nn[4] = 3 * (j - 1) * nx + 2 * i + 2 * j - 3;
      nn[5] = nn[4] + 1;
      nn[6] = nn[5] + 1;
      nn[7] = nn[3] + 1;
      const double scale = rho(rng);
      for (int a = 0; a < 8; ++a)
        for (int b = 0; b < 8; ++b) {
          if (nn[a] < nn[b]) continue;  // lower triangle; from_triplets sums duplicates
          r.push_back(nn[a] - 1);
          c.push_back(nn[b] - 1);
          v.push_back(e[a][b] * scale);
        }
    }
  SparseSpd a = SparseSpd::from_triplets(n, r, c, v);
  return a;
}

SparseSpd laplacian_2d(int m) {
  std::vector<int> r, c;
  std::vector<double> v;
  auto id = [m](int x, int y) { return y * m + x; };
  for (int y = 0; y < m; ++y)
    for (int x = 0; x < m; ++x) {
      r.push_back(id(x, y));
      c.push_back(id(x, y));
      v.push_back(4.0);
      if (x + 1 < m) {
        r.push_back(id(x + 1, y));
        c.push_back(id(x, y));
        v.push_back(-1.0);
      }
      if (y + 1 < m) {
        r.push_back(id(x, y + 1));
        c.push_back(id(x, y));
        v.push_back(-1.0);
      }
    }
  return SparseSpd::from_triplets(m * m, r, c, v);
}

std::string matrix_dir() {
  if (const char* env = std::getenv("HALFIC_MATRIX_DIR"); env && *env) return env;
  return HALFIC_DEFAULT_MATRIX_DIR;
}

std::optional<std::string> find_matrix(const std::string& group, const std::string& name) {
  namespace fs = std::filesystem;
  const fs::path dir(matrix_dir());
  for (const fs::path& p : {dir / group / (name + ".mtx"), dir / (name + ".mtx"),
                            dir / name / (name + ".mtx")})
    if (fs::is_regular_file(p)) return p.string();
  return std::nullopt;
}

}  // namespace halfic::testing
