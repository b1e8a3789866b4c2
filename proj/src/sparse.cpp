#include "halfic/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <sstream>
#include <tuple>

namespace halfic {

void SparseSpd::validate(bool require_nonzero_diagonal) const {
  auto fail = [](const std::string& what) { throw std::invalid_argument("SparseSpd: " + what); };
  if (n < 0) fail("negative dimension");
  if (col_ptr.size() != static_cast<std::size_t>(n) + 1) fail("col_ptr has wrong length");
  if (col_ptr.front() != 0 || static_cast<std::size_t>(col_ptr.back()) != row_idx.size())
    fail("col_ptr does not span row_idx");
  if (values.size() != row_idx.size()) fail("values and row_idx differ in length");
  for (int j = 0; j < n; ++j) {
    const int begin = col_ptr[j], end = col_ptr[j + 1];
    if (end < begin) fail("col_ptr not monotone at column " + std::to_string(j));
    if (begin == end || row_idx[begin] != j)
      fail("missing diagonal entry in column " + std::to_string(j));
    for (int p = begin; p < end; ++p) {
      if (row_idx[p] >= n) fail("row index out of range in column " + std::to_string(j));
      if (p > begin && row_idx[p] <= row_idx[p - 1])
        fail("row indices not strictly increasing in column " + std::to_string(j));
      if (!std::isfinite(values[p])) fail("non-finite value in column " + std::to_string(j));
    }
    if (require_nonzero_diagonal && values[begin] == 0.0)
      fail("zero diagonal entry in column " + std::to_string(j));
  }
}

SparseSpd SparseSpd::from_triplets(int n, std::span<const int> rows, std::span<const int> cols,
                                   std::span<const double> vals) {
  if (rows.size() != cols.size() || rows.size() != vals.size())
    throw std::invalid_argument("from_triplets: array lengths differ");

  std::vector<std::tuple<int, int, double>> entries;
  entries.reserve(rows.size());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    int i = rows[k], j = cols[k];
    if (i < 0 || j < 0 || i >= n || j >= n)
      throw std::invalid_argument("from_triplets: index out of range");
    if (i < j) std::swap(i, j);
    entries.emplace_back(j, i, vals[k]);
  }
  std::sort(entries.begin(), entries.end(), [](const auto& x, const auto& y) {
    return std::tie(std::get<0>(x), std::get<1>(x)) < std::tie(std::get<0>(y), std::get<1>(y));
  });

  SparseSpd a;
  a.n = n;
  a.col_ptr.assign(static_cast<std::size_t>(n) + 1, 0);
  for (std::size_t k = 0; k < entries.size(); ++k) {
    const auto [j, i, v] = entries[k];
    if (!a.row_idx.empty() && k > 0 && std::get<0>(entries[k - 1]) == j &&
        std::get<1>(entries[k - 1]) == i) {
      a.values.back() += v;
      continue;
    }
    a.row_idx.push_back(i);
    a.values.push_back(v);
    ++a.col_ptr[j + 1];
  }
  std::partial_sum(a.col_ptr.begin(), a.col_ptr.end(), a.col_ptr.begin());
  a.validate();
  return a;
}

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

bool blank(const std::string& line) {
  return line.find_first_not_of(" \t\r") == std::string::npos;
}

}  // namespace

SparseSpd read_matrix_market(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw MatrixMarketError("empty Matrix Market stream");

  std::istringstream header(line);
  std::string banner, object, layout, field, symmetry;
  header >> banner >> object >> layout >> field >> symmetry;
  if (banner != "%%MatrixMarket") throw MatrixMarketError("missing %%MatrixMarket banner");
  object = lower(object);
  layout = lower(layout);
  field = lower(field);
  symmetry = lower(symmetry);
  if (object != "matrix") throw MatrixMarketError("unsupported object '" + object + "'");
  if (layout != "coordinate") throw MatrixMarketError("only coordinate layout is supported");
  if (field != "real" && field != "integer")
    throw MatrixMarketError("unsupported field '" + field + "' (need real)");
  if (symmetry != "symmetric")
    throw MatrixMarketError("matrix must be declared symmetric, got '" + symmetry + "'");

  // Skip comments and blank lines up to the size line.
  do {
    if (!std::getline(in, line)) throw MatrixMarketError("missing size line");
  } while (blank(line) || line[0] == '%');

  long long rows = 0, cols = 0, count = 0;
  {
    std::istringstream size(line);
    if (!(size >> rows >> cols >> count)) throw MatrixMarketError("malformed size line");
  }
  if (rows != cols) throw MatrixMarketError("symmetric matrix must be square");
  if (rows < 0 || count < 0) throw MatrixMarketError("negative size");

  const int n = static_cast<int>(rows);
  std::vector<int> ri, ci;
  std::vector<double> vi;
  ri.reserve(count);
  ci.reserve(count);
  vi.reserve(count);
  while (static_cast<long long>(ri.size()) < count && std::getline(in, line)) {
    if (blank(line) || line[0] == '%') continue;
    std::istringstream entry(line);
    long long i = 0, j = 0;
    double v = 0.0;
    if (!(entry >> i >> j >> v))
      throw MatrixMarketError("malformed entry on data line " + std::to_string(ri.size() + 1));
    if (i < 1 || j < 1 || i > n || j > n)
      throw MatrixMarketError("index out of range: (" + std::to_string(i) + ", " +
                              std::to_string(j) + ")");
    ri.push_back(static_cast<int>(i - 1));
    ci.push_back(static_cast<int>(j - 1));
    vi.push_back(v);
  }
  if (static_cast<long long>(ri.size()) != count)
    throw MatrixMarketError("expected " + std::to_string(count) + " entries, found " +
                            std::to_string(ri.size()));

  try {
    return SparseSpd::from_triplets(n, ri, ci, vi);
  } catch (const std::invalid_argument& e) {
    throw MatrixMarketError(e.what());
  }
}

SparseSpd read_matrix_market_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MatrixMarketError("cannot open '" + path + "'");
  return read_matrix_market(in);
}

std::pair<SparseSpd, ScalingVector> l2_scale(const SparseSpd& a) {
  std::vector<double> norm2(a.n, 0.0);
  for (int j = 0; j < a.n; ++j) {
    for (int p = a.col_ptr[j]; p < a.col_ptr[j + 1]; ++p) {
      const int i = a.row_idx[p];
      const double v2 = a.values[p] * a.values[p];
      norm2[j] += v2;
      if (i != j) norm2[i] += v2;
    }
  }

  ScalingVector scale;
  scale.s.resize(a.n);
  for (int j = 0; j < a.n; ++j) {
    const double s = std::sqrt(std::sqrt(norm2[j]));
    if (!(s > 0.0) || !std::isfinite(s))
      throw std::invalid_argument("l2_scale: zero or non-finite norm in column " +
                                  std::to_string(j));
    scale.s[j] = s;
  }

  SparseSpd scaled = a;
  for (int j = 0; j < a.n; ++j)
    for (int p = a.col_ptr[j]; p < a.col_ptr[j + 1]; ++p)
      scaled.values[p] = a.values[p] / (scale.s[a.row_idx[p]] * scale.s[j]);
  return {std::move(scaled), std::move(scale)};
}

std::pair<SparseSpd, SqueezeReport> squeeze(const SparseSpd& a_hat, const FpFormat& f) {
  SparseSpd out;
  out.n = a_hat.n;
  out.col_ptr.assign(static_cast<std::size_t>(a_hat.n) + 1, 0);
  out.row_idx.reserve(a_hat.nnz());
  out.values.reserve(a_hat.nnz());

  SqueezeReport report;
  for (int j = 0; j < a_hat.n; ++j) {
    for (int p = a_hat.col_ptr[j]; p < a_hat.col_ptr[j + 1]; ++p) {
      const int i = a_hat.row_idx[p];
      const RoundOutcome r = round_to(a_hat.values[p], f);
      if (r.overflow())
        throw std::overflow_error("squeeze: entry (" + std::to_string(i) + ", " +
                                  std::to_string(j) + ") overflows " + f.name);
      if (i != j) {
        if (r.value == 0.0) {
          ++report.dropped_underflow;
          continue;
        }
        if (r.became_subnormal()) {
          ++report.flushed_subnormal;
          continue;
        }
      }
      ++report.kept;
      out.row_idx.push_back(i);
      out.values.push_back(r.value);
    }
    out.col_ptr[j + 1] = static_cast<int>(out.row_idx.size());
  }
  return {std::move(out), report};
}

void matvec_f64(const SparseSpd& a, std::span<const double> x, std::span<double> y) {
  if (x.size() != static_cast<std::size_t>(a.n) || y.size() != static_cast<std::size_t>(a.n))
    throw std::invalid_argument("matvec_f64: dimension mismatch");
  std::fill(y.begin(), y.end(), 0.0);
  for (int j = 0; j < a.n; ++j) {
    const double xj = x[j];
    double acc = 0.0;
    for (int p = a.col_ptr[j]; p < a.col_ptr[j + 1]; ++p) {
      const int i = a.row_idx[p];
      const double v = a.values[p];
      y[i] += v * xj;
      if (i != j) acc += v * x[i];
    }
    y[j] += acc;
  }
}

std::vector<double> matvec_f64(const SparseSpd& a, std::span<const double> x) {
  std::vector<double> y(a.n);
  matvec_f64(a, x, y);
  return y;
}

double inf_norm_matrix(const SparseSpd& a) {
  std::vector<double> rowsum(a.n, 0.0);
  for (int j = 0; j < a.n; ++j) {
    for (int p = a.col_ptr[j]; p < a.col_ptr[j + 1]; ++p) {
      const int i = a.row_idx[p];
      const double v = std::fabs(a.values[p]);
      rowsum[i] += v;
      if (i != j) rowsum[j] += v;
    }
  }
  return rowsum.empty() ? 0.0 : *std::max_element(rowsum.begin(), rowsum.end());
}

double inf_norm_vector(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::fabs(x));
  return m;
}

}  // namespace halfic
