#include "halfic/trisolve.hpp"

#include <cmath>
#include <stdexcept>

namespace halfic {

const char* to_string(Exec exec) {
  return exec == Exec::native_low ? "native_low" : "cast_f64";
}

namespace {

void check(const IcFactor& l, std::span<const double> w, const char* who) {
  if (w.size() != static_cast<std::size_t>(l.n()))
    throw std::invalid_argument(std::string(who) + ": length mismatch");
  for (int j = 0; j < l.n(); ++j)
    if (l.diag(j) == 0.0) throw std::invalid_argument(std::string(who) + ": zero diagonal");
}

// Rounds the right-hand side into the factor's format; nullopt on overflow.
std::optional<std::vector<double>> load_low(std::span<const double> w, const FpFormat& f) {
  std::vector<double> y(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    const RoundOutcome r = round_to(w[i], f);
    if (r.overflow()) return std::nullopt;
    y[i] = r.value;
  }
  return y;
}

// y / d rounded into f, refused when the quotient could overflow.
std::optional<double> safe_divide(double y, double d, const FpFormat& f) {
  if (!safe_scale_check(std::fabs(d), std::fabs(y), f)) return std::nullopt;
  const RoundOutcome q = sim_op(Op::div, y, d, f);
  if (q.overflow()) return std::nullopt;
  return q.value;
}

}  // namespace

SolveResult forward_solve(const IcFactor& l, std::span<const double> w, Exec exec) {
  check(l, w, "forward_solve");
  const std::vector<int>& cp = l.pattern.col_ptr;
  const std::vector<int>& ri = l.pattern.row_idx;
  const std::vector<double>& v = l.values;
  const int n = l.n();

  if (exec == Exec::cast_f64) {
    std::vector<double> y(w.begin(), w.end());
    for (int j = 0; j < n; ++j) {
      if (y[j] == 0.0) continue;
      const double yj = y[j] / v[cp[j]];
      y[j] = yj;
      for (int p = cp[j] + 1; p < cp[j + 1]; ++p) y[ri[p]] -= v[p] * yj;
    }
    return y;
  }

  const FpFormat& f = l.format;
  auto y = load_low(w, f);
  if (!y) return std::nullopt;
  for (int j = 0; j < n; ++j) {
    if ((*y)[j] == 0.0) continue;
    const std::optional<double> yj = safe_divide((*y)[j], v[cp[j]], f);
    if (!yj) return std::nullopt;
    (*y)[j] = *yj;
    for (int p = cp[j] + 1; p < cp[j + 1]; ++p) {
      const std::optional<double> u = safe_update((*y)[ri[p]], v[p], *yj, f);
      if (!u) return std::nullopt;
      (*y)[ri[p]] = *u;
    }
  }
  return y;
}

SolveResult backward_solve(const IcFactor& l, std::span<const double> w, Exec exec) {
  check(l, w, "backward_solve");
  const std::vector<int>& cp = l.pattern.col_ptr;
  const std::vector<int>& ri = l.pattern.row_idx;
  const std::vector<double>& v = l.values;
  const int n = l.n();

  if (exec == Exec::cast_f64) {
    std::vector<double> y(w.begin(), w.end());
    for (int j = n - 1; j >= 0; --j) {
      double acc = y[j];
      for (int p = cp[j] + 1; p < cp[j + 1]; ++p) acc -= v[p] * y[ri[p]];
      y[j] = acc / v[cp[j]];
    }
    return y;
  }

  const FpFormat& f = l.format;
  auto y = load_low(w, f);
  if (!y) return std::nullopt;
  for (int j = n - 1; j >= 0; --j) {
    double acc = (*y)[j];
    for (int p = cp[j] + 1; p < cp[j + 1]; ++p) {
      const double yi = (*y)[ri[p]];
      if (yi == 0.0) continue;
      const std::optional<double> u = safe_update(acc, v[p], yi, f);
      if (!u) return std::nullopt;
      acc = *u;
    }
    if (acc == 0.0) {
      (*y)[j] = 0.0;
      continue;
    }
    const std::optional<double> yj = safe_divide(acc, v[cp[j]], f);
    if (!yj) return std::nullopt;
    (*y)[j] = *yj;
  }
  return y;
}

SolveResult apply_preconditioner(const IcFactor& l, std::span<const double> r, Exec exec) {
  if (r.size() != static_cast<std::size_t>(l.n()))
    throw std::invalid_argument("apply_preconditioner: length mismatch");
  if (exec == Exec::cast_f64) {
    SolveResult y = forward_solve(l, r, exec);
    return backward_solve(l, *y, exec);
  }

  const double scale = inf_norm_vector(r);
  if (scale == 0.0) return std::vector<double>(r.size(), 0.0);
  std::vector<double> w(r.begin(), r.end());
  for (double& x : w) x /= scale;

  SolveResult y = forward_solve(l, w, exec);
  if (!y) return std::nullopt;
  SolveResult z = backward_solve(l, *y, exec);
  if (!z) return std::nullopt;
  for (double& x : *z) x *= scale;
  return z;
}

}  // namespace halfic
