#include "halfic/factor.hpp"

#include <algorithm>
#include <cmath>

namespace halfic {

const char* to_string(BreakdownKind kind) {
  switch (kind) {
    case BreakdownKind::B1: return "B1";
    case BreakdownKind::B2: return "B2";
    case BreakdownKind::B3: return "B3";
  }
  return "?";
}

double default_tau(const FpFormat& f) {
  if (f.is_half_width()) return 1e-5;
  return std::max(1e-20, 4.0 * f.x_min);
}

namespace {

// Scatter the entries of `a` into a zero-initialised array aligned with `pat`.
std::vector<double> load_values(const SparseSpd& a, const FillPattern& pat) {
  if (a.n != pat.n) throw std::invalid_argument("ic_attempt: matrix and pattern sizes differ");
  std::vector<double> values(pat.nnz(), 0.0);
  for (int j = 0; j < a.n; ++j) {
    int q = pat.col_ptr[j];
    const int q_end = pat.col_ptr[j + 1];
    for (int p = a.col_ptr[j]; p < a.col_ptr[j + 1]; ++p) {
      while (q < q_end && pat.row_idx[q] < a.row_idx[p]) ++q;
      if (q == q_end || pat.row_idx[q] != a.row_idx[p])
        throw std::invalid_argument("ic_attempt: pattern does not contain entry (" +
                                    std::to_string(a.row_idx[p]) + ", " + std::to_string(j) +
                                    ")");
      values[q] = a.values[p];
    }
  }
  return values;
}

}  // namespace

AttemptResult ic_attempt(const SparseSpd& a_low, const FillPattern& pattern, double tau,
                         const FpFormat& f, bool safe_checks) {
  if (!(tau > 0.0 && std::isfinite(tau)))
    throw std::invalid_argument("ic_attempt: tau must be positive and finite");

  AttemptResult out;
  out.values = load_values(a_low, pattern);
  std::vector<double>& l = out.values;
  const std::vector<int>& cp = pattern.col_ptr;
  const std::vector<int>& ri = pattern.row_idx;

  auto fail = [&](BreakdownKind kind, int k, double value, double detail) {
    out.breakdown = Breakdown{kind, k, value, detail, 0.0};
    return out;
  };
  auto keep = [&](const RoundOutcome& r) {
    if (r.became_subnormal()) {
      ++out.flushed_subnormal;
      return 0.0;
    }
    return r.value;
  };

  std::vector<int> pos(pattern.n, -1);
  for (int k = 0; k < pattern.n; ++k) {
    const int kb = cp[k], ke = cp[k + 1];

    if (!(l[kb] >= tau)) return fail(BreakdownKind::B1, k, l[kb], 0.0);
    const double d = sim_sqrt(l[kb], f).value;
    l[kb] = d;

    if (safe_checks && d < 1.0) {
      double a = 0.0;
      for (int p = kb + 1; p < ke; ++p) a = std::max(a, std::fabs(l[p]));
      if (!safe_scale_check(d, a, f)) return fail(BreakdownKind::B2, k, d, a);
    }
    for (int p = kb + 1; p < ke; ++p) {
      if (l[p] == 0.0) continue;
      const RoundOutcome q = sim_op(Op::div, l[p], d, f);
      if (q.overflow()) {
        if (safe_checks) return fail(BreakdownKind::B2, k, d, std::fabs(l[p]));
        throw std::overflow_error("ic_attempt: unguarded overflow scaling column " +
                                  std::to_string(k));
      }
      l[p] = keep(q);
    }

    // Outer-product update of the columns j > k that column k touches.
    for (int pj = kb + 1; pj < ke; ++pj) {
      const double ljk = l[pj];
      if (ljk == 0.0) continue;
      const int j = ri[pj];
      for (int q = cp[j]; q < cp[j + 1]; ++q) pos[ri[q]] = q;

      for (int pi = pj; pi < ke; ++pi) {
        const int t = pos[ri[pi]];
        const double lik = l[pi];
        if (t < 0 || lik == 0.0) continue;
        RoundOutcome v;
        if (safe_checks) {
          const std::optional<double> u = safe_update(l[t], lik, ljk, f);
          if (!u) {
            for (int q = cp[j]; q < cp[j + 1]; ++q) pos[ri[q]] = -1;
            return fail(BreakdownKind::B3, k, l[t], lik * ljk);
          }
          v = round_to(*u, f);
        } else {
          const RoundOutcome w = sim_op(Op::mul, lik, ljk, f);
          v = w.overflow() ? w : sim_op(Op::sub, l[t], w.value, f);
          if (v.overflow())
            throw std::overflow_error("ic_attempt: unguarded overflow updating column " +
                                      std::to_string(j));
        }
        l[t] = (ri[t] == j) ? v.value : keep(v);
      }
      for (int q = cp[j]; q < cp[j + 1]; ++q) pos[ri[q]] = -1;
    }
  }
  return out;
}

IcFactor identity_factor(int n, const FpFormat& f) {
  IcFactor fac;
  fac.pattern.n = n;
  fac.pattern.col_ptr.resize(static_cast<std::size_t>(n) + 1);
  fac.pattern.row_idx.resize(n);
  for (int j = 0; j <= n; ++j) fac.pattern.col_ptr[j] = j;
  for (int j = 0; j < n; ++j) fac.pattern.row_idx[j] = j;
  fac.values.assign(n, 1.0);
  fac.format = f;
  return fac;
}

IcFactor shifted_ic_squeezed(const SparseSpd& a_low, const FillPattern& pattern,
                             const FpFormat& f, const ShiftedIcOptions& options) {
  if (options.max_restarts < 0) throw std::invalid_argument("shifted_ic: max_restarts < 0");
  if (options.initial_shift < 0.0) throw std::invalid_argument("shifted_ic: negative shift");
  const double tau = options.tau.value_or(default_tau(f));
  const bool safe = options.safe_checks.value_or(f.is_half_width());

  FactorStats stats;
  std::vector<Breakdown> history;
  double alpha = 0.0;
  for (int attempt = 0; attempt <= options.max_restarts; ++attempt) {
    SparseSpd shifted = a_low;
    if (alpha > 0.0) {
      const RoundOutcome shift = round_to(alpha, f);
      if (shift.overflow())
        throw FactorizationFailure("shifted_ic: shift overflows " + f.name, history);
      for (int j = 0; j < shifted.n; ++j) {
        double& diag = shifted.values[shifted.col_ptr[j]];
        const RoundOutcome r = sim_op(Op::add, diag, shift.value, f);
        if (r.overflow())
          throw FactorizationFailure("shifted_ic: shifted diagonal overflows " + f.name, history);
        diag = r.value;
      }
    }

    AttemptResult result = ic_attempt(shifted, pattern, tau, f, safe);
    if (result.ok()) {
      stats.restarts = attempt;
      stats.flushed_subnormal = result.flushed_subnormal;
      IcFactor fac;
      fac.pattern = pattern;
      fac.values = std::move(result.values);
      fac.format = f;
      fac.alpha = alpha;
      fac.stats = stats;
      fac.history = std::move(history);
      return fac;
    }

    Breakdown b = *result.breakdown;
    b.alpha = alpha;
    switch (b.kind) {
      case BreakdownKind::B1: ++stats.nmod; break;
      case BreakdownKind::B2: ++stats.nscal; break;
      case BreakdownKind::B3: ++stats.nofl; break;
    }
    history.push_back(b);
    alpha = std::max(2.0 * alpha, options.initial_shift);
  }
  throw FactorizationFailure("shifted_ic: no successful factorization after " +
                                 std::to_string(options.max_restarts) + " restarts",
                             std::move(history));
}

IcFactor shifted_ic(const SparseSpd& a_hat, const FillPattern& pattern, const FpFormat& f,
                    const ShiftedIcOptions& options) {
  return shifted_ic_squeezed(squeeze(a_hat, f).first, pattern, f, options);
}

}  // namespace halfic
