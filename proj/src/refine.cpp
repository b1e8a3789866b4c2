#include "halfic/refine.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

namespace halfic {

double default_delta_krylov() { return std::pow(kU64, 0.25); }

const char* to_string(KrylovMethod method) {
  return method == KrylovMethod::cg ? "cg" : "gmres";
}

double backward_error(const SparseSpd& a, std::span<const double> x, std::span<const double> b) {
  if (x.size() != static_cast<std::size_t>(a.n) || b.size() != x.size())
    throw std::invalid_argument("backward_error: dimension mismatch");
  std::vector<double> r = matvec_f64(a, x);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = b[i] - r[i];
  const double denom = inf_norm_matrix(a) * inf_norm_vector(x) + inf_norm_vector(b);
  if (denom == 0.0) return 0.0;
  return inf_norm_vector(r) / denom;
}

namespace {

struct Correction {
  std::vector<double> d;
  InnerSolve inner;
  bool counts_iterations = false;
};

// Shared outer loop: x starts at 0, each step solves for a correction of the
// current residual and adds it in fp64.
SolveReport refine(const SparseSpd& a, std::span<const double> b, double delta, int itmax,
                   double divergence_threshold,
                   const std::function<Correction(std::span<const double>, int)>& solve) {
  if (b.size() != static_cast<std::size_t>(a.n))
    throw std::invalid_argument("refine: length mismatch");
  if (!(delta > 0.0)) throw std::invalid_argument("refine: delta must be positive");
  if (itmax < 0) throw std::invalid_argument("refine: negative itmax");

  SolveReport rep;
  std::vector<double>& x = rep.solution;
  x.assign(b.size(), 0.0);
  std::vector<double> r(b.size());
  const double norm_a = inf_norm_matrix(a);
  const double norm_b = inf_norm_vector(b);

  for (;;) {
    matvec_f64(a, x, r);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = b[i] - r[i];
    const double norm_r = inf_norm_vector(r);
    const double denom = norm_a * inf_norm_vector(x) + norm_b;
    const double res = denom == 0.0 ? 0.0 : norm_r / denom;
    rep.backward_errors.push_back(res);
    rep.resfinal = res;

    if (!std::isfinite(norm_r) || norm_r >= divergence_threshold) {
      rep.diverged = true;
      break;
    }
    if (res <= delta) {
      rep.converged = true;
      break;
    }
    if (rep.iouter == itmax || rep.inner_breakdown) break;

    Correction c = solve(r, rep.iouter);
    ++rep.iouter;
    rep.per_outer.push_back(c.inner);
    if (c.counts_iterations) {
      rep.totits += c.inner.iterations;
      rep.maxbasis = std::max(rep.maxbasis, c.inner.iterations);
    }
    for (std::size_t i = 0; i < x.size(); ++i) x[i] += c.d[i];
    if (c.inner.status == KrylovStatus::small_curvature ||
        c.inner.status == KrylovStatus::stagnated)
      rep.inner_breakdown = true;
  }
  return rep;
}

}  // namespace

SolveReport ic_lu_ir(const SparseSpd& a, std::span<const double> b, const IcFactor& l,
                     const IrOptions& options) {
  const bool half = l.format.is_half_width();
  int fallbacks = 0;
  auto solve = [&](std::span<const double> r, int step) {
    const Exec exec = (step == 0 && !half) ? Exec::cast_f64 : Exec::native_low;
    SolveResult d = apply_preconditioner(l, r, exec);
    if (!d) {
      ++fallbacks;
      d = apply_preconditioner(l, r, Exec::cast_f64);
    }
    return Correction{std::move(*d), InnerSolve{1, KrylovStatus::converged}, false};
  };
  SolveReport rep = refine(a, b, options.delta, options.itmax, options.divergence_threshold, solve);
  rep.low_precision_fallbacks = fallbacks;
  rep.resinit = rep.backward_errors.size() > 1 ? rep.backward_errors[1] : rep.resfinal;
  return rep;
}

SolveReport ic_krylov_ir(const SparseSpd& a, std::span<const double> b, const IcFactor& l,
                         const KrylovIrOptions& options) {
  if (!(options.delta_krylov > 0.0))
    throw std::invalid_argument("ic_krylov_ir: delta_krylov must be positive");
  const Preconditioner m = [&l](std::span<const double> r, std::span<double> z) {
    const SolveResult y = apply_preconditioner(l, r, Exec::cast_f64);
    std::copy(y->begin(), y->end(), z.begin());
  };

  auto solve = [&](std::span<const double> r, int) {
    KrylovOutcome o = options.method == KrylovMethod::cg
                          ? pcg(a, m, r, options.delta_krylov, options.inner_maxit)
                          : gmres(a, m, r, options.delta_krylov, options.inner_maxit);
    return Correction{std::move(o.solution), InnerSolve{o.iterations, o.status}, true};
  };
  SolveReport rep = refine(a, b, options.delta, options.itmax, options.divergence_threshold, solve);

  const SolveResult x0 = apply_preconditioner(l, b, Exec::cast_f64);
  rep.resinit = backward_error(a, *x0, b);
  return rep;
}

}  // namespace halfic
