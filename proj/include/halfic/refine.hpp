#pragma once

#include <span>
#include <vector>

#include "halfic/factor.hpp"
#include "halfic/krylov.hpp"
#include "halfic/sparse.hpp"
#include "halfic/trisolve.hpp"

namespace halfic {

inline constexpr double kU64 = 0x1p-53;

struct InnerSolve {
  int iterations = 0;
  KrylovStatus status = KrylovStatus::converged;
};

/// Outcome of an iterative refinement run. Every outer step performs one
/// correction solve; the first one, from x = 0, yields x_1.
struct SolveReport {
  std::vector<double> solution;
  double resinit = 0.0;
  double resfinal = 0.0;
  int iouter = 0;
  int totits = 0;    // sum of per_outer iterations, 0 for LU-IR
  int maxbasis = 0;  // largest single inner solve
  std::vector<InnerSolve> per_outer;
  std::vector<double> backward_errors;  // before each step, then the final one
  int low_precision_fallbacks = 0;      // native_low applications redone in fp64
  bool converged = false;
  bool diverged = false;
  bool inner_breakdown = false;  // small_curvature or stagnated stopped the loop
};

/// ||b - A x||_inf / (||A||_inf ||x||_inf + ||b||_inf), fp64; 0 when the
/// denominator vanishes (x = 0, b = 0).
double backward_error(const SparseSpd& a, std::span<const double> x, std::span<const double> b);

struct IrOptions {
  double delta = 1e3 * kU64;
  int itmax = 20;
  double divergence_threshold = 1e300;
};

/// Corrections by two triangular substitutions with L. Half-width factors
/// solve in native_low; an overflow signal redoes that one application in
/// cast_f64 and is counted. Wider factors solve x_1 in cast_f64 and the
/// corrections in native_low.
SolveReport ic_lu_ir(const SparseSpd& a, std::span<const double> b, const IcFactor& l,
                     const IrOptions& options = {});

/// u64^(1/4), about 1.03e-4.
double default_delta_krylov();

enum class KrylovMethod { cg, gmres };

const char* to_string(KrylovMethod method);

struct KrylovIrOptions {
  KrylovMethod method = KrylovMethod::cg;
  double delta = 1e3 * kU64;
  double delta_krylov = default_delta_krylov();
  int inner_maxit = 1000;
  int itmax = 20;
  double divergence_threshold = 1e300;
};

/// Corrections by pcg or gmres on A d = r preconditioned with L in fp64.
/// `resinit` is the backward error of x = L^{-T} L^{-1} b. An inner solve
/// ending in small_curvature or stagnated applies its correction and stops
/// the outer loop.
SolveReport ic_krylov_ir(const SparseSpd& a, std::span<const double> b, const IcFactor& l,
                         const KrylovIrOptions& options = {});

}  // namespace halfic
