#pragma once

#include <functional>
#include <span>
#include <vector>

#include "halfic/sparse.hpp"

namespace halfic {

/// z = M^{-1} r. Must write every entry of z.
using Preconditioner = std::function<void(std::span<const double> r, std::span<double> z)>;

Preconditioner identity_preconditioner();

enum class KrylovStatus { converged, max_iterations, small_curvature, stagnated };

const char* to_string(KrylovStatus status);

struct KrylovOutcome {
  std::vector<double> solution;
  int iterations = 0;
  KrylovStatus status = KrylovStatus::max_iterations;
  /// 2-norm of the preconditioned residual, starting with the initial one.
  std::vector<double> residual_history;
};

/// Preconditioned conjugate gradients from x0 = 0, fp64.
///
/// Stops when ||M^{-1} r_k||_2 <= tol ||M^{-1} b||_2. A curvature
/// p^T A p <= 100 u64 ||A||_inf ||p||_2^2 ends the solve with small_curvature;
/// a non-positive or non-finite r^T M^{-1} r ends it with stagnated.
KrylovOutcome pcg(const SparseSpd& a, const Preconditioner& m, std::span<const double> b,
                  double tol, int maxit);

/// Left-preconditioned GMRES on M^{-1} A x = M^{-1} b from x0 = 0, modified
/// Gram-Schmidt Arnoldi, no restarts. `iterations` is the basis size used.
/// A happy breakdown counts as convergence.
KrylovOutcome gmres(const SparseSpd& a, const Preconditioner& m, std::span<const double> b,
                    double tol, int maxit);

}  // namespace halfic
