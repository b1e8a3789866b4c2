#include "halfic/krylov.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace halfic {

const char* to_string(KrylovStatus status) {
  switch (status) {
    case KrylovStatus::converged: return "converged";
    case KrylovStatus::max_iterations: return "max_iterations";
    case KrylovStatus::small_curvature: return "small_curvature";
    case KrylovStatus::stagnated: return "stagnated";
  }
  return "?";
}

Preconditioner identity_preconditioner() {
  return [](std::span<const double> r, std::span<double> z) {
    std::copy(r.begin(), r.end(), z.begin());
  };
}

namespace {

constexpr double kU64 = std::numeric_limits<double>::epsilon() / 2;

double dot(std::span<const double> x, std::span<const double> y) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

double norm2(std::span<const double> x) { return std::sqrt(dot(x, x)); }

void check_args(const SparseSpd& a, std::span<const double> b, double tol, int maxit,
                const char* who) {
  if (b.size() != static_cast<std::size_t>(a.n))
    throw std::invalid_argument(std::string(who) + ": length mismatch");
  if (!(tol > 0.0)) throw std::invalid_argument(std::string(who) + ": tol must be positive");
  if (maxit < 0) throw std::invalid_argument(std::string(who) + ": negative maxit");
}

}  // namespace

KrylovOutcome pcg(const SparseSpd& a, const Preconditioner& m, std::span<const double> b,
                  double tol, int maxit) {
  check_args(a, b, tol, maxit, "pcg");
  const std::size_t n = b.size();
  KrylovOutcome out;
  out.solution.assign(n, 0.0);

  std::vector<double> r(b.begin(), b.end()), z(n), p(n), q(n);
  m(r, z);
  const double z0 = norm2(z);
  out.residual_history.push_back(z0);
  if (z0 == 0.0) {
    out.status = KrylovStatus::converged;
    return out;
  }

  const double tiny = 1e2 * kU64 * inf_norm_matrix(a);
  double rho = dot(r, z);
  if (!(rho > 0.0) || !std::isfinite(rho)) {
    out.status = KrylovStatus::stagnated;
    return out;
  }
  p = z;
  std::vector<double>& x = out.solution;
  for (int k = 1; k <= maxit; ++k) {
    matvec_f64(a, p, q);
    const double curvature = dot(p, q);
    if (!(curvature > tiny * dot(p, p))) {
      out.status = KrylovStatus::small_curvature;
      return out;
    }
    const double alpha = rho / curvature;
    for (std::size_t i = 0; i < n; ++i) {
      x[i] += alpha * p[i];
      r[i] -= alpha * q[i];
    }
    m(r, z);
    out.iterations = k;
    const double zn = norm2(z);
    out.residual_history.push_back(zn);
    if (zn <= tol * z0) {
      out.status = KrylovStatus::converged;
      return out;
    }
    const double rho_next = dot(r, z);
    if (!(rho_next > 0.0) || !std::isfinite(rho_next)) {
      out.status = KrylovStatus::stagnated;
      return out;
    }
    const double beta = rho_next / rho;
    rho = rho_next;
    for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
  }
  out.status = KrylovStatus::max_iterations;
  return out;
}

KrylovOutcome gmres(const SparseSpd& a, const Preconditioner& m, std::span<const double> b,
                    double tol, int maxit) {
  check_args(a, b, tol, maxit, "gmres");
  const std::size_t n = b.size();
  KrylovOutcome out;
  out.solution.assign(n, 0.0);

  std::vector<std::vector<double>> basis;
  basis.emplace_back(n);
  m(b, basis[0]);
  const double beta = norm2(basis[0]);
  out.residual_history.push_back(beta);
  if (beta == 0.0) {
    out.status = KrylovStatus::converged;
    return out;
  }
  if (!std::isfinite(beta)) {
    out.status = KrylovStatus::stagnated;
    return out;
  }
  for (double& v : basis[0]) v /= beta;

  // Column k of the Hessenberg matrix, already rotated, in h[k].
  std::vector<std::vector<double>> h;
  std::vector<double> cs, sn, g{beta};
  std::vector<double> av(n);
  out.status = KrylovStatus::max_iterations;

  int k = 0;
  while (k < maxit) {
    std::vector<double> w(n);
    matvec_f64(a, basis[k], av);
    m(av, w);
    const double w_norm = norm2(w);

    std::vector<double> col(static_cast<std::size_t>(k) + 2, 0.0);
    for (int i = 0; i <= k; ++i) {
      const double hik = dot(w, basis[i]);
      col[i] = hik;
      for (std::size_t t = 0; t < n; ++t) w[t] -= hik * basis[i][t];
    }
    const double h_next = norm2(w);
    col[k + 1] = h_next;
    if (!std::isfinite(h_next)) {
      out.status = KrylovStatus::stagnated;
      break;
    }

    for (int i = 0; i < k; ++i) {
      const double t = cs[i] * col[i] + sn[i] * col[i + 1];
      col[i + 1] = -sn[i] * col[i] + cs[i] * col[i + 1];
      col[i] = t;
    }
    const double denom = std::hypot(col[k], col[k + 1]);
    const double c = denom == 0.0 ? 1.0 : col[k] / denom;
    const double s = denom == 0.0 ? 0.0 : col[k + 1] / denom;
    cs.push_back(c);
    sn.push_back(s);
    col[k] = denom;
    col[k + 1] = 0.0;
    g.push_back(-s * g[k]);
    g[k] *= c;
    h.push_back(std::move(col));
    ++k;

    const double res = std::fabs(g[k]);
    out.residual_history.push_back(res);
    const bool happy = h_next <= std::numeric_limits<double>::epsilon() * w_norm;
    if (res <= tol * beta || happy) {
      out.status = KrylovStatus::converged;
      break;
    }
    basis.emplace_back(std::move(w));
    for (double& v : basis.back()) v /= h_next;
  }

  // Back substitution on the rotated k x k triangle, then x = V y.
  std::vector<double> y(k);
  for (int i = k - 1; i >= 0; --i) {
    double s = g[i];
    for (int j = i + 1; j < k; ++j) s -= h[j][i] * y[j];
    y[i] = h[i][i] == 0.0 ? 0.0 : s / h[i][i];
  }
  for (int j = 0; j < k; ++j)
    for (std::size_t t = 0; t < n; ++t) out.solution[t] += y[j] * basis[j][t];
  out.iterations = k;
  return out;
}

}  // namespace halfic
