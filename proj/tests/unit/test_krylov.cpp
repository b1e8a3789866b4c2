#include <doctest.h>

#include <cmath>
#include <random>

#include "halfic/krylov.hpp"
#include "halfic/trisolve.hpp"
#include "support.hpp"

using namespace halfic;

namespace {

SparseSpd diagonal(const std::vector<double>& d) {
  std::vector<int> r(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) r[i] = static_cast<int>(i);
  return SparseSpd::from_triplets(static_cast<int>(d.size()), r, r, d);
}

Preconditioner from_factor(const IcFactor& l) {
  return [&l](std::span<const double> r, std::span<double> z) {
    const auto y = apply_preconditioner(l, r, Exec::cast_f64);
    std::copy(y->begin(), y->end(), z.begin());
  };
}

std::vector<double> random_vector(int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> v(n);
  for (double& x : v) x = u(rng);
  return v;
}

double rel_residual(const SparseSpd& a, const std::vector<double>& x,
                    const std::vector<double>& b) {
  std::vector<double> r = matvec_f64(a, x);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    num += (b[i] - r[i]) * (b[i] - r[i]);
    den += b[i] * b[i];
  }
  return std::sqrt(num / den);
}

}  // namespace

TEST_CASE("identity system converges in one iteration") {
  const SparseSpd a = diagonal(std::vector<double>(10, 1.0));
  const std::vector<double> b{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  for (const auto& o : {pcg(a, identity_preconditioner(), b, 1e-12, 10),
                        gmres(a, identity_preconditioner(), b, 1e-12, 10)}) {
    CHECK(o.status == KrylovStatus::converged);
    CHECK(o.iterations == 1);
    CHECK(o.solution == b);
  }
}

TEST_CASE("zero right-hand side") {
  const SparseSpd a = diagonal({2, 3});
  const std::vector<double> b{0, 0};
  for (const auto& o : {pcg(a, identity_preconditioner(), b, 1e-8, 5),
                        gmres(a, identity_preconditioner(), b, 1e-8, 5)}) {
    CHECK(o.status == KrylovStatus::converged);
    CHECK(o.iterations == 0);
    CHECK(o.solution == b);
  }
}

TEST_CASE("2x2 SPD system needs at most two iterations") {
  const std::vector<int> r{0, 1, 1}, c{0, 0, 1};
  const std::vector<double> v{4, 1, 3};
  const SparseSpd a = SparseSpd::from_triplets(2, r, c, v);
  const std::vector<double> b{1, 2};
  const auto g = gmres(a, identity_preconditioner(), b, 1e-14, 10);
  const auto p = pcg(a, identity_preconditioner(), b, 1e-14, 10);
  CHECK(g.status == KrylovStatus::converged);
  CHECK(g.iterations <= 2);
  CHECK(p.status == KrylovStatus::converged);
  CHECK(p.iterations <= 2);
  // Exact solution (1/11, 7/11).
  CHECK(g.solution[0] == doctest::Approx(1.0 / 11).epsilon(1e-13));
  CHECK(p.solution[1] == doctest::Approx(7.0 / 11).epsilon(1e-13));
}

TEST_CASE("unpreconditioned CG on diag(1..20)") {
  std::vector<double> d(20);
  for (int i = 0; i < 20; ++i) d[i] = i + 1;
  const SparseSpd a = diagonal(d);
  const std::vector<double> b(20, 1.0);
  const auto o = pcg(a, identity_preconditioner(), b, 1e-12, 100);
  CHECK(o.status == KrylovStatus::converged);
  CHECK(o.iterations <= 25);
  for (int i = 0; i < 20; ++i) CHECK(o.solution[i] == doctest::Approx(1.0 / (i + 1)));
}

TEST_CASE("exact Cholesky preconditioner") {
  std::mt19937_64 rng(41);
  const SparseSpd a = testing::random_spd(30, 0.3, 1.0, rng);
  const IcFactor l = shifted_ic(a, ic_pattern(a, a.n), FpFormat::fp64());
  const std::vector<double> b = random_vector(30, rng);
  const auto o = pcg(a, from_factor(l), b, 1e-10, 50);
  CHECK(o.status == KrylovStatus::converged);
  CHECK(o.iterations <= 2);
  const auto g = gmres(a, from_factor(l), b, 1e-10, 50);
  CHECK(g.iterations <= 2);
}

TEST_CASE("CG and GMRES agree on a preconditioned system") {
  std::mt19937_64 rng(43);
  const SparseSpd a_hat = l2_scale(testing::laplacian_2d(15)).first;
  const IcFactor l = shifted_ic(a_hat, ic_pattern(a_hat, 0), FpFormat::fp16());
  const std::vector<double> b = random_vector(a_hat.n, rng);
  const auto p = pcg(a_hat, from_factor(l), b, 1e-8, 500);
  const auto g = gmres(a_hat, from_factor(l), b, 1e-8, 500);
  REQUIRE(p.status == KrylovStatus::converged);
  REQUIRE(g.status == KrylovStatus::converged);
  CHECK(p.iterations <= 2 * g.iterations);
  CHECK(g.iterations <= 2 * p.iterations);
  CHECK(rel_residual(a_hat, p.solution, b) < 1e-6);
  CHECK(rel_residual(a_hat, g.solution, b) < 1e-6);

  // GMRES minimizes the preconditioned residual: monotone history.
  for (std::size_t k = 1; k < g.residual_history.size(); ++k)
    CHECK(g.residual_history[k] <= g.residual_history[k - 1] * (1 + 1e-12));

  // Deterministic.
  const auto p2 = pcg(a_hat, from_factor(l), b, 1e-8, 500);
  CHECK(p2.solution == p.solution);
  CHECK(p2.residual_history == p.residual_history);
}

TEST_CASE("CG residuals are M^{-1}-orthogonal") {
  std::mt19937_64 rng(47);
  const SparseSpd a = testing::random_spd(40, 0.15, 0.0, rng);
  const IcFactor l = shifted_ic(a, ic_pattern(a, 0), FpFormat::fp64());
  const Preconditioner m = from_factor(l);
  const std::vector<double> b = random_vector(40, rng);

  // Re-run CG with growing iteration caps to collect the explicit residuals.
  std::vector<std::vector<double>> res, zs;
  for (int k = 0; k < 8; ++k) {
    const auto o = pcg(a, m, b, 1e-30, k);
    std::vector<double> r = matvec_f64(a, o.solution);
    for (int i = 0; i < 40; ++i) r[i] = b[i] - r[i];
    std::vector<double> z(40);
    m(r, z);
    res.push_back(r);
    zs.push_back(z);
  }
  for (std::size_t i = 1; i < res.size(); ++i)
    for (std::size_t j = 0; j < i; ++j) {
      double d = 0.0, nr = 0.0, nz = 0.0;
      for (int t = 0; t < 40; ++t) {
        d += res[i][t] * zs[j][t];
        nr += res[i][t] * res[i][t];
        nz += zs[j][t] * zs[j][t];
      }
      CHECK(std::fabs(d) <= 1e-8 * std::sqrt(nr * nz));
    }
}

TEST_CASE("status reporting") {
  // Indefinite matrix: CG meets zero or negative curvature.
  const std::vector<int> r{0, 1}, c{0, 1};
  const std::vector<double> v{1, -1};
  const SparseSpd a = SparseSpd::from_triplets(2, r, c, v);
  const std::vector<double> b{1, 1};
  CHECK(pcg(a, identity_preconditioner(), b, 1e-10, 10).status == KrylovStatus::small_curvature);

  std::vector<double> d(50);
  for (int i = 0; i < 50; ++i) d[i] = std::pow(1.3, i);
  const SparseSpd ill = diagonal(d);
  const std::vector<double> ones(50, 1.0);
  const auto o = pcg(ill, identity_preconditioner(), ones, 1e-12, 5);
  CHECK(o.status == KrylovStatus::max_iterations);
  CHECK(o.iterations == 5);
  const auto g = gmres(ill, identity_preconditioner(), ones, 1e-12, 5);
  CHECK(g.status == KrylovStatus::max_iterations);
  CHECK(g.iterations == 5);

  CHECK_THROWS_AS(pcg(ill, identity_preconditioner(), ones, 0.0, 5), std::invalid_argument);
  CHECK(std::string(to_string(KrylovStatus::stagnated)) == "stagnated");
}
