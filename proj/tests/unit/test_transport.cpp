#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "helpers.hpp"
#include "wentzell/dynamics.hpp"
#include "wentzell/experiments.hpp"
#include "wentzell/otto.hpp"
#include "wentzell/transport.hpp"

using namespace wentzell;

namespace {

std::vector<double> simplex(std::size_t n, std::mt19937_64& rng) {
  auto v = testing::random_vector(n, rng, 0.05, 1.0);
  const double s = std::accumulate(v.begin(), v.end(), 0.0);
  for (auto& x : v) x /= s;
  return v;
}

// Quadratic cost on the line: the monotone coupling is optimal.
double monotone_w2(const std::vector<double>& x, const std::vector<double>& a, const std::vector<double>& y,
                   const std::vector<double>& b) {
  std::size_t i = 0, j = 0;
  double ra = a[0], rb = b[0], cost = 0;
  while (i < x.size() && j < y.size()) {
    const double m = std::min(ra, rb);
    cost += m * (x[i] - y[j]) * (x[i] - y[j]);
    ra -= m;
    rb -= m;
    if (ra <= 1e-15 && ++i < x.size()) ra = a[i];
    if (rb <= 1e-15 && ++j < y.size()) rb = b[j];
  }
  return cost;
}

}  // namespace

TEST_CASE("exact OT reproduces the monotone coupling on the line") {
  std::mt19937_64 rng(61);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t n = 3 + trial, m = 2 + 2 * trial;
    auto x = testing::random_vector(n, rng), y = testing::random_vector(m, rng);
    std::sort(x.begin(), x.end());
    std::sort(y.begin(), y.end());
    const auto a = simplex(n, rng), b = simplex(m, rng);
    std::vector<double> C(n * m);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < m; ++j) C[i * m + j] = (x[i] - y[j]) * (x[i] - y[j]);
    const double ref = monotone_w2(x, a, y, b);
    CHECK(exact_ot_small(a, b, C) == doctest::Approx(ref).epsilon(1e-10));
    auto sorted = C;
    std::nth_element(sorted.begin(), sorted.begin() + static_cast<long>(sorted.size() / 2), sorted.end());
    const auto s = sinkhorn(a, b, C, 1e-3 * sorted[sorted.size() / 2]);
    CHECK(s.marginal_violation <= 1e-8);
    CHECK(s.cost == doctest::Approx(ref).epsilon(1e-2).scale(1e-3));
  }
}

TEST_CASE("exact OT equals brute-force assignment for uniform weights") {
  std::mt19937_64 rng(62);
  const std::size_t n = 6;
  const auto C = testing::random_vector(n * n, rng, 0.0, 1.0);
  std::vector<std::size_t> p(n);
  std::iota(p.begin(), p.end(), 0);
  double best = 1e300;
  do {
    double s = 0;
    for (std::size_t i = 0; i < n; ++i) s += C[i * n + p[i]];
    best = std::min(best, s / n);
  } while (std::next_permutation(p.begin(), p.end()));
  const std::vector<double> u(n, 1.0 / n);
  CHECK(exact_ot_small(u, u, C) == doctest::Approx(best).epsilon(1e-12));
  CHECK(exact_ot(u, u, C) == doctest::Approx(best).epsilon(1e-12));
}

TEST_CASE("exact_ot_small enforces its size cap; inputs are validated") {
  const std::vector<double> u(65, 1.0 / 65);
  const std::vector<double> C(65 * 65, 1.0);
  CHECK_THROWS_AS(exact_ot_small(u, u, C), std::length_error);
  const std::vector<double> a{0.5, 0.5}, b{0.3, 0.3};
  const std::vector<double> C2(4, 1.0);
  CHECK_THROWS_AS(exact_ot_small(a, b, C2), std::invalid_argument);
  CHECK_THROWS_AS(sinkhorn(a, b, C2, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(sinkhorn(a, a, C2, 0.0), std::invalid_argument);
}

TEST_CASE("sinkhorn: parallel equals serial, plan has the right marginals") {
  std::mt19937_64 rng(63);
  const std::size_t n = 15, m = 11;
  const auto a = simplex(n, rng), b = simplex(m, rng);
  const auto C = testing::random_vector(n * m, rng, 0.0, 2.0);
  SinkhornOptions serial;
  serial.serial_kernels = true;
  const auto p = sinkhorn(a, b, C, 1e-2), s = sinkhorn(a, b, C, 1e-2, serial);
  CHECK(p.cost == s.cost);
  CHECK(p.plan == s.plan);
  for (std::size_t i = 0; i < n; ++i) {
    double r = 0;
    for (std::size_t j = 0; j < m; ++j) r += p.plan[i * m + j];
    CHECK(r == doctest::Approx(a[i]).epsilon(1e-6));
  }
  CHECK(p.cost >= exact_ot_small(a, b, C) - 1e-12);
}

TEST_CASE("sinkhorn reports non-convergence") {
  std::mt19937_64 rng(64);
  const auto a = simplex(10, rng), b = simplex(10, rng);
  const auto C = testing::random_vector(100, rng, 0.0, 1.0);
  SinkhornOptions opt;
  opt.max_iter = 3;
  CHECK_THROWS_AS(sinkhorn(a, b, C, 1e-6, opt), TransportError);
}

TEST_CASE("JKO: mu is a fixed point, steps descend and conserve mass") {
  const DiskMesh mesh(3, 8);
  const auto C = cost_matrix(1.0, mesh_points(mesh), 64);
  CHECK(median_cost(C) > 0.0);
  JkoConfig cfg;
  cfg.h = 1e-2;
  cfg.cost = &C;
  const auto mu = stationary_measure(mesh);
  const auto r = jko_step_detailed(mu, cfg, mesh);
  const auto p = node_masses(mesh, mu), q = node_masses(mesh, r.rho);
  double tv = 0;
  for (std::size_t k = 0; k < p.size(); ++k) tv += 0.5 * std::abs(p[k] - q[k]);
  CHECK(tv < 1e-3);

  const auto rho0 = rho_from_mu_density(mesh, cosine_density(mesh));
  const auto tr = jko_flow(rho0, cfg, 0.05, mesh);
  CHECK(tr.states.size() == 6);
  for (std::size_t k = 1; k < tr.states.size(); ++k) {
    CHECK(tr.objective[k] <= tr.entropy[k - 1] + 1e-6);
    CHECK(tr.entropy[k] <= tr.entropy[k - 1]);
    CHECK(total_mass(mesh, tr.states[k]) == doctest::Approx(1.0).epsilon(1e-9));
  }
  JkoConfig missing;
  CHECK_THROWS_AS(jko_step(rho0, missing, mesh), std::invalid_argument);
}
