#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "helpers.hpp"
#include "wentzell/mesh.hpp"
#include "wentzell/rho.hpp"

using namespace wentzell;
constexpr double kPi = std::numbers::pi;

TEST_CASE("mesh weights integrate area and perimeter; mu is a probability") {
  const DiskMesh mesh(16, 48);
  double area = 0, perimeter = 0;
  for (std::size_t k = 0; k < mesh.size(); ++k) (mesh.is_boundary(k) ? perimeter : area) += mesh.weights()[k];
  CHECK(area == doctest::Approx(kPi).epsilon(1e-14));
  CHECK(perimeter == doctest::Approx(2 * kPi).epsilon(1e-14));
  CHECK(mesh.c() == doctest::Approx(1.0 / (3 * kPi)));
  CHECK(total_mass(mesh, stationary_measure(mesh)) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(boundary_mass(mesh, stationary_measure(mesh)) == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
}

TEST_CASE("1x4 mesh conductances match the finite-volume formulas") {
  const DiskMesh mesh(1, 4);
  const double a = 2.5;
  const OperatorSet ops(mesh, a);
  const auto& L = ops.stiffness();
  // ring at r = 1/2, dtheta = pi/2, dr = 1
  const double angular = 1.0 / (0.5 * kPi / 2), normal = 2 * (kPi / 2) / 1.0, tangential = a / (kPi / 2);
  for (std::size_t j = 0; j < 4; ++j) {
    const std::size_t jn = (j + 1) % 4;
    CHECK(L.weight(mesh.interior_node(0, j), mesh.interior_node(0, jn)) == doctest::Approx(angular));
    CHECK(L.weight(mesh.interior_node(0, j), mesh.boundary_node(j)) == doctest::Approx(normal));
    CHECK(L.weight(mesh.boundary_node(j), mesh.boundary_node(jn)) == doctest::Approx(tangential));
    CHECK(L.weight(mesh.interior_node(0, j), mesh.interior_node(0, (j + 2) % 4)) == 0.0);
  }
  CHECK(L.nnz() == 2 * 12);
}

TEST_CASE("L annihilates constants exactly and Q is mu-symmetric") {
  std::mt19937_64 rng(11);
  for (double a : {0.5, 1.0, 4.0}) {
    const DiskMesh mesh(16, 48);
    const OperatorSet ops(mesh, a);
    const std::vector<double> one(mesh.size(), 1.0);
    const auto q1 = ops.generator(one);
    for (double v : q1) CHECK(v == 0.0);
    const auto f = testing::random_vector(mesh.size(), rng), g = testing::random_vector(mesh.size(), rng);
    const double lhs = ops.mu_inner(f, ops.generator(g)), rhs = ops.mu_inner(ops.generator(f), g);
    CHECK(std::abs(lhs - rhs) <= 1e-12 * std::abs(lhs));
    CHECK(ops.dirichlet_form(f) == doctest::Approx(-ops.mu_inner(f, ops.generator(f))).epsilon(1e-12));
    CHECK(ops.dirichlet_form(f) > 0.0);
  }
}

TEST_CASE("energy of the coordinate function converges to (1 + a)/3") {
  for (double a : {0.5, 1.0, 4.0}) {
    double prev = 1.0;
    for (std::size_t n : {8u, 16u, 32u}) {
      const DiskMesh mesh(n, 3 * n);
      const OperatorSet ops(mesh, a);
      std::vector<double> x(mesh.size());
      for (std::size_t k = 0; k < x.size(); ++k) x[k] = mesh.position(k).x;
      const double err = std::abs(ops.dirichlet_form(x) - (1 + a) / 3) / ((1 + a) / 3);
      CHECK(err < prev);
      if (n == 16) CHECK(err <= 0.02);
      prev = err;
    }
  }
}

TEST_CASE("rho conversions round-trip and validation rejects bad measures") {
  const DiskMesh mesh(4, 12);
  std::mt19937_64 rng(12);
  const auto rho = testing::random_matched_rho(mesh, rng);
  CHECK_NOTHROW(validate_probability(mesh, rho));
  CHECK(trace_mismatch(mesh, rho) == doctest::Approx(0.0));
  const auto back = unflatten(mesh, flatten(rho));
  CHECK(back.omega == rho.omega);
  CHECK(back.gamma == rho.gamma);
  const auto again = rho_from_masses(mesh, node_masses(mesh, rho));
  for (std::size_t k = 0; k < rho.omega.size(); ++k) CHECK(again.omega[k] == doctest::Approx(rho.omega[k]));
  const auto f = mu_density(mesh, rho);
  const auto r2 = rho_from_mu_density(mesh, f);
  for (std::size_t j = 0; j < rho.gamma.size(); ++j) CHECK(r2.gamma[j] == doctest::Approx(rho.gamma[j]));

  auto bad = rho;
  bad.omega[0] = -1e-3;
  CHECK_THROWS_AS(validate_probability(mesh, bad), std::invalid_argument);
  bad = rho;
  bad.gamma.pop_back();
  CHECK_THROWS_AS(validate_probability(mesh, bad), std::invalid_argument);
  bad = rho;
  for (auto& v : bad.omega) v *= 1.01;
  CHECK_THROWS_AS(validate_probability(mesh, bad), std::invalid_argument);
}
