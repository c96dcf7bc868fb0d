#include <doctest.h>

#include <cmath>
#include <random>

#include "helpers.hpp"
#include "wentzell/dynamics.hpp"
#include "wentzell/experiments.hpp"
#include "wentzell/otto.hpp"

using namespace wentzell;

namespace {

// L_rho assembled from the mesh edge list, independently of the library.
Eigen::MatrixXd dense_weighted(const OperatorSet& ops, const Rho& rho) {
  const auto& mesh = ops.mesh();
  const auto d = flatten(rho);
  const auto n = static_cast<Eigen::Index>(mesh.size());
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n, n);
  for (const auto& e : mesh.edges()) {
    const double k = e.conductance * (e.kind == EdgeKind::Tangential ? ops.a() : 1.0) * 0.5 * (d[e.u] + d[e.v]);
    const auto u = static_cast<Eigen::Index>(e.u), v = static_cast<Eigen::Index>(e.v);
    M(u, u) += k;
    M(v, v) += k;
    M(u, v) -= k;
    M(v, u) -= k;
  }
  return M;
}

TangentPerturbation random_zero_mass(const DiskMesh& mesh, std::mt19937_64& rng) {
  auto s = testing::random_vector(mesh.size(), rng);
  double m = 0, w = 0;
  for (std::size_t k = 0; k < s.size(); ++k) {
    m += mesh.weights()[k] * s[k];
    w += mesh.weights()[k];
  }
  for (auto& x : s) x -= m / w;
  return perturbation_from_flat(mesh, s);
}

}  // namespace

TEST_CASE("entropy vanishes at mu and matches the pointwise formula") {
  const DiskMesh mesh(6, 16);
  CHECK(std::abs(entropy(mesh, stationary_measure(mesh))) < 1e-15);
  std::mt19937_64 rng(41);
  const auto rho = testing::random_matched_rho(mesh, rng);
  const auto f = mu_density(mesh, rho);
  double ref = 0;
  for (std::size_t k = 0; k < f.size(); ++k) ref += mesh.c() * mesh.weights()[k] * (f[k] * std::log(f[k]) - f[k] + 1);
  CHECK(entropy(mesh, rho) == doctest::Approx(ref).epsilon(1e-12));
  CHECK(entropy(mesh, rho) > 0.0);
}

TEST_CASE("weighted stiffness uses arithmetic-mean edge densities") {
  const DiskMesh mesh(3, 8);
  const OperatorSet ops(mesh, 3.0);
  std::mt19937_64 rng(42);
  const auto rho = testing::random_matched_rho(mesh, rng);
  const Eigen::MatrixXd diff = testing::dense(weighted_stiffness(ops, rho)) - dense_weighted(ops, rho);
  CHECK(diff.lpNorm<Eigen::Infinity>() < 1e-13);
}

TEST_CASE("identify_potential agrees with a dense pseudo-inverse") {
  const DiskMesh mesh(5, 12);
  std::mt19937_64 rng(43);
  for (double a : {0.5, 4.0}) {
    const OperatorSet ops(mesh, a);
    const auto rho = testing::random_matched_rho(mesh, rng);
    const auto s = random_zero_mass(mesh, rng);
    const auto phi = identify_potential(ops, rho, s).phi;
    const Eigen::VectorXd b = testing::vec(mesh.weights()).cwiseProduct(testing::vec(flatten(s)));
    Eigen::VectorXd ref = dense_weighted(ops, rho).completeOrthogonalDecomposition().solve(b);
    const Eigen::VectorXd mu = testing::vec(ops.mu_weights());
    ref.array() -= mu.dot(ref);
    for (std::size_t k = 0; k < phi.size(); ++k) CHECK(phi[k] == doctest::Approx(ref(static_cast<Eigen::Index>(k))).scale(1.0).epsilon(1e-9));
    CHECK(perturbation_norm(ops, rho, s) == doctest::Approx(b.dot(ref)).epsilon(1e-9));
    CHECK(potential_norm(ops, rho, phi) == doctest::Approx(b.dot(ref)).epsilon(1e-9));
  }
}

TEST_CASE("identify_potential rejects non-positive densities") {
  const DiskMesh mesh(3, 8);
  const OperatorSet ops(mesh, 1.0);
  auto rho = stationary_measure(mesh);
  rho.omega[2] = 0.0;
  std::mt19937_64 rng(44);
  CHECK_THROWS_AS(identify_potential(ops, rho, random_zero_mass(mesh, rng)), std::domain_error);
}

TEST_CASE("fokker_planck_rhs is -W^{-1} L rho and vanishes at mu") {
  const DiskMesh mesh(4, 12);
  const OperatorSet ops(mesh, 2.0);
  std::mt19937_64 rng(45);
  const auto rho = testing::random_matched_rho(mesh, rng);
  const auto s = flatten(fokker_planck_rhs(ops, rho));
  const Eigen::VectorXd ref =
      -(testing::vec(mesh.weights()).cwiseInverse().asDiagonal() * testing::dense(ops.stiffness()) * testing::vec(flatten(rho)));
  for (std::size_t k = 0; k < s.size(); ++k) CHECK(s[k] == doctest::Approx(ref(static_cast<Eigen::Index>(k))).scale(1.0));
  for (double v : flatten(fokker_planck_rhs(ops, stationary_measure(mesh)))) CHECK(std::abs(v) < 1e-14);
}

TEST_CASE("entropy gradient: chain rule against a finite difference") {
  const DiskMesh mesh(12, 36);
  const OperatorSet ops(mesh, 1.0);
  const auto tr = solve_heat(ops, rho_from_mu_density(mesh, cosine_density(mesh)), 0.01, 1e-4);
  const auto& rho = tr.states.back();
  const auto g = entropy_gradient(ops, rho);
  CHECK(g.representation_defect < 0.05);
  // d/deps Ent(rho + eps Q*rho) at 0 equals -||grad Ent||^2 up to the mean choice
  const auto q = flatten(fokker_planck_rhs(ops, rho));
  const double eps = 1e-6;
  auto plus = flatten(rho), minus = flatten(rho);
  for (std::size_t k = 0; k < q.size(); ++k) {
    plus[k] += eps * q[k];
    minus[k] -= eps * q[k];
  }
  const double dent = (entropy(mesh, unflatten(mesh, plus)) - entropy(mesh, unflatten(mesh, minus))) / (2 * eps);
  CHECK(std::abs(dent + g.squared_norm) <= 0.05 * g.squared_norm);
}

TEST_CASE("trace guard: grad_entropy throws and the lagrangian is infinite") {
  const DiskMesh mesh(4, 12);
  const OperatorSet ops(mesh, 1.0);
  auto f = cosine_density(mesh);
  for (std::size_t j = 0; j < mesh.n_theta(); ++j) f[mesh.boundary_node(j)] *= 1.5;
  const auto rho = rho_from_mu_density(mesh, f);
  CHECK(trace_mismatch(mesh, rho) > 1e-2);
  CHECK_THROWS_AS(grad_entropy(ops, rho), TraceMismatchError);
  std::mt19937_64 rng(46);
  CHECK(lagrangian(ops, rho, random_zero_mass(mesh, rng)) == kInfinity);
}

TEST_CASE("lagrangian is the Legendre transform of the hamiltonian on the 1x4 mesh") {
  const DiskMesh mesh(1, 4);
  std::mt19937_64 rng(47);
  for (int trial = 0; trial < 5; ++trial) {
    const OperatorSet ops(mesh, 0.5 + trial);
    const auto rho = testing::random_matched_rho(mesh, rng, 0.8);
    const auto s = random_zero_mass(mesh, rng);
    const auto sv = flatten(s);
    // the objective <s, xi>_W - H(rho, xi) is quadratic: recover it by probing
    const std::size_t n = mesh.size();
    auto F = [&](const std::vector<double>& xi) {
      double lin = 0;
      for (std::size_t k = 0; k < n; ++k) lin += mesh.weights()[k] * sv[k] * xi[k];
      return lin - hamiltonian(ops, rho, xi);
    };
    const std::vector<double> zero(n, 0.0);
    Eigen::VectorXd grad(static_cast<Eigen::Index>(n));
    Eigen::MatrixXd hess(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
      auto ei = zero, mi = zero;
      ei[i] = 1;
      mi[i] = -1;
      grad(static_cast<Eigen::Index>(i)) = 0.5 * (F(ei) - F(mi));
      hess(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = F(ei) + F(mi);
    }
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) {
        auto e = zero;
        e[i] = e[j] = 1;
        const double v = F(e) - grad(static_cast<Eigen::Index>(i)) - grad(static_cast<Eigen::Index>(j)) -
                                0.5 * hess(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) -
                                0.5 * hess(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(j));
        hess(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = hess(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = v;
      }
    const Eigen::VectorXd xi = hess.completeOrthogonalDecomposition().solve(-grad);
    const double sup = grad.dot(xi) + 0.5 * xi.dot(hess * xi);
    CHECK(lagrangian(ops, rho, s) == doctest::Approx(sup).epsilon(1e-6));
  }
}

TEST_CASE("exponential hamiltonian agrees with the quadratic one beyond second order") {
  const DiskMesh mesh(4, 12);
  const OperatorSet ops(mesh, 2.0);
  std::mt19937_64 rng(48);
  const auto rho = testing::random_matched_rho(mesh, rng);
  const auto xi = testing::random_vector(mesh.size(), rng);
  auto gap = [&](double e) {
    std::vector<double> x(xi.size());
    for (std::size_t k = 0; k < x.size(); ++k) x[k] = e * xi[k];
    return std::abs(exponential_hamiltonian(ops, rho, x) - hamiltonian(ops, rho, x));
  };
  // the gap is at least cubic in the scale of xi
  CHECK(gap(1e-3) < 1.5e-3 * gap(1e-2));
  CHECK(gap(1e-2) > 0.0);
}

TEST_CASE("curve velocity is exact on linear curves") {
  const DiskMesh mesh(3, 8);
  std::mt19937_64 rng(49);
  const auto r0 = testing::random_matched_rho(mesh, rng), r1 = testing::random_matched_rho(mesh, rng);
  std::vector<Rho> states;
  std::vector<double> times;
  for (int k = 0; k < 4; ++k) {
    const double t = 0.1 * k;
    auto a = flatten(r0), b = flatten(r1);
    for (std::size_t i = 0; i < a.size(); ++i) a[i] += t * (b[i] - a[i]);
    states.push_back(unflatten(mesh, a));
    times.push_back(t);
  }
  const auto a = flatten(r0), b = flatten(r1);
  for (std::size_t k = 0; k < 4; ++k) {
    const auto v = flatten(curve_velocity(mesh, CurveView(times, states), k));
    for (std::size_t i = 0; i < v.size(); ++i) CHECK(v[i] == doctest::Approx(b[i] - a[i]).scale(1.0));
  }
}

TEST_CASE("energy-dissipation balance holds along a short heat trajectory") {
  const DiskMesh mesh(8, 24);
  const OperatorSet ops(mesh, 4.0);
  const auto tr = solve_heat(ops, rho_from_mu_density(mesh, cosine_density(mesh)), 0.02, 1e-4);
  const auto rec = ede_decomposition(ops, tr);
  CHECK(rec.ent_drop > 0.0);
  CHECK(rec.relative_residual() < 0.05);
  CHECK(rec.psi_integral == doctest::Approx(rec.ent_drop).epsilon(0.05));
  CHECK(rec.psi_star_integral == doctest::Approx(rec.ent_drop).epsilon(0.05));
  CHECK(rec.action < 0.05 * rec.ent_drop);
}
