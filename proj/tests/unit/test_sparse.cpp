#include <doctest.h>

#include <random>

#include "helpers.hpp"
#include "wentzell/kernels.hpp"
#include "wentzell/mesh.hpp"
#include "wentzell/sparse.hpp"

using namespace wentzell;

TEST_CASE("LaplacianCsr rejects malformed edges and sums duplicates") {
  CHECK_THROWS_AS(LaplacianCsr(3, {{1, 1, 1.0}}), std::invalid_argument);
  CHECK_THROWS_AS(LaplacianCsr(3, {{0, 1, -1.0}}), std::invalid_argument);
  CHECK_THROWS_AS(LaplacianCsr(3, {{0, 3, 1.0}}), std::out_of_range);
  const LaplacianCsr L(3, {{0, 1, 1.0}, {1, 0, 2.0}, {1, 2, 0.5}});
  CHECK(L.weight(0, 1) == 3.0);
  CHECK(L.weight(1, 0) == 3.0);
  CHECK(L.weight(0, 2) == 0.0);
  CHECK(L.bandwidth() == 1);
  const auto deg = L.degree();
  CHECK(deg[1] == 3.5);
}

TEST_CASE("CG with null-space projection solves the singular mesh system") {
  const DiskMesh mesh(5, 12);
  const OperatorSet ops(mesh, 1.5);
  const auto& L = ops.stiffness();
  const auto& w = ops.mu_weights();
  std::mt19937_64 rng(4);
  auto b = testing::random_vector(mesh.size(), rng);
  double s = 0;
  for (double x : b) s += x;
  for (auto& x : b) x -= s / static_cast<double>(b.size());
  std::vector<double> x(b.size(), 0.0);
  CgOptions opt;
  opt.nullspace_weights = w;
  conjugate_gradient([&](std::span<const double> in, std::span<double> out) { kernels::laplacian_apply(L, in, out); },
                     L.degree(), b, x, opt);
  // oracle: dense pseudo-inverse, then the same mu-mean normalisation
  Eigen::VectorXd ref = testing::dense(L).completeOrthogonalDecomposition().solve(testing::vec(b));
  const Eigen::VectorXd wv = testing::vec(w);
  ref.array() -= wv.dot(ref) / wv.sum();
  for (std::size_t k = 0; k < x.size(); ++k) CHECK(x[k] == doctest::Approx(ref(static_cast<Eigen::Index>(k))).scale(1.0).epsilon(1e-9));
  double mean = 0;
  for (std::size_t k = 0; k < x.size(); ++k) mean += w[k] * x[k];
  CHECK(std::abs(mean) < 1e-13);
}

TEST_CASE("CG reports non-convergence") {
  const DiskMesh mesh(6, 16);
  const OperatorSet ops(mesh, 1.0);
  std::vector<double> b(mesh.size(), 0.0), x(mesh.size(), 0.0), diag(mesh.size(), 1.0);
  b[3] = 1.0;
  CgOptions opt;
  opt.max_iter = 2;
  const auto& L = ops.stiffness();
  CHECK_THROWS_AS(conjugate_gradient(
                      [&](std::span<const double> in, std::span<double> out) {
                        kernels::shifted_apply(L, diag, 1.0, in, out);
                      },
                      diag, b, x, opt),
                  SolverError);
}

TEST_CASE("PositiveBandSolver matches a dense solve and keeps tiny entries accurate") {
  const DiskMesh mesh(6, 16);
  const OperatorSet ops(mesh, 3.0);
  const auto& W = ops.weights();
  const double dt = 1e-3;
  PositiveBandSolver solver(ops.stiffness(), W, dt);
  const Eigen::MatrixXd A = Eigen::MatrixXd(testing::vec(W).asDiagonal()) + dt * testing::dense(ops.stiffness());
  std::mt19937_64 rng(5);
  const auto b = testing::random_vector(mesh.size(), rng, 0.0, 1.0);
  std::vector<double> x(b.size());
  solver.solve(b, x);
  const Eigen::VectorXd ref = A.partialPivLu().solve(testing::vec(b));
  for (std::size_t k = 0; k < x.size(); ++k) CHECK(x[k] == doctest::Approx(ref(static_cast<Eigen::Index>(k))).epsilon(1e-11));

  // repeated solves from a point source: all entries stay positive
  std::vector<double> f(mesh.size(), 0.0), g(mesh.size());
  f[mesh.boundary_node(0)] = 1.0;
  for (int it = 0; it < 20; ++it) {
    for (std::size_t k = 0; k < f.size(); ++k) g[k] = W[k] * f[k];
    solver.solve(g, f);
  }
  for (double v : f) CHECK(v > 0.0);
}
