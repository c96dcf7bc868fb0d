#pragma once

#include <Eigen/Dense>
#include <random>
#include <vector>

#include "wentzell/mesh.hpp"
#include "wentzell/rho.hpp"
#include "wentzell/sparse.hpp"

namespace testing {

inline Eigen::MatrixXd dense(const wentzell::LaplacianCsr& L) {
  const auto n = static_cast<Eigen::Index>(L.size());
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t i = 0; i < L.size(); ++i)
    for (std::size_t k = L.row_ptr()[i]; k < L.row_ptr()[i + 1]; ++k) {
      const auto j = static_cast<Eigen::Index>(L.cols()[k]);
      const auto ii = static_cast<Eigen::Index>(i);
      M(ii, j) -= L.values()[k];
      M(ii, ii) += L.values()[k];
    }
  return M;
}

inline Eigen::VectorXd vec(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

inline std::vector<double> random_vector(std::size_t n, std::mt19937_64& rng, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> U(lo, hi);
  std::vector<double> v(n);
  for (auto& x : v) x = U(rng);
  return v;
}

// Positive mu-density with matched trace, normalised to a probability.
inline wentzell::Rho random_matched_rho(const wentzell::DiskMesh& mesh, std::mt19937_64& rng, double spread = 0.5) {
  auto f = random_vector(mesh.size(), rng, 1.0 - spread, 1.0 + spread);
  const std::size_t outer = (mesh.n_r() - 1) * mesh.n_theta();
  for (std::size_t j = 0; j < mesh.n_theta(); ++j) f[mesh.boundary_node(j)] = f[outer + j];
  auto rho = wentzell::rho_from_mu_density(mesh, f);
  const double m = wentzell::total_mass(mesh, rho);
  for (auto& x : rho.omega) x /= m;
  for (auto& x : rho.gamma) x /= m;
  return rho;
}

}  // namespace testing
