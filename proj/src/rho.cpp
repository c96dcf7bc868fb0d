#include "wentzell/rho.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace wentzell {

std::vector<double> flatten(const Rho& rho) {
  std::vector<double> v(rho.omega);
  v.insert(v.end(), rho.gamma.begin(), rho.gamma.end());
  return v;
}

Rho unflatten(const DiskMesh& mesh, std::span<const double> dens) {
  if (dens.size() != mesh.size()) throw std::invalid_argument("unflatten: size mismatch");
  const auto ni = static_cast<std::ptrdiff_t>(mesh.interior_size());
  return {std::vector<double>(dens.begin(), dens.begin() + ni),
          std::vector<double>(dens.begin() + ni, dens.end())};
}

Rho rho_from_mu_density(const DiskMesh& mesh, std::span<const double> f) {
  std::vector<double> d(f.begin(), f.end());
  for (double& x : d) x *= mesh.c();
  return unflatten(mesh, d);
}

std::vector<double> mu_density(const DiskMesh& mesh, const Rho& rho) {
  auto d = flatten(rho);
  for (double& x : d) x /= mesh.c();
  return d;
}

std::vector<double> node_masses(const DiskMesh& mesh, const Rho& rho) {
  auto d = flatten(rho);
  if (d.size() != mesh.size()) throw std::invalid_argument("node_masses: size mismatch");
  for (std::size_t k = 0; k < d.size(); ++k) d[k] *= mesh.weights()[k];
  return d;
}

Rho rho_from_masses(const DiskMesh& mesh, std::span<const double> m) {
  if (m.size() != mesh.size()) throw std::invalid_argument("rho_from_masses: size mismatch");
  std::vector<double> d(m.begin(), m.end());
  for (std::size_t k = 0; k < d.size(); ++k) d[k] /= mesh.weights()[k];
  return unflatten(mesh, d);
}

Rho stationary_measure(const DiskMesh& mesh) {
  return {std::vector<double>(mesh.interior_size(), mesh.c()),
          std::vector<double>(mesh.n_theta(), mesh.c())};
}

double total_mass(const DiskMesh& mesh, const Rho& rho) {
  double s = 0.0;
  for (double m : node_masses(mesh, rho)) s += m;
  return s;
}

double boundary_mass(const DiskMesh& mesh, const Rho& rho) {
  double s = 0.0;
  for (std::size_t j = 0; j < mesh.n_theta(); ++j) s += rho.gamma[j] * mesh.dtheta();
  return s;
}

double trace_mismatch(const DiskMesh& mesh, const Rho& rho) {
  const std::size_t outer = mesh.n_r() - 1;
  double gmax = 0.0, dev = 0.0;
  for (std::size_t j = 0; j < mesh.n_theta(); ++j) {
    gmax = std::max(gmax, rho.gamma[j]);
    dev = std::max(dev, std::abs(rho.omega[mesh.interior_node(outer, j)] - rho.gamma[j]));
  }
  return gmax > 0.0 ? dev / gmax : dev;
}

void validate_probability(const DiskMesh& mesh, const Rho& rho, double tol) {
  if (rho.omega.size() != mesh.interior_size() || rho.gamma.size() != mesh.n_theta())
    throw std::invalid_argument("Rho does not match mesh dimensions");
  for (double x : flatten(rho))
    if (!std::isfinite(x) || x < 0.0) throw std::invalid_argument("Rho has negative or non-finite entries");
  const double m = total_mass(mesh, rho);
  if (std::abs(m - 1.0) > tol)
    throw std::invalid_argument("Rho total mass " + std::to_string(m) + " differs from 1");
}

}  // namespace wentzell
