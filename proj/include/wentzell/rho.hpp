#pragma once

#include <span>
#include <vector>

#include "wentzell/mesh.hpp"

namespace wentzell {

// Probability measure on the closed disk: omega is the Lebesgue density on
// the interior cells, gamma the arc-length density on the boundary nodes.
struct Rho {
  std::vector<double> omega;
  std::vector<double> gamma;
};

// Densities concatenated in node order.
std::vector<double> flatten(const Rho& rho);
Rho unflatten(const DiskMesh& mesh, std::span<const double> dens);

// f is the density with respect to mu (f = 1 gives mu itself).
Rho rho_from_mu_density(const DiskMesh& mesh, std::span<const double> f);
std::vector<double> mu_density(const DiskMesh& mesh, const Rho& rho);

std::vector<double> node_masses(const DiskMesh& mesh, const Rho& rho);
Rho rho_from_masses(const DiskMesh& mesh, std::span<const double> m);

Rho stationary_measure(const DiskMesh& mesh);

double total_mass(const DiskMesh& mesh, const Rho& rho);
double boundary_mass(const DiskMesh& mesh, const Rho& rho);

// sup_j |omega(outer ring, j) - gamma_j| / max gamma
double trace_mismatch(const DiskMesh& mesh, const Rho& rho);

// Throws std::invalid_argument on wrong sizes, negative or non-finite
// entries, or total mass off 1 by more than tol.
void validate_probability(const DiskMesh& mesh, const Rho& rho, double tol = 1e-9);

}  // namespace wentzell
