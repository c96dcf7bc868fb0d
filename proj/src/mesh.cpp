#include "wentzell/mesh.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "wentzell/kernels.hpp"

namespace wentzell {

DiskMesh::DiskMesh(std::size_t n_r, std::size_t n_theta) : n_r_(n_r), n_theta_(n_theta) {
  if (n_r < 1 || n_theta < 3) throw std::invalid_argument("DiskMesh: need n_r >= 1 and n_theta >= 3");
  dr_ = 1.0 / static_cast<double>(n_r);
  dtheta_ = 2.0 * std::numbers::pi / static_cast<double>(n_theta);
  c_ = 1.0 / (3.0 * std::numbers::pi);

  w_.resize(size());
  for (std::size_t i = 0; i < n_r; ++i) {
    const double r = (static_cast<double>(i) + 0.5) * dr_;
    for (std::size_t j = 0; j < n_theta; ++j) w_[interior_node(i, j)] = r * dr_ * dtheta_;
  }
  for (std::size_t j = 0; j < n_theta; ++j) w_[boundary_node(j)] = dtheta_;

  for (std::size_t i = 0; i < n_r; ++i) {
    const double r = (static_cast<double>(i) + 0.5) * dr_;
    for (std::size_t j = 0; j < n_theta; ++j) {
      const std::size_t jn = (j + 1) % n_theta;
      edges_.push_back({interior_node(i, j), interior_node(i, jn), EdgeKind::Angular,
                        dr_ / (r * dtheta_)});
      if (i + 1 < n_r) {
        // face at r = (i+1) dr, centres dr apart
        const double face = static_cast<double>(i + 1) * dr_;
        edges_.push_back({interior_node(i, j), interior_node(i + 1, j), EdgeKind::Radial,
                          face * dtheta_ / dr_});
      }
    }
  }
  for (std::size_t j = 0; j < n_theta; ++j) {
    // outer centre sits dr/2 inside the circle
    edges_.push_back({interior_node(n_r - 1, j), boundary_node(j), EdgeKind::Normal,
                      2.0 * dtheta_ / dr_});
    edges_.push_back({boundary_node(j), boundary_node((j + 1) % n_theta), EdgeKind::Tangential,
                      1.0 / dtheta_});
  }
}

double DiskMesh::radius(std::size_t k) const {
  if (is_boundary(k)) return 1.0;
  return (static_cast<double>(ring(k)) + 0.5) * dr_;
}

Point2 DiskMesh::position(std::size_t k) const {
  const double r = radius(k), t = theta(k);
  return {r * std::cos(t), r * std::sin(t)};
}

OperatorSet::OperatorSet(const DiskMesh& mesh, double a) : mesh_(mesh), a_(a) {
  if (!(a > 0.0) || !std::isfinite(a)) throw std::invalid_argument("OperatorSet: a must be positive");
  std::vector<Triplet> t;
  t.reserve(mesh.edges().size());
  for (const auto& e : mesh.edges())
    t.push_back({e.u, e.v, e.kind == EdgeKind::Tangential ? a * e.conductance : e.conductance});
  L_ = LaplacianCsr(mesh.size(), t);
  mu_.resize(mesh.size());
  for (std::size_t k = 0; k < mesh.size(); ++k) mu_[k] = mesh.c() * mesh.weights()[k];
}

void OperatorSet::apply_generator(std::span<const double> f, std::span<double> out) const {
  if (f.size() != mesh_.size() || out.size() != mesh_.size())
    throw std::invalid_argument("apply_generator: size mismatch");
  kernels::laplacian_apply(L_, f, out);
  const auto& w = mesh_.weights();
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = -out[k] / w[k];
}

std::vector<double> OperatorSet::generator(std::span<const double> f) const {
  std::vector<double> out(f.size());
  apply_generator(f, out);
  return out;
}

double OperatorSet::dirichlet_form(std::span<const double> f) const {
  std::vector<double> Lf(f.size());
  kernels::laplacian_apply(L_, f, Lf);
  return mesh_.c() * kernels::dot(f, Lf);
}

double OperatorSet::mu_inner(std::span<const double> f, std::span<const double> g) const {
  double s = 0.0;
  for (std::size_t k = 0; k < f.size(); ++k) s += mu_[k] * f[k] * g[k];
  return s;
}

OperatorSet assemble_operators(const DiskMesh& mesh, double a) { return OperatorSet(mesh, a); }

}  // namespace wentzell
