#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "wentzell/sparse.hpp"

namespace wentzell {

struct Point2 {
  double x = 0.0, y = 0.0;
};

enum class EdgeKind { Radial, Angular, Tangential, Normal };

// `conductance` is the a-independent part; tangential edges get scaled by a.
struct MeshEdge {
  std::size_t u, v;
  EdgeKind kind;
  double conductance;
};

// Polar finite-volume disk. Ring i (0-based) sits at r = (i + 1/2) dr and
// sector j at theta = j dtheta. Interior nodes come first, i * n_theta + j,
// followed by one boundary node per sector at r = 1.
class DiskMesh {
 public:
  DiskMesh(std::size_t n_r, std::size_t n_theta);

  std::size_t n_r() const { return n_r_; }
  std::size_t n_theta() const { return n_theta_; }
  std::size_t size() const { return (n_r_ + 1) * n_theta_; }
  std::size_t interior_size() const { return n_r_ * n_theta_; }
  double dr() const { return dr_; }
  double dtheta() const { return dtheta_; }
  // Normalisation constant: mu has density c on the disk and on the circle.
  double c() const { return c_; }

  std::size_t interior_node(std::size_t i, std::size_t j) const { return i * n_theta_ + j; }
  std::size_t boundary_node(std::size_t j) const { return n_r_ * n_theta_ + j; }
  bool is_boundary(std::size_t k) const { return k >= n_r_ * n_theta_; }
  std::size_t sector(std::size_t k) const { return k % n_theta_; }
  // Boundary nodes report ring n_r.
  std::size_t ring(std::size_t k) const { return k / n_theta_; }

  double radius(std::size_t k) const;
  double theta(std::size_t k) const { return static_cast<double>(sector(k)) * dtheta_; }
  Point2 position(std::size_t k) const;

  // Lebesgue area for interior nodes, arc length for boundary nodes.
  const std::vector<double>& weights() const { return w_; }
  const std::vector<MeshEdge>& edges() const { return edges_; }

 private:
  std::size_t n_r_, n_theta_;
  double dr_, dtheta_, c_;
  std::vector<double> w_;
  std::vector<MeshEdge> edges_;
};

class OperatorSet {
 public:
  OperatorSet(const DiskMesh& mesh, double a);

  const DiskMesh& mesh() const { return mesh_; }
  double a() const { return a_; }
  // Stiffness L with f^T L f = int |grad f|^2 + a int |d_tau f|^2.
  const LaplacianCsr& stiffness() const { return L_; }
  const std::vector<double>& weights() const { return mesh_.weights(); }
  // Node masses of mu: c * weights.
  const std::vector<double>& mu_weights() const { return mu_; }

  // Q f = -W^{-1} L f
  void apply_generator(std::span<const double> f, std::span<double> out) const;
  std::vector<double> generator(std::span<const double> f) const;
  // E(f) = c f^T L f = -<f, Q f>_mu
  double dirichlet_form(std::span<const double> f) const;
  double mu_inner(std::span<const double> f, std::span<const double> g) const;

 private:
  DiskMesh mesh_;
  double a_;
  LaplacianCsr L_;
  std::vector<double> mu_;
};

OperatorSet assemble_operators(const DiskMesh& mesh, double a);

}  // namespace wentzell
