#pragma once

#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "wentzell/dynamics.hpp"
#include "wentzell/mesh.hpp"
#include "wentzell/rho.hpp"

namespace wentzell {

// Zero-mass density perturbation, same layout as Rho.
struct TangentPerturbation {
  std::vector<double> s_o;
  std::vector<double> s_b;
};

struct Potential {
  std::vector<double> phi;  // node order
};

// Raised when the entropy gradient is requested off the trace-matched set.
class TraceMismatchError : public std::domain_error {
 public:
  TraceMismatchError(const std::string& what, double mismatch)
      : std::domain_error(what), mismatch_(mismatch) {}
  double mismatch() const { return mismatch_; }

 private:
  double mismatch_;
};

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();
inline constexpr double kDefaultTraceTol = 1e-2;

std::vector<double> flatten(const TangentPerturbation& s);
TangentPerturbation perturbation_from_flat(const DiskMesh& mesh, std::span<const double> v);
// s1 - s2
TangentPerturbation difference(const TangentPerturbation& s1, const TangentPerturbation& s2);
// Total signed mass sum_k W_k s_k.
double perturbation_mass(const DiskMesh& mesh, const TangentPerturbation& s);

// Relative entropy of rho with respect to mu.
double entropy(const DiskMesh& mesh, const Rho& rho);

// L_rho: conductances times the arithmetic mean of endpoint densities.
// Throws std::domain_error if rho is not strictly positive.
LaplacianCsr weighted_stiffness(const OperatorSet& ops, const Rho& rho);

// ||xi||^2_rho = xi^T L_rho xi
double potential_norm(const OperatorSet& ops, const Rho& rho, std::span<const double> xi);

// Solves the weighted elliptic problem L_rho phi = W s, <phi>_mu = 0.
Potential identify_potential(const OperatorSet& ops, const Rho& rho, const TangentPerturbation& s,
                             double cg_tol = 1e-13);

// ||s||^2_rho = <s, phi_s>
double perturbation_norm(const OperatorSet& ops, const Rho& rho, const TangentPerturbation& s);

// Q* rho = -W^{-1} L rho
TangentPerturbation fokker_planck_rhs(const OperatorSet& ops, const Rho& rho);

struct EntropyGradient {
  TangentPerturbation s;
  Potential phi;
  double squared_norm = 0.0;
  // ||phi - (log f - <log f>_mu)||_rho / ||log f - <log f>_mu||_rho
  double representation_defect = 0.0;
};

EntropyGradient entropy_gradient(const OperatorSet& ops, const Rho& rho,
                                 double trace_tol = kDefaultTraceTol);
// Throws TraceMismatchError off the trace-matched set, and std::runtime_error
// if the potential is further than representation_tol from log f.
TangentPerturbation grad_entropy(const OperatorSet& ops, const Rho& rho,
                                 double trace_tol = kDefaultTraceTol,
                                 double representation_tol = 0.25);

// <Q* rho, xi> + ||xi||^2_rho
double hamiltonian(const OperatorSet& ops, const Rho& rho, std::span<const double> xi);
// Lattice form sum_e k_e [rho_u (e^{xi_v - xi_u} - 1) + rho_v (e^{xi_u - xi_v} - 1)];
// agrees with hamiltonian() to second order in xi.
double exponential_hamiltonian(const OperatorSet& ops, const Rho& rho, std::span<const double> xi);

// 1/4 ||s - Q* rho||^2_rho, or +inf when the trace guard trips.
double lagrangian(const OperatorSet& ops, const Rho& rho, const TangentPerturbation& s,
                  double trace_tol = kDefaultTraceTol);

struct CurveView {
  std::span<const double> times;
  std::span<const Rho> states;
  CurveView(std::span<const double> t, std::span<const Rho> s) : times(t), states(s) {}
  CurveView(const HeatTrajectory& tr) : times(tr.times), states(tr.states) {}  // NOLINT
};

// Central differences inside, one-sided at the ends.
TangentPerturbation curve_velocity(const DiskMesh& mesh, CurveView curve, std::size_t k);

double action(const OperatorSet& ops, CurveView curve, double trace_tol = kDefaultTraceTol);

struct EdeSlice {
  double t, entropy, psi, psi_star, lagrangian;
};

struct EdeRecord {
  double ent_drop = 0.0;  // Ent(rho_0) - Ent(rho_T)
  double psi_integral = 0.0;
  double psi_star_integral = 0.0;
  double action = 0.0;
  double residual = 0.0;  // |action - (-ent_drop + psi + psi*)/2|
  std::vector<EdeSlice> slices;

  double relative_residual() const;
  // (Ent(T) - Ent(0) + int Psi + int Psi*)/2; Fenchel-Young makes it >= 0
  // up to quadrature and representation error.
  double balance() const { return 0.5 * (-ent_drop + psi_integral + psi_star_integral); }
};

EdeRecord ede_decomposition(const OperatorSet& ops, CurveView curve,
                            double trace_tol = kDefaultTraceTol);

}  // namespace wentzell
