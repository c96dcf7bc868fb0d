#pragma once

#include <memory>
#include <span>
#include <vector>

#include "wentzell/mesh.hpp"
#include "wentzell/rho.hpp"
#include "wentzell/sparse.hpp"

namespace wentzell {

enum class LinearSolver {
  ConjugateGradient,
  // Cancellation-free banded elimination; use when tiny densities matter.
  PositiveElimination,
};

struct HeatOptions {
  LinearSolver solver = LinearSolver::ConjugateGradient;
  double cg_tol = 1e-12;
  std::size_t cg_max_iter = 20000;
  bool serial_kernels = false;
};

// Implicit Euler for d/dt f = Q f, i.e. (W + dt L) f' = W f, with fixed dt.
class HeatStepper {
 public:
  HeatStepper(const OperatorSet& ops, double dt, HeatOptions opt = {});
  // Advances a mu-density in place.
  void step(std::vector<double>& f) const;
  double dt() const { return dt_; }

 private:
  const OperatorSet& ops_;
  double dt_;
  HeatOptions opt_;
  std::vector<double> diag_;
  std::unique_ptr<PositiveBandSolver> band_;
};

Rho heat_step(const OperatorSet& ops, const Rho& rho, double dt, const HeatOptions& opt = {});

struct HeatTrajectory {
  double a = 1.0;
  std::vector<double> times;
  std::vector<Rho> states;
};

// ceil(T/dt) steps; the last one is shortened so that times.back() == T.
HeatTrajectory solve_heat(const OperatorSet& ops, const Rho& rho0, double T, double dt,
                          const HeatOptions& opt = {});

// <1_A, P_t 1_B>_mu via the implicit scheme with step dt (node index sets).
// Uses the positive elimination solver so that tiny values stay accurate.
double transition_mass(const OperatorSet& ops, std::span<const std::size_t> A,
                       std::span<const std::size_t> B, double t, double dt);

// Number of steps used by solve_heat.
std::size_t heat_step_count(double T, double dt);

}  // namespace wentzell
