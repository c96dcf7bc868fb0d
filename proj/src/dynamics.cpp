#include "wentzell/dynamics.hpp"

#include <cmath>
#include <stdexcept>

#include "wentzell/kernels.hpp"

namespace wentzell {

HeatStepper::HeatStepper(const OperatorSet& ops, double dt, HeatOptions opt)
    : ops_(ops), dt_(dt), opt_(opt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("heat step: dt must be positive");
  const auto deg = ops.stiffness().degree();
  diag_.resize(deg.size());
  for (std::size_t k = 0; k < deg.size(); ++k) diag_[k] = ops.weights()[k] + dt * deg[k];
  if (opt_.solver == LinearSolver::PositiveElimination)
    band_ = std::make_unique<PositiveBandSolver>(ops.stiffness(), ops.weights(), dt);
}

void HeatStepper::step(std::vector<double>& f) const {
  const auto& W = ops_.weights();
  std::vector<double> b(f.size());
  for (std::size_t k = 0; k < f.size(); ++k) b[k] = W[k] * f[k];
  if (band_) {
    band_->solve(b, f);
    return;
  }
  const LaplacianCsr& L = ops_.stiffness();
  const double s = dt_;
  const bool serial = opt_.serial_kernels;
  LinearOperator A = [&](std::span<const double> x, std::span<double> y) {
    if (serial)
      kernels::shifted_apply_serial(L, W, s, x, y);
    else
      kernels::shifted_apply(L, W, s, x, y);
  };
  CgOptions cg;
  cg.rel_tol = opt_.cg_tol;
  cg.max_iter = opt_.cg_max_iter;
  conjugate_gradient(A, diag_, b, f, cg);
  // 1^T L = 0, so mass only moves through the CG residual; shift it back.
  double target = 0.0, got = 0.0, wsum = 0.0;
  for (std::size_t k = 0; k < f.size(); ++k) {
    target += b[k];
    got += W[k] * f[k];
    wsum += W[k];
  }
  const double shift = (target - got) / wsum;
  for (double& x : f) x += shift;
}

Rho heat_step(const OperatorSet& ops, const Rho& rho, double dt, const HeatOptions& opt) {
  validate_probability(ops.mesh(), rho, 1e-6);
  auto f = mu_density(ops.mesh(), rho);
  HeatStepper(ops, dt, opt).step(f);
  return rho_from_mu_density(ops.mesh(), f);
}

std::size_t heat_step_count(double T, double dt) {
  if (!(dt > 0.0) || !(T >= 0.0)) throw std::invalid_argument("heat: need dt > 0 and T >= 0");
  // guard against T/dt landing a hair above an integer
  return static_cast<std::size_t>(std::ceil(T / dt * (1.0 - 1e-12)));
}

HeatTrajectory solve_heat(const OperatorSet& ops, const Rho& rho0, double T, double dt,
                          const HeatOptions& opt) {
  validate_probability(ops.mesh(), rho0, 1e-6);
  const std::size_t n = heat_step_count(T, dt);
  HeatTrajectory tr;
  tr.a = ops.a();
  tr.times.reserve(n + 1);
  tr.states.reserve(n + 1);
  tr.times.push_back(0.0);
  tr.states.push_back(rho0);
  if (n == 0) return tr;

  auto f = mu_density(ops.mesh(), rho0);
  const double last = T - static_cast<double>(n - 1) * dt;
  HeatStepper full(ops, dt, opt);
  for (std::size_t k = 1; k <= n; ++k) {
    if (k == n && std::abs(last - dt) > 1e-12 * dt) {
      HeatStepper(ops, last, opt).step(f);
      tr.times.push_back(T);
    } else {
      full.step(f);
      tr.times.push_back(k == n ? T : static_cast<double>(k) * dt);
    }
    tr.states.push_back(rho_from_mu_density(ops.mesh(), f));
  }
  return tr;
}

double transition_mass(const OperatorSet& ops, std::span<const std::size_t> A,
                       std::span<const std::size_t> B, double t, double dt) {
  const auto& mesh = ops.mesh();
  std::vector<double> f(mesh.size(), 0.0);
  for (auto k : B) {
    if (k >= mesh.size()) throw std::out_of_range("transition_mass: node out of range");
    f[k] = 1.0;
  }
  const std::size_t n = heat_step_count(t, dt);
  if (n > 0) {
    HeatOptions opt;
    opt.solver = LinearSolver::PositiveElimination;
    const double last = t - static_cast<double>(n - 1) * dt;
    HeatStepper full(ops, dt, opt);
    for (std::size_t k = 1; k < n; ++k) full.step(f);
    HeatStepper(ops, last, opt).step(f);
  }
  double s = 0.0;
  for (auto k : A) s += ops.mu_weights()[k] * f[k];
  return s;
}

}  // namespace wentzell
