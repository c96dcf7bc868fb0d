#include "wentzell/otto.hpp"

#include <cmath>
#include <exception>
#include <string>
#include <utility>

#include "wentzell/kernels.hpp"

namespace wentzell {

namespace {

void require_positive(const std::vector<double>& dens, const char* who) {
  for (double x : dens)
    if (!(x > 0.0) || !std::isfinite(x))
      throw std::domain_error(std::string(who) + ": singular weight, density must be strictly positive");
}

double weighted_dot(const std::vector<double>& w, std::span<const double> x, std::span<const double> y) {
  double s = 0.0;
  for (std::size_t k = 0; k < w.size(); ++k) s += w[k] * x[k] * y[k];
  return s;
}

}  // namespace

std::vector<double> flatten(const TangentPerturbation& s) {
  std::vector<double> v(s.s_o);
  v.insert(v.end(), s.s_b.begin(), s.s_b.end());
  return v;
}

TangentPerturbation perturbation_from_flat(const DiskMesh& mesh, std::span<const double> v) {
  Rho r = unflatten(mesh, v);
  return {std::move(r.omega), std::move(r.gamma)};
}

TangentPerturbation difference(const TangentPerturbation& a, const TangentPerturbation& b) {
  TangentPerturbation d = a;
  for (std::size_t k = 0; k < d.s_o.size(); ++k) d.s_o[k] -= b.s_o[k];
  for (std::size_t k = 0; k < d.s_b.size(); ++k) d.s_b[k] -= b.s_b[k];
  return d;
}

double perturbation_mass(const DiskMesh& mesh, const TangentPerturbation& s) {
  const auto v = flatten(s);
  double m = 0.0;
  for (std::size_t k = 0; k < v.size(); ++k) m += mesh.weights()[k] * v[k];
  return m;
}

double entropy(const DiskMesh& mesh, const Rho& rho) {
  const auto f = mu_density(mesh, rho);
  double s = 0.0;
  for (std::size_t k = 0; k < f.size(); ++k) {
    const double h = f[k] > 0.0 ? f[k] * std::log(f[k]) - f[k] + 1.0 : 1.0;
    s += mesh.c() * mesh.weights()[k] * h;
  }
  return s;
}

LaplacianCsr weighted_stiffness(const OperatorSet& ops, const Rho& rho) {
  const auto d = flatten(rho);
  if (d.size() != ops.mesh().size()) throw std::invalid_argument("weighted_stiffness: size mismatch");
  for (double x : d)
    if (!(x >= 0.0) || !std::isfinite(x))
      throw std::domain_error("weighted_stiffness: density must be finite and nonnegative");
  return ops.stiffness().reweighted(
      [&](std::size_t i, std::size_t j, double k) { return k * 0.5 * (d[i] + d[j]); });
}

double potential_norm(const OperatorSet& ops, const Rho& rho, std::span<const double> xi) {
  const auto Lr = weighted_stiffness(ops, rho);
  std::vector<double> y(xi.size());
  kernels::laplacian_apply(Lr, xi, y);
  return kernels::dot(xi, y);
}

namespace {

// Returns phi and the right-hand side W s after removing rounding mass.
std::pair<Potential, std::vector<double>> solve_potential(const OperatorSet& ops, const Rho& rho,
                                                          const TangentPerturbation& s, double cg_tol) {
  const auto& mesh = ops.mesh();
  const auto d = flatten(rho);
  require_positive(d, "identify_potential");
  auto b = flatten(s);
  if (b.size() != mesh.size()) throw std::invalid_argument("identify_potential: size mismatch");
  double mass = 0.0, scale = 0.0;
  for (std::size_t k = 0; k < b.size(); ++k) {
    b[k] *= mesh.weights()[k];
    mass += b[k];
    scale += std::abs(b[k]);
  }
  // absolute floor: finite-difference velocities carry ~1e-14/dt of rounding mass
  if (std::abs(mass) > 1e-6 * scale + 1e-8)
    throw std::invalid_argument("identify_potential: perturbation must have zero total mass (relative " + std::to_string(mass / scale) + ")");
  for (double& x : b) x -= mass / static_cast<double>(b.size());

  const auto Lr = weighted_stiffness(ops, rho);
  const auto jac = Lr.degree();
  LinearOperator A = [&](std::span<const double> x, std::span<double> y) { kernels::laplacian_apply(Lr, x, y); };
  CgOptions opt;
  opt.rel_tol = cg_tol;
  opt.nullspace_weights = ops.mu_weights();
  Potential p{std::vector<double>(b.size(), 0.0)};
  conjugate_gradient(A, jac, b, p.phi, opt);
  return {std::move(p), std::move(b)};
}

}  // namespace

Potential identify_potential(const OperatorSet& ops, const Rho& rho, const TangentPerturbation& s,
                             double cg_tol) {
  return solve_potential(ops, rho, s, cg_tol).first;
}

double perturbation_norm(const OperatorSet& ops, const Rho& rho, const TangentPerturbation& s) {
  const auto [phi, b] = solve_potential(ops, rho, s, 1e-13);
  const double dual = kernels::dot(b, phi.phi);
  const double primal = potential_norm(ops, rho, phi.phi);
  if (std::abs(dual - primal) > 1e-8 * std::max(std::abs(dual), std::abs(primal)) + 1e-300)
    throw SolverError("perturbation_norm: duality check failed", std::abs(dual - primal), 0);
  return dual;
}

TangentPerturbation fokker_planck_rhs(const OperatorSet& ops, const Rho& rho) {
  const auto d = flatten(rho);
  std::vector<double> y(d.size());
  kernels::laplacian_apply(ops.stiffness(), d, y);
  for (std::size_t k = 0; k < y.size(); ++k) y[k] = -y[k] / ops.weights()[k];
  return perturbation_from_flat(ops.mesh(), y);
}

EntropyGradient entropy_gradient(const OperatorSet& ops, const Rho& rho, double trace_tol) {
  const auto& mesh = ops.mesh();
  const double tm = trace_mismatch(mesh, rho);
  if (tm > trace_tol)
    throw TraceMismatchError("grad_entropy: gradient undefined, trace mismatch " + std::to_string(tm) +
                                 " exceeds " + std::to_string(trace_tol),
                             tm);
  EntropyGradient g;
  const auto rhs = fokker_planck_rhs(ops, rho);
  g.s = rhs;
  for (double& x : g.s.s_o) x = -x;
  for (double& x : g.s.s_b) x = -x;
  g.phi = identify_potential(ops, rho, g.s);
  g.squared_norm = potential_norm(ops, rho, g.phi.phi);

  auto logf = mu_density(mesh, rho);
  for (double& x : logf) x = std::log(x);
  const double mean = weighted_dot(ops.mu_weights(), logf, std::vector<double>(logf.size(), 1.0));
  for (double& x : logf) x -= mean;
  const double gn = potential_norm(ops, rho, logf);
  if (gn > 0.0) {
    std::vector<double> diff(logf.size());
    for (std::size_t k = 0; k < diff.size(); ++k) diff[k] = g.phi.phi[k] - logf[k];
    g.representation_defect = std::sqrt(potential_norm(ops, rho, diff) / gn);
  }
  return g;
}

TangentPerturbation grad_entropy(const OperatorSet& ops, const Rho& rho, double trace_tol,
                                 double representation_tol) {
  auto g = entropy_gradient(ops, rho, trace_tol);
  if (g.representation_defect > representation_tol)
    throw std::runtime_error("grad_entropy: potential deviates from log-density by " +
                             std::to_string(g.representation_defect));
  return std::move(g.s);
}

double hamiltonian(const OperatorSet& ops, const Rho& rho, std::span<const double> xi) {
  const auto d = flatten(rho);
  std::vector<double> y(d.size());
  kernels::laplacian_apply(ops.stiffness(), xi, y);
  return -kernels::dot(d, y) + potential_norm(ops, rho, xi);
}

double exponential_hamiltonian(const OperatorSet& ops, const Rho& rho, std::span<const double> xi) {
  const auto d = flatten(rho);
  const auto& L = ops.stiffness();
  double h = 0.0;
  for (std::size_t i = 0; i < L.size(); ++i)
    for (std::size_t k = L.row_ptr()[i]; k < L.row_ptr()[i + 1]; ++k) {
      const std::size_t j = L.cols()[k];
      // each undirected edge is visited from both ends
      h += L.values()[k] * d[i] * std::expm1(xi[j] - xi[i]);
    }
  return h;
}

double lagrangian(const OperatorSet& ops, const Rho& rho, const TangentPerturbation& s, double trace_tol) {
  if (trace_mismatch(ops.mesh(), rho) > trace_tol) return kInfinity;
  return 0.25 * perturbation_norm(ops, rho, difference(s, fokker_planck_rhs(ops, rho)));
}

TangentPerturbation curve_velocity(const DiskMesh& mesh, CurveView curve, std::size_t k) {
  const std::size_t n = curve.states.size();
  if (n < 2) throw std::invalid_argument("curve needs at least two states");
  const std::size_t lo = k == 0 ? 0 : k - 1;
  const std::size_t hi = k + 1 < n ? k + 1 : n - 1;
  const double dt = curve.times[hi] - curve.times[lo];
  if (!(dt > 0.0)) throw std::invalid_argument("curve times must increase");
  const auto a = flatten(curve.states[hi]);
  const auto b = flatten(curve.states[lo]);
  std::vector<double> v(a.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = (a[i] - b[i]) / dt;
  return perturbation_from_flat(mesh, v);
}

namespace {

template <class F>
void for_each_slice(std::size_t n, F&& body) {
  std::exception_ptr err;
#pragma omp parallel for schedule(dynamic)
  for (std::size_t k = 0; k < n; ++k) {
    try {
      body(k);
    } catch (...) {
#pragma omp critical
      if (!err) err = std::current_exception();
    }
  }
  if (err) std::rethrow_exception(err);
}

double trapezoid(std::span<const double> t, const std::vector<double>& y) {
  double s = 0.0;
  for (std::size_t k = 0; k + 1 < y.size(); ++k) s += 0.5 * (y[k] + y[k + 1]) * (t[k + 1] - t[k]);
  return s;
}

}  // namespace

double action(const OperatorSet& ops, CurveView curve, double trace_tol) {
  const std::size_t n = curve.states.size();
  if (n < 2 || curve.times.size() != n) throw std::invalid_argument("action: curve needs >= 2 states");
  for (const auto& r : curve.states)
    if (trace_mismatch(ops.mesh(), r) > trace_tol) return kInfinity;
  std::vector<double> L(n);
  for_each_slice(n, [&](std::size_t k) {
    L[k] = lagrangian(ops, curve.states[k], curve_velocity(ops.mesh(), curve, k), trace_tol);
  });
  return trapezoid(curve.times, L);
}

double EdeRecord::relative_residual() const {
  return ent_drop != 0.0 ? residual / std::abs(ent_drop) : residual;
}

EdeRecord ede_decomposition(const OperatorSet& ops, CurveView curve, double trace_tol) {
  const std::size_t n = curve.states.size();
  if (n < 2 || curve.times.size() != n) throw std::invalid_argument("ede: curve needs >= 2 states");
  const auto& mesh = ops.mesh();
  EdeRecord rec;
  rec.slices.resize(n);
  for_each_slice(n, [&](std::size_t k) {
    const Rho& r = curve.states[k];
    const auto v = curve_velocity(mesh, curve, k);
    const auto g = entropy_gradient(ops, r, trace_tol);
    const double L = 0.25 * perturbation_norm(ops, r, difference(v, fokker_planck_rhs(ops, r)));
    rec.slices[k] = {curve.times[k], entropy(mesh, r), 0.5 * perturbation_norm(ops, r, v),
                     0.5 * g.squared_norm, L};
  });
  std::vector<double> psi(n), psis(n), lag(n);
  for (std::size_t k = 0; k < n; ++k) {
    psi[k] = rec.slices[k].psi;
    psis[k] = rec.slices[k].psi_star;
    lag[k] = rec.slices[k].lagrangian;
  }
  rec.ent_drop = rec.slices.front().entropy - rec.slices.back().entropy;
  rec.psi_integral = trapezoid(curve.times, psi);
  rec.psi_star_integral = trapezoid(curve.times, psis);
  rec.action = trapezoid(curve.times, lag);
  rec.residual = std::abs(rec.action - rec.balance());
  return rec;
}

}  // namespace wentzell
