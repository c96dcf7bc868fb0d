#include "wentzell/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "wentzell/kernels.hpp"
#include "wentzell/otto.hpp"

namespace wentzell {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double sum(std::span<const double> v) { return std::accumulate(v.begin(), v.end(), 0.0); }

void check_measure(std::span<const double> m, const char* who) {
  for (double x : m)
    if (!(x >= 0.0) || !std::isfinite(x)) throw std::invalid_argument(std::string(who) + ": weights must be nonnegative");
}

std::vector<std::size_t> support(std::span<const double> m) {
  std::vector<std::size_t> s;
  for (std::size_t k = 0; k < m.size(); ++k)
    if (m[k] > 0.0) s.push_back(k);
  return s;
}

struct Lse {
  bool serial;
  void rows(std::size_t r, std::size_t c, std::span<const double> C, double eps, std::span<const double> g,
            std::span<double> out) const {
    serial ? kernels::lse_rows_serial(r, c, C, eps, g, out) : kernels::lse_rows(r, c, C, eps, g, out);
  }
  void cols(std::size_t r, std::size_t c, std::span<const double> C, double eps, std::span<const double> f,
            std::span<double> out) const {
    serial ? kernels::lse_cols_serial(r, c, C, eps, f, out) : kernels::lse_cols(r, c, C, eps, f, out);
  }
};

// Geometric schedule from `start` down to `target` (inclusive), halving.
std::vector<double> schedule(double start, double target) {
  std::vector<double> e;
  for (double x = std::max(start, target); x > target; x *= 0.5) e.push_back(x);
  e.push_back(target);
  return e;
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  return *mid;
}

// min <C,pi> + eps sum pi (log pi - 1) over plans with both marginals p,
// by averaged symmetric Sinkhorn updates (these contract quickly even when
// the plan is close to the identity).
double entropic_self_value(std::span<const double> p_full, std::span<const double> Cfull, double eps, double tol,
                           std::size_t max_iter, const Lse& lse, double eps_start) {
  const std::size_t N = p_full.size();
  const auto I = support(p_full);
  const std::size_t r = I.size();
  std::vector<double> C(r * r), lp(r), f(r, 0.0), tmp(r), scaled(r);
  for (std::size_t i = 0; i < r; ++i) {
    lp[i] = std::log(p_full[I[i]]);
    for (std::size_t j = 0; j < r; ++j) C[i * r + j] = Cfull[I[i] * N + I[j]];
  }
  const double mass = sum(p_full);
  std::size_t iters = 0;
  const auto eps_list = schedule(std::max(eps_start, eps), eps);
  for (std::size_t stage = 0; stage < eps_list.size(); ++stage) {
    const double e = eps_list[stage];
    const double stage_tol = stage + 1 == eps_list.size() ? tol : std::max(tol, 1e-4);
    for (;;) {
      for (std::size_t i = 0; i < r; ++i) scaled[i] = f[i] / e;
      lse.rows(r, r, C, e, scaled, tmp);
      double v = 0.0;
      for (std::size_t i = 0; i < r; ++i) {
        v += std::abs(std::exp(f[i] / e + tmp[i]) - p_full[I[i]]);
        f[i] = 0.5 * (f[i] + e * (lp[i] - tmp[i]));
      }
      ++iters;
      if (0.5 * v / mass <= stage_tol) break;
      if (iters >= max_iter)
        throw TransportError("self transport: no convergence, marginal violation " + std::to_string(0.5 * v / mass),
                             0.5 * v / mass);
    }
  }
  double value = 0.0;
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < r; ++j) {
      const double lpi = (f[i] + f[j] - C[i * r + j]) / eps;
      const double pi = std::exp(lpi);
      value += pi * (C[i * r + j] + eps * (lpi - 1.0));
    }
  return value;
}

}  // namespace

double median_cost(const CostMatrix& C) {
  std::vector<double> off;
  const std::size_t n = C.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j) off.push_back(C(i, j));
  return median(std::move(off));
}

SinkhornResult sinkhorn(std::span<const double> mu0, std::span<const double> mu1, std::span<const double> Cfull,
                        double epsilon, const SinkhornOptions& opt) {
  check_measure(mu0, "sinkhorn");
  check_measure(mu1, "sinkhorn");
  if (!(epsilon > 0.0)) throw std::invalid_argument("sinkhorn: epsilon must be positive");
  if (Cfull.size() != mu0.size() * mu1.size()) throw std::invalid_argument("sinkhorn: cost size mismatch");
  const double m0 = sum(mu0), m1 = sum(mu1);
  if (!(m0 > 0.0) || std::abs(m0 - m1) > 1e-9 * m0) throw std::invalid_argument("sinkhorn: total masses differ");

  const auto I = support(mu0), J = support(mu1);
  const std::size_t r = I.size(), c = J.size();
  std::vector<double> C(r * c), la(r), lb(c);
  for (std::size_t i = 0; i < r; ++i) {
    la[i] = std::log(mu0[I[i]]);
    for (std::size_t j = 0; j < c; ++j) C[i * c + j] = Cfull[I[i] * mu1.size() + J[j]];
  }
  for (std::size_t j = 0; j < c; ++j) lb[j] = std::log(mu1[J[j]]);

  const Lse lse{opt.serial_kernels};
  std::vector<double> f(r, 0.0), g(c, 0.0), tmp_r(r), tmp_c(c), scaled(std::max(r, c));
  SinkhornResult res;
  auto violation = [&](double eps) {
    // column marginal is exact right after the g update
    for (std::size_t j = 0; j < c; ++j) scaled[j] = g[j] / eps;
    lse.rows(r, c, C, eps, std::span(scaled).first(c), tmp_r);
    double v = 0.0;
    for (std::size_t i = 0; i < r; ++i) v += std::abs(std::exp(f[i] / eps + tmp_r[i]) - mu0[I[i]]);
    return 0.5 * v / m0;
  };

  const double start = std::max(epsilon, *std::max_element(C.begin(), C.end()));
  const auto eps_list = schedule(start, epsilon);
  for (std::size_t stage = 0; stage < eps_list.size(); ++stage) {
    const double eps = eps_list[stage];
    const bool last = stage + 1 == eps_list.size();
    const double stage_tol = last ? opt.tol : std::max(opt.tol, 1e-3);
    for (std::size_t it = 0;; ++it) {
      for (std::size_t j = 0; j < c; ++j) scaled[j] = g[j] / eps;
      lse.rows(r, c, C, eps, std::span(scaled).first(c), tmp_r);
      for (std::size_t i = 0; i < r; ++i) f[i] = eps * (la[i] - tmp_r[i]);
      for (std::size_t i = 0; i < r; ++i) scaled[i] = f[i] / eps;
      lse.cols(r, c, C, eps, std::span(scaled).first(r), tmp_c);
      for (std::size_t j = 0; j < c; ++j) g[j] = eps * (lb[j] - tmp_c[j]);
      ++res.iterations;
      if (it % 10 == 9 || res.iterations >= opt.max_iter) {
        const double v = violation(eps);
        res.marginal_violation = v;
        if (v <= stage_tol) break;
        if (res.iterations >= opt.max_iter)
          throw TransportError("sinkhorn: no convergence, marginal violation " + std::to_string(v), v);
      }
    }
  }

  res.rows = mu0.size();
  res.cols = mu1.size();
  res.plan.assign(res.rows * res.cols, 0.0);
  const double eps = epsilon;
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) {
      const double p = std::exp((f[i] + g[j] - C[i * c + j]) / eps);
      res.plan[I[i] * res.cols + J[j]] = p;
      res.cost += p * C[i * c + j];
    }
  return res;
}

SinkhornResult sinkhorn(std::span<const double> mu0, std::span<const double> mu1, const CostMatrix& C,
                        double epsilon, const SinkhornOptions& opt) {
  if (mu0.size() != C.size() || mu1.size() != C.size())
    throw std::invalid_argument("sinkhorn: marginals do not match the cost matrix");
  return sinkhorn(mu0, mu1, C.C, epsilon, opt);
}

double exact_ot_small(std::span<const double> mu0, std::span<const double> mu1, std::span<const double> C) {
  if (mu0.size() > 64 || mu1.size() > 64) throw std::length_error("exact_ot_small: size cap of 64 exceeded");
  return exact_ot(mu0, mu1, C);
}

double exact_ot(std::span<const double> mu0, std::span<const double> mu1, std::span<const double> C) {
  const std::size_t n0 = mu0.size(), n1 = mu1.size();
  check_measure(mu0, "exact_ot_small");
  check_measure(mu1, "exact_ot_small");
  if (C.size() != n0 * n1) throw std::invalid_argument("exact_ot_small: cost size mismatch");
  const double total = sum(mu0);
  if (std::abs(total - sum(mu1)) > 1e-9 * std::max(total, 1e-300))
    throw std::invalid_argument("exact_ot_small: total masses differ");
  if (total == 0.0) return 0.0;
  const double tiny = 1e-14 * total;

  // Nodes: sources 0..n0-1, sinks n0..n0+n1-1. Residual arcs: source->sink
  // always open, sink->source while it carries flow.
  const std::size_t V = n0 + n1;
  std::vector<double> supply(mu0.begin(), mu0.end()), demand(mu1.begin(), mu1.end());
  std::vector<double> flow(n0 * n1, 0.0), pot(V, 0.0), d(V);
  std::vector<std::size_t> prev(V);
  std::vector<char> done(V);
  constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

  for (std::size_t guard = 0; guard < 100000; ++guard) {
    std::fill(d.begin(), d.end(), kInf);
    std::fill(prev.begin(), prev.end(), kNone);
    std::fill(done.begin(), done.end(), 0);
    for (std::size_t i = 0; i < n0; ++i)
      if (supply[i] > tiny) d[i] = 0.0;
    // dense Dijkstra on reduced costs
    for (;;) {
      std::size_t u = kNone;
      for (std::size_t v = 0; v < V; ++v)
        if (!done[v] && d[v] < kInf && (u == kNone || d[v] < d[u])) u = v;
      if (u == kNone) break;
      done[u] = 1;
      if (u < n0) {
        for (std::size_t j = 0; j < n1; ++j) {
          const double rc = std::max(0.0, C[u * n1 + j] + pot[u] - pot[n0 + j]);
          if (d[u] + rc < d[n0 + j]) {
            d[n0 + j] = d[u] + rc;
            prev[n0 + j] = u;
          }
        }
      } else {
        const std::size_t j = u - n0;
        for (std::size_t i = 0; i < n0; ++i) {
          if (flow[i * n1 + j] <= tiny) continue;
          const double rc = std::max(0.0, -C[i * n1 + j] + pot[u] - pot[i]);
          if (d[u] + rc < d[i]) {
            d[i] = d[u] + rc;
            prev[i] = u;
          }
        }
      }
    }
    std::size_t sink = kNone;
    for (std::size_t j = 0; j < n1; ++j)
      if (demand[j] > tiny && d[n0 + j] < kInf && (sink == kNone || d[n0 + j] < d[sink])) sink = n0 + j;
    if (sink == kNone) break;
    for (std::size_t v = 0; v < V; ++v) pot[v] += std::min(d[v], d[sink]);

    double push = demand[sink - n0];
    std::size_t v = sink;
    while (prev[v] != kNone) {
      const std::size_t u = prev[v];
      if (u >= n0) push = std::min(push, flow[v * n1 + (u - n0)]);  // reverse arc sink u -> source v
      v = u;
    }
    push = std::min(push, supply[v]);
    supply[v] -= push;
    demand[sink - n0] -= push;
    for (v = sink; prev[v] != kNone; v = prev[v]) {
      const std::size_t u = prev[v];
      if (u < n0)
        flow[u * n1 + (v - n0)] += push;
      else
        flow[v * n1 + (u - n0)] -= push;
    }
  }
  double cost = 0.0;
  for (std::size_t k = 0; k < flow.size(); ++k) cost += std::max(0.0, flow[k]) * C[k];
  return cost;
}

// ---------------------------------------------------------------------------

JkoStepResult jko_step_detailed(const Rho& rho_prev, const JkoConfig& cfg, const DiskMesh& mesh) {
  if (!cfg.cost) throw std::invalid_argument("jko_step: cost matrix missing");
  if (!(cfg.h > 0.0) || !(cfg.tol > 0.0) || cfg.epsilon < 0.0) throw std::invalid_argument("jko_step: need h, tol > 0");
  validate_probability(mesh, rho_prev, 1e-6);
  const CostMatrix& CM = *cfg.cost;
  const std::size_t N = mesh.size();
  if (CM.size() != N) throw std::invalid_argument("jko_step: cost matrix must cover all mesh nodes");

  const auto p_full = node_masses(mesh, rho_prev);
  const auto I = support(p_full);
  const std::size_t r = I.size(), c = N;
  std::vector<double> C(r * c), lp(r), lm(c);
  for (std::size_t i = 0; i < r; ++i) {
    lp[i] = std::log(p_full[I[i]]);
    for (std::size_t j = 0; j < c; ++j) C[i * c + j] = CM(I[i], j);
  }
  for (std::size_t j = 0; j < c; ++j) lm[j] = std::log(mesh.c() * mesh.weights()[j]);

  const double med = median_cost(CM);
  const double eps_final = cfg.epsilon > 0.0 ? cfg.epsilon : 1e-3 * med;
  const Lse lse{cfg.serial_kernels};
  std::vector<double> f(r, 0.0), g(c, 0.0), tmp_r(r), tmp_c(c), scaled(std::max(r, c));
  JkoStepResult out;

  auto row_violation = [&](double eps) {
    for (std::size_t j = 0; j < c; ++j) scaled[j] = g[j] / eps;
    lse.rows(r, c, C, eps, std::span(scaled).first(c), tmp_r);
    double v = 0.0;
    for (std::size_t i = 0; i < r; ++i) v += std::abs(std::exp(f[i] / eps + tmp_r[i]) - p_full[I[i]]);
    return 0.5 * v;
  };

  const auto eps_list = schedule(std::max(med, eps_final), eps_final);
  for (std::size_t stage = 0; stage < eps_list.size(); ++stage) {
    const double eps = eps_list[stage];
    const double damp = 1.0 / (1.0 + eps / (2.0 * cfg.h));
    const bool last = stage + 1 == eps_list.size();
    const double stage_tol = last ? cfg.tol : std::max(cfg.tol, 1e-4);
    double prev_v = kInf;
    for (std::size_t it = 0;; ++it) {
      for (std::size_t j = 0; j < c; ++j) scaled[j] = g[j] / eps;
      lse.rows(r, c, C, eps, std::span(scaled).first(c), tmp_r);
      for (std::size_t i = 0; i < r; ++i) f[i] = eps * (lp[i] - tmp_r[i]);
      for (std::size_t i = 0; i < r; ++i) scaled[i] = f[i] / eps;
      lse.cols(r, c, C, eps, std::span(scaled).first(r), tmp_c);
      // closed-form proximal step of the entropy on the second marginal
      for (std::size_t j = 0; j < c; ++j) g[j] = eps * damp * (lm[j] - tmp_c[j]);
      ++out.iterations;
      if (it % 10 == 9 || out.iterations >= cfg.max_iter) {
        const double v = row_violation(eps);
        out.marginal_violation = v;
        if (v <= stage_tol) break;
        if (out.iterations >= cfg.max_iter)
          throw TransportError("jko_step: scaling iterations did not converge, marginal violation " +
                                   std::to_string(v) + " (previous check " + std::to_string(prev_v) + ")",
                               v);
        prev_v = v;
      }
    }
  }

  const double eps = eps_final;
  std::vector<double> q(N, 0.0);
  double value = 0.0;
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) {
      const double lpi = (f[i] + g[j] - C[i * c + j]) / eps;
      const double pi = std::exp(lpi);
      q[j] += pi;
      value += pi * (C[i * c + j] + eps * (lpi - 1.0));
    }
  const double scale = sum(p_full) / sum(q);
  for (double& x : q) x *= scale;

  // Staying put costs the entropic self-transport value; measuring against
  // it makes the reported objective the one the scaling iterations minimise.
  const double self = entropic_self_value(p_full, CM.C, eps, std::max(cfg.tol, 1e-12), cfg.max_iter, lse, med);
  out.rho = rho_from_masses(mesh, q);
  out.entropy = entropy(mesh, out.rho);
  out.transport_cost = value - self;
  out.exact_w2 = exact_ot(p_full, q, CM.C);
  out.objective = out.transport_cost / (2.0 * cfg.h) + out.entropy;
  const double before = entropy(mesh, rho_prev);
  const double descent_tol = 1e-6 * std::max(1.0, before);
  if (out.objective > before + descent_tol)
    throw TransportError("jko_step: objective " + std::to_string(out.objective) + " exceeds staying put " +
                             std::to_string(before),
                         out.objective - before);
  return out;
}

Rho jko_step(const Rho& rho_prev, const JkoConfig& cfg, const DiskMesh& mesh) {
  return jko_step_detailed(rho_prev, cfg, mesh).rho;
}

JkoTrajectory jko_flow(const Rho& rho0, const JkoConfig& cfg, double T, const DiskMesh& mesh) {
  if (!(cfg.h > 0.0) || T < cfg.h * (1.0 - 1e-12)) throw std::invalid_argument("jko_flow: need T >= h > 0");
  const auto n = static_cast<std::size_t>(std::ceil(T / cfg.h * (1.0 - 1e-12)));
  JkoTrajectory tr;
  tr.h = cfg.h;
  tr.times.push_back(0.0);
  tr.states.push_back(rho0);
  tr.entropy.push_back(entropy(mesh, rho0));
  tr.transport_cost.push_back(0.0);
  tr.objective.push_back(tr.entropy.back());
  for (std::size_t k = 1; k <= n; ++k) {
    auto s = jko_step_detailed(tr.states.back(), cfg, mesh);
    tr.times.push_back(static_cast<double>(k) * cfg.h);
    tr.states.push_back(std::move(s.rho));
    tr.entropy.push_back(s.entropy);
    tr.transport_cost.push_back(s.transport_cost);
    tr.objective.push_back(s.objective);
  }
  return tr;
}

}  // namespace wentzell
