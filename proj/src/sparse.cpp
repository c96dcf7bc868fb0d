#include "wentzell/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

#include "wentzell/kernels.hpp"

namespace wentzell {

LaplacianCsr::LaplacianCsr(std::size_t n, const std::vector<Triplet>& edges) : n_(n) {
  std::vector<Triplet> all;
  all.reserve(2 * edges.size());
  for (const auto& e : edges) {
    if (e.i >= n || e.j >= n) throw std::out_of_range("LaplacianCsr: node index out of range");
    if (e.i == e.j) throw std::invalid_argument("LaplacianCsr: self loop");
    if (!(e.v >= 0.0)) throw std::invalid_argument("LaplacianCsr: negative conductance");
    all.push_back({e.i, e.j, e.v});
    all.push_back({e.j, e.i, e.v});
  }
  std::sort(all.begin(), all.end(),
            [](const Triplet& a, const Triplet& b) { return std::tie(a.i, a.j) < std::tie(b.i, b.j); });
  row_ptr_.assign(n + 1, 0);
  for (std::size_t k = 0; k < all.size(); ++k) {
    if (k > 0 && all[k].i == all[k - 1].i && all[k].j == all[k - 1].j) {
      val_.back() += all[k].v;
      continue;
    }
    col_.push_back(all[k].j);
    val_.push_back(all[k].v);
    ++row_ptr_[all[k].i + 1];
  }
  for (std::size_t i = 0; i < n; ++i) row_ptr_[i + 1] += row_ptr_[i];
}

double LaplacianCsr::weight(std::size_t i, std::size_t j) const {
  auto b = col_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[i]);
  auto e = col_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[i + 1]);
  auto it = std::lower_bound(b, e, j);
  if (it == e || *it != j) return 0.0;
  return val_[static_cast<std::size_t>(it - col_.begin())];
}

std::vector<double> LaplacianCsr::degree() const {
  std::vector<double> d(n_, 0.0);
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) d[i] += val_[k];
  return d;
}

std::size_t LaplacianCsr::bandwidth() const {
  std::size_t bw = 0;
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k)
      bw = std::max(bw, col_[k] > i ? col_[k] - i : i - col_[k]);
  return bw;
}

LaplacianCsr LaplacianCsr::reweighted(
    const std::function<double(std::size_t, std::size_t, double)>& s) const {
  LaplacianCsr out = *this;
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
      // Evaluate with ordered endpoints so both halves of an edge agree bitwise.
      const std::size_t j = col_[k];
      out.val_[k] = i < j ? s(i, j, val_[k]) : s(j, i, val_[k]);
    }
  return out;
}

CgResult conjugate_gradient(const LinearOperator& A, std::span<const double> jacobi,
                            std::span<const double> b, std::span<double> x, const CgOptions& opt) {
  const std::size_t n = b.size();
  const bool singular = !opt.nullspace_weights.empty();
  auto project_sum = [&](std::span<double> v) {
    double m = 0.0;
    for (double t : v) m += t;
    m /= static_cast<double>(n);
    for (double& t : v) t -= m;
  };

  std::vector<double> r(n), z(n), p(n), Ap(n);
  A(x, Ap);
  for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - Ap[i];
  if (singular) project_sum(r);

  const double bnorm = std::sqrt(kernels::dot(b, b));
  CgResult res;
  if (bnorm == 0.0) {
    std::fill(x.begin(), x.end(), 0.0);
    return res;
  }
  double rnorm = std::sqrt(kernels::dot(r, r));
  for (std::size_t i = 0; i < n; ++i) z[i] = r[i] / jacobi[i];
  p = z;
  double rz = kernels::dot(r, z);

  while (rnorm > opt.rel_tol * bnorm) {
    if (res.iterations >= opt.max_iter)
      throw SolverError("conjugate_gradient: no convergence, relative residual " +
                            std::to_string(rnorm / bnorm),
                        rnorm / bnorm, res.iterations);
    A(p, Ap);
    const double pAp = kernels::dot(p, Ap);
    if (!(pAp > 0.0))
      throw SolverError("conjugate_gradient: operator not positive on search direction",
                        rnorm / bnorm, res.iterations);
    const double alpha = rz / pAp;
    for (std::size_t i = 0; i < n; ++i) {
      x[i] += alpha * p[i];
      r[i] -= alpha * Ap[i];
    }
    if (singular) project_sum(r);
    for (std::size_t i = 0; i < n; ++i) z[i] = r[i] / jacobi[i];
    const double rz_new = kernels::dot(r, z);
    const double beta = rz_new / rz;
    rz = rz_new;
    for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    rnorm = std::sqrt(kernels::dot(r, r));
    ++res.iterations;
  }
  if (singular) {
    double wx = 0.0, ws = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      wx += opt.nullspace_weights[i] * x[i];
      ws += opt.nullspace_weights[i];
    }
    for (double& t : x) t -= wx / ws;
  }
  res.relative_residual = rnorm / bnorm;
  return res;
}

PositiveBandSolver::PositiveBandSolver(const LaplacianCsr& L, std::span<const double> excess,
                                       double shift)
    : n_(L.size()), bw_(L.bandwidth()), pivot_(L.size()) {
  const std::size_t w = 2 * bw_ + 1;
  band_.assign(n_ * w, 0.0);
  std::vector<double> e(excess.begin(), excess.end());
  for (double t : e)
    if (!(t > 0.0)) throw std::invalid_argument("PositiveBandSolver: excess must be positive");
  const auto& rp = L.row_ptr();
  const auto& ci = L.cols();
  const auto& v = L.values();
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t k = rp[i]; k < rp[i + 1]; ++k) band_[i * w + (ci[k] + bw_ - i)] = shift * v[k];

  auto at = [&](std::size_t i, std::size_t j) -> double& { return band_[i * w + (j + bw_ - i)]; };
  for (std::size_t k = 0; k < n_; ++k) {
    const std::size_t hi = std::min(n_ - 1, k + bw_);
    double d = e[k];
    for (std::size_t j = k + 1; j <= hi; ++j) d += at(k, j);
    pivot_[k] = d;
    for (std::size_t i = k + 1; i <= hi; ++i) {
      const double aik = at(i, k);
      if (aik == 0.0) continue;
      const double l = aik / d;
      at(i, k) = l;
      e[i] += l * e[k];
      for (std::size_t j = k + 1; j <= hi; ++j) {
        if (j == i) continue;
        const double akj = at(k, j);
        if (akj != 0.0) at(i, j) += l * akj;
      }
    }
  }
}

void PositiveBandSolver::solve(std::span<const double> b, std::span<double> x) const {
  const std::size_t w = 2 * bw_ + 1;
  std::vector<double> y(b.begin(), b.end());
  for (std::size_t i = 0; i < n_; ++i) {
    const std::size_t lo = i > bw_ ? i - bw_ : 0;
    for (std::size_t k = lo; k < i; ++k) y[i] += band_[i * w + (k + bw_ - i)] * y[k];
  }
  for (std::size_t k = n_; k-- > 0;) {
    const std::size_t hi = std::min(n_ - 1, k + bw_);
    double s = y[k];
    for (std::size_t j = k + 1; j <= hi; ++j) s += band_[k * w + (j + bw_ - k)] * x[j];
    x[k] = s / pivot_[k];
  }
}

}  // namespace wentzell
