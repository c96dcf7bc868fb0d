#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace wentzell {

class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, double residual, std::size_t iterations)
      : std::runtime_error(what), residual_(residual), iterations_(iterations) {}
  double residual() const { return residual_; }
  std::size_t iterations() const { return iterations_; }

 private:
  double residual_;
  std::size_t iterations_;
};

struct Triplet {
  std::size_t i, j;
  double v;
};

// Symmetric graph Laplacian kept as positive off-diagonal conductances only.
// Applying it in difference form makes L*1 vanish exactly.
class LaplacianCsr {
 public:
  LaplacianCsr() = default;
  // Each undirected edge appears once in `edges`; duplicates are summed.
  LaplacianCsr(std::size_t n, const std::vector<Triplet>& edges);

  std::size_t size() const { return n_; }
  std::size_t nnz() const { return col_.size(); }
  const std::vector<std::size_t>& row_ptr() const { return row_ptr_; }
  const std::vector<std::size_t>& cols() const { return col_; }
  const std::vector<double>& values() const { return val_; }

  double weight(std::size_t i, std::size_t j) const;
  std::vector<double> degree() const;
  // Bandwidth max |i-j| over stored entries.
  std::size_t bandwidth() const;
  // Same pattern, conductances rescaled edgewise by s(i,j).
  LaplacianCsr reweighted(const std::function<double(std::size_t, std::size_t, double)>& s) const;

 private:
  std::size_t n_ = 0;
  std::vector<std::size_t> row_ptr_{0};
  std::vector<std::size_t> col_;
  std::vector<double> val_;
};

using LinearOperator = std::function<void(std::span<const double>, std::span<double>)>;

struct CgOptions {
  double rel_tol = 1e-12;
  std::size_t max_iter = 20000;
  // For a singular system with constant kernel: project iterates onto 1-perp
  // with respect to these weights (empty = no projection).
  std::vector<double> nullspace_weights;
};

struct CgResult {
  std::size_t iterations = 0;
  double relative_residual = 0.0;
};

// Jacobi-preconditioned CG. Throws SolverError when the tolerance is missed.
CgResult conjugate_gradient(const LinearOperator& A, std::span<const double> jacobi,
                            std::span<const double> b, std::span<double> x,
                            const CgOptions& opt = {});

// Solver for A = diag(excess) + shift*L with excess > 0. Elimination keeps
// every pivot as a sum of positive terms, so small solution components keep
// full relative accuracy (no cancellation).
class PositiveBandSolver {
 public:
  PositiveBandSolver(const LaplacianCsr& L, std::span<const double> excess, double shift);
  void solve(std::span<const double> b, std::span<double> x) const;
  std::size_t bandwidth() const { return bw_; }

 private:
  std::size_t n_ = 0, bw_ = 0;
  std::vector<double> pivot_;
  // Row i holds |entry(i, j)| at i*(2bw+1) + (j - i + bw): multipliers below
  // the diagonal, eliminated upper factor above it.
  std::vector<double> band_;
};

}  // namespace wentzell
