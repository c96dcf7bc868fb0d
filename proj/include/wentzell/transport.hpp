#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "wentzell/metric.hpp"
#include "wentzell/rho.hpp"

namespace wentzell {

class TransportError : public std::runtime_error {
 public:
  TransportError(const std::string& what, double violation)
      : std::runtime_error(what), violation_(violation) {}
  double violation() const { return violation_; }

 private:
  double violation_;
};

struct SinkhornResult {
  double cost = 0.0;  // <plan, C>
  std::size_t rows = 0, cols = 0;
  std::vector<double> plan;  // rows x cols, row-major
  double marginal_violation = 0.0;  // total variation, both marginals
  std::size_t iterations = 0;
};

struct SinkhornOptions {
  std::size_t max_iter = 200000;
  double tol = 1e-8;
  bool serial_kernels = false;
};

// Log-domain Sinkhorn with epsilon scaling down to `epsilon`. C is
// mu0.size() x mu1.size(), row-major.
SinkhornResult sinkhorn(std::span<const double> mu0, std::span<const double> mu1, std::span<const double> C,
                        double epsilon, const SinkhornOptions& opt = {});
SinkhornResult sinkhorn(std::span<const double> mu0, std::span<const double> mu1, const CostMatrix& C,
                        double epsilon, const SinkhornOptions& opt = {});

// Exact optimal transport cost by successive shortest paths on the
// bipartite network; both sides limited to 64 points.
double exact_ot_small(std::span<const double> mu0, std::span<const double> mu1, std::span<const double> C);
// Same solver without the size cap.
double exact_ot(std::span<const double> mu0, std::span<const double> mu1, std::span<const double> C);

double median_cost(const CostMatrix& C);

struct JkoConfig {
  double h = 1e-3;
  double epsilon = 0.0;  // 0 selects 1e-3 * median(C)
  std::size_t max_iter = 100000;
  double tol = 1e-9;  // marginal violation
  const CostMatrix* cost = nullptr;
  bool serial_kernels = false;
};

struct JkoStepResult {
  Rho rho;
  double entropy = 0.0;
  // Entropic transport value minus the entropic value of staying put.
  double transport_cost = 0.0;
  double objective = 0.0;  // transport_cost / (2h) + entropy
  double exact_w2 = 0.0;   // unregularised W^2(rho_prev, rho), diagnostic
  double marginal_violation = 0.0;
  std::size_t iterations = 0;
};

JkoStepResult jko_step_detailed(const Rho& rho_prev, const JkoConfig& cfg, const DiskMesh& mesh);
Rho jko_step(const Rho& rho_prev, const JkoConfig& cfg, const DiskMesh& mesh);

struct JkoTrajectory {
  double h = 0.0;
  std::vector<double> times;
  std::vector<Rho> states;
  std::vector<double> entropy, transport_cost, objective;
};

JkoTrajectory jko_flow(const Rho& rho0, const JkoConfig& cfg, double T, const DiskMesh& mesh);

}  // namespace wentzell
