#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "wentzell/config.hpp"
#include "wentzell/dynamics.hpp"
#include "wentzell/mesh.hpp"
#include "wentzell/transport.hpp"

namespace wentzell {

struct ExperimentResult {
  std::string name;
  bool pass = false;
  nlohmann::json metrics;
  std::vector<std::string> files;
};

std::vector<std::string> experiment_names();

// Writes <name>.csv and <name>.summary.json into cfg.out_dir.
// Throws std::invalid_argument for an unknown name.
ExperimentResult run_experiment(const std::string& name, const ExperimentConfig& cfg);

// Collects every <name>.summary.json in dir into dir/summary.json.
// Throws std::runtime_error when none is present.
nlohmann::json emit_report(const std::filesystem::path& dir);

// Boundary nodes with |theta - center| <= half_width (periodic).
std::vector<std::size_t> boundary_cap(const DiskMesh& mesh, double center, double half_width);
// mu-density 1 + cos(theta)/2
std::vector<double> cosine_density(const DiskMesh& mesh);
std::vector<double> log_spaced(double lo, double hi, std::size_t n);

struct VaradhanFit {
  double a = 1.0;
  std::vector<double> t, estimate;  // estimate = -2 t log P_t(A, B)
  double intercept = 0.0, slope = 0.0;
};
VaradhanFit varadhan_fit(const OperatorSet& ops, std::span<const std::size_t> A,
                         std::span<const std::size_t> B, std::span<const double> t, double dt);

// Boundary-mass curves of the PDE for a = 0.5 and a = 1 on the fine mesh and
// of the Euclidean-cost JKO flow on the coarse mesh, all aggregated onto the
// coarse mesh and evaluated at `times` (linear interpolation in time).
struct NogoData {
  std::vector<double> times;
  std::vector<double> m_pde_half, m_pde_one;
  std::vector<double> half_pde_half, half_pde_one;  // mass of the arc |theta| < pi/2
  struct Jko {
    double h = 0.0;
    std::vector<double> m, half, tv_pde_one;
  };
  std::vector<Jko> jko;
};
NogoData nogo_data(const ExperimentConfig& cfg, std::span<const double> h_values, std::span<const double> times);

void write_heat_csv(const std::filesystem::path& path, const OperatorSet& ops, const HeatTrajectory& tr,
                    std::uint64_t config_hash);
void write_jko_csv(const std::filesystem::path& path, const DiskMesh& mesh, const JkoTrajectory& tr,
                   std::uint64_t config_hash);

}  // namespace wentzell
