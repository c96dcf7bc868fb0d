#include "wentzell/transfer.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace wentzell {

namespace {

double overlap(double a0, double a1, double b0, double b1) {
  return std::max(0.0, std::min(a1, b1) - std::max(a0, b0));
}

// Length of the intersection of two arcs centred at ta, tb (periodic).
double arc_overlap(double ta, double ha, double tb, double hb) {
  const double two_pi = 2.0 * std::numbers::pi;
  double s = 0.0;
  for (int k = -1; k <= 1; ++k) {
    const double t = tb + k * two_pi;
    s += overlap(ta - ha, ta + ha, t - hb, t + hb);
  }
  return s;
}

}  // namespace

MeshTransfer::MeshTransfer(const DiskMesh& fine, const DiskMesh& coarse)
    : n_fine_(fine.size()), n_coarse_(coarse.size()) {
  const double hf = 0.5 * fine.dtheta(), hc = 0.5 * coarse.dtheta();
  for (std::size_t jf = 0; jf < fine.n_theta(); ++jf) {
    const double tf = static_cast<double>(jf) * fine.dtheta();
    for (std::size_t jc = 0; jc < coarse.n_theta(); ++jc) {
      const double tc = static_cast<double>(jc) * coarse.dtheta();
      const double ang = arc_overlap(tf, hf, tc, hc) / fine.dtheta();
      if (ang <= 0.0) continue;
      for (std::size_t i = 0; i < fine.n_r(); ++i) {
        const double r0 = static_cast<double>(i) * fine.dr(), r1 = r0 + fine.dr();
        for (std::size_t I = 0; I < coarse.n_r(); ++I) {
          const double R0 = static_cast<double>(I) * coarse.dr(), R1 = R0 + coarse.dr();
          const double lo = std::max(r0, R0), hi = std::min(r1, R1);
          if (hi <= lo) continue;
          const double rad = (hi * hi - lo * lo) / (r1 * r1 - r0 * r0);
          entries_.push_back({coarse.interior_node(I, jc), fine.interior_node(i, jf), rad * ang});
        }
      }
      entries_.push_back({coarse.boundary_node(jc), fine.boundary_node(jf), ang});
    }
  }
}

std::vector<double> MeshTransfer::restrict_masses(std::span<const double> fine_masses) const {
  std::vector<double> out(n_coarse_, 0.0);
  for (const auto& e : entries_) out[e.coarse] += e.frac * fine_masses[e.fine];
  return out;
}

std::vector<double> MeshTransfer::prolong_density(std::span<const double> coarse_density) const {
  std::vector<double> out(n_fine_, 0.0);
  for (const auto& e : entries_) out[e.fine] += e.frac * coarse_density[e.coarse];
  return out;
}

}  // namespace wentzell
