#pragma once

#include <span>
#include <vector>

#include "wentzell/mesh.hpp"

namespace wentzell {

// Area-weighted map between two polar disk meshes. Entry (I, i, frac) says
// that the fraction `frac` of fine cell i lies in coarse cell I. Boundary
// arcs only overlap boundary arcs.
class MeshTransfer {
 public:
  MeshTransfer(const DiskMesh& fine, const DiskMesh& coarse);

  // Coarse node masses from fine node masses; total mass is preserved.
  std::vector<double> restrict_masses(std::span<const double> fine_masses) const;
  // Fine mu-density from a coarse mu-density; total mass is preserved.
  std::vector<double> prolong_density(std::span<const double> coarse_density) const;

  struct Entry {
    std::size_t coarse, fine;
    double frac;
  };
  const std::vector<Entry>& entries() const { return entries_; }

 private:
  std::size_t n_fine_, n_coarse_;
  std::vector<Entry> entries_;
};

}  // namespace wentzell
