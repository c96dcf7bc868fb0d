#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "wentzell/mesh.hpp"

namespace wentzell {

// Cost per unit boundary length. For a < 1 the lower semicontinuous
// envelope collapses to the Euclidean case, hence the clamp.
double boundary_weight(double a);

enum class SegmentTag { Interior, Boundary };

struct GeodesicPath {
  double a = 1.0;
  std::vector<Point2> points;
  std::vector<SegmentTag> tags;  // tags[k] labels points[k] -> points[k+1]
  double weighted_length = 0.0;
  bool fallback = false;  // true when the graph polyline beat the optimiser
};

// Best path in {chord} U {chord, arc, chord}; exact for the disk.
struct ArcRoute {
  double length = 0.0;
  bool uses_boundary = false;
  int direction = 0;  // +1 counter-clockwise, -1 clockwise along the arc
  double theta_in = 0.0, theta_out = 0.0;
  double arc = 0.0;  // angular extent travelled along the circle
};
ArcRoute optimal_route(double a, Point2 x, Point2 y, std::size_t samples = 4096);

// Wide-stencil shortest-path graph on a square grid of spacing 2/resolution
// clipped to the disk, plus a ring of boundary nodes joined by weighted arcs.
class RefractionGraph {
 public:
  RefractionGraph(double a, std::size_t resolution, int stencil_radius = 5);

  double a() const { return a_; }
  std::size_t resolution() const { return resolution_; }
  std::size_t stencil_size() const { return offsets_.size(); }
  std::size_t node_count() const { return grid_count_ + ring_count_; }

  double distance(Point2 x, Point2 y) const;
  // Single Dijkstra from x, evaluated at every target.
  std::vector<double> distances(Point2 x, std::span<const Point2> targets) const;
  GeodesicPath path(Point2 x, Point2 y) const;

 private:
  struct Link {
    std::size_t node;
    double w;
    bool arc;
  };
  std::vector<Link> attach(Point2 p) const;
  template <class Visit>
  void neighbours(std::size_t u, Visit&& visit) const;
  void dijkstra(Point2 x, std::vector<double>& dist, std::vector<std::size_t>* pred) const;
  Point2 node_position(std::size_t u) const;
  double finish(Point2 x, Point2 y, const std::vector<double>& dist, std::size_t* via) const;

  double a_, w_, h_;
  std::size_t resolution_;
  double reach_;
  std::vector<std::pair<int, int>> offsets_;
  std::vector<double> offset_len_;
  std::vector<long> grid_id_;  // resolution^2, -1 outside the disk
  std::vector<std::pair<int, int>> grid_cell_;
  std::size_t grid_count_ = 0, ring_count_ = 0;
  // ring -> grid links, and the reverse direction in CSR form
  std::vector<std::vector<std::pair<std::size_t, double>>> ring_grid_;
  std::vector<std::size_t> grid_ring_ptr_;
  std::vector<std::pair<std::size_t, double>> grid_ring_;
};

// Graph bound and optimiser combined.
class RefractionMetric {
 public:
  RefractionMetric(double a, std::size_t resolution);
  double a() const { return graph_.a(); }
  const RefractionGraph& graph() const { return graph_; }
  double distance(Point2 x, Point2 y) const;
  GeodesicPath geodesic(Point2 x, Point2 y) const;

 private:
  RefractionGraph graph_;
};

double point_distance(double a, Point2 x, Point2 y, std::size_t resolution = 256);
GeodesicPath geodesic_disk(double a, Point2 x, Point2 y, std::size_t resolution = 256);
// Path built from the optimiser alone.
GeodesicPath route_path(double a, Point2 x, Point2 y, const ArcRoute& r);

// Angle in degrees between the incoming interior segment and the outward
// normal at the first interior -> boundary vertex.
std::optional<double> snell_angle(const GeodesicPath& path);

// Riemann sum of the squared weighted speed along the constant-speed
// parametrisation with n steps.
double constant_speed_action(const GeodesicPath& path, std::size_t n = 2000);

double set_distance(double a, std::span<const std::size_t> A, std::span<const std::size_t> B,
                    const DiskMesh& mesh, std::size_t resolution = 256);

// Edge (u, v, bound) list for the intrinsic distance: Euclidean edges up to
// `radius`, plus boundary neighbours with bound min(1, 1/sqrt(a)) * arc.
struct BoundGraph {
  std::size_t n = 0;
  std::vector<Triplet> edges;
};
BoundGraph intrinsic_bound_graph(const OperatorSet& ops, double radius = 0.25);
std::vector<double> graph_distances(const BoundGraph& g, std::span<const std::size_t> sources);

// Largest min_B f - max_A f over potentials with |f(u) - f(v)| <= bound(u,v)
// on a wide stencil of the mesh nodes; computed as the graph distance.
double intrinsic_set_distance(const OperatorSet& ops, std::span<const std::size_t> A,
                              std::span<const std::size_t> B, double radius = 0.25);

struct CostMatrix {
  double a = 1.0;
  std::size_t resolution = 0;
  std::vector<Point2> nodes;
  std::vector<double> C;  // row-major squared distances
  std::size_t size() const { return nodes.size(); }
  double operator()(std::size_t i, std::size_t j) const { return C[i * nodes.size() + j]; }
};

CostMatrix cost_matrix(double a, std::span<const Point2> nodes, std::size_t resolution = 256);
CostMatrix cost_matrix_serial(double a, std::span<const Point2> nodes, std::size_t resolution = 256);
std::vector<Point2> mesh_points(const DiskMesh& mesh);

}  // namespace wentzell
