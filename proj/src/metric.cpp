#include "wentzell/metric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <queue>
#include <stdexcept>

#include <boost/math/tools/minima.hpp>

namespace wentzell {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
constexpr double kOnCircle = 1e-12;

double norm(Point2 p) { return std::hypot(p.x, p.y); }
double dist(Point2 p, Point2 q) { return std::hypot(p.x - q.x, p.y - q.y); }
Point2 on_circle(double t) { return {std::cos(t), std::sin(t)}; }

double wrap(double t) {
  t = std::fmod(t, kTwoPi);
  return t < 0.0 ? t + kTwoPi : t;
}

void check_point(Point2 p) {
  if (!(norm(p) <= 1.0 + kOnCircle)) throw std::invalid_argument("point lies outside the closed unit disk");
}

bool on_boundary(Point2 p) { return norm(p) >= 1.0 - kOnCircle; }

double angular_gap(double s, double t) {
  const double d = wrap(s - t);
  return std::min(d, kTwoPi - d);
}

double brent(const auto& f, double lo, double hi) {
  return boost::math::tools::brent_find_minima(f, lo, hi, std::numeric_limits<double>::digits / 2).first;
}

}  // namespace

double boundary_weight(double a) {
  if (!(a > 0.0)) throw std::invalid_argument("boundary_weight: a must be positive");
  return 1.0 / std::sqrt(std::max(a, 1.0));
}

ArcRoute optimal_route(double a, Point2 x, Point2 y, std::size_t K) {
  check_point(x);
  check_point(y);
  ArcRoute best{dist(x, y), false, 0, 0.0, 0.0, 0.0};
  const double w = boundary_weight(a);
  if (w >= 1.0 || K < 8) return best;

  std::vector<double> t(K), A(K), B(K);
  for (std::size_t k = 0; k < K; ++k) {
    t[k] = kTwoPi * static_cast<double>(k) / static_cast<double>(K);
    const Point2 p = on_circle(t[k]);
    A[k] = dist(x, p);
    B[k] = dist(p, y);
  }

  struct Pick {
    double cost = kInf;
    std::size_t i = 0, k = 0;
    int dir = 0, wraps = 0;
  } pick;

  // For a fixed orientation the cost separates into an entry and an exit
  // term; prefix/suffix minima handle the wrap-around.
  for (int dir : {+1, -1}) {
    std::vector<double> U(K);
    for (std::size_t k = 0; k < K; ++k) U[k] = B[k] + dir * w * t[k];
    std::vector<std::size_t> pre(K), suf(K);  // argmin over k<=i and k>=i
    pre[0] = 0;
    for (std::size_t k = 1; k < K; ++k) pre[k] = U[k] < U[pre[k - 1]] ? k : pre[k - 1];
    suf[K - 1] = K - 1;
    for (std::size_t k = K - 1; k-- > 0;) suf[k] = U[k] < U[suf[k + 1]] ? k : suf[k + 1];
    for (std::size_t i = 0; i < K; ++i) {
      const double head = A[i] - dir * w * t[i];
      // same-lap candidates: k >= i for ccw, k <= i for cw
      std::size_t same = dir > 0 ? suf[i] : pre[i];
      double c = head + U[same];
      if (c < pick.cost) pick = {c, i, same, dir, 0};
      const bool has_other = dir > 0 ? i > 0 : i + 1 < K;
      if (has_other) {
        const std::size_t other = dir > 0 ? pre[i - 1] : suf[i + 1];
        c = head + U[other] + kTwoPi * w;
        if (c < pick.cost) pick = {c, i, other, dir, 1};
      }
    }
  }

  const double dir = pick.dir;
  const double step = kTwoPi / static_cast<double>(K);
  auto entry = [&](double s) { return dist(x, on_circle(s)) - dir * w * s; };
  auto exit = [&](double s) { return dist(on_circle(s), y) + dir * w * s; };
  const double th1 = brent(entry, t[pick.i] - 2 * step, t[pick.i] + 2 * step);
  const double th2 = brent(exit, t[pick.k] - 2 * step, t[pick.k] + 2 * step);

  auto consider = [&](double s1, double s2) {
    const double arc = dir * (s2 - s1) + pick.wraps * kTwoPi;
    if (arc < 0.0) return;
    const double len = dist(x, on_circle(s1)) + w * arc + dist(on_circle(s2), y);
    if (len < best.length) best = {len, true, pick.dir, wrap(s1), wrap(s2), arc};
  };
  // An endpoint on the circle puts a kink at its own angle; Brent is slow
  // there, so that angle is tried directly.
  auto nearest = [](double near, Point2 p) {
    const double th = std::atan2(p.y, p.x);
    return th + kTwoPi * std::round((near - th) / kTwoPi);
  };
  std::vector<double> s1{t[pick.i], th1}, s2{t[pick.k], th2};
  if (on_boundary(x)) s1.push_back(nearest(th1, x));
  if (on_boundary(y)) s2.push_back(nearest(th2, y));
  for (double a1 : s1)
    for (double a2 : s2) consider(a1, a2);
  return best;
}

// ---------------------------------------------------------------------------

RefractionGraph::RefractionGraph(double a, std::size_t resolution, int stencil_radius)
    : a_(a), w_(boundary_weight(a)), h_(2.0 / static_cast<double>(resolution)), resolution_(resolution) {
  if (resolution < 8) throw std::invalid_argument("RefractionGraph: resolution too small");
  if (stencil_radius < 2) throw std::invalid_argument("RefractionGraph: stencil radius must be >= 2");
  reach_ = stencil_radius * h_;
  for (int p = -stencil_radius; p <= stencil_radius; ++p)
    for (int q = -stencil_radius; q <= stencil_radius; ++q)
      if ((p != 0 || q != 0) && std::gcd(p, q) == 1) {
        offsets_.emplace_back(p, q);
        offset_len_.push_back(h_ * std::hypot(p, q));
      }

  const auto n = resolution;
  grid_id_.assign(n * n, -1);
  for (std::size_t iy = 0; iy < n; ++iy)
    for (std::size_t ix = 0; ix < n; ++ix) {
      const double cx = -1.0 + (static_cast<double>(ix) + 0.5) * h_;
      const double cy = -1.0 + (static_cast<double>(iy) + 0.5) * h_;
      if (cx * cx + cy * cy < 1.0) {
        grid_id_[iy * n + ix] = static_cast<long>(grid_count_++);
        grid_cell_.emplace_back(static_cast<int>(ix), static_cast<int>(iy));
      }
    }

  ring_count_ = std::max<std::size_t>(64, static_cast<std::size_t>(std::ceil(2.0 * kTwoPi / h_)));
  ring_grid_.resize(ring_count_);
  std::vector<std::size_t> count(grid_count_, 0);
  for (std::size_t m = 0; m < ring_count_; ++m) {
    const Point2 p = node_position(grid_count_ + m);
    for (const auto& l : attach(p))
      if (l.node < grid_count_) {
        ring_grid_[m].emplace_back(l.node, l.w);
        ++count[l.node];
      }
  }
  grid_ring_ptr_.assign(grid_count_ + 1, 0);
  for (std::size_t g = 0; g < grid_count_; ++g) grid_ring_ptr_[g + 1] = grid_ring_ptr_[g] + count[g];
  grid_ring_.resize(grid_ring_ptr_.back());
  std::vector<std::size_t> fill(grid_ring_ptr_.begin(), grid_ring_ptr_.end() - 1);
  for (std::size_t m = 0; m < ring_count_; ++m)
    for (const auto& [g, wt] : ring_grid_[m]) grid_ring_[fill[g]++] = {grid_count_ + m, wt};
}

Point2 RefractionGraph::node_position(std::size_t u) const {
  if (u < grid_count_) {
    const auto [ix, iy] = grid_cell_[u];
    return {-1.0 + (ix + 0.5) * h_, -1.0 + (iy + 0.5) * h_};
  }
  return on_circle(kTwoPi * static_cast<double>(u - grid_count_) / static_cast<double>(ring_count_));
}

// Links from an arbitrary point of the closed disk into the graph. Grid
// nodes outside the stencil reach only join through the ring.
std::vector<RefractionGraph::Link> RefractionGraph::attach(Point2 p) const {
  std::vector<Link> out;
  const auto n = static_cast<long>(resolution_);
  const long span = static_cast<long>(std::ceil(reach_ / h_)) + 1;
  const long cx = static_cast<long>(std::floor((p.x + 1.0) / h_));
  const long cy = static_cast<long>(std::floor((p.y + 1.0) / h_));
  for (long iy = std::max(0L, cy - span); iy <= std::min(n - 1, cy + span); ++iy)
    for (long ix = std::max(0L, cx - span); ix <= std::min(n - 1, cx + span); ++ix) {
      const long id = grid_id_[static_cast<std::size_t>(iy * n + ix)];
      if (id < 0) continue;
      const double d = dist(p, node_position(static_cast<std::size_t>(id)));
      if (d <= reach_ && d > 0.0) out.push_back({static_cast<std::size_t>(id), d, false});
    }
  if (norm(p) < 1.0 - reach_) return out;

  const double dth = kTwoPi / static_cast<double>(ring_count_);
  const double tp = std::atan2(p.y, p.x);
  const long window = static_cast<long>(std::ceil(2.0 * reach_ / dth)) + 1;
  const long centre = static_cast<long>(std::lround(wrap(tp) / dth));
  const bool boundary = on_boundary(p);
  const auto M = static_cast<long>(ring_count_);
  for (long k = centre - window; k <= centre + window; ++k) {
    const auto m = static_cast<std::size_t>(((k % M) + M) % M);
    const Point2 q = node_position(grid_count_ + m);
    const double chord = dist(p, q);
    if (chord == 0.0) continue;
    if (boundary) {
      const double arc = w_ * angular_gap(tp, kTwoPi * static_cast<double>(m) / static_cast<double>(ring_count_));
      if (arc < chord) {
        if (arc <= w_ * reach_) out.push_back({grid_count_ + m, arc, true});
        continue;
      }
    }
    if (chord <= reach_) out.push_back({grid_count_ + m, chord, false});
  }
  return out;
}

template <class Visit>
void RefractionGraph::neighbours(std::size_t u, Visit&& visit) const {
  const auto n = static_cast<int>(resolution_);
  if (u < grid_count_) {
    const auto [ix, iy] = grid_cell_[u];
    for (std::size_t o = 0; o < offsets_.size(); ++o) {
      const int jx = ix + offsets_[o].first, jy = iy + offsets_[o].second;
      if (jx < 0 || jy < 0 || jx >= n || jy >= n) continue;
      const long v = grid_id_[static_cast<std::size_t>(jy * n + jx)];
      if (v >= 0) visit(static_cast<std::size_t>(v), offset_len_[o], false);
    }
    for (std::size_t k = grid_ring_ptr_[u]; k < grid_ring_ptr_[u + 1]; ++k)
      visit(grid_ring_[k].first, grid_ring_[k].second, false);
    return;
  }
  const std::size_t m = u - grid_count_;
  const double arc = w_ * kTwoPi / static_cast<double>(ring_count_);
  visit(grid_count_ + (m + 1) % ring_count_, arc, true);
  visit(grid_count_ + (m + ring_count_ - 1) % ring_count_, arc, true);
  for (const auto& [g, wt] : ring_grid_[m]) visit(g, wt, false);
}

void RefractionGraph::dijkstra(Point2 x, std::vector<double>& d, std::vector<std::size_t>* pred) const {
  d.assign(node_count(), kInf);
  if (pred) pred->assign(node_count(), kNone);
  using Item = std::pair<double, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  for (const auto& l : attach(x))
    if (l.w < d[l.node]) {
      d[l.node] = l.w;
      pq.push({l.w, l.node});
    }
  while (!pq.empty()) {
    const auto [du, u] = pq.top();
    pq.pop();
    if (du > d[u]) continue;
    neighbours(u, [&](std::size_t v, double wt, bool) {
      const double nd = du + wt;
      if (nd < d[v]) {
        d[v] = nd;
        if (pred) (*pred)[v] = u;
        pq.push({nd, v});
      }
    });
  }
}

double RefractionGraph::finish(Point2 x, Point2 y, const std::vector<double>& d, std::size_t* via) const {
  double best = kInf;
  if (via) *via = kNone;
  const double direct = dist(x, y);
  if (direct <= reach_) best = direct;
  if (on_boundary(x) && on_boundary(y)) {
    const double arc = w_ * angular_gap(std::atan2(x.y, x.x), std::atan2(y.y, y.x));
    if (arc <= w_ * reach_) best = std::min(best, arc);
  }
  for (const auto& l : attach(y))
    if (d[l.node] + l.w < best) {
      best = d[l.node] + l.w;
      if (via) *via = l.node;
    }
  return best;
}

double RefractionGraph::distance(Point2 x, Point2 y) const {
  const Point2 t[1] = {y};
  return distances(x, t)[0];
}

std::vector<double> RefractionGraph::distances(Point2 x, std::span<const Point2> targets) const {
  check_point(x);
  for (const auto& y : targets) check_point(y);
  std::vector<double> d;
  dijkstra(x, d, nullptr);
  std::vector<double> out(targets.size());
  for (std::size_t k = 0; k < targets.size(); ++k)
    out[k] = dist(x, targets[k]) == 0.0 ? 0.0 : finish(x, targets[k], d, nullptr);
  return out;
}

GeodesicPath RefractionGraph::path(Point2 x, Point2 y) const {
  check_point(x);
  check_point(y);
  GeodesicPath gp;
  gp.a = a_;
  gp.fallback = true;
  if (dist(x, y) == 0.0) {
    gp.points = {x, y};
    gp.tags = {SegmentTag::Interior};
    return gp;
  }
  std::vector<double> d;
  std::vector<std::size_t> pred;
  dijkstra(x, d, &pred);
  std::size_t via = kNone;
  gp.weighted_length = finish(x, y, d, &via);

  std::vector<std::size_t> chain;
  for (std::size_t u = via; u != kNone; u = pred[u]) chain.push_back(u);
  std::reverse(chain.begin(), chain.end());
  gp.points.push_back(x);
  for (auto u : chain) gp.points.push_back(node_position(u));
  gp.points.push_back(y);

  auto is_ring = [&](std::size_t u) { return u != kNone && u >= grid_count_; };
  std::vector<std::size_t> ids;
  ids.push_back(kNone);
  ids.insert(ids.end(), chain.begin(), chain.end());
  ids.push_back(kNone);
  for (std::size_t k = 0; k + 1 < gp.points.size(); ++k) {
    const Point2 p = gp.points[k], q = gp.points[k + 1];
    bool boundary = false;
    if (is_ring(ids[k]) && is_ring(ids[k + 1])) {
      const std::size_t m1 = ids[k] - grid_count_, m2 = ids[k + 1] - grid_count_;
      boundary = (m1 + 1) % ring_count_ == m2 || (m2 + 1) % ring_count_ == m1;
    } else if (on_boundary(p) && on_boundary(q)) {
      // endpoint joined to the ring by an arc link
      boundary = w_ * angular_gap(std::atan2(p.y, p.x), std::atan2(q.y, q.x)) < dist(p, q);
    }
    gp.tags.push_back(boundary ? SegmentTag::Boundary : SegmentTag::Interior);
  }
  return gp;
}

// ---------------------------------------------------------------------------

RefractionMetric::RefractionMetric(double a, std::size_t resolution) : graph_(a, resolution) {}

double RefractionMetric::distance(Point2 x, Point2 y) const {
  return std::min(graph_.distance(x, y), optimal_route(graph_.a(), x, y).length);
}

GeodesicPath RefractionMetric::geodesic(Point2 x, Point2 y) const {
  const ArcRoute r = optimal_route(graph_.a(), x, y);
  const double g = graph_.distance(x, y);
  if (g < r.length - 1e-9 * std::max(1.0, r.length)) return graph_.path(x, y);
  return route_path(graph_.a(), x, y, r);
}

double point_distance(double a, Point2 x, Point2 y, std::size_t resolution) {
  check_point(x);
  check_point(y);
  if (dist(x, y) == 0.0) return 0.0;
  return RefractionMetric(a, resolution).distance(x, y);
}

GeodesicPath geodesic_disk(double a, Point2 x, Point2 y, std::size_t resolution) {
  return RefractionMetric(a, resolution).geodesic(x, y);
}

GeodesicPath route_path(double a, Point2 x, Point2 y, const ArcRoute& r) {
  GeodesicPath gp;
  gp.a = a;
  gp.weighted_length = r.length;
  gp.points.push_back(x);
  if (!r.uses_boundary) {
    gp.points.push_back(y);
    gp.tags.push_back(SegmentTag::Interior);
    return gp;
  }
  const Point2 p1 = on_circle(r.theta_in), p2 = on_circle(r.theta_out);
  if (dist(x, p1) > 1e-13) {
    gp.points.push_back(p1);
    gp.tags.push_back(SegmentTag::Interior);
  } else {
    gp.points.back() = p1;
  }
  const auto steps = std::max<std::size_t>(2, static_cast<std::size_t>(std::ceil(r.arc / 0.01)));
  for (std::size_t k = 1; k <= steps; ++k) {
    const double s = r.theta_in + r.direction * r.arc * static_cast<double>(k) / static_cast<double>(steps);
    gp.points.push_back(k == steps ? p2 : on_circle(s));
    gp.tags.push_back(SegmentTag::Boundary);
  }
  if (dist(p2, y) > 1e-13) {
    gp.points.push_back(y);
    gp.tags.push_back(SegmentTag::Interior);
  }
  return gp;
}

std::optional<double> snell_angle(const GeodesicPath& path) {
  for (std::size_t k = 0; k + 1 < path.tags.size(); ++k) {
    if (path.tags[k] != SegmentTag::Interior || path.tags[k + 1] != SegmentTag::Boundary) continue;
    const Point2 p = path.points[k], q = path.points[k + 1];
    const double len = dist(p, q), r = norm(q);
    if (len == 0.0 || r == 0.0) continue;
    const double c = ((q.x - p.x) * q.x + (q.y - p.y) * q.y) / (len * r);
    return std::acos(std::clamp(c, -1.0, 1.0)) * 180.0 / std::numbers::pi;
  }
  return std::nullopt;
}

double constant_speed_action(const GeodesicPath& path, std::size_t n) {
  const double w = boundary_weight(path.a);
  const std::size_t S = path.tags.size();
  std::vector<double> cum(S + 1, 0.0), wt(S);
  for (std::size_t k = 0; k < S; ++k) {
    wt[k] = path.tags[k] == SegmentTag::Boundary ? w : 1.0;
    cum[k + 1] = cum[k] + wt[k] * dist(path.points[k], path.points[k + 1]);
  }
  const double total = cum[S];
  if (total == 0.0) return 0.0;
  auto locate = [&](double s) {
    const auto it = std::upper_bound(cum.begin(), cum.end(), s);
    std::size_t k = it == cum.begin() ? 0 : static_cast<std::size_t>(it - cum.begin()) - 1;
    k = std::min(k, S - 1);
    while (k + 1 < S && cum[k + 1] == cum[k]) ++k;
    const double seg = cum[k + 1] - cum[k];
    const double u = seg > 0.0 ? std::clamp((s - cum[k]) / seg, 0.0, 1.0) : 0.0;
    const Point2 p = path.points[k], q = path.points[k + 1];
    return std::pair{Point2{p.x + u * (q.x - p.x), p.y + u * (q.y - p.y)}, k};
  };
  const double dt = 1.0 / static_cast<double>(n);
  double act = 0.0;
  auto prev = locate(0.0);
  for (std::size_t j = 1; j <= n; ++j) {
    const auto cur = locate(total * static_cast<double>(j) / static_cast<double>(n));
    const auto mid = locate(total * (static_cast<double>(j) - 0.5) / static_cast<double>(n));
    const double v = wt[mid.second] * dist(prev.first, cur.first) / dt;
    act += v * v * dt;
    prev = cur;
  }
  return act;
}

double set_distance(double a, std::span<const std::size_t> A, std::span<const std::size_t> B,
                    const DiskMesh& mesh, std::size_t resolution) {
  if (A.empty() || B.empty()) throw std::invalid_argument("set_distance: empty set");
  for (auto i : A)
    for (auto j : B)
      if (i == j) return 0.0;
  RefractionMetric metric(a, resolution);
  std::vector<Point2> targets;
  for (auto j : B) targets.push_back(mesh.position(j));
  double best = kInf;
  for (auto i : A) {
    const Point2 x = mesh.position(i);
    const auto g = metric.graph().distances(x, targets);
    for (std::size_t k = 0; k < targets.size(); ++k)
      best = std::min({best, g[k], optimal_route(a, x, targets[k]).length});
  }
  return best;
}

BoundGraph intrinsic_bound_graph(const OperatorSet& ops, double radius) {
  const auto& mesh = ops.mesh();
  BoundGraph g;
  g.n = mesh.size();
  const double arc_bound = std::min(1.0, 1.0 / std::sqrt(ops.a())) * mesh.dtheta();
  std::vector<Point2> pos(g.n);
  for (std::size_t k = 0; k < g.n; ++k) pos[k] = mesh.position(k);
  auto arc_neighbours = [&](std::size_t u, std::size_t v) {
    if (!mesh.is_boundary(u) || !mesh.is_boundary(v)) return false;
    const std::size_t m = mesh.n_theta();
    return (mesh.sector(u) + 1) % m == mesh.sector(v) || (mesh.sector(v) + 1) % m == mesh.sector(u);
  };
  for (std::size_t u = 0; u < g.n; ++u)
    for (std::size_t v = u + 1; v < g.n; ++v) {
      const double d = dist(pos[u], pos[v]);
      if (d > radius) continue;
      const double b = arc_neighbours(u, v) ? std::min(d, arc_bound) : d;
      g.edges.push_back({u, v, b});
    }
  // boundary neighbours beyond the radius still get their arc edge
  for (std::size_t j = 0; j < mesh.n_theta(); ++j) {
    const std::size_t u = mesh.boundary_node(j), v = mesh.boundary_node((j + 1) % mesh.n_theta());
    if (dist(pos[u], pos[v]) > radius) g.edges.push_back({std::min(u, v), std::max(u, v), arc_bound});
  }
  return g;
}

std::vector<double> graph_distances(const BoundGraph& g, std::span<const std::size_t> sources) {
  std::vector<std::vector<std::pair<std::size_t, double>>> adj(g.n);
  for (const auto& e : g.edges) {
    adj[e.i].emplace_back(e.j, e.v);
    adj[e.j].emplace_back(e.i, e.v);
  }
  std::vector<double> d(g.n, kInf);
  using Item = std::pair<double, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  for (auto s : sources) {
    d[s] = 0.0;
    pq.push({0.0, s});
  }
  while (!pq.empty()) {
    const auto [du, u] = pq.top();
    pq.pop();
    if (du > d[u]) continue;
    for (const auto& [v, w] : adj[u])
      if (du + w < d[v]) {
        d[v] = du + w;
        pq.push({d[v], v});
      }
  }
  return d;
}

double intrinsic_set_distance(const OperatorSet& ops, std::span<const std::size_t> A,
                              std::span<const std::size_t> B, double radius) {
  if (A.empty() || B.empty()) throw std::invalid_argument("intrinsic_set_distance: empty set");
  const auto d = graph_distances(intrinsic_bound_graph(ops, radius), A);
  double best = kInf;
  for (auto j : B) best = std::min(best, d[j]);
  return best;
}

std::vector<Point2> mesh_points(const DiskMesh& mesh) {
  std::vector<Point2> p(mesh.size());
  for (std::size_t k = 0; k < mesh.size(); ++k) p[k] = mesh.position(k);
  return p;
}

namespace {

CostMatrix assemble_cost(double a, std::span<const Point2> nodes, std::size_t resolution, bool parallel) {
  const std::size_t n = nodes.size();
  if (n < 2) throw std::invalid_argument("cost_matrix: need at least two nodes");
  RefractionGraph graph(a, resolution);
  std::vector<double> D(n * n);
  const auto run = [&](std::size_t i) {
    const auto row = graph.distances(nodes[i], nodes);
    for (std::size_t j = 0; j < n; ++j) D[i * n + j] = row[j];
  };
  if (parallel) {
#pragma omp parallel for schedule(dynamic)
    for (std::size_t i = 0; i < n; ++i) run(i);
  } else {
    for (std::size_t i = 0; i < n; ++i) run(i);
  }
  CostMatrix cm{a, resolution, std::vector<Point2>(nodes.begin(), nodes.end()), std::vector<double>(n * n, 0.0)};
  const auto refine = [&](std::size_t i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = std::min({D[i * n + j], D[j * n + i], optimal_route(a, nodes[i], nodes[j]).length});
      cm.C[i * n + j] = cm.C[j * n + i] = d * d;
    }
  };
  if (parallel) {
#pragma omp parallel for schedule(dynamic)
    for (std::size_t i = 0; i < n; ++i) refine(i);
  } else {
    for (std::size_t i = 0; i < n; ++i) refine(i);
  }
  return cm;
}

}  // namespace

CostMatrix cost_matrix(double a, std::span<const Point2> nodes, std::size_t resolution) {
  return assemble_cost(a, nodes, resolution, true);
}

CostMatrix cost_matrix_serial(double a, std::span<const Point2> nodes, std::size_t resolution) {
  return assemble_cost(a, nodes, resolution, false);
}

}  // namespace wentzell
