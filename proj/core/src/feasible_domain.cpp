#include "impc/feasible_domain.hpp"

#include "impc/errors.hpp"
#include "impc/harness.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace impc::harness {

std::vector<Vector> state_grid(const Polytope& set, const std::vector<int>& counts) {
  const Index n = set.dim();
  if (static_cast<Index>(counts.size()) != n) throw ShapeMismatch("state_grid: one count per dimension expected");
  const setalg::Box box = set.bounding_box();
  std::vector<Vector> axes;
  for (Index i = 0; i < n; ++i) {
    const int c = counts[static_cast<std::size_t>(i)];
    if (c < 2) throw InvalidArgument("state_grid: counts must be at least 2");
    Vector axis = Vector::LinSpaced(c, box.center(i) - box.radius(i), box.center(i) + box.radius(i));
    axes.push_back(std::move(axis));
  }
  std::vector<Vector> out;
  std::vector<Index> idx(static_cast<std::size_t>(n), 0);
  while (true) {
    Vector p(n);
    for (Index i = 0; i < n; ++i) p(i) = axes[static_cast<std::size_t>(i)](idx[static_cast<std::size_t>(i)]);
    if (set.contains(p, 1e-9)) out.push_back(std::move(p));
    Index d = n - 1;
    while (d >= 0) {
      auto& id = idx[static_cast<std::size_t>(d)];
      if (++id < axes[static_cast<std::size_t>(d)].size()) break;
      id = 0;
      --d;
    }
    if (d < 0) break;
  }
  return out;
}

int FeasibleDomain::feasible_count() const {
  return static_cast<int>(std::count(feasible.begin(), feasible.end(), true));
}

FeasibleDomain estimate_feasible_domain(const rmpc::Controller& controller, const std::vector<int>& grid) {
  FeasibleDomain fd;
  fd.points = state_grid(controller.config().state_set, grid);
  int hint = 0;
  std::vector<Vector> feasible_points;
  for (const auto& p : fd.points) {
    const auto n = controller.feasible_horizon(p, hint);
    fd.feasible.push_back(n.has_value());
    if (n) {
      hint = *n;
      feasible_points.push_back(p);
    }
  }
  if (controller.config().state_dim() == 2 && !feasible_points.empty()) {
    fd.hull = convex_hull_2d(feasible_points);
    fd.area = polygon_area(fd.hull);
  }
  return fd;
}

std::vector<Vector> convex_hull_2d(std::vector<Vector> pts) {
  for (const auto& p : pts)
    if (p.size() != 2) throw ShapeMismatch("convex_hull_2d: points must be 2-D");
  std::sort(pts.begin(), pts.end(), [](const Vector& a, const Vector& b) {
    return a(0) < b(0) || (a(0) == b(0) && a(1) < b(1));
  });
  pts.erase(std::unique(pts.begin(), pts.end(), [](const Vector& a, const Vector& b) { return a == b; }), pts.end());
  if (pts.size() < 3) return pts;
  auto cross = [](const Vector& o, const Vector& a, const Vector& b) {
    return (a(0) - o(0)) * (b(1) - o(1)) - (a(1) - o(1)) * (b(0) - o(0));
  };
  std::vector<Vector> hull(2 * pts.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0.0) --k;
    hull[k++] = pts[i];
  }
  for (std::size_t i = pts.size() - 1, lower = k + 1; i > 0; --i) {
    while (k >= lower && cross(hull[k - 2], hull[k - 1], pts[i - 1]) <= 0.0) --k;
    hull[k++] = pts[i - 1];
  }
  hull.resize(k - 1);
  return hull;
}

double polygon_area(const std::vector<Vector>& poly) {
  if (poly.size() < 3) return 0.0;
  double twice = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Vector& a = poly[i];
    const Vector& b = poly[(i + 1) % poly.size()];
    twice += a(0) * b(1) - b(0) * a(1);
  }
  return 0.5 * std::abs(twice);
}

void summarize(FdStatistics& s) {
  const auto n = s.areas.size();
  s.empty_count = static_cast<int>(std::count(s.empty.begin(), s.empty.end(), true));
  if (n == 0) return;
  s.mean = std::accumulate(s.areas.begin(), s.areas.end(), 0.0) / static_cast<double>(n);
  double ss = 0.0;
  for (double a : s.areas) ss += (a - s.mean) * (a - s.mean);
  s.stddev = n > 1 ? std::sqrt(ss / static_cast<double>(n - 1)) : 0.0;
  s.min = *std::min_element(s.areas.begin(), s.areas.end());
  s.max = *std::max_element(s.areas.begin(), s.areas.end());
}

FdStatistics feasible_domain_statistics(const ExperimentConfig& cfg, std::vector<FeasibleDomain>* keep_domains) {
  FdStatistics stats;
  for (int d = 0; d < cfg.fd_datasets; ++d) {
    FeasibleDomain fd;
    std::string note;
    try {
      const Pipeline p = build_pipeline(cfg, obtain_dataset(cfg, static_cast<std::uint64_t>(d)));
      fd = estimate_feasible_domain(*p.controller, cfg.grid);
    } catch (const Error& e) {
      // A dataset without a valid controller contributes an empty domain.
      note = e.what();
    }
    stats.areas.push_back(fd.area);
    stats.empty.push_back(fd.empty());
    stats.notes.push_back(note);
    if (keep_domains) keep_domains->push_back(std::move(fd));
  }
  summarize(stats);
  return stats;
}

}  // namespace impc::harness
