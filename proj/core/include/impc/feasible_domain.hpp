#pragma once

#include "impc/config.hpp"
#include "impc/rmpc.hpp"

#include <string>
#include <vector>

namespace impc::harness {

/// Tensor grid over the bounding box of `set` (endpoints included), first
/// coordinate varying slowest; points outside `set` are skipped.
std::vector<Vector> state_grid(const Polytope& set, const std::vector<int>& counts);

struct FeasibleDomain {
  std::vector<Vector> points;
  std::vector<bool> feasible;
  /// Convex hull of the feasible points (2-D only), counter-clockwise.
  std::vector<Vector> hull;
  double area = 0.0;

  int feasible_count() const;
  bool empty() const { return feasible_count() == 0; }
};

/// Marks each grid point feasible iff some horizon admits a feasible problem,
/// which is exactly when the variable-horizon solve succeeds.
FeasibleDomain estimate_feasible_domain(const rmpc::Controller& controller, const std::vector<int>& grid);

/// Convex hull (Andrew's monotone chain) of 2-D points, counter-clockwise,
/// collinear points dropped.
std::vector<Vector> convex_hull_2d(std::vector<Vector> points);
/// Shoelace area of a simple polygon.
double polygon_area(const std::vector<Vector>& polygon);

struct FdStatistics {
  std::vector<double> areas;
  std::vector<bool> empty;
  /// Reason when a dataset produced no controller (e.g. no terminal set).
  std::vector<std::string> notes;
  double mean = 0.0;
  double stddev = 0.0;
  double min = 0.0;
  double max = 0.0;
  int empty_count = 0;
};

/// Sample mean / standard deviation (n - 1 denominator) and extremes.
void summarize(FdStatistics& stats);

/// Feasible domain over cfg.fd_datasets independently generated datasets.
/// `keep_domains` receives the per-dataset domains when non-null.
FdStatistics feasible_domain_statistics(const ExperimentConfig& cfg,
                                        std::vector<FeasibleDomain>* keep_domains = nullptr);

}  // namespace impc::harness
