#pragma once

#include "impc/feasible_domain.hpp"
#include "impc/harness.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace impc::report {

/// Shortest decimal text that reads back to the same double.
std::string fmt(double v);

/// Accumulates RFC 4180 rows (CRLF terminated, quoted only when needed).
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header);
  CsvWriter& row(const std::vector<std::string>& cells);
  std::string str() const { return text_; }
  void save(const std::filesystem::path& path) const;

 private:
  std::size_t columns_;
  std::string text_;
};

/// k, x_1..x_n, u_1..u_m, n_star, j_star, in_terminal (the final state row has empty inputs).
std::string run_csv(const harness::RunRecord& run);

/// dataset_id, area, empty followed by mean and std summary rows.
std::string fd_statistics_csv(const harness::FdStatistics& stats);

/// x_1..x_n, feasible.
std::string fd_map_csv(const harness::FeasibleDomain& fd);

/// State-plane and time-series plots of several runs with the state box,
/// input bounds and the X_inf box.
std::string trajectories_svg(const std::vector<harness::RunRecord>& runs, const Polytope& state_set,
                             const Polytope& input_set, const setalg::Box& x_infinity,
                             const Polytope& terminal_set);

/// Feasible-domain hulls over the state box; the first domain's grid is drawn too.
std::string feasible_domain_svg(const std::vector<harness::FeasibleDomain>& domains, const Polytope& state_set);

void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace impc::report
