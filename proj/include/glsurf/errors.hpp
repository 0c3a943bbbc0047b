#pragma once

#include <stdexcept>
#include <string>

namespace glsurf {

// Typed failures surfaced by the solvers and geometry pipeline.
// CLI maps usage_error -> exit 2, non_convergence -> exit 3, everything else -> 1.

struct usage_error : std::runtime_error {
  explicit usage_error(const std::string& m) : std::runtime_error(m) {}
};

struct degenerate_metric_error : std::runtime_error {
  explicit degenerate_metric_error(const std::string& m) : std::runtime_error(m) {}
};

struct non_convergence_error : std::runtime_error {
  double last_residual;
  non_convergence_error(const std::string& m, double r)
      : std::runtime_error(m + " (last residual " + std::to_string(r) + ")"), last_residual(r) {}
};

struct bracket_failure_error : std::runtime_error {
  explicit bracket_failure_error(const std::string& m) : std::runtime_error(m) {}
};

struct margin_out_of_range_error : std::runtime_error {
  explicit margin_out_of_range_error(const std::string& m) : std::runtime_error(m) {}
};

struct geometry_error : std::runtime_error {
  explicit geometry_error(const std::string& m) : std::runtime_error(m) {}
};

struct too_few_cells_error : std::runtime_error {
  explicit too_few_cells_error(const std::string& m) : std::runtime_error(m) {}
};

struct collar_coverage_error : std::runtime_error {
  explicit collar_coverage_error(const std::string& m) : std::runtime_error(m) {}
};

struct empty_region_error : std::runtime_error {
  explicit empty_region_error(const std::string& m) : std::runtime_error(m) {}
};

struct zero_on_boundary_error : std::runtime_error {
  explicit zero_on_boundary_error(const std::string& m) : std::runtime_error(m) {}
};

struct eigensolver_error : std::runtime_error {
  explicit eigensolver_error(const std::string& m) : std::runtime_error(m) {}
};

} // namespace glsurf
