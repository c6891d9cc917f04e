#pragma once

#include <optional>
#include <vector>

#include "usd/oracle.hpp"
#include "usd/outcome.hpp"

namespace usd {

struct DispatchOptions {
  bool with_certificate = true;
  bool allow_oracle_fallback = true;
  OracleConfig oracle;
};

// Full solution procedure: strictly-skew test, reduction, closed forms, the
// four-dimensional solver, and the reference optimizer as a last resort.
SolverOutcome dispatch(const WeightedDensityPair& s, const DispatchOptions& opts = {});

// Success probability of the best single-state detection for the reduced pair,
// lifted back. Always achievable.
double single_detection_lower_bound(const WeightedDensityPair& s);

struct SweepRow {
  double p1 = 0.0;
  double success = 0.0;
  MeasurementClassTag tag;
  Branch branch = Branch::trivial;
  Status status = Status::optimal;
  double lower = 0.0;
  double upper = 0.0;
};

// Rows come back in grid order; evaluation runs concurrently.
std::vector<SweepRow> sweep(const Matrix& rho1, const Matrix& rho2, const std::vector<double>& grid,
                            const DispatchOptions& opts = {}, const ToleranceContext& tol = {});

std::vector<double> linear_grid(double lo, double hi, int steps);

struct ClassBoundary {
  double left = 0.0;   // last grid point of the earlier class
  double right = 0.0;  // first grid point of the later class
  MeasurementClassTag from;
  MeasurementClassTag to;
};
std::vector<ClassBoundary> class_boundaries(const std::vector<SweepRow>& rows);

}  // namespace usd
