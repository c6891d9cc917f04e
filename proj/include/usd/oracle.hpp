#pragma once

#include <cstdint>
#include <vector>

#include "usd/core.hpp"

namespace usd {

// Reference optimizer over all proper USD measurements, independent of the
// closed forms and the structural theory. It maximizes tr(E1 g1) + tr(E2 g2)
// with E1 on ker g2 ∩ supp S, E2 on ker g1 ∩ supp S and E1 + E2 <= 1, using a
// log-det barrier path followed by damped Newton steps in extended precision.
struct OracleConfig {
  std::uint64_t seed = 1;
  int restarts = 1;
  long max_iters = 200000;         // Newton steps per restart
  double convergence_tol = 1e-8;   // required certified gap at termination
  double gap_tol = 1e-13;          // target barrier gap
};

struct OracleResult {
  UsdMeasurement measurement;
  double success = 0.0;
  double gap = 0.0;                        // certified suboptimality bound
  long iterations = 0;
  bool converged = false;
  std::vector<double> objective_history;   // success after each centering, first restart
  std::vector<double> restart_successes;
  std::vector<double> restart_distances;   // |E_r - E_0| for every restart r
  std::vector<Matrix> restart_inconclusive;
};

// Throws non_convergence when the first restart does not converge.
OracleResult oracle_optimize(const WeightedDensityPair& s, const OracleConfig& cfg = {});

struct UniquenessReport {
  bool unique = false;
  bool all_converged = false;
  double max_distance = 0.0;           // largest pairwise |E_i - E_j|
  std::vector<double> distances;       // all pairwise distances
};
// Restarts use different random starts and barrier weights; distinct optima
// on a non-trivial optimal face show up as distinct limits.
UniquenessReport uniqueness_probe(const WeightedDensityPair& s, const OracleConfig& cfg);

// Dykstra projection of `guess` onto the proper USD inconclusive elements:
// {E : E = 1 on ker S, 0 <= E <= 1, gamma1 (1 - E) gamma2 = 0}.
Matrix feasibility_projection(const WeightedDensityPair& s, const Matrix& guess, long max_iters = 50000,
                              double tol = 1e-15);

}  // namespace usd
