#pragma once

#include <string>
#include <variant>
#include <vector>

#include "usd/outcome.hpp"

namespace usd {

enum class RejectReason { nu_ge_one, optimality_residual, inequality_a, inequality_b, not_psd, invalid_measurement };

std::string to_string(RejectReason r);

struct Rejection {
  RejectReason reason;
  double residual = 0.0;
  std::string detail;
};

using Finalized = std::variant<SolverOutcome, Rejection>;

// Candidate for a measurement of type (1,2) (host = 1) or (2,1) (host = 2):
// ker(1 - E) is spanned by `phi`, a unit vector in the support of gamma_host.
struct Candidate12 {
  int host = 1;
  Vector phi;
  Vector phi_perp;   // completes phi to a basis of supp gamma_host
  double x = 0.0;    // mixing parameter, 0 for basis-vector candidates
  bool from_root = false;
  double equation_residual = 0.0;
};

// Candidate for a von Neumann measurement of type (1,1).
struct Candidate11 {
  Vector psi1;       // detects gamma1, in ker gamma2
  Vector psi1_perp;
  Vector psi2;       // detects gamma2, in ker gamma1
  Vector psi2_perp;
  double x = 0.0;
  double angle = 0.0;
  int origin = 3;    // 1, 2: basis-vector candidates; 3: polynomial root
  double equation_residual = 0.0;
};

struct Candidates12 {
  std::vector<Candidate12> candidates;
  std::vector<std::string> warnings;
};

// All pairs below assume a strictly skew pair on C^4 with rank gamma_mu = 2.
Candidates12 enumerate_candidates_12(const WeightedDensityPair& s, int host = 1);
Finalized finalize_candidate_12(const Candidate12& c, const WeightedDensityPair& s);

// Throws degenerate_family when a continuum of admissible candidates appears.
std::vector<Candidate11> enumerate_candidates_11(const WeightedDensityPair& s);
Finalized finalize_candidate_11(const Candidate11& c, const WeightedDensityPair& s);

// Wraps a measurement into an outcome if it passes the optimality check.
Finalized certify(const UsdMeasurement& m, const WeightedDensityPair& s, Branch branch);

// Tries single-state detection, the fidelity form, types (1,2)/(2,1), then (1,1).
// Throws no_solution_found if none passes the optimality check.
SolverOutcome solve_4d(const WeightedDensityPair& s);

// Best passing candidate of every family; used to check that families exclude each other.
std::vector<SolverOutcome> solve_4d_all_families(const WeightedDensityPair& s);

}  // namespace usd
