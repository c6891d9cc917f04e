#pragma once

namespace usd {

// Shared numerical thresholds. Every rank, positivity and equality
// decision in the library reads from one of these fields.
struct ToleranceContext {
  double rank_cutoff = 1e-10;       // relative to the largest eigen/singular value
  double rank_floor = 1e-12;        // absolute fallback when the operator is ~0
  double psd_floor = 1e-10;         // most negative admissible eigenvalue
  double hermitian = 1e-9;          // max |A - A^dagger|
  double equality = 1e-9;           // residual norms, cosines of principal angles
  double orthonormal = 1e-9;
  double idempotent = 1e-8;
};

}  // namespace usd
