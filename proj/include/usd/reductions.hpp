#pragma once

#include <string>
#include <vector>

#include "usd/core.hpp"

namespace usd {

struct ProjectedPair {
  WeightedDensityPair pair;
  Matrix projector;
};

// Removes the common support of gamma1 and gamma2.
ProjectedPair tau_parallel(const WeightedDensityPair& s);
// Removes the parts of each support lying in the other kernel.
ProjectedPair tau_skew(const WeightedDensityPair& s);

struct ReductionRecord {
  Matrix pi_parallel;   // onto supp gamma1 ∩ supp gamma2
  Matrix sigma1;        // onto supp gamma1 ∩ ker gamma2
  Matrix sigma2;        // onto supp gamma2 ∩ ker gamma1
  Matrix xi;            // 1 - pi_parallel - sigma1 - sigma2
  double lifted_offset = 0.0;  // tr[(sigma1 + sigma2)(gamma1 + gamma2)]
  WeightedDensityPair reduced_pair;
  RealVector cosines;           // Jordan cosines between the two supports
  std::vector<std::string> warnings;
};

ReductionRecord reduce_fully(const WeightedDensityPair& s);

// Supports and kernels pairwise in general position: supp1∩supp2, ker1∩ker2,
// supp1∩ker2 and ker1∩supp2 all trivial.
bool is_strictly_skew(const WeightedDensityPair& s);

// Measurement for the original pair built from one for the reduced pair.
UsdMeasurement lift_measurement(const UsdMeasurement& reduced, const ReductionRecord& record);

// Cosine above which two Jordan vectors are treated as parallel, and below which
// as orthogonal. Both match the principal-angle test used by `intersect`.
double parallel_cosine_threshold(const ToleranceContext& tol);
double orthogonal_cosine_threshold(const ToleranceContext& tol);

}  // namespace usd
