#pragma once

#include <optional>
#include <string>
#include <vector>

#include "usd/core.hpp"

namespace usd {

struct ConditionResult {
  bool holds = false;
  double residual = 0.0;
};

// Necessary and sufficient optimality conditions for a proper USD measurement,
// stated on the detection ranges lambda1 and lambda2.
struct OptimalityReport {
  ConditionResult cond_a1;     // lambda1 E (g2 - g1) E lambda1 >= 0
  ConditionResult cond_a2;     // lambda2 E (g1 - g2) E lambda2 >= 0
  ConditionResult cond_cross;  // lambda1 E (g2 - g1) E lambda2 = 0
  ConditionResult cond_b;      // (lambda1 - lambda2) E (g2 - g1) E (1 - E) = 0
  Matrix lambda1;
  Matrix lambda2;
  bool is_optimal = false;

  std::vector<std::string> violated() const;
  double max_residual() const;
};

OptimalityReport check_optimality(const UsdMeasurement& m, const WeightedDensityPair& s);

struct RankLawReport {
  Index inconclusive_rank = 0;
  Index product_rank = 0;       // rank gamma1 gamma2
  Index common_kernel_dim = 0;  // dim ker S
  bool rank_holds = false;
  bool support_holds = false;   // supp E ∩ ker gamma_mu = ker S for both mu
  bool holds() const { return rank_holds && support_holds; }
};
RankLawReport rank_law_check(const UsdMeasurement& m, const WeightedDensityPair& s);

struct Classification {
  MeasurementClassTag tag;
  Index product_rank = 0;
  bool is_von_neumann = false;
};
Classification classify(const UsdMeasurement& m, const WeightedDensityPair& s);

struct TypeClassCount {
  long types = 0;
  long classes = 0;
};
// Admissible types (e1, e2) with e1, e2 <= r <= e1 + e2, and their unordered classes.
TypeClassCount count_types_classes(int r);

struct ProjectivePartReport {
  double support_residual = 0.0;  // |E D E - P_supp(E) D P_supp(E)|
  double fixed_residual = 0.0;    // |E D E - P_ker(1-E) D P_ker(1-E)|
  bool holds = false;
};
// Requires supp gamma1 ∩ supp gamma2 = {0}.
ProjectivePartReport projective_part_law(const UsdMeasurement& m, const WeightedDensityPair& s);

struct CertificateResiduals {
  double positivity = 0.0;     // violation of Z >= 0
  double annihilation = 0.0;   // |Z E|
  double block1 = 0.0;         // violation of lambda1 (Z - g1) lambda1 >= 0
  double block2 = 0.0;
  double coupling1 = 0.0;      // |lambda1 (Z - g1) E1|
  double coupling2 = 0.0;
  double max() const;
};

// Dual operator witnessing optimality, built for the pair with its skew-orthogonal
// parts removed (`pair_projector` = 1 when nothing had to be removed).
struct CertificateZ {
  Matrix z;
  Matrix v1;
  Matrix v2;
  Matrix w12;
  double v1_condition = 0.0;
  Matrix pair_projector;
  CertificateResiduals residuals;
};

CertificateResiduals verify_certificate(const Matrix& z, const UsdMeasurement& m, const WeightedDensityPair& s);
CertificateZ build_certificate(const UsdMeasurement& m, const WeightedDensityPair& s,
                               double acceptance = 1e-7);

}  // namespace usd
