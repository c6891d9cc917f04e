#pragma once

#include <string>

#include "usd/linalg.hpp"

namespace usd {

// Two PSD operators gamma_mu = p_mu rho_mu with tr(gamma_1 + gamma_2) <= 1.
class WeightedDensityPair {
 public:
  WeightedDensityPair(const Matrix& gamma1, const Matrix& gamma2, ToleranceContext tol = {});
  // gamma_1 = p1 rho1, gamma_2 = (1 - p1) rho2.
  static WeightedDensityPair from_states(const Matrix& rho1, const Matrix& rho2, double p1,
                                         ToleranceContext tol = {});

  const Matrix& gamma1() const noexcept { return gamma1_; }
  const Matrix& gamma2() const noexcept { return gamma2_; }
  const Matrix& gamma(int which) const { return which == 1 ? gamma1_ : gamma2_; }
  Index dim() const noexcept { return gamma1_.rows(); }
  const ToleranceContext& tol() const noexcept { return tol_; }

  Matrix total() const { return gamma1_ + gamma2_; }
  Subspace support1() const { return support(gamma1_, tol_); }
  Subspace support2() const { return support(gamma2_, tol_); }
  Subspace kernel1() const { return kernel(gamma1_, tol_); }
  Subspace kernel2() const { return kernel(gamma2_, tol_); }
  Subspace support_total() const { return support(total(), tol_); }
  Subspace kernel_total() const { return kernel(total(), tol_); }

  WeightedDensityPair swapped() const { return WeightedDensityPair(gamma2_, gamma1_, tol_); }
  WeightedDensityPair with_tolerance(const ToleranceContext& tol) const {
    return WeightedDensityPair(gamma1_, gamma2_, tol);
  }

 private:
  Matrix gamma1_;
  Matrix gamma2_;
  ToleranceContext tol_;
};

// POVM (detect1, detect2, inconclusive) with detect1 + detect2 + inconclusive = 1.
struct UsdMeasurement {
  Matrix detect1;
  Matrix detect2;
  Matrix inconclusive;

  Index dim() const noexcept { return inconclusive.rows(); }
  UsdMeasurement swapped() const { return {detect2, detect1, inconclusive}; }
};

// Ranks of the two detection operators. The class forgets their order.
struct MeasurementClassTag {
  int rank1 = 0;
  int rank2 = 0;

  int class_low() const { return rank1 < rank2 ? rank1 : rank2; }
  int class_high() const { return rank1 < rank2 ? rank2 : rank1; }
  std::string type_label() const;   // "(e1,e2)"
  std::string class_label() const;  // "[low,high]"
  bool operator==(const MeasurementClassTag&) const = default;
};

double success_probability(const UsdMeasurement& m, const WeightedDensityPair& s);

struct UsdDiagnostics {
  double completeness = 0.0;       // |detect1 + detect2 + inconclusive - 1|
  double error_first = 0.0;        // tr(detect2 gamma1)
  double error_second = 0.0;       // tr(detect1 gamma2)
  double worst_negativity = 0.0;   // most negative eigenvalue among the three elements
  bool valid = false;
};
UsdDiagnostics check_usd(const UsdMeasurement& m, const WeightedDensityPair& s);

bool is_proper(const UsdMeasurement& m, const WeightedDensityPair& s);

struct InconclusiveDiagnostics {
  double kernel_identity_residual = 0.0;  // |(E - 1) P_ker S|
  double lower_residual = 0.0;            // violation of E >= 0
  double upper_residual = 0.0;            // violation of E <= 1
  double coupling_residual = 0.0;         // |gamma1 (1 - E) gamma2|
  bool acts_as_identity_on_kernel = false;
  bool positive = false;
  bool bounded_by_identity = false;
  bool decouples = false;
  bool valid() const { return acts_as_identity_on_kernel && positive && bounded_by_identity && decouples; }
  std::string describe_failures() const;
};
InconclusiveDiagnostics validate_inconclusive(const Matrix& inconclusive, const WeightedDensityPair& s);

// Projector onto ker gamma_{other} intersected with supp S: the largest range of detect_{which}.
Matrix detection_range(const WeightedDensityPair& s, int which);

// Unique proper USD measurement with the given inconclusive element.
UsdMeasurement complete_measurement(const Matrix& inconclusive, const WeightedDensityPair& s);

struct Reconstruction {
  Matrix inconclusive;
  double clamped = 0.0;  // most negative eigenvalue clamped inside a square root
};
// Rebuilds the inconclusive element from core = E (gamma2 - gamma1) E.
Reconstruction reconstruct_from_core(const Matrix& core, const WeightedDensityPair& s);

struct KernelDecomposition {
  Subspace fixed;           // ker(1 - E)
  Subspace fixed_support1;  // ker(1 - E) within supp gamma1
  Subspace fixed_support2;  // ker(1 - E) within supp gamma2
  Subspace common_kernel;   // ker S
};
KernelDecomposition projective_kernel_decomposition(const Matrix& inconclusive, const WeightedDensityPair& s);

// Restriction to / extension from the subspace spanned by the orthonormal columns of `basis`.
WeightedDensityPair compress(const WeightedDensityPair& s, const Matrix& basis);
UsdMeasurement embed(const UsdMeasurement& m, const Matrix& basis);

}  // namespace usd
