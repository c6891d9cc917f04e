#include "usd/core.hpp"

#include <algorithm>
#include <cmath>

namespace usd {

WeightedDensityPair::WeightedDensityPair(const Matrix& gamma1, const Matrix& gamma2, ToleranceContext tol)
    : tol_(tol) {
  require_square(gamma1, "gamma1");
  require_square(gamma2, "gamma2");
  require_same_dim(gamma1, gamma2, "gamma1 and gamma2 differ in dimension");
  require_hermitian(gamma1, tol, "gamma1");
  require_hermitian(gamma2, tol, "gamma2");
  gamma1_ = hermitian_part(gamma1);
  gamma2_ = hermitian_part(gamma2);
  if (min_eigenvalue(gamma1_) < -tol.psd_floor || min_eigenvalue(gamma2_) < -tol.psd_floor)
    raise(ErrorKind::not_psd, "weighted operators must be positive semidefinite");
  if (real_trace(gamma1_) + real_trace(gamma2_) > 1.0 + tol.equality)
    raise(ErrorKind::invalid_pair, "tr(gamma1 + gamma2) exceeds 1");
}

WeightedDensityPair WeightedDensityPair::from_states(const Matrix& rho1, const Matrix& rho2, double p1,
                                                     ToleranceContext tol) {
  if (!(p1 >= 0.0 && p1 <= 1.0)) raise(ErrorKind::invalid_pair, "prior outside [0, 1]");
  return WeightedDensityPair(p1 * rho1, (1.0 - p1) * rho2, tol);
}

std::string MeasurementClassTag::type_label() const {
  return "(" + std::to_string(rank1) + "," + std::to_string(rank2) + ")";
}

std::string MeasurementClassTag::class_label() const {
  return "[" + std::to_string(class_low()) + "," + std::to_string(class_high()) + "]";
}

double success_probability(const UsdMeasurement& m, const WeightedDensityPair& s) {
  require_same_dim(m.inconclusive, s.gamma1(), "measurement and pair differ in dimension");
  return (m.detect1 * s.gamma1()).trace().real() + (m.detect2 * s.gamma2()).trace().real();
}

UsdDiagnostics check_usd(const UsdMeasurement& m, const WeightedDensityPair& s) {
  const auto& tol = s.tol();
  UsdDiagnostics d;
  const Index n = s.dim();
  d.completeness = (m.detect1 + m.detect2 + m.inconclusive - Matrix::Identity(n, n)).norm();
  d.error_first = std::abs((m.detect2 * s.gamma1()).trace());
  d.error_second = std::abs((m.detect1 * s.gamma2()).trace());
  d.worst_negativity = std::min(
      {min_eigenvalue(m.detect1), min_eigenvalue(m.detect2), min_eigenvalue(m.inconclusive), 0.0});
  d.valid = d.completeness <= tol.equality && d.error_first <= tol.equality &&
            d.error_second <= tol.equality && d.worst_negativity > -tol.psd_floor &&
            is_hermitian(m.detect1, tol.hermitian) && is_hermitian(m.detect2, tol.hermitian);
  return d;
}

bool is_proper(const UsdMeasurement& m, const WeightedDensityPair& s) {
  const Matrix outside = s.kernel_total().projector();
  return ((m.detect1 + m.detect2) * outside).norm() <= s.tol().equality;
}

std::string InconclusiveDiagnostics::describe_failures() const {
  std::string out;
  auto add = [&out](bool ok, const char* name, double r) {
    if (ok) return;
    if (!out.empty()) out += "; ";
    out += std::string(name) + " (residual " + std::to_string(r) + ")";
  };
  add(acts_as_identity_on_kernel, "not identity on ker S", kernel_identity_residual);
  add(positive, "not positive", lower_residual);
  add(bounded_by_identity, "exceeds identity", upper_residual);
  add(decouples, "gamma1 (1 - E) gamma2 != 0", coupling_residual);
  return out;
}

InconclusiveDiagnostics validate_inconclusive(const Matrix& inconclusive, const WeightedDensityPair& s) {
  require_same_dim(inconclusive, s.gamma1(), "inconclusive element and pair differ in dimension");
  const auto& tol = s.tol();
  const Index n = s.dim();
  const Matrix id = Matrix::Identity(n, n);
  InconclusiveDiagnostics d;
  d.kernel_identity_residual = ((inconclusive - id) * s.kernel_total().projector()).norm();
  const PsdCheck lower = check_psd(inconclusive, tol);
  const PsdCheck upper = check_psd(id - inconclusive, tol);
  d.lower_residual = lower.residual();
  d.upper_residual = upper.residual();
  d.coupling_residual = (s.gamma1() * (id - inconclusive) * s.gamma2()).norm();
  d.acts_as_identity_on_kernel = d.kernel_identity_residual <= tol.equality;
  d.positive = lower.holds;
  d.bounded_by_identity = upper.holds;
  d.decouples = d.coupling_residual <= tol.equality;
  return d;
}

Matrix detection_range(const WeightedDensityPair& s, int which) {
  const Subspace other_kernel = which == 1 ? s.kernel2() : s.kernel1();
  return intersect(other_kernel, s.support_total(), s.tol()).projector();
}

UsdMeasurement complete_measurement(const Matrix& inconclusive, const WeightedDensityPair& s) {
  const InconclusiveDiagnostics diag = validate_inconclusive(inconclusive, s);
  if (!diag.valid()) raise(ErrorKind::invalid_inconclusive, diag.describe_failures());
  const auto& tol = s.tol();
  const Index n = s.dim();
  const Matrix id = Matrix::Identity(n, n);
  const Subspace not_parallel = sum(s.kernel1(), s.kernel2(), tol);
  const Matrix rest = id - inconclusive;

  auto detect = [&](int which) -> Matrix {
    const Matrix range = detection_range(s, which);
    const Subspace own = which == 1 ? s.support1() : s.support2();
    const Matrix target = intersect(own, not_parallel, tol).projector();
    if (range.norm() == 0.0 && target.norm() == 0.0) return Matrix::Zero(n, n);
    const Matrix q = oblique_projector(range, target, tol).matrix();
    return hermitian_part(q.adjoint() * rest * q);
  };

  UsdMeasurement m{detect(1), detect(2), hermitian_part(inconclusive)};
  const double gap = (m.detect1 + m.detect2 + m.inconclusive - id).norm();
  if (gap > 1e3 * tol.equality)
    raise(ErrorKind::invalid_inconclusive, "completion does not resolve the identity (gap " +
                                               std::to_string(gap) + ")");
  return m;
}

Reconstruction reconstruct_from_core(const Matrix& core, const WeightedDensityPair& s) {
  require_same_dim(core, s.gamma1(), "core and pair differ in dimension");
  const auto& tol = s.tol();
  const Matrix& g1 = s.gamma1();
  const Matrix& g2 = s.gamma2();
  const Matrix r1 = sqrt_psd(g1, tol);
  const Matrix r2 = sqrt_psd(g2, tol);
  const Matrix inv = pseudo_inverse_hermitian(s.total(), tol);

  Reconstruction out;
  auto inner_root = [&](const Matrix& root, const Matrix& arg) -> Matrix {
    double clamped = 0.0;
    try {
      const Matrix r = sqrt_psd(hermitian_part(root * arg * root), tol, clamped);
      out.clamped = std::min(out.clamped, clamped);
      return root * r * root;
    } catch (const Error& e) {
      raise(ErrorKind::not_reconstructible, e.what());
    }
  };
  const Matrix bracket = g1 * g2 + g2 * g1 + inner_root(r1, g2 - core) + inner_root(r2, g1 + core);
  out.inconclusive = hermitian_part(s.kernel_total().projector() + inv * bracket * inv);
  return out;
}

KernelDecomposition projective_kernel_decomposition(const Matrix& inconclusive, const WeightedDensityPair& s) {
  require_same_dim(inconclusive, s.gamma1(), "inconclusive element and pair differ in dimension");
  const auto& tol = s.tol();
  const Index n = s.dim();
  KernelDecomposition k;
  k.fixed = kernel(Matrix::Identity(n, n) - inconclusive, tol);
  k.fixed_support1 = intersect(k.fixed, s.support1(), tol);
  k.fixed_support2 = intersect(k.fixed, s.support2(), tol);
  k.common_kernel = s.kernel_total();
  return k;
}

WeightedDensityPair compress(const WeightedDensityPair& s, const Matrix& basis) {
  return WeightedDensityPair(basis.adjoint() * s.gamma1() * basis, basis.adjoint() * s.gamma2() * basis,
                             s.tol());
}

UsdMeasurement embed(const UsdMeasurement& m, const Matrix& basis) {
  const Index n = basis.rows();
  const Matrix outside = Matrix::Identity(n, n) - basis * basis.adjoint();
  return {basis * m.detect1 * basis.adjoint(), basis * m.detect2 * basis.adjoint(),
          basis * m.inconclusive * basis.adjoint() + outside};
}

}  // namespace usd
