#include "usd/reductions.hpp"

#include <cmath>

namespace usd {

namespace {

WeightedDensityPair sandwich(const WeightedDensityPair& s, const Matrix& p) {
  return WeightedDensityPair(p * s.gamma1() * p, p * s.gamma2() * p, s.tol());
}

}  // namespace

double parallel_cosine_threshold(const ToleranceContext& tol) { return 1.0 - tol.equality; }

double orthogonal_cosine_threshold(const ToleranceContext& tol) {
  return std::sqrt(2.0 * tol.equality - tol.equality * tol.equality);
}

ProjectedPair tau_parallel(const WeightedDensityPair& s) {
  const Matrix p = sum(s.kernel1(), s.kernel2(), s.tol()).projector();
  return {sandwich(s, p), p};
}

ProjectedPair tau_skew(const WeightedDensityPair& s) {
  const auto& tol = s.tol();
  const Subspace left = sum(s.kernel1(), s.support2(), tol);
  const Subspace right = sum(s.kernel2(), s.support1(), tol);
  const Matrix p = intersect(left, right, tol).projector();
  return {sandwich(s, p), p};
}

ReductionRecord reduce_fully(const WeightedDensityPair& s) {
  const auto& tol = s.tol();
  const Index n = s.dim();
  const JordanBases jb = jordan_bases(s.support1(), s.support2());
  const double par = parallel_cosine_threshold(tol);
  const double orth = orthogonal_cosine_threshold(tol);
  const double par_warn = 1.0 - 10.0 * tol.equality;
  const double orth_warn = std::sqrt(20.0 * tol.equality);

  Matrix pi_par = Matrix::Zero(n, n);
  Matrix sigma1 = Matrix::Zero(n, n);
  Matrix sigma2 = Matrix::Zero(n, n);
  std::vector<std::string> warnings;
  const Index paired = jb.cosines.size();
  for (Index i = 0; i < paired; ++i) {
    const double c = jb.cosines(i);
    const Vector a = jb.basis_a.col(i);
    const Vector b = jb.basis_b.col(i);
    if (c >= par) {
      pi_par += a * a.adjoint();
    } else if (c <= orth) {
      sigma1 += a * a.adjoint();
      sigma2 += b * b.adjoint();
    }
    if ((c < par && c >= par_warn) || (c > orth && c <= orth_warn))
      warnings.push_back("Jordan cosine " + std::to_string(c) + " lies close to a classification threshold");
  }
  for (Index i = paired; i < jb.basis_a.cols(); ++i) sigma1 += jb.basis_a.col(i) * jb.basis_a.col(i).adjoint();
  for (Index i = paired; i < jb.basis_b.cols(); ++i) sigma2 += jb.basis_b.col(i) * jb.basis_b.col(i).adjoint();

  const ProjectedPair first = tau_parallel(s);
  const ProjectedPair second = tau_skew(first.pair);
  const double offset = ((sigma1 + sigma2) * s.total()).trace().real();
  const Matrix xi = Matrix::Identity(n, n) - pi_par - sigma1 - sigma2;
  return ReductionRecord{pi_par, sigma1, sigma2, xi, offset, second.pair, jb.cosines, std::move(warnings)};
}

bool is_strictly_skew(const WeightedDensityPair& s) {
  const auto& tol = s.tol();
  const Subspace s1 = s.support1();
  const Subspace s2 = s.support2();
  const Subspace k1 = s.kernel1();
  const Subspace k2 = s.kernel2();
  if (intersect(s1, s2, tol).dim() != 0 || intersect(k1, k2, tol).dim() != 0 ||
      intersect(s1, k2, tol).dim() != 0 || intersect(k1, s2, tol).dim() != 0)
    return false;
  const Index r1 = s1.dim();
  const Index r2 = s2.dim();
  const Index r12 = numerical_rank(s.gamma1() * s.gamma2(), tol);
  return numerical_rank(s.total(), tol) == r1 + r2 && r1 == r12 && r2 == r12;
}

UsdMeasurement lift_measurement(const UsdMeasurement& reduced, const ReductionRecord& record) {
  const Index n = record.xi.rows();
  if (reduced.dim() != n || reduced.detect1.rows() != n || reduced.detect2.rows() != n)
    raise(ErrorKind::incompatible_record, "measurement dimension differs from the reduction record");
  const Matrix removed = record.sigma1 + record.sigma2 + record.pi_parallel;
  const double leak = ((reduced.inconclusive - Matrix::Identity(n, n)) * removed).norm();
  if (leak > 1e3 * record.reduced_pair.tol().equality)
    raise(ErrorKind::incompatible_record,
          "inconclusive element is not the identity on the removed subspace (residual " +
              std::to_string(leak) + ")");
  return {reduced.detect1 + record.sigma1, reduced.detect2 + record.sigma2,
          reduced.inconclusive - record.sigma1 - record.sigma2};
}

}  // namespace usd
