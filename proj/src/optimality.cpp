#include "usd/optimality.hpp"

#include <algorithm>
#include <cmath>

#include "usd/reductions.hpp"

namespace usd {

namespace {

ConditionResult positive(const Matrix& m, const ToleranceContext& tol) {
  const PsdCheck c = check_psd(m, tol);
  return {c.holds, c.residual()};
}

ConditionResult vanishes(const Matrix& m, const ToleranceContext& tol) {
  const double r = m.norm();
  return {r <= tol.equality, r};
}

void require_proper_usd(const UsdMeasurement& m, const WeightedDensityPair& s) {
  require_same_dim(m.inconclusive, s.gamma1(), "measurement and pair differ in dimension");
  const UsdDiagnostics d = check_usd(m, s);
  if (!d.valid) raise(ErrorKind::not_proper, "measurement is not an unambiguous POVM for this pair");
  if (!is_proper(m, s)) raise(ErrorKind::not_proper, "detection elements leave supp S");
}

Matrix projector_between(const Subspace& own, const Subspace& not_parallel, const ToleranceContext& tol) {
  return intersect(own, not_parallel, tol).projector();
}

}  // namespace

std::vector<std::string> OptimalityReport::violated() const {
  std::vector<std::string> out;
  if (!cond_a1.holds) out.push_back("a1: lambda1 E(g2-g1)E lambda1 >= 0");
  if (!cond_a2.holds) out.push_back("a2: lambda2 E(g1-g2)E lambda2 >= 0");
  if (!cond_cross.holds) out.push_back("cross: lambda1 E(g2-g1)E lambda2 = 0");
  if (!cond_b.holds) out.push_back("b: (lambda1-lambda2) E(g2-g1)E (1-E) = 0");
  return out;
}

double OptimalityReport::max_residual() const {
  return std::max({cond_a1.residual, cond_a2.residual, cond_cross.residual, cond_b.residual});
}

OptimalityReport check_optimality(const UsdMeasurement& m, const WeightedDensityPair& s) {
  require_proper_usd(m, s);
  const auto& tol = s.tol();
  const Index n = s.dim();
  const Matrix& e = m.inconclusive;
  const Matrix core = e * (s.gamma2() - s.gamma1()) * e;
  OptimalityReport r;
  r.lambda1 = detection_range(s, 1);
  r.lambda2 = detection_range(s, 2);
  r.cond_a1 = positive(r.lambda1 * core * r.lambda1, tol);
  r.cond_a2 = positive(-(r.lambda2 * core * r.lambda2), tol);
  r.cond_cross = vanishes(r.lambda1 * core * r.lambda2, tol);
  r.cond_b = vanishes((r.lambda1 - r.lambda2) * core * (Matrix::Identity(n, n) - e), tol);
  r.is_optimal = r.cond_a1.holds && r.cond_a2.holds && r.cond_cross.holds && r.cond_b.holds;
  return r;
}

RankLawReport rank_law_check(const UsdMeasurement& m, const WeightedDensityPair& s) {
  const auto& tol = s.tol();
  const Subspace supp_e = support(m.inconclusive, tol);
  RankLawReport r;
  r.inconclusive_rank = supp_e.dim();
  r.product_rank = numerical_rank(s.gamma1() * s.gamma2(), tol);
  const Subspace common = s.kernel_total();
  r.common_kernel_dim = common.dim();
  r.rank_holds = r.inconclusive_rank == r.product_rank + r.common_kernel_dim;
  r.support_holds = true;
  for (const Subspace& k : {s.kernel1(), s.kernel2()}) {
    const Subspace meet = intersect(supp_e, k, tol);
    r.support_holds = r.support_holds && same_subspace(meet, common, tol);
  }
  return r;
}

Classification classify(const UsdMeasurement& m, const WeightedDensityPair& s) {
  const auto& tol = s.tol();
  Classification c;
  c.tag.rank1 = static_cast<int>(support(m.detect1, tol).dim());
  c.tag.rank2 = static_cast<int>(support(m.detect2, tol).dim());
  c.product_rank = numerical_rank(s.gamma1() * s.gamma2(), tol);
  auto idempotent = [&tol](const Matrix& p) { return (p * p - p).norm() <= tol.idempotent; };
  c.is_von_neumann = c.tag.rank1 + c.tag.rank2 == c.product_rank && idempotent(m.detect1) &&
                     idempotent(m.detect2) && idempotent(m.inconclusive);
  return c;
}

TypeClassCount count_types_classes(int r) {
  if (r < 0) raise(ErrorKind::precondition_violated, "negative rank");
  const long n = r;
  return {(n + 1) * (n + 2) / 2, (n + 2) * (n + 2) / 4};
}

ProjectivePartReport projective_part_law(const UsdMeasurement& m, const WeightedDensityPair& s) {
  const auto& tol = s.tol();
  if (intersect(s.support1(), s.support2(), tol).dim() != 0)
    raise(ErrorKind::precondition_violated, "supports of gamma1 and gamma2 intersect");
  const Index n = s.dim();
  const Matrix diff = s.gamma2() - s.gamma1();
  const Matrix core = m.inconclusive * diff * m.inconclusive;
  const Matrix p_supp = support(m.inconclusive, tol).projector();
  const Matrix p_fixed = kernel(Matrix::Identity(n, n) - m.inconclusive, tol).projector();
  ProjectivePartReport r;
  r.support_residual = (core - p_supp * diff * p_supp).norm();
  r.fixed_residual = (core - p_fixed * diff * p_fixed).norm();
  r.holds = r.support_residual <= 1e3 * tol.equality && r.fixed_residual <= 1e3 * tol.equality;
  return r;
}

double CertificateResiduals::max() const {
  return std::max({positivity, annihilation, block1, block2, coupling1, coupling2});
}

CertificateResiduals verify_certificate(const Matrix& z, const UsdMeasurement& m, const WeightedDensityPair& s) {
  const auto& tol = s.tol();
  const Matrix l1 = detection_range(s, 1);
  const Matrix l2 = detection_range(s, 2);
  CertificateResiduals r;
  r.positivity = check_psd(z, tol).residual();
  r.annihilation = (z * m.inconclusive).norm();
  r.block1 = check_psd(l1 * (z - s.gamma1()) * l1, tol).residual();
  r.block2 = check_psd(l2 * (z - s.gamma2()) * l2, tol).residual();
  r.coupling1 = (l1 * (z - s.gamma1()) * m.detect1).norm();
  r.coupling2 = (l2 * (z - s.gamma2()) * m.detect2).norm();
  return r;
}

CertificateZ build_certificate(const UsdMeasurement& m, const WeightedDensityPair& s, double acceptance) {
  const OptimalityReport report = check_optimality(m, s);
  if (!report.is_optimal)
    raise(ErrorKind::certificate_failure, "measurement fails the optimality conditions");
  const auto& tol = s.tol();
  const Index n = s.dim();
  const Matrix id = Matrix::Identity(n, n);

  // Pairs with parts of one support inside the other kernel are certified
  // after removing those parts and extending E to the identity there.
  const ProjectedPair skew = tau_skew(s);
  const WeightedDensityPair& t = skew.pair;
  const UsdMeasurement mt = complete_measurement(m.inconclusive + (id - skew.projector), t);

  const Matrix& e = mt.inconclusive;
  const Matrix& g1 = t.gamma1();
  const Matrix& g2 = t.gamma2();
  const Matrix l1 = detection_range(t, 1);
  const Matrix l2 = detection_range(t, 2);
  const Subspace not_parallel = sum(t.kernel1(), t.kernel2(), tol);

  auto oblique_or_zero = [&](const Matrix& from, const Matrix& to) -> Matrix {
    if (from.norm() == 0.0 && to.norm() == 0.0) return Matrix::Zero(n, n);
    return oblique_projector(from, to, tol).matrix();
  };

  Matrix q1;
  Matrix q2;
  Matrix r1;
  try {
    q1 = oblique_or_zero(l1, projector_between(t.support1(), not_parallel, tol));
    q2 = oblique_or_zero(l2, projector_between(t.support2(), not_parallel, tol));
    r1 = oblique_or_zero(t.kernel2().projector(), t.kernel1().projector());
  } catch (const Error& err) {
    raise(ErrorKind::certificate_failure, err.what());
  }

  const Matrix v1 = hermitian_part(l1 * e * (g2 - g1) * e * l1 + l1 * g1 * l1);
  const Matrix v2 = hermitian_part(l2 * e * (g1 - g2) * e * l2 + l2 * g2 * l2);
  const Matrix w1 = (r1 * (l1 - mt.detect1) + l2 * mt.detect1) * v1;
  const Matrix v1_inv = pseudo_inverse_hermitian(v1, tol);
  const Matrix tmap = q1 + q2 * w1 * v1_inv;

  CertificateZ cert;
  cert.z = hermitian_part(tmap * v1 * tmap.adjoint());
  cert.v1 = v1;
  cert.v2 = v2;
  cert.w12 = w1;
  cert.pair_projector = skew.projector;
  const Subspace v1_supp = support(v1, tol);
  if (v1_supp.dim() > 0) {
    const RealVector ev =
        Eigen::SelfAdjointEigenSolver<Matrix>(v1_supp.basis().adjoint() * v1 * v1_supp.basis()).eigenvalues();
    cert.v1_condition = ev.maxCoeff() / ev.minCoeff();
  }
  cert.residuals = verify_certificate(cert.z, mt, t);
  if (!(cert.residuals.max() <= acceptance))
    raise(ErrorKind::certificate_failure,
          "dual operator misses its conditions (residual " + std::to_string(cert.residuals.max()) + ")");
  return cert;
}

}  // namespace usd
