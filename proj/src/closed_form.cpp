#include "usd/closed_form.hpp"

#include <algorithm>
#include <cmath>

namespace usd {

namespace {

void require_disjoint_supports(const WeightedDensityPair& s) {
  if (intersect(s.support1(), s.support2(), s.tol()).dim() != 0)
    raise(ErrorKind::precondition_violated, "supports of gamma1 and gamma2 intersect");
}

// Inverse square root of a PSD operator restricted to its support, in support coordinates.
Matrix inv_sqrt_on(const Subspace& sub, const Matrix& op) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(sub.basis().adjoint() * op * sub.basis()));
  const RealVector inv = es.eigenvalues().cwiseMax(0.0).cwiseSqrt().cwiseInverse();
  return es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().adjoint();
}

// Smallest eigenvalue of g^{-1/2} op g^{-1/2} on supp g. Scale-free version of
// the test op >= 0 on supp g.
double whitened_min(const Subspace& supp, const Matrix& g, const Matrix& op) {
  if (supp.is_zero()) return 0.0;
  const Matrix w = inv_sqrt_on(supp, g);
  return min_eigenvalue(hermitian_part(w * supp.basis().adjoint() * op * supp.basis() * w));
}

}  // namespace

std::string to_string(Branch b) {
  switch (b) {
    case Branch::trivial: return "trivial";
    case Branch::single_detect_gamma2: return "single_detect_gamma2";
    case Branch::single_detect_gamma1: return "single_detect_gamma1";
    case Branch::fidelity_form: return "fidelity_form";
    case Branch::class12: return "class12";
    case Branch::class21: return "class21";
    case Branch::class11: return "class11";
    case Branch::oracle_fallback: return "oracle_fallback";
  }
  return "unknown";
}

std::optional<ClosedFormResult> try_single_state_detection(const WeightedDensityPair& s) {
  require_disjoint_supports(s);
  const auto& tol = s.tol();
  const Index n = s.dim();
  const Matrix id = Matrix::Identity(n, n);
  for (int detected : {2, 1}) {
    const int silent = 3 - detected;
    const Matrix& gs = s.gamma(silent);
    const double margin = whitened_min(support(gs, tol), gs, s.gamma(detected) - gs);
    if (margin <= -tol.psd_floor) continue;
    const Matrix range = detection_range(s, detected);
    UsdMeasurement m = detected == 2 ? UsdMeasurement{Matrix::Zero(n, n), range, id - range}
                                     : UsdMeasurement{range, Matrix::Zero(n, n), id - range};
    ClosedFormResult r{std::move(m), 0.0,
                       detected == 2 ? Branch::single_detect_gamma2 : Branch::single_detect_gamma1, margin,
                       std::abs(margin) <= 10.0 * tol.psd_floor};
    r.success = success_probability(r.measurement, s);
    return r;
  }
  return std::nullopt;
}

std::optional<ClosedFormResult> try_fidelity_form(const WeightedDensityPair& s) {
  require_disjoint_supports(s);
  const auto& tol = s.tol();
  const Matrix& g1 = s.gamma1();
  const Matrix& g2 = s.gamma2();
  const Matrix r1 = sqrt_psd(g1, tol);
  const Matrix r2 = sqrt_psd(g2, tol);
  const Matrix f1 = sqrt_psd(hermitian_part(r1 * g2 * r1), tol);
  const Matrix f2 = sqrt_psd(hermitian_part(r2 * g1 * r2), tol);
  const double margin = std::min(whitened_min(s.support1(), g1, g1 - f1), whitened_min(s.support2(), g2, g2 - f2));
  if (margin <= -tol.psd_floor) return std::nullopt;

  const Matrix inv = pseudo_inverse_hermitian(s.total(), tol);
  const Matrix bracket = g1 * g2 + g2 * g1 + r1 * f1 * r1 + r2 * f2 * r2;
  const Matrix e = hermitian_part(s.kernel_total().projector() + inv * bracket * inv);
  ClosedFormResult r{complete_measurement(e, s), 0.0, Branch::fidelity_form, margin,
                     std::abs(margin) <= 10.0 * tol.psd_floor};
  r.success = success_probability(r.measurement, s);
  return r;
}

Matrix fidelity_form_factor(const WeightedDensityPair& s) {
  const auto& tol = s.tol();
  const Matrix r1 = sqrt_psd(s.gamma1(), tol);
  const Matrix r2 = sqrt_psd(s.gamma2(), tol);
  Eigen::JacobiSVD<Matrix> svd(r1 * r2, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Matrix u = svd.matrixV() * svd.matrixU().adjoint();
  const Matrix f1 = sqrt_psd(hermitian_part(r1 * s.gamma2() * r1), tol);
  return pseudo_inverse_hermitian(s.total(), tol) * (r1 + r2 * u) * sqrt_psd(f1, tol);
}

bool ProbabilityWindow::contains(double p1, double slack) const {
  return !empty && p1 >= lower - slack && p1 <= upper + slack;
}

ProbabilityWindow single_detection_window(const Matrix& rho1, const Matrix& rho2, int detected,
                                          const ToleranceContext& tol) {
  require_same_dim(rho1, rho2, "states differ in dimension");
  const Matrix& silent = detected == 2 ? rho1 : rho2;
  const Matrix& other = detected == 2 ? rho2 : rho1;
  const Subspace supp = support(silent, tol);
  ProbabilityWindow w;
  w.kind = detected == 2 ? WindowKind::single_detect_gamma2 : WindowKind::single_detect_gamma1;
  if (supp.is_zero()) return w;
  const Matrix root_inv = inv_sqrt_on(supp, silent);
  const Matrix ratio = root_inv * supp.basis().adjoint() * other * supp.basis() * root_inv;
  const double lambda = min_eigenvalue(ratio);
  w.spectral_quantity = lambda;
  if (lambda <= std::max(tol.rank_cutoff * max_eigenvalue(ratio), tol.rank_floor)) return w;
  const double edge = lambda / (1.0 + lambda);
  w.empty = false;
  w.lower = detected == 2 ? 0.0 : 1.0 - edge;
  w.upper = detected == 2 ? edge : 1.0;
  return w;
}

ProbabilityWindow fidelity_window(const Matrix& rho1, const Matrix& rho2, const ToleranceContext& tol) {
  require_same_dim(rho1, rho2, "states differ in dimension");
  auto edge = [&tol](const Matrix& a, const Matrix& b) {
    const Subspace supp = support(a, tol);
    if (supp.is_zero()) return 0.0;
    const Matrix root = sqrt_psd(a, tol);
    const Matrix fid = sqrt_psd(hermitian_part(root * b * root), tol);
    const Matrix root_inv = inv_sqrt_on(supp, a);
    const double mu = max_eigenvalue(root_inv * supp.basis().adjoint() * fid * supp.basis() * root_inv);
    return mu;
  };
  ProbabilityWindow w;
  w.kind = WindowKind::fidelity_form;
  const double mu1 = edge(rho1, rho2);
  const double mu2 = edge(rho2, rho1);
  const double m1 = mu1 * mu1 / (1.0 + mu1 * mu1);
  const double m2 = mu2 * mu2 / (1.0 + mu2 * mu2);
  w.spectral_quantity = mu1;
  w.lower = m1;
  w.upper = 1.0 - m2;
  w.empty = m1 + m2 > 1.0;
  return w;
}

double fidelity_bound(const WeightedDensityPair& s) {
  const Matrix r1 = sqrt_psd(s.gamma1(), s.tol());
  const Matrix r2 = sqrt_psd(s.gamma2(), s.tol());
  return real_trace(s.total()) - 2.0 * trace_norm(r1 * r2);
}

double single_detection_value(const WeightedDensityPair& s) {
  return std::max(real_trace(detection_range(s, 2) * s.gamma2()), real_trace(detection_range(s, 1) * s.gamma1()));
}

}  // namespace usd
