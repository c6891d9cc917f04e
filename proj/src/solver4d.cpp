#include "usd/solver4d.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "usd/polynomial.hpp"
#include "usd/reductions.hpp"

namespace usd {

namespace {

constexpr double kRealRootTol = 1e-8;
constexpr double kEquationTol = 1e-8;

cplx braket(const Vector& a, const Matrix& op, const Vector& b) { return a.dot(op * b); }

double expectation(const Vector& a, const Matrix& op) { return braket(a, op, a).real(); }

void require_four_dim_skew(const WeightedDensityPair& s) {
  if (s.dim() != 4) raise(ErrorKind::precondition_violated, "pair must act on C^4");
  if (!is_strictly_skew(s)) raise(ErrorKind::precondition_violated, "pair is not strictly skew");
  if (s.support1().dim() != 2 || s.support2().dim() != 2)
    raise(ErrorKind::precondition_violated, "both operators must have rank 2");
}

}  // namespace

Finalized certify(const UsdMeasurement& m, const WeightedDensityPair& s, Branch branch) {
  UsdDiagnostics diag = check_usd(m, s);
  if (!diag.valid || !is_proper(m, s))
    return Rejection{RejectReason::invalid_measurement, diag.completeness, "not a proper USD measurement"};
  OptimalityReport report = check_optimality(m, s);
  if (!report.is_optimal)
    return Rejection{RejectReason::optimality_residual, report.max_residual(), ""};
  SolverOutcome out;
  out.measurement = m;
  out.tag = classify(m, s).tag;
  out.success = success_probability(m, s);
  out.branch = branch;
  out.status = Status::optimal;
  out.report = std::move(report);
  return out;
}

namespace {

// Orthonormal basis {first, second} of supp gamma_host with gamma_host diagonal
// (descending) and <first|gamma_other|second> >= 0.
struct HostBasis {
  Vector first;
  Vector second;
  double h1 = 0, h2 = 0;   // gamma_host diagonal
  double o1 = 0, o2 = 0;   // gamma_other diagonal
  double off = 0;          // <first|gamma_other|second>
};

HostBasis host_basis(const Matrix& host, const Matrix& other, const ToleranceContext& tol) {
  const Subspace supp = support(host, tol);
  const Matrix& b = supp.basis();
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(b.adjoint() * host * b));
  HostBasis hb;
  hb.first = b * es.eigenvectors().col(1);
  hb.second = b * es.eigenvectors().col(0);
  const double spread = es.eigenvalues()(1) - es.eigenvalues()(0);
  if (spread <= tol.equality * std::max(1.0, es.eigenvalues()(1))) {
    // Degenerate: any basis diagonalizes gamma_host, pick one diagonalizing gamma_other.
    Eigen::SelfAdjointEigenSolver<Matrix> eo(hermitian_part(b.adjoint() * other * b));
    hb.first = b * eo.eigenvectors().col(1);
    hb.second = b * eo.eigenvectors().col(0);
  }
  const cplx off = braket(hb.first, other, hb.second);
  if (std::abs(off) > 0.0) hb.second *= std::conj(off) / std::abs(off);
  hb.h1 = expectation(hb.first, host);
  hb.h2 = expectation(hb.second, host);
  hb.o1 = expectation(hb.first, other);
  hb.o2 = expectation(hb.second, other);
  hb.off = braket(hb.first, other, hb.second).real();
  return hb;
}

// sqrt<perp|g1|perp> <perp|g2|phi> - sqrt<perp|g2|perp> <perp|g1|phi> on the host-ordered pair.
double equation12_residual(const Vector& phi, const Vector& perp, const Matrix& host, const Matrix& other) {
  const double a = std::sqrt(std::max(0.0, expectation(perp, host)));
  const double b = std::sqrt(std::max(0.0, expectation(perp, other)));
  return std::abs(a * braket(perp, other, phi) - b * braket(perp, host, phi));
}

}  // namespace

std::string to_string(Status s) { return s == Status::optimal ? "optimal" : "best_known"; }

std::string to_string(RejectReason r) {
  switch (r) {
    case RejectReason::nu_ge_one: return "nu_ge_one";
    case RejectReason::optimality_residual: return "optimality_residual";
    case RejectReason::inequality_a: return "inequality_a";
    case RejectReason::inequality_b: return "inequality_b";
    case RejectReason::not_psd: return "not_psd";
    case RejectReason::invalid_measurement: return "invalid_measurement";
  }
  return "unknown";
}

Candidates12 enumerate_candidates_12(const WeightedDensityPair& s, int host) {
  require_four_dim_skew(s);
  const auto& tol = s.tol();
  const Matrix& gh = s.gamma(host);
  const Matrix& go = s.gamma(3 - host);
  const HostBasis hb = host_basis(gh, go, tol);
  const double dh = hb.h1 - hb.h2;
  const double d_o = hb.o1 - hb.o2;
  Candidates12 out;

  if (std::abs(hb.off) <= tol.equality) {
    if (hb.o1 - hb.h1 >= -tol.psd_floor) out.candidates.push_back({host, hb.first, hb.second, 0.0, false, 0.0});
    if (hb.o2 - hb.h2 >= -tol.psd_floor) out.candidates.push_back({host, hb.second, hb.first, 0.0, false, 0.0});
    const double den = dh * dh * hb.o1 - d_o * d_o * hb.h1;
    if (den != 0.0) {
      const double x2 = (d_o * d_o * hb.h2 - dh * dh * hb.o2) / den;
      if (x2 > tol.equality && std::isfinite(x2))
        out.warnings.push_back("discarded mixed solution x^2 = " + std::to_string(x2) +
                               " of the decoupled equation");
    }
    for (auto& c : out.candidates) c.equation_residual = equation12_residual(c.phi, c.phi_perp, gh, go);
    return out;
  }

  // x^2 dh^2 (x^2 o1 + o2 - 2 x off) - (x d_o + (x^2 - 1) off)^2 (x^2 h1 + h2)
  const Polynomial x{0.0, 1.0};
  const Polynomial lhs = (dh * dh) * (x * x) * (hb.o1 * (x * x) + Polynomial{hb.o2} - (2.0 * hb.off) * x);
  const Polynomial inner = d_o * x + hb.off * (x * x - Polynomial{1.0});
  const Polynomial rhs = inner * inner * (hb.h1 * (x * x) + Polynomial{hb.h2});
  const Polynomial p = lhs - rhs;
  for (double r : p.real_roots(kRealRootTol)) {
    if (std::abs(r) <= 1e-12) continue;
    if (r * dh * (r * d_o + hb.off * (r * r - 1.0)) < -tol.equality) continue;
    const double norm = std::sqrt(1.0 + r * r);
    const Vector phi = (hb.first + r * hb.second) / norm;
    const Vector perp = (r * hb.first - hb.second) / norm;
    if (expectation(phi, go) - expectation(phi, gh) < -tol.psd_floor) continue;
    const double res = equation12_residual(phi, perp, gh, go);
    if (res > kEquationTol) continue;
    out.candidates.push_back({host, phi, perp, r, true, res});
  }
  return out;
}

Finalized finalize_candidate_12(const Candidate12& c, const WeightedDensityPair& s) {
  const auto& tol = s.tol();
  const WeightedDensityPair hs = c.host == 1 ? s : s.swapped();
  const Matrix& gh = hs.gamma1();
  const Matrix& go = hs.gamma2();
  const double on_host = expectation(c.phi_perp, gh);
  const double on_other = expectation(c.phi_perp, go);
  if (on_host <= 0.0 || on_other <= 0.0)
    return Rejection{RejectReason::invalid_measurement, 0.0, "degenerate complement direction"};
  const double ratio = std::sqrt(on_other / on_host);  // a / b
  const double q = std::sqrt(ratio);
  const Matrix k = pseudo_inverse_hermitian(hs.total(), tol) * (q * gh + go / q);
  const Vector n = k * c.phi_perp;
  const double nu = n.squaredNorm();
  if (nu >= 1.0) return Rejection{RejectReason::nu_ge_one, nu - 1.0, ""};
  const Matrix e = hermitian_part(n * n.adjoint() + c.phi * c.phi.adjoint());
  UsdMeasurement m;
  try {
    m = complete_measurement(e, hs);
  } catch (const Error& err) {
    return Rejection{RejectReason::invalid_measurement, 0.0, err.what()};
  }
  if (c.host == 2) m = m.swapped();
  return certify(m, s, c.host == 1 ? Branch::class12 : Branch::class21);
}

std::vector<Candidate11> enumerate_candidates_11(const WeightedDensityPair& s) {
  require_four_dim_skew(s);
  const auto& tol = s.tol();
  const Matrix& g1 = s.gamma1();
  const Matrix& g2 = s.gamma2();
  const JordanBases jb = jordan_bases(s.kernel1(), s.kernel2(), &g1, tol.equality);
  Vector k11 = jb.basis_a.col(0), k12 = jb.basis_a.col(1);
  Vector k21 = jb.basis_b.col(0), k22 = jb.basis_b.col(1);
  const double sig1 = jb.cosines(0);
  const double sig2 = jb.cosines(1);

  // Common phase of (k12, k22) fixing g13 e^{i phi} and g23 e^{-i phi}.
  const double tiny = tol.equality;
  const cplx raw1 = braket(k21, g1, k22);
  const cplx raw2 = braket(k11, g2, k12);
  const double g13 = std::abs(raw1);
  const double g23 = std::abs(raw2);
  double phase = 0.0;
  double shift = 0.0;
  if (g13 > tiny && g23 > tiny) {
    phase = std::fmod((std::arg(raw1) - std::arg(raw2)) / 2.0, std::numbers::pi);
    if (phase < 0) phase += std::numbers::pi;
    shift = phase - std::arg(raw1);
  } else if (g13 > tiny) {
    shift = -std::arg(raw1);
  } else if (g23 > tiny) {
    shift = -std::arg(raw2);
  }
  const cplx rot = std::polar(1.0, shift);
  k12 *= rot;
  k22 *= rot;

  const double c = sig2 / sig1;
  const double g11 = expectation(k21, g1), g12 = expectation(k22, g1);
  const double g21 = expectation(k11, g2), g22 = expectation(k12, g2);
  const double dg1 = g11 - g12;
  const double dg2 = g21 - g22;
  const double cphi = std::cos(phase);
  const double sphi = std::sin(phase);

  auto residual = [&](const Candidate11& k) {
    const cplx lhs = k.psi2_perp.dot(k.psi1) * braket(k.psi1, g1, k.psi1_perp);
    const cplx rhs = k.psi2.dot(k.psi1_perp) * braket(k.psi2_perp, g2, k.psi2);
    return std::abs(lhs - rhs);
  };
  auto build = [&](double xv, double theta) {
    const cplx e = std::polar(1.0, theta);
    Candidate11 k;
    const double n1 = std::sqrt(1.0 + xv * xv);
    const double n2 = std::sqrt(1.0 + c * c * xv * xv);
    k.psi1 = (k21 + xv * e * k22) / n1;
    k.psi1_perp = (xv * std::conj(e) * k21 - k22) / n1;
    k.psi2 = (-xv * std::conj(e) * c * k11 + k12) / n2;
    k.psi2_perp = (-k11 - xv * e * c * k12) / n2;
    k.x = xv;
    k.angle = theta;
    k.origin = 3;
    k.equation_residual = residual(k);
    return k;
  };

  std::vector<Candidate11> out;
  if (std::abs(sphi) <= tiny) {
    if (std::abs(c * g23 - g13) <= tol.equality) {
      Candidate11 k{k21, k22, k12, k11, 0.0, 0.0, 1, 0.0};
      k.equation_residual = residual(k);
      out.push_back(k);
    }
    if (std::abs(c * g13 - g23) <= tol.equality) {
      Candidate11 k{k22, k21, k11, k12, 0.0, 0.0, 2, 0.0};
      k.equation_residual = residual(k);
      out.push_back(k);
    }
  }

  auto inequalities_hold = [&](const Candidate11& k) {
    const double a = std::norm(k.psi1_perp.dot(k.psi2)) * expectation(k.psi2, g2) - expectation(k.psi1_perp, g1);
    const double b = std::norm(k.psi2_perp.dot(k.psi1)) * expectation(k.psi1, g1) - expectation(k.psi2_perp, g2);
    return a >= -tol.psd_floor && b >= -tol.psd_floor;
  };

  const Polynomial y{0.0, 1.0};
  const Polynomial one{1.0};
  const Polynomial u = (c * c) * y + one;  // x^2 c^2 + 1
  const Polynomial v = y + one;            // x^2 + 1
  if (g13 <= tiny && g23 <= tiny) {
    // Angle-free equation g1 (x^2 c^2 + 1)^2 = c^2 g2 (x^2 + 1)^2.
    const Polynomial q = dg1 * (u * u) - (c * c * dg2) * (v * v);
    for (double yr : q.real_roots(kRealRootTol)) {
      if (yr <= tiny) continue;
      for (double sign : {1.0, -1.0}) {
        const Candidate11 k = build(sign * std::sqrt(yr), 0.0);
        if (inequalities_hold(k))
          raise(ErrorKind::degenerate_family, "a continuum of von Neumann candidates satisfies the conditions");
      }
    }
    return out;
  }

  const Polynomial a1 = cphi * ((c * g23) * v - g13 * u);
  const Polynomial a2 = sphi * ((c * g23) * v + g13 * u);
  const Polynomial b1 = dg1 * (u * u) - (c * c * dg2) * (v * v);  // B1 = x b1(x^2)
  const Polynomial w = y - one;
  const Polynomial z = (c * c) * y - one;
  const Polynomial b2 = cphi * (g13 * (u * u * w) - (c * g23) * (v * v * z));
  const Polynomial b3 = sphi * (g13 * (u * u * w) + (c * g23) * (v * v * z));
  const Polynomial cross = a1 * b2 - a2 * b3;
  const Polynomial poly = y * b1 * b1 * (a1 * a1 + a2 * a2) - cross * cross;

  for (double yr : poly.real_roots(kRealRootTol)) {
    if (yr <= tiny) continue;
    const double A1 = a1(yr), A2 = a2(yr), B2 = b2(yr), B3 = b3(yr);
    const double scale = 1.0 + std::abs(A1) + std::abs(A2);
    for (double sign : {1.0, -1.0}) {
      const double xv = sign * std::sqrt(yr);
      const double B1 = xv * b1(yr);
      std::vector<double> thetas;
      if (std::abs(A1) > tol.equality * scale) {
        thetas.push_back(std::atan(A2 / A1));
      } else if (std::abs(A2) > tol.equality * scale) {
        thetas.push_back(-std::numbers::pi / 2.0);
      } else {
        const double den = 2.0 * g13 * g23 * (c * g23 - g13);
        if (den == 0.0) continue;
        const double cth = xv * c * (g23 * g23 * dg1 - g13 * g13 * dg2) / den;
        if (cth < -tol.equality || cth > 1.0 + tol.equality) continue;
        const double th = std::acos(std::clamp(cth, 0.0, 1.0));
        thetas.push_back(th);
        if (th > tiny) thetas.push_back(-th);
      }
      for (double th : thetas) {
        if (std::abs(A1) > tol.equality * scale || std::abs(A2) > tol.equality * scale) {
          const double lhs = B1;
          const double rhs = B3 * std::sin(th) - B2 * std::cos(th);
          if (std::abs(lhs - rhs) > 1e-7 * (1.0 + std::abs(B1) + std::abs(B2) + std::abs(B3))) continue;
        }
        const Candidate11 k = build(xv, th);
        if (k.equation_residual > kEquationTol) continue;
        out.push_back(k);
      }
    }
  }
  return out;
}

Finalized finalize_candidate_11(const Candidate11& c, const WeightedDensityPair& s) {
  const auto& tol = s.tol();
  const Matrix& g1 = s.gamma1();
  const Matrix& g2 = s.gamma2();
  const double a = std::norm(c.psi1_perp.dot(c.psi2)) * expectation(c.psi2, g2) - expectation(c.psi1_perp, g1);
  if (a < -tol.psd_floor) return Rejection{RejectReason::inequality_a, -a, ""};
  const double b = std::norm(c.psi2_perp.dot(c.psi1)) * expectation(c.psi1, g1) - expectation(c.psi2_perp, g2);
  if (b < -tol.psd_floor) return Rejection{RejectReason::inequality_b, -b, ""};
  const Index n = s.dim();
  UsdMeasurement m;
  m.detect1 = c.psi1 * c.psi1.adjoint();
  m.detect2 = c.psi2 * c.psi2.adjoint();
  m.inconclusive = Matrix::Identity(n, n) - m.detect1 - m.detect2;
  const double low = min_eigenvalue(m.inconclusive);
  if (low < -tol.psd_floor) return Rejection{RejectReason::not_psd, -low, ""};
  return certify(m, s, Branch::class11);
}

namespace {

// Best passing outcome of one family, warning when several pass.
std::optional<SolverOutcome> pick(std::vector<SolverOutcome> passing, std::vector<std::string> warnings) {
  if (passing.empty()) return std::nullopt;
  std::sort(passing.begin(), passing.end(), [](const SolverOutcome& a, const SolverOutcome& b) {
    return a.report->max_residual() < b.report->max_residual();
  });
  SolverOutcome best = std::move(passing.front());
  if (passing.size() > 1)
    warnings.push_back(std::to_string(passing.size()) + " candidates passed; kept the smallest residual");
  best.warnings.insert(best.warnings.end(), warnings.begin(), warnings.end());
  return best;
}

std::optional<SolverOutcome> from_closed_form(const std::optional<ClosedFormResult>& r, const WeightedDensityPair& s) {
  if (!r) return std::nullopt;
  Finalized f = certify(r->measurement, s, r->branch);
  if (auto* out = std::get_if<SolverOutcome>(&f)) {
    out->boundary = r->boundary;
    return *out;
  }
  return std::nullopt;
}

std::optional<SolverOutcome> family12(const WeightedDensityPair& s) {
  std::vector<SolverOutcome> passing;
  std::vector<std::string> warnings;
  for (int host : {1, 2}) {
    Candidates12 cands = enumerate_candidates_12(s, host);
    warnings.insert(warnings.end(), cands.warnings.begin(), cands.warnings.end());
    for (const auto& c : cands.candidates) {
      Finalized f = finalize_candidate_12(c, s);
      if (auto* out = std::get_if<SolverOutcome>(&f)) passing.push_back(std::move(*out));
    }
  }
  return pick(std::move(passing), std::move(warnings));
}

std::optional<SolverOutcome> family11(const WeightedDensityPair& s) {
  std::vector<SolverOutcome> passing;
  for (const auto& c : enumerate_candidates_11(s)) {
    Finalized f = finalize_candidate_11(c, s);
    if (auto* out = std::get_if<SolverOutcome>(&f)) passing.push_back(std::move(*out));
  }
  return pick(std::move(passing), {});
}

void attach_certificate(SolverOutcome& out, const WeightedDensityPair& s) {
  try {
    out.certificate = build_certificate(out.measurement, s);
  } catch (const Error& e) {
    out.warnings.push_back(std::string("certificate unavailable: ") + e.what());
  }
}

}  // namespace

SolverOutcome solve_4d(const WeightedDensityPair& s) {
  require_four_dim_skew(s);
  std::optional<SolverOutcome> found = from_closed_form(try_single_state_detection(s), s);
  if (!found) found = from_closed_form(try_fidelity_form(s), s);
  if (!found) found = family12(s);
  if (!found) found = family11(s);
  if (!found) raise(ErrorKind::no_solution_found, "no candidate family produced an optimal measurement");
  const RankLawReport law = rank_law_check(found->measurement, s);
  if (!law.rank_holds)
    found->warnings.push_back("rank of the inconclusive element differs from rank gamma1 gamma2");
  attach_certificate(*found, s);
  return *found;
}

std::vector<SolverOutcome> solve_4d_all_families(const WeightedDensityPair& s) {
  require_four_dim_skew(s);
  std::vector<SolverOutcome> out;
  for (auto&& f : {from_closed_form(try_single_state_detection(s), s), from_closed_form(try_fidelity_form(s), s),
                   family12(s), family11(s)})
    if (f) out.push_back(*f);
  return out;
}

}  // namespace usd
