#include <doctest.h>

#include <cmath>
#include <set>
#include <utility>

#include "support.hpp"
#include "usd/closed_form.hpp"
#include "usd/optimality.hpp"
#include "usd/oracle.hpp"
#include "usd/pipeline.hpp"
#include "usd/reference_pairs.hpp"

using namespace usd;
using usd::testing::Rng;

namespace {

WeightedDensityPair qubit_pair() {
  auto [r1, r2] = qubit_pure_states();
  return WeightedDensityPair::from_states(r1, r2, 0.5);
}

WeightedDensityPair real_pair(double p1) {
  auto [r1, r2] = four_dim_pair_real();
  return WeightedDensityPair::from_states(r1, r2, p1);
}

UsdMeasurement shifted_toward(const UsdMeasurement& m, const Matrix& target_inconclusive, double t,
                              const WeightedDensityPair& s) {
  return complete_measurement((1.0 - t) * m.inconclusive + t * target_inconclusive, s);
}

}  // namespace

TEST_CASE("counting formulas match enumeration") {
  for (int r = 0; r <= 6; ++r) {
    long types = 0;
    std::set<std::pair<int, int>> classes;
    for (int e1 = 0; e1 <= r; ++e1)
      for (int e2 = 0; e2 <= r; ++e2)
        if (r <= e1 + e2) {
          ++types;
          classes.insert({std::min(e1, e2), std::max(e1, e2)});
        }
    TypeClassCount c = count_types_classes(r);
    CHECK(c.types == types);
    CHECK(c.classes == static_cast<long>(classes.size()));
  }
  CHECK(count_types_classes(0).types == 1);
  CHECK(count_types_classes(1).types == 3);
  CHECK(count_types_classes(1).classes == 2);
  CHECK(count_types_classes(2).types == 6);
  CHECK(count_types_classes(2).classes == 4);
  CHECK_THROWS_AS(count_types_classes(-1), Error);
}

TEST_CASE("qubit optimum passes the checker and the laws") {
  auto s = qubit_pair();
  SolverOutcome o = dispatch(s);
  OptimalityReport r = check_optimality(o.measurement, s);
  CHECK(r.is_optimal);
  CHECK(r.violated().empty());
  CHECK(r.max_residual() < 1e-12);
  RankLawReport law = rank_law_check(o.measurement, s);
  CHECK(law.holds());
  CHECK(law.inconclusive_rank == 1);
  CHECK(law.product_rank == 1);
  CHECK(law.common_kernel_dim == 0);
  Classification c = classify(o.measurement, s);
  CHECK(c.tag == MeasurementClassTag{1, 1});
  CHECK(c.product_rank == 1);
  CHECK_FALSE(c.is_von_neumann);
}

TEST_CASE("suboptimal measurements fail the checker") {
  auto s = real_pair(0.5);
  const Index n = s.dim();
  UsdMeasurement idle{Matrix::Zero(n, n), Matrix::Zero(n, n), Matrix::Identity(n, n)};
  OptimalityReport r = check_optimality(idle, s);
  CHECK_FALSE(r.is_optimal);
  CHECK_FALSE(r.violated().empty());

  // single-state detection where it is not optimal
  Matrix lambda2 = detection_range(s, 2);
  UsdMeasurement ssd{Matrix::Zero(n, n), lambda2, Matrix::Identity(n, n) - lambda2};
  CHECK(check_usd(ssd, s).valid);
  CHECK_FALSE(check_optimality(ssd, s).is_optimal);
  CHECK(success_probability(ssd, s) < oracle_optimize(s).success - 1e-3);
  CHECK_THROWS_AS(build_certificate(ssd, s), Error);
}

TEST_CASE("checker requires a proper USD measurement") {
  auto [r1, r2] = qubit_pure_states_embedded();
  auto s = WeightedDensityPair::from_states(r1, r2, 0.5);
  const double c = 3.0 - 3.0 / std::sqrt(2.0);
  Vector e1(3), e2(3);
  e1 << 1.0, -1.0, -1.0;
  e2 << std::sqrt(2.0), 0.0, 1.0;
  e1.normalize();
  e2.normalize();
  UsdMeasurement leak{c * e1 * e1.adjoint(), c * e2 * e2.adjoint(), Matrix::Identity(3, 3)};
  leak.inconclusive -= leak.detect1 + leak.detect2;
  try {
    check_optimality(leak, s);
    FAIL("expected not_proper");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::not_proper);
  }
}

TEST_CASE("checker agrees with the reference optimizer") {
  Rng rng(47);
  for (int trial = 0; trial < 24; ++trial) {
    auto pair = trial % 4 == 0 ? testing::random_pure_pair(2, rng) : testing::random_skew_pair_4d(rng);
    auto s = WeightedDensityPair::from_states(pair.rho1, pair.rho2, 0.1 + 0.8 * (trial + 0.5) / 24.0);
    OracleResult best = oracle_optimize(s);
    CHECK(check_optimality(best.measurement, s).is_optimal);
    Matrix other = feasibility_projection(s, testing::random_hermitian_in(s.dim(), 0.1, 0.9, rng));
    const double step = 1e-3 / std::max(1e-12, (other - best.measurement.inconclusive).norm());
    UsdMeasurement worse = shifted_toward(best.measurement, other, step, s);
    CHECK(success_probability(worse, s) < best.success);
    CHECK_FALSE(check_optimality(worse, s).is_optimal);
  }
}

TEST_CASE("certificate for optimal measurements") {
  Rng rng(53);
  for (int trial = 0; trial < 15; ++trial) {
    auto [r1, r2] = testing::random_skew_pair_4d(rng);
    auto s = WeightedDensityPair::from_states(r1, r2, 0.15 + 0.05 * trial);
    SolverOutcome o = dispatch(s);
    REQUIRE(o.report);
    REQUIRE(o.report->is_optimal);
    CertificateZ z = build_certificate(o.measurement, s);
    CHECK(z.residuals.max() <= 1e-7);
    CertificateResiduals again = verify_certificate(z.z, o.measurement, s);
    CHECK(again.max() <= 1e-7);
    CHECK(min_eigenvalue(z.z) > -1e-9);
    CHECK((z.z * o.measurement.inconclusive).norm() < 1e-7);
  }
}

TEST_CASE("certificate after removing skew-orthogonal parts") {
  Rng rng(59);
  for (int trial = 0; trial < 5; ++trial) {
    auto [r1, r2] = testing::engineered_pair_7d(rng);
    auto s = WeightedDensityPair::from_states(r1, r2, 0.3 + 0.1 * trial);
    SolverOutcome o = dispatch(s);
    REQUIRE(o.report);
    CHECK(o.report->is_optimal);
    CertificateZ z = build_certificate(o.measurement, s);
    CHECK(z.residuals.max() <= 1e-7);
  }
}

TEST_CASE("optimal measurements saturate the orthogonal parts") {
  Rng rng(61);
  for (int trial = 0; trial < 10; ++trial) {
    auto [r1, r2] = testing::engineered_pair_7d(rng);
    auto s = WeightedDensityPair::from_states(r1, r2, 0.2 + 0.06 * trial);
    auto rec = reduce_fully(s);
    SolverOutcome o = dispatch(s);
    CHECK(testing::distance(o.measurement.detect1 * rec.sigma1, rec.sigma1) < 1e-9);
    CHECK(testing::distance(o.measurement.detect2 * rec.sigma2, rec.sigma2) < 1e-9);
  }
}

TEST_CASE("rank law and projective part on four-dimensional optima") {
  for (double p1 : {0.01, 0.2, 0.4, 0.6, 0.8, 0.95}) {
    auto s = real_pair(p1);
    SolverOutcome o = dispatch(s);
    CHECK(rank_law_check(o.measurement, s).holds());
    ProjectivePartReport pp = projective_part_law(o.measurement, s);
    CHECK(pp.holds);
  }
}

TEST_CASE("projective part law flags a perturbed element") {
  auto s = real_pair(0.4);
  SolverOutcome o = dispatch(s);
  REQUIRE(o.tag == (MeasurementClassTag{1, 1}));
  Rng rng(67);
  Matrix other = feasibility_projection(s, testing::random_hermitian_in(4, 0.2, 0.8, rng));
  UsdMeasurement moved = complete_measurement(0.9 * o.measurement.inconclusive + 0.1 * other, s);
  CHECK_FALSE(projective_part_law(moved, s).holds);
}

TEST_CASE("classification of closed-form optima") {
  auto s = real_pair(0.01);
  SolverOutcome o = dispatch(s);
  Classification c = classify(o.measurement, s);
  CHECK(c.tag == MeasurementClassTag{0, 2});
  CHECK(c.is_von_neumann);

  auto [c1, c2] = four_dim_pair_complex();
  auto f = WeightedDensityPair::from_states(c1, c2, 0.4);
  SolverOutcome fo = dispatch(f);
  CHECK(fo.branch == Branch::fidelity_form);
  CHECK(classify(fo.measurement, f).tag == MeasurementClassTag{2, 2});
  CHECK_FALSE(classify(fo.measurement, f).is_von_neumann);
  CHECK(rank_law_check(fo.measurement, f).inconclusive_rank == 2);

  auto v = real_pair(0.4);
  SolverOutcome vo = dispatch(v);
  CHECK(vo.tag == MeasurementClassTag{1, 1});
  CHECK(classify(vo.measurement, v).is_von_neumann);
}

TEST_CASE("optimal measurements are unique") {
  Rng rng(71);
  for (int trial = 0; trial < 10; ++trial) {
    auto [r1, r2] = testing::random_skew_pair_4d(rng);
    auto s = WeightedDensityPair::from_states(r1, r2, 0.1 + 0.08 * trial);
    SolverOutcome o = dispatch(s);
    OracleResult best = oracle_optimize(s);
    REQUIRE(check_optimality(best.measurement, s).is_optimal);
    CHECK(testing::distance(o.measurement.inconclusive, best.measurement.inconclusive) < 1e-6);
  }
}
