#include <doctest.h>

#include <cmath>

#include "support.hpp"
#include "usd/closed_form.hpp"
#include "usd/core.hpp"
#include "usd/oracle.hpp"
#include "usd/reference_pairs.hpp"

using namespace usd;
using usd::testing::Rng;

namespace {

Matrix ket_projector(std::initializer_list<cplx> amps) {
  Vector v(static_cast<Index>(amps.size()));
  Index i = 0;
  for (cplx a : amps) v(i++) = a;
  v.normalize();
  return v * v.adjoint();
}

// Optimal but not proper: the detection vectors leak into |2>.
UsdMeasurement leaking_qubit_measurement() {
  const double c = 3.0 - 3.0 / std::sqrt(2.0);
  Matrix e1 = c * ket_projector({1.0, -1.0, -1.0});
  Matrix e2 = c * ket_projector({std::sqrt(2.0), 0.0, 1.0});
  return {e1, e2, Matrix::Identity(3, 3) - e1 - e2};
}

WeightedDensityPair embedded_qubit_pair() {
  auto [r1, r2] = qubit_pure_states_embedded();
  return WeightedDensityPair::from_states(r1, r2, 0.5);
}

WeightedDensityPair orthogonal_pure_pair() {
  Matrix g1 = Matrix::Zero(3, 3), g2 = Matrix::Zero(3, 3);
  g1(0, 0) = 0.3;
  g2(1, 1) = 0.7;
  return WeightedDensityPair(g1, g2);
}

ErrorKind kind_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no exception");
  return ErrorKind::malformed_input;
}

}  // namespace

TEST_CASE("weighted pair validation") {
  Matrix id2 = Matrix::Identity(2, 2) / 2.0;
  CHECK(kind_of([&] { WeightedDensityPair(Matrix::Zero(2, 3), id2); }) == ErrorKind::dimension_mismatch);
  CHECK(kind_of([&] { WeightedDensityPair(id2, Matrix::Identity(3, 3) / 3.0); }) == ErrorKind::dimension_mismatch);
  Matrix skew = id2;
  skew(0, 1) = 0.1;
  CHECK(kind_of([&] { WeightedDensityPair(skew * 0.5, id2 * 0.5); }) == ErrorKind::not_hermitian);
  Matrix neg = id2;
  neg(1, 1) = -0.01;
  CHECK(kind_of([&] { WeightedDensityPair(neg * 0.5, id2 * 0.5); }) == ErrorKind::not_psd);
  CHECK(kind_of([&] { WeightedDensityPair(id2, id2); }) == ErrorKind::invalid_pair);
  CHECK_NOTHROW(WeightedDensityPair(id2 * 0.2, id2 * 0.3));
  CHECK(kind_of([&] { WeightedDensityPair::from_states(id2 * 2.0, id2 * 2.0, 1.5); }) == ErrorKind::invalid_pair);
}

TEST_CASE("success probability of trivial measurements") {
  auto s = orthogonal_pure_pair();
  UsdMeasurement give_up{Matrix::Zero(3, 3), Matrix::Zero(3, 3), Matrix::Identity(3, 3)};
  CHECK(success_probability(give_up, s) == 0.0);
  Matrix p1 = Matrix::Zero(3, 3), p2 = Matrix::Zero(3, 3);
  p1(0, 0) = 1.0;
  p2(1, 1) = 1.0;
  UsdMeasurement sharp{p1, p2, Matrix::Identity(3, 3) - p1 - p2};
  CHECK(check_usd(sharp, s).valid);
  CHECK(success_probability(sharp, s) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("leaking qubit measurement is USD with the optimal value but not proper") {
  auto s = embedded_qubit_pair();
  auto m = leaking_qubit_measurement();
  CHECK(check_usd(m, s).valid);
  CHECK(std::abs(success_probability(m, s) - (1.0 - 1.0 / std::sqrt(2.0))) < 1e-15);
  CHECK_FALSE(is_proper(m, s));

  Matrix p = s.support_total().projector();
  Matrix e1 = p * m.detect1 * p, e2 = p * m.detect2 * p;
  UsdMeasurement projected{e1, e2, Matrix::Identity(3, 3) - e1 - e2};
  CHECK(check_usd(projected, s).valid);
  CHECK(is_proper(projected, s));
  CHECK(std::abs(success_probability(projected, s) - success_probability(m, s)) < 1e-15);
}

TEST_CASE("inconclusive element validation") {
  auto s = embedded_qubit_pair();
  CHECK(validate_inconclusive(Matrix::Identity(3, 3), s).valid());
  auto d = validate_inconclusive(Matrix::Zero(3, 3), s);
  CHECK_FALSE(d.valid());
  CHECK_FALSE(d.decouples);
  CHECK_FALSE(d.acts_as_identity_on_kernel);
  CHECK(d.positive);
  CHECK(d.bounded_by_identity);
  CHECK(d.describe_failures().find("gamma1 (1 - E) gamma2") != std::string::npos);
}

TEST_CASE("completion from the inconclusive element") {
  auto s = orthogonal_pure_pair();
  auto none = complete_measurement(Matrix::Identity(3, 3), s);
  CHECK(none.detect1.norm() < 1e-15);
  CHECK(none.detect2.norm() < 1e-15);

  Matrix rest = Matrix::Zero(3, 3);
  rest(2, 2) = 1.0;
  auto sharp = complete_measurement(rest, s);
  CHECK(std::abs(sharp.detect1(0, 0) - 1.0) < 1e-14);
  CHECK(std::abs(sharp.detect2(1, 1) - 1.0) < 1e-14);
  CHECK(kind_of([&] { complete_measurement(Matrix::Zero(3, 3), s); }) == ErrorKind::invalid_inconclusive);
}

TEST_CASE("completion round trip on random feasible elements") {
  Rng rng(23);
  for (int trial = 0; trial < 20; ++trial) {
    auto [r1, r2] = testing::random_skew_pair_4d(rng);
    auto s = WeightedDensityPair::from_states(r1, r2, 0.2 + 0.03 * trial);
    Matrix e = feasibility_projection(s, testing::random_hermitian_in(4, 0.1, 0.9, rng));
    UsdMeasurement m = complete_measurement(e, s);
    CHECK(testing::distance(m.inconclusive, e) < 1e-12);
    CHECK(check_usd(m, s).valid);
    CHECK(is_proper(m, s));
    const double failure = real_trace(m.inconclusive * s.total());
    CHECK(std::abs(success_probability(m, s) + failure - real_trace(s.total())) < 1e-12);
  }
}

TEST_CASE("reconstruction from the core operator") {
  auto ortho = orthogonal_pure_pair();
  Reconstruction r = reconstruct_from_core(Matrix::Zero(3, 3), ortho);
  CHECK(testing::distance(r.inconclusive, ortho.kernel_total().projector()) < 1e-14);
  CHECK(r.clamped == 0.0);

  auto s = embedded_qubit_pair();
  OracleResult best = oracle_optimize(s);
  const Matrix& e = best.measurement.inconclusive;
  Matrix core = e * (s.gamma2() - s.gamma1()) * e;
  CHECK(testing::distance(reconstruct_from_core(core, s).inconclusive, e) < 1e-8);

  CHECK(kind_of([&] { reconstruct_from_core(Matrix::Identity(3, 3) * 10.0, s); }) ==
        ErrorKind::not_reconstructible);
}

TEST_CASE("reconstruction identity on random valid measurements") {
  Rng rng(29);
  for (int trial = 0; trial < 25; ++trial) {
    const bool qubit = trial % 5 == 0;
    auto pair = qubit ? testing::random_pure_pair(2, rng) : testing::random_skew_pair_4d(rng);
    auto s = WeightedDensityPair::from_states(pair.rho1, pair.rho2, 0.1 + 0.03 * trial);
    const Index d = s.dim();
    Matrix e = feasibility_projection(s, testing::random_hermitian_in(d, 0.05, 0.95, rng));
    Matrix core = e * (s.gamma2() - s.gamma1()) * e;
    CHECK(testing::distance(reconstruct_from_core(core, s).inconclusive, e) < 1e-8);
  }
}

TEST_CASE("projective part of the inconclusive element") {
  auto s = embedded_qubit_pair();
  auto whole = projective_kernel_decomposition(Matrix::Identity(3, 3), s);
  CHECK(whole.fixed.dim() == 3);
  CHECK(whole.fixed_support1.dim() == 1);
  CHECK(whole.fixed_support2.dim() == 1);
  CHECK(whole.common_kernel.dim() == 1);

  auto opt = oracle_optimize(s);
  auto k = projective_kernel_decomposition(opt.measurement.inconclusive, s);
  CHECK(k.fixed_support1.dim() == 0);
  CHECK(k.fixed_support2.dim() == 0);
  CHECK(same_subspace(k.fixed, k.common_kernel, {.rank_cutoff = 1e-7, .equality = 1e-7}));
}

TEST_CASE("compression and embedding") {
  auto s = embedded_qubit_pair();
  Matrix basis = s.support_total().basis();
  auto c = compress(s, basis);
  CHECK(c.dim() == 2);
  CHECK(std::abs(real_trace(c.total()) - 1.0) < 1e-14);
  UsdMeasurement give_up{Matrix::Zero(2, 2), Matrix::Zero(2, 2), Matrix::Identity(2, 2)};
  auto up = embed(give_up, basis);
  CHECK(testing::distance(up.inconclusive, Matrix::Identity(3, 3)) < 1e-14);
}

TEST_CASE("class tag labels") {
  MeasurementClassTag t{2, 1};
  CHECK(t.type_label() == "(2,1)");
  CHECK(t.class_label() == "[1,2]");
  CHECK(t == MeasurementClassTag{2, 1});
  CHECK_FALSE(t == (MeasurementClassTag{1, 2}));
}
