#include <doctest.h>

#include "support.hpp"
#include "usd/oracle.hpp"
#include "usd/pipeline.hpp"
#include "usd/reductions.hpp"
#include "usd/reference_pairs.hpp"

using namespace usd;
using usd::testing::Rng;

namespace {

Vector ket(std::initializer_list<cplx> amps) {
  Vector v(static_cast<Index>(amps.size()));
  Index i = 0;
  for (cplx a : amps) v(i++) = a;
  return v.normalized();
}

Matrix outer(const Vector& v) { return v * v.adjoint(); }

double pair_distance(const WeightedDensityPair& a, const WeightedDensityPair& b) {
  return std::max(testing::distance(a.gamma1(), b.gamma1()), testing::distance(a.gamma2(), b.gamma2()));
}

void check_projector(const Matrix& p) {
  CHECK(testing::distance(p * p, p) < 1e-10);
  CHECK(testing::distance(p, p.adjoint()) < 1e-12);
}

// Skew rank-two block on C^4 plus orthogonal pure states on C^2.
WeightedDensityPair composite_6d(Rng& rng) {
  auto [r1, r2] = testing::random_skew_pair_4d(rng);
  Matrix g1 = Matrix::Zero(6, 6), g2 = Matrix::Zero(6, 6);
  g1.topLeftCorner(4, 4) = 0.35 * r1;
  g2.topLeftCorner(4, 4) = 0.45 * r2;
  g1(4, 4) = 0.12;
  g2(5, 5) = 0.08;
  return WeightedDensityPair(g1, g2);
}

}  // namespace

TEST_CASE("parallel reduction") {
  auto [r1, r2] = four_dim_pair_real();
  auto skew = WeightedDensityPair::from_states(r1, r2, 0.4);
  auto same = tau_parallel(skew);
  CHECK(testing::distance(same.projector, Matrix::Identity(4, 4)) < 1e-12);
  CHECK(pair_distance(same.pair, skew) < 1e-12);

  auto equal = WeightedDensityPair(r1 * 0.5, r1 * 0.5);
  CHECK(tau_parallel(equal).pair.total().norm() < 1e-12);

  // shared |0> direction
  Matrix g1 = 0.2 * outer(ket({1, 0, 0})) + 0.3 * outer(ket({0, 1, 0.4}));
  Matrix g2 = 0.1 * outer(ket({1, 0, 0})) + 0.4 * outer(ket({0, 0.3, 1}));
  auto shared = WeightedDensityPair(g1, g2);
  auto reduced = tau_parallel(shared);
  CHECK(std::abs(reduced.projector(0, 0)) < 1e-12);
  CHECK(std::abs(real_trace(shared.total()) - real_trace(reduced.pair.total()) - 0.3) < 1e-12);
}

TEST_CASE("skew reduction") {
  auto [r1, r2] = four_dim_pair_real();
  auto skew = WeightedDensityPair::from_states(r1, r2, 0.4);
  CHECK(pair_distance(tau_skew(skew).pair, skew) < 1e-12);

  Matrix a = Matrix::Zero(3, 3), b = Matrix::Zero(3, 3);
  a(0, 0) = 0.5;
  b(1, 1) = 0.5;
  CHECK(tau_skew(WeightedDensityPair(a, b)).pair.total().norm() < 1e-14);

  // |0> lies in supp gamma1 and in ker gamma2
  Matrix g1 = 0.3 * outer(ket({1, 0, 0})) + 0.3 * outer(ket({0.5, 1, 0.7}));
  Matrix g2 = 0.4 * outer(ket({0, 1, -0.6}));
  auto s = WeightedDensityPair(g1, g2);
  CHECK_FALSE(is_strictly_skew(s));
  auto r = tau_skew(s).pair;
  CHECK(r.support1().dim() == 1);
  CHECK(r.support2().dim() == 1);
  CHECK(intersect(r.support1(), r.support2()).dim() == 0);
}

TEST_CASE("strictly skew predicate") {
  auto [r1, r2] = four_dim_pair_real();
  CHECK(is_strictly_skew(WeightedDensityPair::from_states(r1, r2, 0.5)));
  auto [c1, c2] = four_dim_pair_complex();
  CHECK(is_strictly_skew(WeightedDensityPair::from_states(c1, c2, 0.5)));
  CHECK_FALSE(is_strictly_skew(WeightedDensityPair(r1 * 0.5, r1 * 0.5)));
  Matrix a = Matrix::Zero(2, 2), b = Matrix::Zero(2, 2);
  a(0, 0) = 0.5;
  b(1, 1) = 0.5;
  CHECK_FALSE(is_strictly_skew(WeightedDensityPair(a, b)));
  auto [q1, q2] = qubit_pure_states();
  CHECK(is_strictly_skew(WeightedDensityPair::from_states(q1, q2, 0.5)));
}

TEST_CASE("reduction record of simple pairs") {
  auto [r1, r2] = four_dim_pair_real();
  auto rec = reduce_fully(WeightedDensityPair::from_states(r1, r2, 0.5));
  CHECK(rec.lifted_offset == 0.0);
  CHECK(testing::distance(rec.xi, Matrix::Identity(4, 4)) < 1e-12);
  CHECK(rec.warnings.empty());

  auto equal = reduce_fully(WeightedDensityPair(r1 * 0.5, r1 * 0.5));
  CHECK(equal.reduced_pair.total().norm() < 1e-12);
  CHECK(equal.lifted_offset == 0.0);
}

TEST_CASE("composite pair: reduction strips the orthogonal block") {
  Rng rng(31);
  for (int trial = 0; trial < 5; ++trial) {
    auto s = composite_6d(rng);
    auto rec = reduce_fully(s);
    CHECK(std::abs(rec.lifted_offset - 0.2) < 1e-12);
    CHECK(testing::distance(rec.reduced_pair.gamma1().topLeftCorner(4, 4), s.gamma1().topLeftCorner(4, 4)) < 1e-10);
    CHECK(testing::distance(rec.reduced_pair.gamma2().topLeftCorner(4, 4), s.gamma2().topLeftCorner(4, 4)) < 1e-10);
    CHECK(rec.reduced_pair.gamma1().bottomRightCorner(2, 2).norm() < 1e-12);

    const double direct = oracle_optimize(s).success;
    const SolverOutcome via_reduction = dispatch(s);
    CHECK(std::abs(via_reduction.success - direct) < 1e-9);
    const double reduced = oracle_optimize(rec.reduced_pair).success;
    CHECK(std::abs(reduced + rec.lifted_offset - direct) < 1e-9);
  }
}

TEST_CASE("record projectors are consistent") {
  Rng rng(37);
  for (int trial = 0; trial < 20; ++trial) {
    auto [r1, r2] = testing::engineered_pair_7d(rng);
    auto rec = reduce_fully(WeightedDensityPair::from_states(r1, r2, 0.3 + 0.02 * trial));
    for (const Matrix* p : {&rec.pi_parallel, &rec.sigma1, &rec.sigma2, &rec.xi}) check_projector(*p);
    CHECK((rec.sigma1 * rec.sigma2).norm() < 1e-10);
    CHECK((rec.sigma1 * rec.pi_parallel).norm() < 1e-10);
    CHECK((rec.sigma2 * rec.pi_parallel).norm() < 1e-10);
    CHECK(std::abs(real_trace(rec.pi_parallel) - 1.0) < 1e-10);
    CHECK(std::abs(real_trace(rec.sigma1) - 1.0) < 1e-10);
    CHECK(std::abs(real_trace(rec.sigma2) - 1.0) < 1e-10);
    CHECK(is_strictly_skew(compress(rec.reduced_pair, rec.reduced_pair.support_total().basis())));
  }
}

TEST_CASE("reduction laws on engineered pairs") {
  Rng rng(41);
  for (int trial = 0; trial < 20; ++trial) {
    auto [r1, r2] = testing::engineered_pair_7d(rng);
    auto s = WeightedDensityPair::from_states(r1, r2, 0.25 + 0.025 * trial);
    auto par = tau_parallel(s).pair;
    CHECK(pair_distance(tau_parallel(par).pair, par) < 1e-10);
    auto sk = tau_skew(s).pair;
    CHECK(pair_distance(tau_skew(sk).pair, sk) < 1e-10);
    auto a = tau_skew(tau_parallel(s).pair).pair;
    auto b = tau_parallel(tau_skew(s).pair).pair;
    CHECK(pair_distance(a, b) < 1e-10);
    auto rec = reduce_fully(s);
    WeightedDensityPair xi_pair(rec.xi * s.gamma1() * rec.xi, rec.xi * s.gamma2() * rec.xi);
    CHECK(pair_distance(a, xi_pair) < 1e-10);
    CHECK(pair_distance(reduce_fully(rec.reduced_pair).reduced_pair, rec.reduced_pair) < 1e-10);
  }
}

TEST_CASE("reductions act non-trivially exactly when the rank criteria say so") {
  Rng rng(43);
  for (int trial = 0; trial < 20; ++trial) {
    auto pair = trial % 2 ? testing::engineered_pair_7d(rng) : testing::random_skew_pair_4d(rng);
    auto s = WeightedDensityPair::from_states(pair.rho1, pair.rho2, 0.5);
    const Index r1 = s.support1().dim(), r2 = s.support2().dim();
    const Index r12 = numerical_rank(s.gamma1() * s.gamma2());
    const bool par_moves = pair_distance(tau_parallel(s).pair, s) > 1e-10;
    const bool skew_moves = pair_distance(tau_skew(s).pair, s) > 1e-10;
    CHECK(par_moves == (numerical_rank(s.total()) < r1 + r2));
    CHECK(skew_moves == (r1 > r12 || r2 > r12));
  }
}

TEST_CASE("lifting measurements") {
  auto [r1, r2] = four_dim_pair_real();
  auto s = WeightedDensityPair::from_states(r1, r2, 0.5);
  auto rec = reduce_fully(s);
  auto m = oracle_optimize(s).measurement;
  auto lifted = lift_measurement(m, rec);
  CHECK(testing::distance(lifted.inconclusive, m.inconclusive) < 1e-14);

  Matrix a = Matrix::Zero(3, 3), b = Matrix::Zero(3, 3);
  a(0, 0) = 0.4;
  b(1, 1) = 0.6;
  auto ortho = WeightedDensityPair(a, b);
  auto orec = reduce_fully(ortho);
  UsdMeasurement idle{Matrix::Zero(3, 3), Matrix::Zero(3, 3), Matrix::Identity(3, 3)};
  auto full = lift_measurement(idle, orec);
  CHECK(testing::distance(full.detect1, orec.sigma1) < 1e-14);
  CHECK(testing::distance(full.detect2, orec.sigma2) < 1e-14);
  CHECK(std::abs(success_probability(full, ortho) - 1.0) < 1e-14);

  UsdMeasurement small{Matrix::Zero(2, 2), Matrix::Zero(2, 2), Matrix::Identity(2, 2)};
  CHECK_THROWS_AS(lift_measurement(small, orec), Error);
  UsdMeasurement wrong{Matrix::Zero(3, 3), Matrix::Zero(3, 3), Matrix::Zero(3, 3)};
  CHECK_THROWS_AS(lift_measurement(wrong, orec), Error);
}
