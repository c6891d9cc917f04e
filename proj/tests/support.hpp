#pragma once

#include <cstdint>
#include <random>

#include "usd/core.hpp"
#include "usd/reductions.hpp"

namespace usd::testing {

using Rng = std::mt19937_64;

inline Matrix ginibre(Index rows, Index cols, Rng& rng) {
  std::normal_distribution<double> n;
  Matrix a(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index k = 0; k < cols; ++k) a(i, k) = cplx(n(rng), n(rng));
  return a;
}

// Unit-trace density operator of the given rank.
inline Matrix random_density(Index d, Index rank, Rng& rng) {
  Matrix a = ginibre(d, rank, rng);
  Matrix rho = a * a.adjoint();
  return rho / rho.trace().real();
}

inline Matrix random_unitary(Index d, Rng& rng) {
  Eigen::HouseholderQR<Matrix> qr(ginibre(d, d, rng));
  return qr.householderQ() * Matrix::Identity(d, d);
}

// Hermitian operator with spectrum drawn from (lo, hi).
inline Matrix random_hermitian_in(Index d, double lo, double hi, Rng& rng) {
  std::uniform_real_distribution<double> u(lo, hi);
  Matrix q = random_unitary(d, rng);
  RealVector ev(d);
  for (Index i = 0; i < d; ++i) ev(i) = u(rng);
  return q * ev.cast<cplx>().asDiagonal() * q.adjoint();
}

struct StatePairSample {
  Matrix rho1;
  Matrix rho2;
};

// Two rank-two states on C^4; generically strictly skew.
inline StatePairSample random_skew_pair_4d(Rng& rng) {
  return {random_density(4, 2, rng), random_density(4, 2, rng)};
}

inline StatePairSample random_pure_pair(Index d, Rng& rng) {
  return {random_density(d, 1, rng), random_density(d, 1, rng)};
}

// Pair on C^7: one common support direction, one direction in supp1 ∩ ker2,
// one in supp2 ∩ ker1, and a strictly skew rank-two block on the remaining C^4.
inline StatePairSample engineered_pair_7d(Rng& rng) {
  std::uniform_real_distribution<double> w(0.2, 1.0);
  Matrix g1 = Matrix::Zero(7, 7), g2 = Matrix::Zero(7, 7);
  g1(0, 0) = w(rng);
  g2(0, 0) = w(rng);
  g1(1, 1) = w(rng);
  g2(2, 2) = w(rng);
  g1.bottomRightCorner(4, 4) = random_density(4, 2, rng);
  g2.bottomRightCorner(4, 4) = random_density(4, 2, rng);
  Matrix u = random_unitary(7, rng);
  Matrix r1 = u * g1 * u.adjoint(), r2 = u * g2 * u.adjoint();
  return {hermitian_part(r1) / r1.trace().real(), hermitian_part(r2) / r2.trace().real()};
}

inline double distance(const Matrix& a, const Matrix& b) { return (a - b).norm(); }

}  // namespace usd::testing
