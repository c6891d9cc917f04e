#include "usd/reference_pairs.hpp"

#include <cmath>
#include <numbers>

namespace usd {

namespace {

cplx unit_phase(double fraction) { return std::polar(1.0, std::numbers::pi * fraction); }

}  // namespace

StatePair qubit_pure_states() {
  Matrix rho1 = Matrix::Zero(2, 2);
  rho1(1, 1) = 1.0;
  Matrix rho2 = Matrix::Constant(2, 2, 0.5);
  return {rho1, rho2};
}

StatePair qubit_pure_states_embedded() {
  const auto [a, b] = qubit_pure_states();
  Matrix rho1 = Matrix::Zero(3, 3);
  Matrix rho2 = Matrix::Zero(3, 3);
  rho1.topLeftCorner(2, 2) = a;
  rho2.topLeftCorner(2, 2) = b;
  return {rho1, rho2};
}

StatePair four_dim_pair_real() {
  Matrix rho1 = Matrix::Zero(4, 4);
  rho1(0, 0) = 1.0 / 3.0;
  rho1(1, 1) = 2.0 / 3.0;
  Eigen::MatrixXd r2(4, 4);
  r2 << 11, 10, 12, 10,
        10, 10, 10, 10,
        12, 10, 14, 10,
        10, 10, 10, 10;
  return {rho1, (r2 / 45.0).cast<cplx>()};
}

StatePair four_dim_pair_complex() {
  const double shift = std::sqrt(5.0 / 22.0);
  Matrix rho1 = Matrix::Zero(4, 4);
  rho1(0, 0) = 0.5 + shift;
  rho1(1, 1) = 0.5 - shift;

  const double s22 = std::sqrt(22.0);
  const double s5 = std::sqrt(5.0);
  Vector w(4);
  w << unit_phase(1.0 / 7.0) * (s22 + 2.0 * s5), unit_phase(1.0 / 7.0) * (s22 - 2.0 * s5), 2.0 * std::sqrt(10.0),
      2.0 * std::sqrt(10.0);
  w /= 2.0 * std::sqrt(41.0);
  Vector v(4);
  v << std::conj(unit_phase(4.0 / 21.0)), unit_phase(17.0 / 21.0), 2.0 * std::sqrt(2.0) * unit_phase(1.0 / 5.0), 0.0;
  v /= std::sqrt(10.0);
  const Matrix rho2 = (5.0 / 46.0) * v * v.adjoint() + (41.0 / 46.0) * w * w.adjoint();
  return {rho1, rho2};
}

}  // namespace usd
