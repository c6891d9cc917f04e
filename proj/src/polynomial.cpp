#include "usd/polynomial.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

namespace usd {

int Polynomial::degree() const {
  for (int i = static_cast<int>(c_.size()) - 1; i >= 0; --i)
    if (c_[i] != 0.0) return i;
  return -1;
}

double Polynomial::operator()(double x) const {
  double v = 0.0;
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) v = v * x + *it;
  return v;
}

std::complex<double> Polynomial::operator()(std::complex<double> x) const {
  std::complex<double> v = 0.0;
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) v = v * x + *it;
  return v;
}

Polynomial Polynomial::derivative() const {
  if (c_.size() <= 1) return Polynomial{};
  std::vector<double> d(c_.size() - 1);
  for (std::size_t i = 1; i < c_.size(); ++i) d[i - 1] = static_cast<double>(i) * c_[i];
  return Polynomial(std::move(d));
}

Polynomial operator+(const Polynomial& a, const Polynomial& b) {
  std::vector<double> c(std::max(a.c_.size(), b.c_.size()), 0.0);
  for (std::size_t i = 0; i < a.c_.size(); ++i) c[i] += a.c_[i];
  for (std::size_t i = 0; i < b.c_.size(); ++i) c[i] += b.c_[i];
  return Polynomial(std::move(c));
}

Polynomial operator-(const Polynomial& a, const Polynomial& b) { return a + (-1.0) * b; }

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  if (a.c_.empty() || b.c_.empty()) return Polynomial{};
  std::vector<double> c(a.c_.size() + b.c_.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.c_.size(); ++i)
    for (std::size_t j = 0; j < b.c_.size(); ++j) c[i + j] += a.c_[i] * b.c_[j];
  return Polynomial(std::move(c));
}

Polynomial operator*(double k, const Polynomial& a) {
  std::vector<double> c = a.c_;
  for (double& x : c) x *= k;
  return Polynomial(std::move(c));
}

std::vector<std::complex<double>> Polynomial::roots(double trim) const {
  double scale = 0.0;
  for (double x : c_) scale = std::max(scale, std::abs(x));
  if (scale == 0.0) return {};
  int deg = static_cast<int>(c_.size()) - 1;
  while (deg > 0 && std::abs(c_[deg]) <= trim * scale) --deg;
  if (deg <= 0) return {};
  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(deg, deg);
  for (int i = 1; i < deg; ++i) companion(i, i - 1) = 1.0;
  for (int i = 0; i < deg; ++i) companion(i, deg - 1) = -c_[i] / c_[deg];
  const Eigen::VectorXcd ev = Eigen::EigenSolver<Eigen::MatrixXd>(companion, false).eigenvalues();
  return {ev.data(), ev.data() + ev.size()};
}

std::vector<double> Polynomial::real_roots(double imag_tol) const {
  const Polynomial d = derivative();
  std::vector<double> out;
  for (const auto& z : roots()) {
    if (std::abs(z.imag()) > imag_tol * (1.0 + std::abs(z.real()))) continue;
    double x = z.real();
    for (int it = 0; it < 3; ++it) {
      const double slope = d(x);
      if (slope == 0.0) break;
      const double next = x - (*this)(x) / slope;
      if (!std::isfinite(next) || std::abs((*this)(next)) > std::abs((*this)(x))) break;
      x = next;
    }
    out.push_back(x);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace usd
