#pragma once

#include <complex>
#include <initializer_list>
#include <vector>

namespace usd {

// Real polynomial with coefficients in ascending order of degree.
class Polynomial {
 public:
  Polynomial() = default;
  Polynomial(std::initializer_list<double> coeffs) : c_(coeffs) {}
  explicit Polynomial(std::vector<double> coeffs) : c_(std::move(coeffs)) {}

  const std::vector<double>& coefficients() const noexcept { return c_; }
  int degree() const;
  double operator()(double x) const;
  std::complex<double> operator()(std::complex<double> x) const;
  Polynomial derivative() const;

  friend Polynomial operator+(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator-(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator*(double k, const Polynomial& a);

  // All complex roots as eigenvalues of the companion matrix. Leading
  // coefficients below `trim` times the largest one are dropped first.
  std::vector<std::complex<double>> roots(double trim = 1e-14) const;
  // Real parts of roots with |Im| <= imag_tol (1 + |Re|), refined by Newton steps.
  std::vector<double> real_roots(double imag_tol = 1e-8) const;

 private:
  std::vector<double> c_;
};

}  // namespace usd
