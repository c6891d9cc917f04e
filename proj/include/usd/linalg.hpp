#pragma once

#include <complex>
#include <optional>

#include <Eigen/Dense>

#include "usd/errors.hpp"
#include "usd/tolerance.hpp"

namespace usd {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

// Hermitian operator on C^d, validated and symmetrized on construction.
class HermitianOperator {
 public:
  HermitianOperator() = default;
  explicit HermitianOperator(const Matrix& m, const ToleranceContext& tol = {});

  const Matrix& matrix() const noexcept { return m_; }
  Index dim() const noexcept { return m_.rows(); }
  operator const Matrix&() const noexcept { return m_; }

 private:
  Matrix m_;
};

// Subspace of C^d held as an orthonormal basis (columns).
class Subspace {
 public:
  Subspace() = default;
  static Subspace zero(Index ambient);
  static Subspace whole(Index ambient);
  // Orthonormalizes the column span of `vectors`, dropping numerically dependent columns.
  static Subspace span(const Matrix& vectors, const ToleranceContext& tol = {});
  // Trusts that `basis` already has orthonormal columns.
  static Subspace from_orthonormal(Matrix basis);

  const Matrix& basis() const noexcept { return basis_; }
  Index dim() const noexcept { return basis_.cols(); }
  Index ambient_dim() const noexcept { return basis_.rows(); }
  bool is_zero() const noexcept { return basis_.cols() == 0; }
  Matrix projector() const { return basis_ * basis_.adjoint(); }

 private:
  explicit Subspace(Matrix basis) : basis_(std::move(basis)) {}
  Matrix basis_;
};

class ObliqueProjector {
 public:
  explicit ObliqueProjector(Matrix q) : q_(std::move(q)) {}
  const Matrix& matrix() const noexcept { return q_; }
  operator const Matrix&() const noexcept { return q_; }

 private:
  Matrix q_;
};

struct JordanBases {
  Matrix basis_a;       // columns a_i, orthonormal basis of A
  Matrix basis_b;       // columns b_i, orthonormal basis of B
  RealVector cosines;   // <a_i|b_i> >= 0, descending, length min(dim A, dim B)
};

bool is_hermitian(const Matrix& m, double tol);
void require_hermitian(const Matrix& m, const ToleranceContext& tol, const char* what);
void require_square(const Matrix& m, const char* what);
void require_same_dim(const Matrix& a, const Matrix& b, const char* what);

Matrix hermitian_part(const Matrix& m);
double min_eigenvalue(const Matrix& hermitian);
double max_eigenvalue(const Matrix& hermitian);
double trace_norm(const Matrix& m);
double real_trace(const Matrix& m);

// Positivity of an operator that should be Hermitian: the Hermitian part has
// minimum eigenvalue > -psd_floor and the anti-Hermitian part is negligible.
struct PsdCheck {
  bool holds = false;
  double min_eigenvalue = 0.0;
  double antihermitian_norm = 0.0;
  double residual() const;  // amount by which the condition is violated, 0 if it holds
};
PsdCheck check_psd(const Matrix& m, const ToleranceContext& tol);

// Numerical rank by singular values with the shared relative cutoff.
Index numerical_rank(const Matrix& m, const ToleranceContext& tol = {});

Subspace support(const Matrix& hermitian, const ToleranceContext& tol = {});
Subspace kernel(const Matrix& hermitian, const ToleranceContext& tol = {});
Subspace column_space(const Matrix& m, const ToleranceContext& tol = {});
Subspace orthocomplement(const Subspace& s);
Subspace intersect(const Subspace& a, const Subspace& b, const ToleranceContext& tol = {});
Subspace sum(const Subspace& a, const Subspace& b, const ToleranceContext& tol = {});
bool contains(const Subspace& outer, const Subspace& inner, const ToleranceContext& tol = {});
bool same_subspace(const Subspace& a, const Subspace& b, const ToleranceContext& tol = {});
Matrix orthogonal_projector(const Subspace& s);

// Projector with image `target` and kernel ker(source), built as pinv(source * target).
// Throws skew_violation unless source and target meet the complementarity condition.
ObliqueProjector oblique_projector(const Matrix& source, const Matrix& target,
                                   const ToleranceContext& tol = {});

Matrix pseudo_inverse(const Matrix& m, const ToleranceContext& tol = {});
// Moore-Penrose inverse of a Hermitian operator through its eigendecomposition.
Matrix pseudo_inverse_hermitian(const Matrix& m, const ToleranceContext& tol = {});

// Principal square root; eigenvalues in (-psd_floor, 0) are clamped, lower ones throw not_psd.
Matrix sqrt_psd(const Matrix& m, const ToleranceContext& tol = {});
// Same but reports the most negative clamped eigenvalue (0 if none).
Matrix sqrt_psd(const Matrix& m, const ToleranceContext& tol, double& clamped);

// Jordan (principal-vector) bases of two subspaces. When `b_side_operator` is
// given, vectors sharing a degenerate cosine are rotated so that the operator
// is diagonal on the corresponding b vectors.
JordanBases jordan_bases(const Subspace& a, const Subspace& b, const Matrix* b_side_operator = nullptr,
                         double degeneracy_tol = 1e-9);

}  // namespace usd
