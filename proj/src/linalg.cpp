#include "usd/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace usd {

namespace {

double cutoff_for(double scale, const ToleranceContext& tol) {
  return std::max(tol.rank_cutoff * scale, tol.rank_floor);
}

Eigen::SelfAdjointEigenSolver<Matrix> eig(const Matrix& m) {
  return Eigen::SelfAdjointEigenSolver<Matrix>(hermitian_part(m));
}

Matrix select_columns(const Matrix& m, const std::vector<Index>& cols) {
  Matrix out(m.rows(), static_cast<Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) out.col(static_cast<Index>(j)) = m.col(cols[j]);
  return out;
}

}  // namespace

HermitianOperator::HermitianOperator(const Matrix& m, const ToleranceContext& tol) {
  require_square(m, "operator");
  require_hermitian(m, tol, "operator");
  m_ = hermitian_part(m);
}

Subspace Subspace::zero(Index ambient) { return Subspace(Matrix(ambient, 0)); }

Subspace Subspace::whole(Index ambient) { return Subspace(Matrix::Identity(ambient, ambient)); }

Subspace Subspace::span(const Matrix& vectors, const ToleranceContext& tol) {
  return column_space(vectors, tol);
}

Subspace Subspace::from_orthonormal(Matrix basis) { return Subspace(std::move(basis)); }

bool is_hermitian(const Matrix& m, double tol) {
  return m.rows() == m.cols() && (m - m.adjoint()).norm() <= tol;
}

void require_square(const Matrix& m, const char* what) {
  if (m.rows() != m.cols())
    raise(ErrorKind::dimension_mismatch, std::string(what) + " is not square");
}

void require_hermitian(const Matrix& m, const ToleranceContext& tol, const char* what) {
  if (!is_hermitian(m, tol.hermitian))
    raise(ErrorKind::not_hermitian, std::string(what) + " deviates from its adjoint by " +
                                        std::to_string((m - m.adjoint()).norm()));
}

void require_same_dim(const Matrix& a, const Matrix& b, const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    raise(ErrorKind::dimension_mismatch, what);
}

Matrix hermitian_part(const Matrix& m) { return (m + m.adjoint()) * 0.5; }

double min_eigenvalue(const Matrix& hermitian) {
  if (hermitian.size() == 0) return 0.0;
  return eig(hermitian).eigenvalues().minCoeff();
}

double max_eigenvalue(const Matrix& hermitian) {
  if (hermitian.size() == 0) return 0.0;
  return eig(hermitian).eigenvalues().maxCoeff();
}

double trace_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  return Eigen::JacobiSVD<Matrix>(m).singularValues().sum();
}

double real_trace(const Matrix& m) { return m.trace().real(); }

double PsdCheck::residual() const { return std::max({0.0, -min_eigenvalue, antihermitian_norm}); }

PsdCheck check_psd(const Matrix& m, const ToleranceContext& tol) {
  PsdCheck c;
  c.min_eigenvalue = min_eigenvalue(m);
  c.antihermitian_norm = ((m - m.adjoint()) * 0.5).norm();
  c.holds = c.min_eigenvalue > -tol.psd_floor && c.antihermitian_norm <= tol.hermitian;
  return c;
}

Index numerical_rank(const Matrix& m, const ToleranceContext& tol) {
  if (m.size() == 0) return 0;
  const RealVector s = Eigen::JacobiSVD<Matrix>(m).singularValues();
  const double cut = cutoff_for(s(0), tol);
  return (s.array() > cut).count();
}

Subspace support(const Matrix& hermitian, const ToleranceContext& tol) {
  require_square(hermitian, "operator");
  const auto es = eig(hermitian);
  const RealVector& ev = es.eigenvalues();
  const double cut = cutoff_for(ev.cwiseAbs().maxCoeff(), tol);
  std::vector<Index> keep;
  for (Index i = ev.size() - 1; i >= 0; --i)
    if (std::abs(ev(i)) > cut) keep.push_back(i);
  return Subspace::from_orthonormal(select_columns(es.eigenvectors(), keep));
}

Subspace kernel(const Matrix& hermitian, const ToleranceContext& tol) {
  require_square(hermitian, "operator");
  const auto es = eig(hermitian);
  const RealVector& ev = es.eigenvalues();
  const double cut = cutoff_for(ev.cwiseAbs().maxCoeff(), tol);
  std::vector<Index> keep;
  for (Index i = 0; i < ev.size(); ++i)
    if (std::abs(ev(i)) <= cut) keep.push_back(i);
  return Subspace::from_orthonormal(select_columns(es.eigenvectors(), keep));
}

Subspace column_space(const Matrix& m, const ToleranceContext& tol) {
  if (m.cols() == 0) return Subspace::zero(m.rows());
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinU);
  const RealVector& s = svd.singularValues();
  const double cut = cutoff_for(s(0), tol);
  const Index r = (s.array() > cut).count();
  return Subspace::from_orthonormal(svd.matrixU().leftCols(r));
}

Subspace orthocomplement(const Subspace& s) {
  const Index d = s.ambient_dim();
  if (s.is_zero()) return Subspace::whole(d);
  if (s.dim() == d) return Subspace::zero(d);
  Eigen::HouseholderQR<Matrix> qr(s.basis());
  const Matrix q = qr.householderQ() * Matrix::Identity(d, d);
  return Subspace::from_orthonormal(q.rightCols(d - s.dim()));
}

Subspace intersect(const Subspace& a, const Subspace& b, const ToleranceContext& tol) {
  if (a.ambient_dim() != b.ambient_dim()) raise(ErrorKind::dimension_mismatch, "intersect");
  if (a.is_zero() || b.is_zero()) return Subspace::zero(a.ambient_dim());
  const Matrix overlap = a.basis().adjoint() * b.basis();
  Eigen::JacobiSVD<Matrix> svd(overlap, Eigen::ComputeFullU);
  const RealVector& s = svd.singularValues();
  const Index k = (s.array() > 1.0 - tol.equality).count();
  return Subspace::from_orthonormal(a.basis() * svd.matrixU().leftCols(k));
}

Subspace sum(const Subspace& a, const Subspace& b, const ToleranceContext& tol) {
  if (a.ambient_dim() != b.ambient_dim()) raise(ErrorKind::dimension_mismatch, "sum");
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  // Directions of b counted as shared with a by `intersect` are dropped here too.
  const Matrix residual = b.basis() - a.basis() * (a.basis().adjoint() * b.basis());
  Eigen::JacobiSVD<Matrix> svd(residual, Eigen::ComputeThinU);
  const double eps = tol.equality;
  const double sine_cut = std::sqrt(2.0 * eps - eps * eps);
  const Index k = (svd.singularValues().array() > sine_cut).count();
  Matrix basis(a.ambient_dim(), a.dim() + k);
  basis << a.basis(), svd.matrixU().leftCols(k);
  return Subspace::from_orthonormal(std::move(basis));
}

bool contains(const Subspace& outer, const Subspace& inner, const ToleranceContext& tol) {
  return intersect(outer, inner, tol).dim() == inner.dim();
}

bool same_subspace(const Subspace& a, const Subspace& b, const ToleranceContext& tol) {
  return a.dim() == b.dim() && contains(a, b, tol);
}

Matrix orthogonal_projector(const Subspace& s) { return s.projector(); }

ObliqueProjector oblique_projector(const Matrix& source, const Matrix& target,
                                   const ToleranceContext& tol) {
  require_same_dim(source, target, "oblique_projector");
  const Subspace from = support(source, tol);
  const Subspace to = support(target, tol);
  if (from.dim() != to.dim() || intersect(from, orthocomplement(to), tol).dim() != 0 ||
      intersect(orthocomplement(from), to, tol).dim() != 0)
    raise(ErrorKind::skew_violation, "source and target subspaces are not complementary");
  return ObliqueProjector(pseudo_inverse(source * target, tol));
}

Matrix pseudo_inverse(const Matrix& m, const ToleranceContext& tol) {
  if (m.size() == 0) return Matrix(m.cols(), m.rows());
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const RealVector& s = svd.singularValues();
  const double cut = cutoff_for(s(0), tol);
  RealVector inv = RealVector::Zero(s.size());
  for (Index i = 0; i < s.size(); ++i)
    if (s(i) > cut) inv(i) = 1.0 / s(i);
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().adjoint();
}

Matrix pseudo_inverse_hermitian(const Matrix& m, const ToleranceContext& tol) {
  require_square(m, "operator");
  if (m.size() == 0) return m;
  const auto es = eig(m);
  const RealVector& ev = es.eigenvalues();
  const double cut = cutoff_for(ev.cwiseAbs().maxCoeff(), tol);
  RealVector inv = RealVector::Zero(ev.size());
  for (Index i = 0; i < ev.size(); ++i)
    if (std::abs(ev(i)) > cut) inv(i) = 1.0 / ev(i);
  return es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().adjoint();
}

Matrix sqrt_psd(const Matrix& m, const ToleranceContext& tol, double& clamped) {
  require_square(m, "operator");
  clamped = 0.0;
  if (m.size() == 0) return m;
  const auto es = eig(m);
  RealVector ev = es.eigenvalues();
  if (ev(0) < -tol.psd_floor)
    raise(ErrorKind::not_psd, "eigenvalue " + std::to_string(ev(0)) + " below -psd_floor");
  if (ev(0) < 0.0) clamped = ev(0);
  ev = ev.cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
}

Matrix sqrt_psd(const Matrix& m, const ToleranceContext& tol) {
  double clamped = 0.0;
  return sqrt_psd(m, tol, clamped);
}

JordanBases jordan_bases(const Subspace& a, const Subspace& b, const Matrix* b_side_operator,
                         double degeneracy_tol) {
  if (a.ambient_dim() != b.ambient_dim()) raise(ErrorKind::dimension_mismatch, "jordan_bases");
  JordanBases jb{a.basis(), b.basis(), RealVector(0)};
  if (a.is_zero() || b.is_zero()) return jb;
  const Matrix overlap = a.basis().adjoint() * b.basis();
  Eigen::JacobiSVD<Matrix> svd(overlap, Eigen::ComputeFullU | Eigen::ComputeFullV);
  jb.basis_a = a.basis() * svd.matrixU();
  jb.basis_b = b.basis() * svd.matrixV();
  jb.cosines = svd.singularValues();
  if (b_side_operator == nullptr) return jb;

  const Index m = jb.cosines.size();
  Index start = 0;
  while (start < m) {
    Index stop = start + 1;
    while (stop < m && std::abs(jb.cosines(stop) - jb.cosines(start)) <= degeneracy_tol) ++stop;
    const Index len = stop - start;
    if (len > 1) {
      const Matrix block_b = jb.basis_b.middleCols(start, len);
      const Matrix g = block_b.adjoint() * (*b_side_operator) * block_b;
      const Matrix w = eig(g).eigenvectors();
      jb.basis_b.middleCols(start, len) = block_b * w;
      jb.basis_a.middleCols(start, len) = jb.basis_a.middleCols(start, len) * w;
    }
    start = stop;
  }
  return jb;
}

}  // namespace usd
