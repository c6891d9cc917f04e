#include "usd/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace usd {

namespace {

using real = long double;
using xcplx = std::complex<real>;
using XMatrix = Eigen::Matrix<xcplx, Eigen::Dynamic, Eigen::Dynamic>;
using XVector = Eigen::Matrix<real, Eigen::Dynamic, 1>;
using XRealMatrix = Eigen::Matrix<real, Eigen::Dynamic, Eigen::Dynamic>;

XMatrix widen(const Matrix& m) { return m.cast<xcplx>(); }

Matrix narrow(const XMatrix& m) { return m.cast<cplx>(); }

// Orthonormal basis of k x k Hermitian matrices under Re tr(A B).
template <class M>
std::vector<M> hermitian_basis(Index k) {
  using S = typename M::Scalar;
  using R = typename S::value_type;
  std::vector<M> out;
  const R h = R(1) / std::sqrt(R(2));
  for (Index i = 0; i < k; ++i) {
    M e = M::Zero(k, k);
    e(i, i) = S(1);
    out.push_back(e);
  }
  for (Index i = 0; i < k; ++i)
    for (Index j = i + 1; j < k; ++j) {
      M re = M::Zero(k, k);
      re(i, j) = re(j, i) = S(h);
      out.push_back(re);
      M im = M::Zero(k, k);
      im(i, j) = S(0, -h);
      im(j, i) = S(0, h);
      out.push_back(im);
    }
  return out;
}

struct Block {
  XMatrix constant;             // F_b at y = 0
  std::vector<XMatrix> slopes;  // dF_b / dy_j (zero matrices omitted by `active`)
  std::vector<bool> active;
  real weight = 1;
};

// Barrier problem: maximize c.y subject to F_b(y) > 0 for every block.
class BarrierProblem {
 public:
  BarrierProblem(std::vector<Block> blocks, XVector c) : blocks_(std::move(blocks)), c_(std::move(c)) {}

  Index size() const { return c_.size(); }
  const XVector& objective() const { return c_; }

  real barrier_mass() const {
    real m = 0;
    for (const auto& b : blocks_) m += b.weight * static_cast<real>(b.constant.rows());
    return m;
  }

  XMatrix value(const Block& b, const XVector& y) const {
    XMatrix f = b.constant;
    for (Index j = 0; j < y.size(); ++j)
      if (b.active[j]) f += y(j) * b.slopes[j];
    return f;
  }

  // Returns +inf outside the domain.
  real phi(const XVector& y, real t) const {
    real v = -t * c_.dot(y);
    for (const auto& b : blocks_) {
      Eigen::LLT<XMatrix> llt(value(b, y));
      if (llt.info() != Eigen::Success) return std::numeric_limits<real>::infinity();
      real logdet = 0;
      for (Index i = 0; i < llt.matrixL().rows(); ++i) {
        const real d = llt.matrixLLT()(i, i).real();
        if (!(d > 0)) return std::numeric_limits<real>::infinity();
        logdet += 2 * std::log(d);
      }
      v -= b.weight * logdet;
    }
    return v;
  }

  void derivatives(const XVector& y, real t, XVector& g, XRealMatrix& h) const {
    const Index n = size();
    g = -t * c_;
    h = XRealMatrix::Zero(n, n);
    for (const auto& b : blocks_) {
      const XMatrix finv = value(b, y).inverse();
      std::vector<XMatrix> m(n);
      for (Index j = 0; j < n; ++j) {
        if (!b.active[j]) continue;
        m[j] = finv * b.slopes[j];
        g(j) -= b.weight * m[j].trace().real();
      }
      for (Index j = 0; j < n; ++j) {
        if (!b.active[j]) continue;
        for (Index k = j; k < n; ++k) {
          if (!b.active[k]) continue;
          const real v = b.weight * (m[j].array() * m[k].transpose().array()).sum().real();
          h(j, k) += v;
          if (k != j) h(k, j) += v;
        }
      }
    }
  }

  void set_weights(const std::vector<real>& w) {
    for (std::size_t i = 0; i < blocks_.size(); ++i) blocks_[i].weight = w[i];
  }

 private:
  std::vector<Block> blocks_;
  XVector c_;
};

struct PathResult {
  XVector y;
  real gap = 0;
  long iterations = 0;
  bool converged = false;
  std::vector<double> history;
};

PathResult follow_path(const BarrierProblem& p, XVector y, const OracleConfig& cfg) {
  PathResult r;
  const real mass = p.barrier_mass();
  real t = std::max<real>(mass, 1);
  const real mu = 8;
  const real gap_target = static_cast<real>(cfg.gap_tol);
  XVector g;
  XRealMatrix h;
  bool centered = false;
  bool have_centered = false;
  XVector last_centered = y;
  r.gap = std::numeric_limits<real>::infinity();
  for (;;) {
    centered = false;
    for (int inner = 0; inner < 100 && r.iterations < cfg.max_iters; ++inner) {
      p.derivatives(y, t, g, h);
      const XVector step = h.ldlt().solve(-g);
      const real decrement = -g.dot(step);
      if (!(decrement == decrement)) break;
      if (decrement / 2 <= 1e-11L) {
        centered = true;
        break;
      }
      real alpha = 1;
      if (decrement < 0.25L) {
        // Quadratic region: full steps, only kept inside the domain.
        while (alpha > 1e-30L && !std::isfinite(p.phi(y + alpha * step, t))) alpha /= 2;
      } else {
        const real f0 = p.phi(y, t);
        while (alpha > 1e-30L && !(p.phi(y + alpha * step, t) <= f0 - 0.25L * alpha * decrement)) alpha /= 2;
      }
      ++r.iterations;
      if (alpha <= 1e-30L) break;
      y += alpha * step;
      centered = false;
    }
    if (!centered) {
      // Precision floor or iteration budget reached: keep the last centered point.
      if (have_centered) y = last_centered;
      break;
    }
    have_centered = true;
    last_centered = y;
    r.history.push_back(static_cast<double>(p.objective().dot(y)));
    r.gap = mass / t;
    if (r.gap <= gap_target || r.iterations >= cfg.max_iters) break;
    t *= mu;
  }
  r.y = y;
  r.converged = have_centered && r.gap <= static_cast<real>(cfg.convergence_tol);
  return r;
}

struct Formulation {
  Index n = 0;
  Matrix support_basis;  // orthonormal basis of supp S
  Matrix range1;         // basis of ker g2 ∩ supp S
  Matrix range2;         // basis of ker g1 ∩ supp S
  std::vector<XMatrix> herm1;
  std::vector<XMatrix> herm2;
  std::vector<Block> blocks;
  XVector c;
};

Formulation formulate(const WeightedDensityPair& s) {
  const auto& tol = s.tol();
  Formulation f;
  f.n = s.dim();
  const Subspace supp = s.support_total();
  f.support_basis = supp.basis();
  f.range1 = intersect(s.kernel2(), supp, tol).basis();
  f.range2 = intersect(s.kernel1(), supp, tol).basis();
  const Index k1 = f.range1.cols();
  const Index k2 = f.range2.cols();
  const Index ds = supp.dim();
  f.herm1 = hermitian_basis<XMatrix>(k1);
  f.herm2 = hermitian_basis<XMatrix>(k2);
  const Index nv = k1 * k1 + k2 * k2;
  f.c = XVector::Zero(nv);
  const XMatrix g1 = widen(f.range1.adjoint() * s.gamma1() * f.range1);
  const XMatrix g2 = widen(f.range2.adjoint() * s.gamma2() * f.range2);
  const XMatrix w1 = widen(f.support_basis.adjoint() * f.range1);
  const XMatrix w2 = widen(f.support_basis.adjoint() * f.range2);

  Block b1{XMatrix::Zero(k1, k1), std::vector<XMatrix>(nv), std::vector<bool>(nv, false), 1};
  Block b2{XMatrix::Zero(k2, k2), std::vector<XMatrix>(nv), std::vector<bool>(nv, false), 1};
  Block room{XMatrix::Identity(ds, ds), std::vector<XMatrix>(nv), std::vector<bool>(nv, true), 1};
  for (Index j = 0; j < k1 * k1; ++j) {
    const XMatrix& e = f.herm1[j];
    f.c(j) = (g1 * e).trace().real();
    b1.slopes[j] = e;
    b1.active[j] = true;
    room.slopes[j] = -(w1 * e * w1.adjoint());
  }
  for (Index j = 0; j < k2 * k2; ++j) {
    const Index v = k1 * k1 + j;
    const XMatrix& e = f.herm2[j];
    f.c(v) = (g2 * e).trace().real();
    b2.slopes[v] = e;
    b2.active[v] = true;
    room.slopes[v] = -(w2 * e * w2.adjoint());
  }
  if (k1 > 0) f.blocks.push_back(b1);
  if (k2 > 0) f.blocks.push_back(b2);
  f.blocks.push_back(room);
  return f;
}

XVector coordinates(const std::vector<XMatrix>& basis, const XMatrix& x) {
  XVector y(static_cast<Index>(basis.size()));
  for (std::size_t j = 0; j < basis.size(); ++j) y(static_cast<Index>(j)) = (basis[j] * x).trace().real();
  return y;
}

XMatrix assemble(const std::vector<XMatrix>& basis, const XVector& y, Index offset, Index k) {
  XMatrix x = XMatrix::Zero(k, k);
  for (std::size_t j = 0; j < basis.size(); ++j) x += y(offset + static_cast<Index>(j)) * basis[j];
  return x;
}

UsdMeasurement measurement_from(const Formulation& f, const XVector& y) {
  const Index k1 = f.range1.cols();
  const Index k2 = f.range2.cols();
  const Matrix x1 = narrow(assemble(f.herm1, y, 0, k1));
  const Matrix x2 = narrow(assemble(f.herm2, y, k1 * k1, k2));
  UsdMeasurement m;
  m.detect1 = hermitian_part(f.range1 * x1 * f.range1.adjoint());
  m.detect2 = hermitian_part(f.range2 * x2 * f.range2.adjoint());
  m.inconclusive = Matrix::Identity(f.n, f.n) - m.detect1 - m.detect2;
  return m;
}

XMatrix random_positive(Index k, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  Matrix a(k, k);
  for (Index i = 0; i < k; ++i)
    for (Index j = 0; j < k; ++j) a(i, j) = cplx(nd(rng), nd(rng));
  return widen(a * a.adjoint() + 0.1 * Matrix::Identity(k, k));
}

// Strictly feasible starting point; the first restart uses scaled identities.
XVector starting_point(const Formulation& f, std::mt19937_64* rng) {
  const Index k1 = f.range1.cols();
  const Index k2 = f.range2.cols();
  XMatrix x1 = XMatrix::Identity(k1, k1);
  XMatrix x2 = XMatrix::Identity(k2, k2);
  if (rng != nullptr) {
    x1 = random_positive(k1, *rng);
    x2 = random_positive(k2, *rng);
  }
  const XMatrix w1 = widen(f.support_basis.adjoint() * f.range1);
  const XMatrix w2 = widen(f.support_basis.adjoint() * f.range2);
  const XMatrix load = w1 * x1 * w1.adjoint() + w2 * x2 * w2.adjoint();
  real top = 0;
  if (load.size() > 0) top = Eigen::SelfAdjointEigenSolver<XMatrix>(load).eigenvalues().maxCoeff();
  const real scale = top > 0 ? real(0.5) / top : real(1);
  XVector y(k1 * k1 + k2 * k2);
  y << coordinates(f.herm1, scale * x1), coordinates(f.herm2, scale * x2);
  return y;
}

struct Run {
  UsdMeasurement m;
  PathResult path;
};

std::vector<Run> run_restarts(const WeightedDensityPair& s, const OracleConfig& cfg) {
  const Formulation f = formulate(s);
  BarrierProblem problem(f.blocks, f.c);
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> weight(0.5, 2.0);
  std::vector<Run> runs;
  const int restarts = std::max(1, cfg.restarts);
  for (int r = 0; r < restarts; ++r) {
    std::vector<real> w(f.blocks.size(), real(1));
    if (r > 0)
      for (auto& x : w) x = static_cast<real>(weight(rng));
    problem.set_weights(w);
    PathResult path;
    if (problem.size() == 0) {
      path.converged = true;
    } else {
      path = follow_path(problem, starting_point(f, r == 0 ? nullptr : &rng), cfg);
    }
    Run run{measurement_from(f, path.y.size() == problem.size() ? path.y : XVector::Zero(problem.size())),
            std::move(path)};
    runs.push_back(std::move(run));
  }
  return runs;
}

}  // namespace

OracleResult oracle_optimize(const WeightedDensityPair& s, const OracleConfig& cfg) {
  const std::vector<Run> runs = run_restarts(s, cfg);
  const Run& first = runs.front();
  if (!first.path.converged)
    raise(ErrorKind::non_convergence, "barrier path stopped at gap " + std::to_string(double(first.path.gap)) +
                                          " after " + std::to_string(first.path.iterations) + " Newton steps");
  OracleResult r;
  r.measurement = first.m;
  r.success = success_probability(first.m, s);
  r.gap = static_cast<double>(first.path.gap);
  r.iterations = first.path.iterations;
  r.converged = true;
  r.objective_history = first.path.history;
  for (const Run& run : runs) {
    r.restart_successes.push_back(success_probability(run.m, s));
    r.restart_distances.push_back((run.m.inconclusive - first.m.inconclusive).norm());
    r.restart_inconclusive.push_back(run.m.inconclusive);
  }
  return r;
}

UniquenessReport uniqueness_probe(const WeightedDensityPair& s, const OracleConfig& cfg) {
  const std::vector<Run> runs = run_restarts(s, cfg);
  UniquenessReport u;
  u.all_converged = std::all_of(runs.begin(), runs.end(), [](const Run& r) { return r.path.converged; });
  for (std::size_t i = 0; i < runs.size(); ++i)
    for (std::size_t j = i + 1; j < runs.size(); ++j) {
      const double d = (runs[i].m.inconclusive - runs[j].m.inconclusive).norm();
      u.distances.push_back(d);
      u.max_distance = std::max(u.max_distance, d);
    }
  u.unique = u.all_converged && u.max_distance <= 10.0 * cfg.convergence_tol;
  return u;
}

Matrix feasibility_projection(const WeightedDensityPair& s, const Matrix& guess, long max_iters, double tol) {
  require_same_dim(guess, s.gamma1(), "guess and pair differ in dimension");
  const Index n = s.dim();
  const Subspace supp = s.support_total();
  const Matrix& u = supp.basis();
  const Index ds = supp.dim();
  if (ds == 0) return Matrix::Identity(n, n);
  const Matrix s1 = u.adjoint() * s.support1().basis();
  const Matrix s2 = u.adjoint() * s.support2().basis();

  // Linear constraint s1^dagger M s2 = 0 on Hermitian M, projected in real coordinates.
  const auto basis = hermitian_basis<Matrix>(ds);
  const Index nb = static_cast<Index>(basis.size());
  const Index rows = 2 * s1.cols() * s2.cols();
  Eigen::MatrixXd constraint(std::max<Index>(rows, 1), nb);
  constraint.setZero();
  for (Index j = 0; j < nb; ++j) {
    const Matrix image = s1.adjoint() * basis[j] * s2;
    for (Index a = 0; a < image.rows(); ++a)
      for (Index b = 0; b < image.cols(); ++b) {
        constraint(2 * (a * image.cols() + b), j) = image(a, b).real();
        constraint(2 * (a * image.cols() + b) + 1, j) = image(a, b).imag();
      }
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(constraint, Eigen::ComputeFullV);
  const Eigen::VectorXd& sv = svd.singularValues();
  const Index rank = (sv.array() > 1e-12 * std::max(1.0, sv.size() ? sv(0) : 0.0)).count();
  const Eigen::MatrixXd null = svd.matrixV().rightCols(nb - rank);

  auto to_coords = [&](const Matrix& m) {
    Eigen::VectorXd v(nb);
    for (Index j = 0; j < nb; ++j) v(j) = (basis[j] * m).trace().real();
    return v;
  };
  auto from_coords = [&](const Eigen::VectorXd& v) {
    Matrix m = Matrix::Zero(ds, ds);
    for (Index j = 0; j < nb; ++j) m += v(j) * basis[j];
    return m;
  };
  auto project_linear = [&](const Matrix& m) { return from_coords(null * (null.transpose() * to_coords(m))); };
  auto project_box = [](const Matrix& m) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(m));
    const RealVector ev = es.eigenvalues().cwiseMax(0.0).cwiseMin(1.0);
    return Matrix(es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint());
  };

  // Work with M = 1 - E restricted to supp S.
  Matrix x = hermitian_part(u.adjoint() * (Matrix::Identity(n, n) - guess) * u);
  Matrix p = Matrix::Zero(ds, ds);
  Matrix q = Matrix::Zero(ds, ds);
  for (long it = 0; it < max_iters; ++it) {
    const Matrix y = project_box(x + p);
    p = x + p - y;
    const Matrix next = project_linear(y + q);
    q = y + q - next;
    const double change = (next - x).norm();
    x = next;
    if (change <= tol && (y - x).norm() <= tol) break;
  }
  // Residual box violations: lift along the detection ranges, then shrink toward M = 0.
  // Both moves keep the linear constraint.
  const Matrix ranges = u.adjoint() * (detection_range(s, 1) + detection_range(s, 2)) * u;
  for (int pass = 0; pass < 8; ++pass) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(x));
    const double low = es.eigenvalues()(0);
    if (low >= 0.0) break;
    const Vector v = es.eigenvectors().col(0);
    const double weight = (v.adjoint() * ranges * v)(0, 0).real();
    if (weight <= 1e-12) break;
    x += (-low / weight) * ranges;
  }
  const double high = max_eigenvalue(x);
  if (high > 1.0) x /= high;
  return hermitian_part(Matrix::Identity(n, n) - u * x * u.adjoint());
}

}  // namespace usd
