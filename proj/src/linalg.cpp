#include "plsforge/linalg.hpp"

#include "plsforge/rng.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace plsforge {

SvdFactorization svd_full(const Matrix& m) {
  if (m.size() == 0) throw invalid_input("svd_full: empty matrix");
  require_finite(m, "svd_full");
  Eigen::BDCSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  SvdFactorization f;
  f.u = svd.matrixU();
  f.values = svd.singularValues();
  f.v = svd.matrixV();
  for (Index j = 0; j < f.values.size(); ++j) {
    Vector uj = f.u.col(j), vj = f.v.col(j);
    fix_sign(uj, vj);
    f.u.col(j) = uj;
    f.v.col(j) = vj;
  }
  return f;
}

namespace {

// deterministic unit start vector, re-drawable on pathological starts
Vector start_vector(Index n, std::uint64_t salt) {
  Rng rng(0x5eed5eedULL + salt);
  Vector w(n);
  for (Index i = 0; i < n; ++i) w[i] = rng.sym();
  const double nrm = w.norm();
  return nrm > 0 ? Vector(w / nrm) : Vector(Vector::Unit(n, 0));
}

} // namespace

SvdTriple svd_leading(const Matrix& m, double tol, int max_iter) {
  if (m.size() == 0) throw invalid_input("svd_leading: empty matrix");
  require_finite(m, "svd_leading");
  if (tol <= 0 || max_iter < 1) throw invalid_input("svd_leading: bad tol/max_iter");

  const Index p = m.rows(), q = m.cols();
  SvdTriple t;
  if (m.lpNorm<Eigen::Infinity>() == 0.0) {
    t.u = Vector::Zero(p);
    t.v = Vector::Zero(q);
    t.degenerate = true;
    return t;
  }

  // iterate on the smaller Gram matrix, applied matrix-free
  const bool v_side = q <= p;
  const Index d = v_side ? q : p;

  Vector w;
  double rho = 0.0, res = 0.0;
  int it = 0;
  for (std::uint64_t salt = 0; salt < 4; ++salt) {
    w = start_vector(d, salt);
    bool stalled = false;
    for (it = 1; it <= max_iter; ++it) {
      Vector gw = v_side ? Vector(m.transpose() * (m * w)) : Vector(m * (m.transpose() * w));
      rho = w.dot(gw);
      res = (gw - rho * w).norm();
      if (res <= tol * rho && rho > 0.0) {
        t.iterations = it;
        t.residual = res;
        goto converged;
      }
      const double nrm = gw.norm();
      if (nrm == 0.0) { // start was in the null space; redraw
        stalled = true;
        break;
      }
      w = gw / nrm;
    }
    if (!stalled) {
      throw convergence_error("svd_leading: no convergence after " + std::to_string(max_iter) +
                              " iterations (residual " + std::to_string(res) + ")");
    }
  }
  throw convergence_error("svd_leading: iteration stalled in the null space");

converged:
  t.delta = std::sqrt(std::max(rho, 0.0));
  if (v_side) {
    t.v = w;
    Vector mu = m * w;
    const double nrm = mu.norm();
    t.u = nrm > 0 ? Vector(mu / nrm) : Vector(Vector::Zero(p));
    t.delta = nrm; // ||M v|| for a unit eigenvector v of M'M equals sigma
  } else {
    t.u = w;
    Vector mv = m.transpose() * w;
    const double nrm = mv.norm();
    t.v = nrm > 0 ? Vector(mv / nrm) : Vector(Vector::Zero(q));
    t.delta = nrm;
  }
  fix_sign(t.u, t.v);
  return t;
}

Matrix inv_sqrt_sym(const Matrix& a, double ridge) {
  if (a.size() == 0) throw invalid_input("inv_sqrt_sym: empty matrix");
  if (a.rows() != a.cols()) throw invalid_input("inv_sqrt_sym: not square");
  require_finite(a, "inv_sqrt_sym");
  if (ridge < 0) throw invalid_input("inv_sqrt_sym: negative ridge");
  const double scale = std::max(1.0, a.lpNorm<Eigen::Infinity>());
  if ((a - a.transpose()).lpNorm<Eigen::Infinity>() > 1e-8 * scale)
    throw invalid_input("inv_sqrt_sym: asymmetric input");

  Matrix areg = 0.5 * (a + a.transpose());
  areg.diagonal().array() += ridge;
  Eigen::SelfAdjointEigenSolver<Matrix> es(areg);
  if (es.info() != Eigen::Success) throw convergence_error("inv_sqrt_sym: eigensolver failed");
  Vector lam = es.eigenvalues();
  const double lmax = lam.maxCoeff();
  if (lmax <= 0.0) throw degenerate_basis("inv_sqrt_sym: no positive spectrum");
  const double floor = 1e-12 * lmax;
  Vector inv_sqrt(lam.size());
  for (Index i = 0; i < lam.size(); ++i) inv_sqrt[i] = 1.0 / std::sqrt(std::max(lam[i], floor));
  return es.eigenvectors() * inv_sqrt.asDiagonal() * es.eigenvectors().transpose();
}

CenterScale center_scale(const Matrix& x, bool center, bool scale) {
  if (x.size() == 0) throw invalid_input("center_scale: empty matrix");
  require_finite(x, "center_scale");
  const Index n = x.rows(), p = x.cols();
  CenterScale out;
  out.x = x;
  out.means = Vector::Zero(p);
  out.sds = Vector::Ones(p);
  if (center) {
    out.means = x.colwise().mean();
    out.x.rowwise() -= out.means.transpose();
  }
  if (scale) {
    for (Index j = 0; j < p; ++j) {
      // sample sd about the column mean, regardless of whether centering was applied
      const double mean = x.col(j).mean();
      double ss = (x.col(j).array() - mean).square().sum();
      const double sd = n > 1 ? std::sqrt(ss / static_cast<double>(n - 1)) : 0.0;
      out.sds[j] = sd;
      if (sd > 0) out.x.col(j) /= sd;
    }
  }
  return out;
}

Matrix residual_projection(const Matrix& basis, const Matrix& x) {
  require_finite(x, "residual_projection");
  if (basis.cols() == 0) return x;
  if (basis.rows() != x.rows()) throw invalid_input("residual_projection: row mismatch");
  require_finite(basis, "residual_projection");
  Matrix gram = basis.transpose() * basis;
  Eigen::SelfAdjointEigenSolver<Matrix> es(gram);
  if (es.info() != Eigen::Success)
    throw convergence_error("residual_projection: eigensolver failed");
  const Vector lam = es.eigenvalues();
  const double lmax = lam.maxCoeff();
  if (lmax <= 0.0 || lam.minCoeff() <= 1e-12 * lmax)
    throw degenerate_basis("residual_projection: basis is numerically rank deficient");
  Vector inv = lam.cwiseInverse();
  Matrix gram_inv = es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().transpose();
  return x - basis * (gram_inv * (basis.transpose() * x));
}

} // namespace plsforge
