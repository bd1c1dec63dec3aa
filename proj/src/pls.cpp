#include "plsforge/pls.hpp"

#include "plsforge/detail/core.hpp"
#include "plsforge/linalg.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace plsforge {

ModeSpec ModeSpec::pls_svd() {
  ModeSpec m;
  m.method = Method::pls_svd;
  return m;
}

ModeSpec ModeSpec::pls_w2a() {
  ModeSpec m;
  m.method = Method::pls_w2a;
  return m;
}

ModeSpec ModeSpec::rcca(double ridge_x, double ridge_y, bool convex) {
  ModeSpec m;
  m.method = Method::rcca;
  m.ridge_x = ridge_x;
  m.ridge_y = ridge_y;
  m.convex_ridge = convex;
  return m;
}

ModeSpec ModeSpec::pls_r(bool scaled) {
  ModeSpec m;
  m.method = Method::pls_r;
  m.scaled_nipals = scaled;
  return m;
}

InnerLoopResult inner_loop(const Matrix& m, Vector u0, Vector v0, const PenaltySpec& pen_u,
                           const PenaltySpec& pen_v, double eps, int max_iter) {
  if (m.size() == 0) throw invalid_input("inner_loop: empty matrix");
  if (u0.size() != m.rows() || v0.size() != m.cols())
    throw invalid_input("inner_loop: init size mismatch");
  if (eps <= 0 || max_iter < 1) throw invalid_input("inner_loop: bad eps/max_iter");
  pen_u.validate(m.rows());
  pen_v.validate(m.cols());

  InnerLoopResult r;
  r.u = std::move(u0);
  r.v = std::move(v0);
  for (int it = 1; it <= max_iter; ++it) {
    r.iterations = it;
    Vector ut = sparsify(m * r.v, pen_u);
    const double un = ut.norm();
    if (un == 0.0) {
      r.u = Vector::Zero(m.rows());
      r.degenerate = true;
      return r;
    }
    ut /= un;
    Vector vt = sparsify(m.transpose() * ut, pen_v);
    const double vn = vt.norm();
    if (vn == 0.0) {
      r.u = ut;
      r.v = Vector::Zero(m.cols());
      r.degenerate = true;
      return r;
    }
    vt /= vn;
    const double change = (ut - r.u).norm() / ut.norm();
    r.u = ut;
    r.v = vt;
    if (change < eps) {
      r.converged = true;
      return r;
    }
  }
  return r; // converged stays false; caller records the warning
}

namespace detail {

int cap_components(int requested, Index n, Index p, Index q, bool q_bounds, bool centered,
                   std::vector<std::string>& warnings) {
  const Index rank_bound = centered ? n - 1 : n;
  const int hmax = static_cast<int>(q_bounds ? std::min({p, q, rank_bound})
                                             : std::min(p, rank_bound));
  if (requested > hmax) {
    warnings.push_back("requested " + std::to_string(requested) + " components, capped at " +
                       std::to_string(hmax));
    return hmax;
  }
  return requested;
}

Vector apply_projection_chain(Vector w, const Matrix& dirs, const Matrix& covs, int count) {
  for (int j = count - 1; j >= 0; --j) w -= dirs.col(j) * covs.col(j).dot(w);
  return w;
}

bool extract_component(const Matrix& m, double m0_norm, const PenaltySpec& pen_u,
                       const PenaltySpec& pen_v, const FitOptions& opts, int h, Vector& u,
                       Vector& v, ComponentDiag& dg, std::vector<std::string>& warnings) {
  if (m.lpNorm<Eigen::Infinity>() <= 1e-14 * m0_norm) {
    warnings.push_back("cross-product exhausted before component " + std::to_string(h));
    return false;
  }
  SvdTriple init = svd_leading(m, opts.svd_tol, opts.svd_max_iter);
  if (init.degenerate) {
    warnings.push_back("cross-product exhausted before component " + std::to_string(h));
    return false;
  }
  dg.svd_iterations = init.iterations;
  dg.svd_residual = init.residual;
  u = init.u;
  v = init.v;
  if (pen_u.active() || pen_v.active()) {
    InnerLoopResult il =
        inner_loop(m, u, v, pen_u, pen_v, opts.inner_eps, opts.inner_max_iter);
    dg.inner_iterations = il.iterations;
    dg.inner_converged = il.converged;
    if (!il.converged && !il.degenerate)
      warnings.push_back("component " + std::to_string(h) + ": inner loop hit max_iter");
    if (il.degenerate) {
      dg.degenerate = true;
      warnings.push_back("component " + std::to_string(h) +
                         ": penalty zeroed a weight vector, extraction stopped");
      return false;
    }
    u = il.u;
    v = il.v;
  } else {
    dg.inner_iterations = 0;
    dg.inner_converged = true;
  }
  return true;
}

namespace {

struct Cols {
  Matrix u, v, w_adj, z_adj, c, d, g;
  Vector delta, p_inner, alpha;

  Cols(Index p, Index q, int hmax) {
    u = Matrix::Zero(p, hmax);
    v = Matrix::Zero(q, hmax);
    w_adj = Matrix::Zero(p, hmax);
    z_adj = Matrix::Zero(q, hmax);
    c = Matrix::Zero(p, hmax);
    d = Matrix::Zero(q, hmax);
    g = Matrix::Zero(q, hmax);
    delta = Vector::Zero(hmax);
    p_inner = Vector::Zero(hmax);
    alpha = Vector::Zero(hmax);
  }

  void shrink(int done) {
    u.conservativeResize(Eigen::NoChange, done);
    v.conservativeResize(Eigen::NoChange, done);
    w_adj.conservativeResize(Eigen::NoChange, done);
    z_adj.conservativeResize(Eigen::NoChange, done);
    c.conservativeResize(Eigen::NoChange, done);
    d.conservativeResize(Eigen::NoChange, done);
    g.conservativeResize(Eigen::NoChange, done);
    delta.conservativeResize(done);
    p_inner.conservativeResize(done);
    alpha.conservativeResize(done);
  }
};

} // namespace

CoreOut core_loop_stats(const CoreStats& stats, const ModeSpec& mode, int ncomp,
                        const PenaltySpec& pen_u, const PenaltySpec& pen_v,
                        const FitOptions& opts) {
  const Index p = stats.m0.rows(), q = stats.m0.cols();
  CoreOut out;
  Cols cols(p, q, ncomp);
  out.xi_xc = Matrix::Zero(p, ncomp);
  out.om_xc = Matrix::Zero(p, ncomp);
  out.om_yc = Matrix::Zero(q, ncomp);

  Matrix m = stats.m0;
  const double m0_norm = m.lpNorm<Eigen::Infinity>();
  Matrix n = stats.n0; // mutated by w2a / pls_r deflation
  Matrix o = stats.o0;

  // per-component chain covectors for the adjusted-weight products
  Matrix ax = Matrix::Zero(p, ncomp); // pls_w2a: X'xi_j / ||xi_j||^2
  Matrix ay = Matrix::Zero(q, ncomp); // pls_w2a: Y'omega_j / ||omega_j||^2

  const bool rcca_mode = mode.method == Method::rcca;
  const bool svd_like = mode.method == Method::pls_svd || rcca_mode;

  int h = 0;
  for (; h < ncomp; ++h) {
    ComponentDiag dg;
    Vector u, v;
    if (!extract_component(m, m0_norm, pen_u, pen_v, opts, h + 1, u, v, dg, out.warnings)) {
      out.diag.push_back(dg);
      break;
    }
    const double delta = u.dot(m * v);

    if (svd_like) {
      cols.c.col(h) = u;
      cols.d.col(h) = v;
      Vector chain_u = apply_projection_chain(u, cols.u, cols.u, h);
      Vector chain_v = apply_projection_chain(v, cols.v, cols.v, h);
      if (rcca_mode) {
        cols.w_adj.col(h) = stats.a * u;
        cols.z_adj.col(h) = stats.b * v;
        out.xi_xc.col(h) = stats.a * chain_u;
        out.om_yc.col(h) = stats.b * chain_v;
      } else {
        cols.w_adj.col(h) = u;
        cols.z_adj.col(h) = v;
        out.xi_xc.col(h) = chain_u;
        out.om_yc.col(h) = chain_v;
      }
      m -= delta * u * v.transpose();
    } else if (mode.method == Method::pls_w2a) {
      Vector nu = n * u;
      const double xin2 = u.dot(nu);
      Vector ov = o * v;
      const double omn2 = v.dot(ov);
      if (!(xin2 > 0.0) || !(omn2 > 0.0)) {
        dg.degenerate = true;
        out.diag.push_back(dg);
        out.warnings.push_back("component " + std::to_string(h + 1) +
                               ": zero score norm, extraction stopped");
        break;
      }
      Vector c = nu / xin2;
      Vector e = ov / omn2;
      Vector w = apply_projection_chain(u, cols.u, ax, h);
      Vector z = apply_projection_chain(v, cols.v, ay, h);
      cols.c.col(h) = c;
      cols.d.col(h) = e;
      cols.w_adj.col(h) = w;
      cols.z_adj.col(h) = z;
      out.xi_xc.col(h) = w;
      out.om_yc.col(h) = z;
      ax.col(h) = stats.n0 * w / xin2;
      ay.col(h) = stats.o0 * z / omn2;
      // M <- (c u' - I) M (v e' - I), expanded
      Vector mu = m.transpose() * u;
      Vector mv = m * v;
      m += -c * mu.transpose() - mv * e.transpose() + (delta * c) * e.transpose();
      n -= nu * nu.transpose() / xin2;
      o -= ov * ov.transpose() / omn2;
    } else { // pls_r
      Vector nu = n * u;
      const double xin2 = u.dot(nu);
      if (!(xin2 > 0.0)) {
        dg.degenerate = true;
        out.diag.push_back(dg);
        out.warnings.push_back("component " + std::to_string(h + 1) +
                               ": zero score norm, extraction stopped");
        break;
      }
      Vector mu = m.transpose() * u; // = Y_{h-1}' xi_h
      const double y_xi_norm = mu.norm();
      Vector c = nu / xin2;
      Vector g = mu / xin2;
      double alpha = 0.0, s = 0.0;
      if (y_xi_norm > 0.0) {
        alpha = xin2 / y_xi_norm;
        s = mode.scaled_nipals ? 1.0 : alpha;
      } else {
        out.warnings.push_back("component " + std::to_string(h + 1) +
                               ": response residual orthogonal to score");
      }
      Vector w = apply_projection_chain(u, cols.u, cols.c, h);
      cols.c.col(h) = c;
      cols.d.col(h) = v;
      cols.g.col(h) = g;
      cols.w_adj.col(h) = w;
      cols.z_adj.col(h) = v;
      cols.alpha[h] = alpha;
      cols.p_inner[h] = s * mu.dot(v) / xin2; // xi'omega / ||xi||^2
      out.xi_xc.col(h) = w;
      // omega_h = s Y_{h-1} v = s (Y v - X Wt_{<h} G_{<h}' v)
      out.om_yc.col(h) = s * v;
      if (h > 0) {
        Vector gv = cols.g.leftCols(h).transpose() * v;
        out.om_xc.col(h) = -s * (cols.w_adj.leftCols(h) * gv);
      }
      // M <- (I - c u')(M - nu g'),  N <- projection update
      Matrix t = m - nu * g.transpose();
      m = t - c * (u.transpose() * t);
      n -= nu * nu.transpose() / xin2;
    }

    cols.u.col(h) = u;
    cols.v.col(h) = v;
    cols.delta[h] = delta;
    out.diag.push_back(dg);
  }

  out.done = h;
  cols.shrink(h);
  out.u = std::move(cols.u);
  out.v = std::move(cols.v);
  out.w_adj = std::move(cols.w_adj);
  out.z_adj = std::move(cols.z_adj);
  out.c = std::move(cols.c);
  out.d = std::move(cols.d);
  out.g = std::move(cols.g);
  out.delta = std::move(cols.delta);
  out.p_inner = std::move(cols.p_inner);
  out.alpha = std::move(cols.alpha);
  out.xi_xc.conservativeResize(Eigen::NoChange, h);
  out.om_xc.conservativeResize(Eigen::NoChange, h);
  out.om_yc.conservativeResize(Eigen::NoChange, h);
  return out;
}

} // namespace detail

namespace {

using detail::apply_projection_chain;

// Explicit Algorithm-style loop: deflate the score-bearing block copies and
// read scores straight off them.  For rcca the caller passes the transformed
// blocks; a_map/b_map carry the metric transforms for the adjusted weights.
struct ExplicitOut {
  detail::CoreOut core; // combination fields unused
  Matrix xi, omega;
};

ExplicitOut explicit_loop(Matrix x, Matrix y, const ModeSpec& mode, int ncomp,
                          const PenaltySpec& pen_u, const PenaltySpec& pen_v,
                          const FitOptions& opts, const Matrix& a_map, const Matrix& b_map) {
  const Index n_rows = x.rows(), p = x.cols(), q = y.cols();
  ExplicitOut out;
  detail::Cols cols(p, q, ncomp);
  out.xi = Matrix::Zero(n_rows, ncomp);
  out.omega = Matrix::Zero(n_rows, ncomp);

  const Matrix x0 = x; // pls_w2a adjusted weights refer to the original block
  const Matrix y0 = y;
  Matrix m = x.transpose() * y;
  const double m0_norm = m.lpNorm<Eigen::Infinity>();

  Matrix ax = Matrix::Zero(p, ncomp);
  Matrix ay = Matrix::Zero(q, ncomp);

  const bool rcca_mode = mode.method == Method::rcca;
  const bool svd_like = mode.method == Method::pls_svd || rcca_mode;

  int h = 0;
  for (; h < ncomp; ++h) {
    ComponentDiag dg;
    Vector u, v;
    if (!detail::extract_component(m, m0_norm, pen_u, pen_v, opts, h + 1, u, v, dg,
                                   out.core.warnings)) {
      out.core.diag.push_back(dg);
      break;
    }
    const double delta = u.dot(m * v);
    Vector xi = x * u;

    if (svd_like) {
      Vector omega = y * v;
      cols.c.col(h) = u;
      cols.d.col(h) = v;
      cols.w_adj.col(h) = rcca_mode ? Vector(a_map * u) : u;
      cols.z_adj.col(h) = rcca_mode ? Vector(b_map * v) : v;
      x -= xi * u.transpose();
      y -= omega * v.transpose();
      m -= delta * u * v.transpose();
      out.xi.col(h) = xi;
      out.omega.col(h) = omega;
    } else if (mode.method == Method::pls_w2a) {
      const double xin2 = xi.squaredNorm();
      Vector omega = y * v;
      const double omn2 = omega.squaredNorm();
      if (!(xin2 > 0.0) || !(omn2 > 0.0)) {
        dg.degenerate = true;
        out.core.diag.push_back(dg);
        out.core.warnings.push_back("component " + std::to_string(h + 1) +
                                    ": zero score norm, extraction stopped");
        break;
      }
      Vector c = x.transpose() * xi / xin2;
      Vector e = y.transpose() * omega / omn2;
      cols.c.col(h) = c;
      cols.d.col(h) = e;
      cols.w_adj.col(h) = apply_projection_chain(u, cols.u, ax, h);
      cols.z_adj.col(h) = apply_projection_chain(v, cols.v, ay, h);
      ax.col(h) = x0.transpose() * xi / xin2;
      ay.col(h) = y0.transpose() * omega / omn2;
      x -= xi * c.transpose();
      y -= omega * e.transpose();
      m = x.transpose() * y;
      out.xi.col(h) = xi;
      out.omega.col(h) = omega;
    } else { // pls_r
      const double xin2 = xi.squaredNorm();
      if (!(xin2 > 0.0)) {
        dg.degenerate = true;
        out.core.diag.push_back(dg);
        out.core.warnings.push_back("component " + std::to_string(h + 1) +
                                    ": zero score norm, extraction stopped");
        break;
      }
      Vector yxi = y.transpose() * xi;
      const double y_xi_norm = yxi.norm();
      Vector c = x.transpose() * xi / xin2;
      Vector g = yxi / xin2;
      double alpha = 0.0, s = 0.0;
      if (y_xi_norm > 0.0) {
        alpha = xin2 / y_xi_norm;
        s = mode.scaled_nipals ? 1.0 : alpha;
      } else {
        out.core.warnings.push_back("component " + std::to_string(h + 1) +
                                    ": response residual orthogonal to score");
      }
      Vector omega = s * (y * v);
      cols.w_adj.col(h) = apply_projection_chain(u, cols.u, cols.c, h);
      cols.c.col(h) = c;
      cols.d.col(h) = v;
      cols.g.col(h) = g;
      cols.z_adj.col(h) = v;
      cols.alpha[h] = alpha;
      cols.p_inner[h] = xi.dot(omega) / xin2;
      x -= xi * c.transpose();
      y -= xi * g.transpose();
      m = x.transpose() * y;
      out.xi.col(h) = xi;
      out.omega.col(h) = omega;
    }

    cols.u.col(h) = u;
    cols.v.col(h) = v;
    cols.delta[h] = delta;
    out.core.diag.push_back(dg);
  }

  out.core.done = h;
  cols.shrink(h);
  out.xi.conservativeResize(Eigen::NoChange, h);
  out.omega.conservativeResize(Eigen::NoChange, h);
  out.core.u = std::move(cols.u);
  out.core.v = std::move(cols.v);
  out.core.w_adj = std::move(cols.w_adj);
  out.core.z_adj = std::move(cols.z_adj);
  out.core.c = std::move(cols.c);
  out.core.d = std::move(cols.d);
  out.core.g = std::move(cols.g);
  out.core.delta = std::move(cols.delta);
  out.core.p_inner = std::move(cols.p_inner);
  out.core.alpha = std::move(cols.alpha);
  return out;
}

void validate_fit_inputs(const Matrix& x, const Matrix& y, const ModeSpec& mode, int ncomp,
                         const PenaltySpec& pen_u, const PenaltySpec& pen_v) {
  if (x.rows() != y.rows()) throw invalid_input("fit: row count mismatch");
  if (x.rows() < 2) throw invalid_input("fit: need at least 2 rows");
  if (x.cols() < 1 || y.cols() < 1) throw invalid_input("fit: empty block");
  require_finite(x, "fit: x");
  require_finite(y, "fit: y");
  if (ncomp < 1) throw invalid_input("fit: ncomp must be >= 1");
  pen_u.validate(x.cols());
  pen_v.validate(y.cols());
  if (mode.method == Method::rcca) {
    if (mode.ridge_x < 0 || mode.ridge_y < 0) throw invalid_input("fit: negative ridge");
    if (mode.convex_ridge && (mode.ridge_x > 1 || mode.ridge_y > 1))
      throw invalid_input("fit: convex ridge outside [0, 1]");
  }
}

void finalize_fit(PlsFit& fit, detail::CoreOut&& core, const CenterScale& cx,
                  const CenterScale& cy, const FitOptions& opts) {
  fit.n_components = core.done;
  fit.u = std::move(core.u);
  fit.v = std::move(core.v);
  fit.w_adj = std::move(core.w_adj);
  fit.z_adj = std::move(core.z_adj);
  fit.c = std::move(core.c);
  fit.d = std::move(core.d);
  fit.g = std::move(core.g);
  fit.delta = std::move(core.delta);
  fit.p_inner = std::move(core.p_inner);
  fit.alpha = std::move(core.alpha);
  fit.diag = std::move(core.diag);
  for (auto& w : core.warnings) fit.warnings.push_back(std::move(w));
  fit.x_means = cx.means;
  fit.x_sds = cx.sds;
  fit.y_means = cy.means;
  fit.y_sds = cy.sds;
  fit.centered = opts.center;
  fit.scaled = opts.scale;
}

} // namespace

Matrix detail::rcca_transform(const Matrix& gram, double ridge, bool convex) {
  if (convex) {
    if (ridge == 1.0) return Matrix::Identity(gram.rows(), gram.cols());
    Matrix s = (1.0 - ridge) * gram;
    s.diagonal().array() += ridge;
    return inv_sqrt_sym(s, 0.0);
  }
  return inv_sqrt_sym(gram, ridge);
}

PlsFit fit(const Matrix& x, const Matrix& y, const ModeSpec& mode, int ncomp,
           const PenaltySpec& pen_u, const PenaltySpec& pen_v, const FitOptions& opts) {
  validate_fit_inputs(x, y, mode, ncomp, pen_u, pen_v);

  PlsFit out;
  out.mode = mode;
  out.pen_u = pen_u;
  out.pen_v = pen_v;
  out.requested = ncomp;

  CenterScale cx = center_scale(x, opts.center, opts.scale);
  CenterScale cy = center_scale(y, opts.center, opts.scale);
  const int hmax = detail::cap_components(ncomp, x.rows(), x.cols(), y.cols(),
                                          mode.method != Method::pls_r, opts.center, out.warnings);

  Matrix a_map, b_map;
  if (mode.method == Method::rcca) {
    a_map = detail::rcca_transform(cx.x.transpose() * cx.x, mode.ridge_x, mode.convex_ridge);
    b_map = detail::rcca_transform(cy.x.transpose() * cy.x, mode.ridge_y, mode.convex_ridge);
  }

  if (opts.use_m_recursion) {
    detail::CoreStats stats;
    stats.m0 = cx.x.transpose() * cy.x;
    if (mode.method == Method::rcca) {
      stats.a = a_map;
      stats.b = b_map;
      stats.m0 = a_map * stats.m0 * b_map;
    }
    if (mode.method == Method::pls_w2a || mode.method == Method::pls_r)
      stats.n0 = cx.x.transpose() * cx.x;
    if (mode.method == Method::pls_w2a) stats.o0 = cy.x.transpose() * cy.x;

    detail::CoreOut core = detail::core_loop_stats(stats, mode, hmax, pen_u, pen_v, opts);
    out.xi = cx.x * core.xi_xc;
    out.omega = cy.x * core.om_yc;
    if (mode.method == Method::pls_r && core.done > 0) out.omega += cx.x * core.om_xc;
    out.map_x = core.xi_xc;
    out.map_omega_x = core.om_xc;
    out.map_omega_y = core.om_yc;
    finalize_fit(out, std::move(core), cx, cy, opts);
    return out;
  }

  Matrix xw = mode.method == Method::rcca ? Matrix(cx.x * a_map) : cx.x;
  Matrix yw = mode.method == Method::rcca ? Matrix(cy.x * b_map) : cy.x;
  ExplicitOut ex =
      explicit_loop(std::move(xw), std::move(yw), mode, hmax, pen_u, pen_v, opts, a_map, b_map);
  out.xi = std::move(ex.xi);
  out.omega = std::move(ex.omega);
  finalize_fit(out, std::move(ex.core), cx, cy, opts);
  return out;
}

PlsFit fit_simpls(const Matrix& x, const Matrix& y, int ncomp, const PenaltySpec& pen_u,
                  const PenaltySpec& pen_v, const FitOptions& opts) {
  ModeSpec mode = ModeSpec::pls_r();
  validate_fit_inputs(x, y, mode, ncomp, pen_u, pen_v);

  PlsFit out;
  out.mode = mode;
  out.pen_u = pen_u;
  out.pen_v = pen_v;
  out.simpls = true;
  out.requested = ncomp;

  CenterScale cx = center_scale(x, opts.center, opts.scale);
  CenterScale cy = center_scale(y, opts.center, opts.scale);
  const Index p = x.cols(), q = y.cols();
  const int hmax = detail::cap_components(ncomp, x.rows(), p, q, false, opts.center, out.warnings);

  detail::CoreOut core;
  detail::Cols cols(p, q, hmax);
  out.xi = Matrix::Zero(x.rows(), hmax);
  out.omega = Matrix::Zero(x.rows(), hmax);

  const Matrix m0 = cx.x.transpose() * cy.x;
  const double m0_norm = m0.lpNorm<Eigen::Infinity>();

  int h = 0;
  for (; h < hmax; ++h) {
    Matrix m;
    try {
      m = h == 0 ? m0 : residual_projection(cols.c.leftCols(h), m0);
    } catch (const degenerate_basis&) {
      core.warnings.push_back("loading span exhausted before component " + std::to_string(h + 1));
      break;
    }
    ComponentDiag dg;
    Vector w, v;
    if (!detail::extract_component(m, m0_norm, pen_u, pen_v, opts, h + 1, w, v, dg,
                                   core.warnings)) {
      core.diag.push_back(dg);
      break;
    }
    Vector xi = cx.x * w;
    const double xin2 = xi.squaredNorm();
    if (!(xin2 > 0.0)) {
      dg.degenerate = true;
      core.diag.push_back(dg);
      core.warnings.push_back("component " + std::to_string(h + 1) +
                              ": zero score norm, extraction stopped");
      break;
    }
    Vector yxi = cy.x.transpose() * xi;
    cols.u.col(h) = w;
    cols.v.col(h) = v;
    cols.w_adj.col(h) = w;
    cols.z_adj.col(h) = v;
    cols.c.col(h) = cx.x.transpose() * xi / xin2;
    cols.d.col(h) = v;
    cols.g.col(h) = yxi / xin2;
    cols.delta[h] = w.dot(m * v);
    const double y_xi_norm = yxi.norm();
    cols.alpha[h] = y_xi_norm > 0 ? xin2 / y_xi_norm : 0.0;
    Vector omega = cy.x * v;
    cols.p_inner[h] = xi.dot(omega) / xin2;
    out.xi.col(h) = xi;
    out.omega.col(h) = omega;
    core.diag.push_back(dg);
  }

  core.done = h;
  cols.shrink(h);
  out.xi.conservativeResize(Eigen::NoChange, h);
  out.omega.conservativeResize(Eigen::NoChange, h);
  core.u = std::move(cols.u);
  core.v = std::move(cols.v);
  core.w_adj = std::move(cols.w_adj);
  core.z_adj = std::move(cols.z_adj);
  core.c = std::move(cols.c);
  core.d = std::move(cols.d);
  core.g = std::move(cols.g);
  core.delta = std::move(cols.delta);
  core.p_inner = std::move(cols.p_inner);
  core.alpha = std::move(cols.alpha);

  // B = W (Xi'Xi)^(-1) Xi'Y; scores are Cov-orthogonal when unpenalized but
  // the general solve also covers penalized weights
  if (h > 0) {
    Matrix gram = out.xi.transpose() * out.xi;
    Eigen::SelfAdjointEigenSolver<Matrix> es(gram);
    const Vector lam = es.eigenvalues();
    const double lmax = lam.maxCoeff();
    if (lmax <= 0 || lam.minCoeff() <= 1e-12 * lmax)
      throw degenerate_basis("fit_simpls: score matrix is rank deficient");
    Matrix gram_inv =
        es.eigenvectors() * lam.cwiseInverse().asDiagonal() * es.eigenvectors().transpose();
    out.b_stored = core.u * (gram_inv * (out.xi.transpose() * cy.x));
  } else {
    out.b_stored = Matrix::Zero(p, q);
  }

  finalize_fit(out, std::move(core), cx, cy, opts);
  return out;
}

Matrix regression_coefficients(const PlsFit& fit) {
  if (!fit.simpls && fit.mode.method != Method::pls_r)
    throw mode_error("regression_coefficients: fit is not a regression fit");
  if (fit.n_components < 1)
    throw invalid_input("regression_coefficients: no non-degenerate components");
  if (fit.simpls) return fit.b_stored;
  if (fit.mode.scaled_nipals) {
    Vector pconv(fit.n_components);
    for (int hh = 0; hh < fit.n_components; ++hh)
      pconv[hh] = fit.alpha[hh] > 0 ? 1.0 / fit.alpha[hh] : 0.0;
    return fit.w_adj * pconv.asDiagonal() * fit.v.transpose();
  }
  return fit.w_adj * fit.g.transpose();
}

Matrix predict(const PlsFit& fit, const Matrix& x_new) {
  if (!fit.simpls && fit.mode.method != Method::pls_r)
    throw mode_error("predict: fit is not a regression fit");
  const Index p = fit.x_means.size(), q = fit.y_means.size();
  if (x_new.cols() != p) throw invalid_input("predict: column count mismatch");
  if (x_new.rows() == 0) return Matrix(0, q);
  require_finite(x_new, "predict");

  Matrix xc = x_new;
  xc.rowwise() -= fit.x_means.transpose();
  if (fit.scaled)
    for (Index j = 0; j < p; ++j)
      if (fit.x_sds[j] > 0) xc.col(j) /= fit.x_sds[j];

  Matrix yhat = xc * regression_coefficients(fit);
  if (fit.scaled)
    for (Index j = 0; j < q; ++j)
      if (fit.y_sds[j] > 0) yhat.col(j) *= fit.y_sds[j];
  yhat.rowwise() += fit.y_means.transpose();
  return yhat;
}

DummyResponse encode_dummy(const std::vector<std::string>& labels) {
  if (labels.empty()) throw invalid_input("encode_dummy: no labels");
  DummyResponse d;
  d.indices.reserve(labels.size());
  for (const auto& s : labels) {
    auto it = std::find(d.labels.begin(), d.labels.end(), s);
    if (it == d.labels.end()) {
      d.labels.push_back(s);
      d.indices.push_back(static_cast<int>(d.labels.size()) - 1);
    } else {
      d.indices.push_back(static_cast<int>(it - d.labels.begin()));
    }
  }
  if (d.labels.size() < 2) throw invalid_input("encode_dummy: need at least 2 classes");
  d.y = Matrix::Zero(static_cast<Index>(labels.size()), static_cast<Index>(d.labels.size()));
  for (std::size_t i = 0; i < d.indices.size(); ++i)
    d.y(static_cast<Index>(i), d.indices[i]) = 1.0;
  return d;
}

PlsFit fit(const Matrix& x, const DummyResponse& y, const ModeSpec& mode, int ncomp,
           const PenaltySpec& pen_u, const PenaltySpec& pen_v, const FitOptions& opts) {
  PlsFit f = fit(x, y.y, mode, ncomp, pen_u, pen_v, opts);
  f.class_labels = y.labels;
  return f;
}

std::vector<std::string> classify(const PlsFit& fit, const Matrix& x_new) {
  if (fit.class_labels.empty()) throw mode_error("classify: fit has no class labels");
  Matrix scores = predict(fit, x_new);
  std::vector<std::string> out;
  out.reserve(static_cast<std::size_t>(scores.rows()));
  for (Index i = 0; i < scores.rows(); ++i) {
    Index best = 0;
    for (Index j = 1; j < scores.cols(); ++j)
      if (scores(i, j) > scores(i, best)) best = j; // ties keep the lowest index
    out.push_back(fit.class_labels[static_cast<std::size_t>(best)]);
  }
  return out;
}

} // namespace plsforge
