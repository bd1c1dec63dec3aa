// Acceptance checks for the library: seven scripted scenarios covering group
// recovery on simulated data, chunked/in-memory agreement, discriminant
// analysis, the mode invariants, the three SVD kernels, penalty closed forms,
// and the exact full-rank decomposition.  Prints one [PASS]/[FAIL] line per
// criterion and exits nonzero if any fail or blow their time budget.
#include <plsforge/bigdata.hpp>
#include <plsforge/datagen.hpp>
#include <plsforge/linalg.hpp>
#include <plsforge/penalty.hpp>
#include <plsforge/pls.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <set>
#include <string>
#include <vector>

using namespace plsforge;

namespace {

struct Checker {
  bool ok = true;
  std::string why;
  void expect(bool cond, const std::string& msg) {
    if (!cond && ok) {
      ok = false;
      why = msg;
    }
  }
};

Matrix randn(Index rows, Index cols, std::mt19937& gen) {
  std::normal_distribution<double> d(0.0, 1.0);
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) m(i, j) = d(gen);
  return m;
}

double pearson(const Vector& a, const Vector& b) {
  const Vector da = a.array() - a.mean();
  const Vector db = b.array() - b.mean();
  return da.dot(db) / std::sqrt(da.squaredNorm() * db.squaredNorm());
}

std::set<int> surviving_groups(const Vector& w, const GroupStructure& g) {
  std::set<int> out;
  for (int k = 0; k < g.count(); ++k)
    if (w.segment(g.offsets[static_cast<std::size_t>(k)],
                  g.sizes[static_cast<std::size_t>(k)]).norm() > 1e-12)
      out.insert(k);
  return out;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return v[v.size() / 2];
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return 1e300;
  if (a.size() == 0) return 0.0;
  return (a - b).cwiseAbs().maxCoeff();
}

// --------------------------------------------------------------- criterion 1
// Two-component group-penalized regression fit on the small simulated design:
// tune lambda until exactly four X-groups survive in component 1, then demand
// the surviving groups on both sides are the truly active ones and that the
// first X-weight vector tracks the generating loading.

bool criterion1(Checker& c) {
  Matrix x, y;
  const GroupPlsTruth t = gen_group_pls(100, 1, x, y);
  const auto gx = GroupStructure::uniform(GroupPlsTruth::x_groups, GroupPlsTruth::group_size);
  const auto gy = GroupStructure::uniform(GroupPlsTruth::y_groups, GroupPlsTruth::group_size);

  const auto fit_at = [&](double lam) {
    return fit(x, y, ModeSpec::pls_r(), 2, PenaltySpec::group(lam, gx),
               PenaltySpec::group(lam, gy));
  };
  const auto x_count = [&](const PlsFit& f) {
    return static_cast<int>(surviving_groups(f.u.col(0), gx).size());
  };

  // grow until at most 4 groups survive, then bisect to exactly 4
  double lo = 0.0, hi = 100.0;
  PlsFit f = fit_at(hi);
  int cnt = x_count(f);
  while (cnt > 4 && hi < 1e9) {
    lo = hi;
    hi *= 2.0;
    f = fit_at(hi);
    cnt = x_count(f);
  }
  for (int it = 0; it < 80 && cnt != 4; ++it) {
    const double mid = 0.5 * (lo + hi);
    PlsFit fm = fit_at(mid);
    const int cm = x_count(fm);
    if (cm > 4) {
      lo = mid;
    } else {
      hi = mid;
      f = std::move(fm);
      cnt = cm;
    }
  }
  c.expect(cnt == 4, "no lambda found with exactly 4 surviving X-groups");
  if (cnt != 4) return c.ok;

  const std::set<int> want_x(t.active_x.begin(), t.active_x.end());
  const std::set<int> want_y(t.active_y.begin(), t.active_y.end());
  c.expect(surviving_groups(f.u.col(0), gx) == want_x,
           "component-1 X-groups are not the active ones");
  c.expect(surviving_groups(f.v.col(0), gy) == want_y,
           "component-1 Y-groups are not the active ones");

  const double r = std::abs(pearson(f.u.col(0), t.c1));
  c.expect(r >= 0.90, "corr(u1, c1) = " + std::to_string(r) + " < 0.90");
  return c.ok;
}

// --------------------------------------------------------------- criterion 2
// The chunked estimator must reproduce the in-memory fit to 1e-9 elementwise
// across three modes and all four penalty kinds; penalty strengths are scaled
// off the leading component so each kind actually bites.

bool criterion2(Checker& c) {
  Matrix x, y;
  gen_group_pls(2000, 7, x, y);
  const auto gx = GroupStructure::uniform(GroupPlsTruth::x_groups, GroupPlsTruth::group_size);
  const auto gy = GroupStructure::uniform(GroupPlsTruth::y_groups, GroupPlsTruth::group_size);

  const CenterScale cx = center_scale(x), cy = center_scale(y);
  const Matrix m0 = cx.x.transpose() * cy.x;
  const SvdTriple s0 = svd_leading(m0);
  const Vector mu = m0 * s0.v, mv = m0.transpose() * s0.u;

  const auto abs_median = [](const Vector& v) {
    std::vector<double> a(static_cast<std::size_t>(v.size()));
    for (Index i = 0; i < v.size(); ++i) a[static_cast<std::size_t>(i)] = std::abs(v[i]);
    return median(a);
  };
  const auto block_median = [](const Vector& v, const GroupStructure& g) {
    std::vector<double> a;
    for (int k = 0; k < g.count(); ++k)
      a.push_back(v.segment(g.offsets[static_cast<std::size_t>(k)],
                            g.sizes[static_cast<std::size_t>(k)]).norm());
    return median(a);
  };
  const double lam_lu = abs_median(mu), lam_lv = abs_median(mv);
  const double lam_gu = 2.0 * block_median(mu, gx) / std::sqrt(double(GroupPlsTruth::group_size));
  const double lam_gv = 2.0 * block_median(mv, gy) / std::sqrt(double(GroupPlsTruth::group_size));

  struct Cfg {
    const char* name;
    PenaltySpec u, v;
  };
  const Cfg cfgs[] = {
      {"none", PenaltySpec::none(), PenaltySpec::none()},
      {"lasso", PenaltySpec::lasso(lam_lu), PenaltySpec::lasso(lam_lv)},
      {"group", PenaltySpec::group(lam_gu, gx), PenaltySpec::group(lam_gv, gy)},
      {"sparse-group", PenaltySpec::sparse_group(0.5 * lam_gu, 0.5, gx),
       PenaltySpec::sparse_group(0.5 * lam_gv, 0.5, gy)},
  };
  const ModeSpec modes[] = {ModeSpec::pls_svd(), ModeSpec::pls_w2a(), ModeSpec::pls_r()};
  const char* mode_names[] = {"pls-svd", "pls-w2a", "pls-r"};

  for (int m = 0; m < 3; ++m) {
    for (const Cfg& cfg : cfgs) {
      const std::string tag = std::string(mode_names[m]) + "/" + cfg.name;
      const PlsFit a = fit(x, y, modes[m], 2, cfg.u, cfg.v);
      MemoryChunkSource src(x, y, 10);
      const PlsFit b = fit_bigdata(src, modes[m], 2, cfg.u, cfg.v);
      c.expect(a.n_components >= 1, tag + ": no components survived");
      c.expect(a.n_components == b.n_components, tag + ": component counts differ");
      if (a.n_components != b.n_components) continue;
      double d = std::max({max_abs_diff(a.u, b.u), max_abs_diff(a.v, b.v),
                           max_abs_diff(a.w_adj, b.w_adj), max_abs_diff(a.z_adj, b.z_adj),
                           max_abs_diff(a.c, b.c), max_abs_diff(a.d, b.d)});
      if (a.g.size() > 0) d = std::max(d, max_abs_diff(a.g, b.g));
      c.expect(d <= 1e-9, tag + ": chunked/in-memory gap " + std::to_string(d));
    }
  }
  return c.ok;
}

// --------------------------------------------------------------- criterion 3
// Scaled discriminant fit on the six-group design: both components must keep
// exactly the six class-linked groups, training accuracy must reach 0.95, and
// a fresh holdout from the same design 0.90.

bool criterion3(Checker& c) {
  Matrix x;
  std::vector<std::string> labels;
  gen_plsda(3000, 1, x, labels);
  const auto gx = GroupStructure::uniform(PlsdaTruth::groups, PlsdaTruth::group_size);

  const DummyResponse dummy = encode_dummy(labels);
  const PlsFit f = fit(x, dummy, ModeSpec::pls_r(true), 2, PenaltySpec::group(100.0, gx),
                       PenaltySpec::none());
  c.expect(f.n_components == 2, "expected two components");
  if (f.n_components != 2) return c.ok;

  std::set<int> all;
  for (int k = 0; k < PlsdaTruth::groups; ++k) all.insert(k);
  c.expect(surviving_groups(f.u.col(0), gx) == all,
           "component 1 does not keep exactly the linked groups");
  c.expect(surviving_groups(f.u.col(1), gx) == all,
           "component 2 does not keep exactly the linked groups");

  const auto accuracy = [&](const Matrix& xm, const std::vector<std::string>& truth) {
    const auto pred = classify(f, xm);
    int hits = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) hits += pred[i] == truth[i];
    return double(hits) / double(truth.size());
  };
  const double train = accuracy(x, labels);
  c.expect(train >= 0.95, "train accuracy " + std::to_string(train) + " < 0.95");

  Matrix xh;
  std::vector<std::string> lh;
  gen_plsda(300, 2, xh, lh);
  const double hold = accuracy(xh, lh);
  c.expect(hold >= 0.90, "holdout accuracy " + std::to_string(hold) + " < 0.90");
  return c.ok;
}

// --------------------------------------------------------------- criterion 4
// Unpenalized invariants on 50 random datasets.  Draws are screened for a
// clear spectral gap so the 1e-8 comparisons are meaningful.

bool criterion4(Checker& c) {
  std::mt19937 gen(404);
  FitOptions opts;
  opts.svd_max_iter = 20000;
  FitOptions opts_rec = opts;
  opts_rec.use_m_recursion = true;

  int done = 0, attempts = 0;
  while (done < 50 && attempts < 500) {
    ++attempts;
    const Index p = 3 + static_cast<Index>(gen() % 18);
    const Index q = 2 + static_cast<Index>(gen() % 14);
    const Index nmin = p + q + 6;
    const Index n = nmin + static_cast<Index>(gen() % static_cast<unsigned>(61 - nmin));
    const Matrix x = randn(n, p, gen);
    const Matrix y = randn(n, q, gen);
    const int h = static_cast<int>(std::min<Index>({4, p, q}));

    const CenterScale cx = center_scale(x), cy = center_scale(y);
    const Matrix m0 = cx.x.transpose() * cy.x;
    const Vector sv = svd_full(m0).values;
    bool clear = sv[h - 1] > 1e-6 * sv[0];
    for (Index i = 1; i <= std::min<Index>(h, sv.size() - 1); ++i)
      clear = clear && (sv[i - 1] - sv[i]) > 1e-3 * sv[0];
    if (!clear) continue;
    ++done;
    const std::string tag = "dataset " + std::to_string(done);
    const double scale = sv[0];

    // mode (i): orthonormal weights, singular values, cross-score structure
    const PlsFit f1 = fit(x, y, ModeSpec::pls_svd(), h, {}, {}, opts);
    const Matrix ih = Matrix::Identity(h, h);
    c.expect(max_abs_diff(f1.u.transpose() * f1.u, ih) <= 1e-8, tag + ": U not orthonormal");
    c.expect(max_abs_diff(f1.v.transpose() * f1.v, ih) <= 1e-8, tag + ": V not orthonormal");
    c.expect((f1.delta - sv.head(h)).cwiseAbs().maxCoeff() <= 1e-8 * scale,
             tag + ": deltas differ from singular values");
    const Matrix cross = f1.xi.transpose() * f1.omega;
    double offd = 0.0;
    for (int a = 0; a < h; ++a)
      for (int b = 0; b < h; ++b)
        if (a != b) offd = std::max(offd, std::abs(cross(a, b)));
    c.expect(offd <= 1e-8 * scale, tag + ": cross-block scores not uncorrelated");

    const PlsFit f1z = fit(x, y, ModeSpec::pls_svd(), h, PenaltySpec::lasso(0.0),
                           PenaltySpec::lasso(0.0), opts);
    c.expect((f1z.u - f1.u).norm() == 0.0, tag + ": lambda=0 fit differs from unpenalized");

    // mode (ii): orthogonal scores in each block, delta matches the leading
    // singular value of the running deflated cross-product
    const PlsFit f2 = fit(x, y, ModeSpec::pls_w2a(), h, {}, {}, opts);
    const auto diag_gap = [](const Matrix& s) {
      const Matrix g = s.transpose() * s;
      double off = 0.0;
      for (Index a = 0; a < g.rows(); ++a)
        for (Index b = 0; b < g.cols(); ++b)
          if (a != b) off = std::max(off, std::abs(g(a, b)));
      return off / g.diagonal().maxCoeff();
    };
    c.expect(diag_gap(f2.xi) <= 1e-8, tag + ": X-scores not orthogonal");
    c.expect(diag_gap(f2.omega) <= 1e-8, tag + ": Y-scores not orthogonal");
    Matrix xd = cx.x, yd = cy.x;
    for (int k = 0; k < f2.n_components; ++k) {
      const double dk = svd_full(xd.transpose() * yd).values[0];
      c.expect(std::abs(f2.delta[k] - dk) <= 1e-8 * scale,
               tag + ": own-score deflation delta mismatch");
      const Vector xi = f2.xi.col(k), om = f2.omega.col(k);
      xd -= xi * (xi.transpose() * xd) / xi.squaredNorm();
      yd -= om * (om.transpose() * yd) / om.squaredNorm();
    }

    // mode (iii): ridge 1 collapses to mode (i); ridge 0 whitens the scores
    const PlsFit f3a = fit(x, y, ModeSpec::rcca(1.0, 1.0, true), h, {}, {}, opts);
    c.expect((f3a.u - f1.u).norm() == 0.0 && (f3a.v - f1.v).norm() == 0.0 &&
                 (f3a.delta - f1.delta).norm() == 0.0,
             tag + ": convex ridge 1 differs from plain svd mode");
    const PlsFit f3b = fit(x, y, ModeSpec::rcca(0.0, 0.0, true), h, {}, {}, opts);
    c.expect(max_abs_diff(f3b.xi.transpose() * f3b.xi, ih) <= 1e-8,
             tag + ": ridge-0 X-scores not orthonormal");
    c.expect(max_abs_diff(f3b.omega.transpose() * f3b.omega, ih) <= 1e-8,
             tag + ": ridge-0 Y-scores not orthonormal");

    // mode (iv): diagonal score Gram, projection fitted values, scaled twin
    const PlsFit f4 = fit(x, y, ModeSpec::pls_r(), h, {}, {}, opts);
    c.expect(diag_gap(f4.xi) <= 1e-8, tag + ": regression scores not orthogonal");
    const Matrix proj = f4.xi * (f4.xi.transpose() * f4.xi).ldlt().solve(f4.xi.transpose() * cy.x);
    const Matrix fitted = predict(f4, x);
    const Matrix oracle = proj.rowwise() + cy.means.transpose();
    c.expect(max_abs_diff(fitted, oracle) <= 1e-8 * (cy.x.norm() + 1.0),
             tag + ": fitted values are not the score-space projection");
    const PlsFit f4s = fit(x, y, ModeSpec::pls_r(true), h, {}, {}, opts);
    c.expect(max_abs_diff(predict(f4s, x), fitted) <= 1e-8 * (cy.x.norm() + 1.0),
             tag + ": scaled recursion changes fitted values");

    // both kernels, same answer
    for (const ModeSpec& m : {ModeSpec::pls_svd(), ModeSpec::pls_w2a(), ModeSpec::pls_r()}) {
      const PlsFit fa = fit(x, y, m, h, {}, {}, opts);
      const PlsFit fb = fit(x, y, m, h, {}, {}, opts_rec);
      c.expect(max_abs_diff(fa.u, fb.u) <= 1e-8 && max_abs_diff(fa.v, fb.v) <= 1e-8,
               tag + ": recursion kernel drifts from explicit deflation");
    }
  }
  c.expect(done == 50, "could not draw 50 well-separated datasets");
  return c.ok;
}

// --------------------------------------------------------------- criterion 5
// The three SVD kernels: blockwise leading triple over random partitions,
// streaming rank-limited estimate against the batch cross-product, and the
// rank-one deflation recovering the second singular value.

bool criterion5(Checker& c) {
  std::mt19937 gen(505);

  int partitions = 0, mats = 0;
  while (partitions < 100 && mats < 200) {
    const Index q = 2 + static_cast<Index>(gen() % 9);
    const Index p = 2 * q + 1 + static_cast<Index>(gen() % 40);
    const Matrix m = randn(p, q, gen);
    const SvdFactorization sf = svd_full(m);
    if ((sf.values[0] - sf.values[1]) < 1e-3 * sf.values[0]) continue; // no clear gap
    ++mats;
    for (int t = 0; t < 5 && partitions < 100; ++t, ++partitions) {
      const Index kmax = p / q;
      const Index k = 2 + static_cast<Index>(gen() % static_cast<unsigned>(std::min<Index>(3, kmax - 1)));
      std::vector<Index> rows(static_cast<std::size_t>(k), q);
      for (Index left = p - k * q; left > 0; --left) ++rows[gen() % rows.size()];
      const SvdTriple s = block_svd_leading(m, rows, t % 2 == 1);
      c.expect(std::abs(s.delta - sf.values[0]) <= 1e-8 * sf.values[0],
               "block delta off at partition " + std::to_string(partitions));
      const double sgn_u = s.u.dot(sf.u.col(0)) < 0 ? -1.0 : 1.0;
      const double sgn_v = s.v.dot(sf.v.col(0)) < 0 ? -1.0 : 1.0;
      c.expect((s.u - sgn_u * sf.u.col(0)).cwiseAbs().maxCoeff() <= 1e-8 &&
                   (s.v - sgn_v * sf.v.col(0)).cwiseAbs().maxCoeff() <= 1e-8,
               "block singular vectors off at partition " + std::to_string(partitions));
    }
  }
  c.expect(partitions == 100, "could not assemble 100 partitions");

  // 200 streamed pairs, full-rank state vs the batch centered cross-product
  const Index p = 8, q = 5;
  const Matrix b = randn(q, p, gen) / std::sqrt(double(p));
  IncrementalState st = incremental_init(p, q, static_cast<int>(q));
  Matrix xs(200, p), ys(200, q);
  for (Index i = 0; i < 200; ++i) {
    const Matrix xr = randn(1, p, gen);
    const Matrix yr = xr * b.transpose() + 0.5 * randn(1, q, gen);
    xs.row(i) = xr;
    ys.row(i) = yr;
    incremental_update(st, xr.transpose(), yr.transpose());
  }
  const Matrix est = incremental_estimate(st);
  const Matrix batch = center_scale(xs).x.transpose() * center_scale(ys).x;
  c.expect((est - batch).norm() <= 1e-6 * batch.norm(),
           "incremental estimate drifts from the batch cross-product");

  // deflation: subtracting the leading rank-one term exposes delta 2
  const Matrix qu = Eigen::HouseholderQR<Matrix>(randn(12, 12, gen)).householderQ();
  const Matrix qv = Eigen::HouseholderQR<Matrix>(randn(9, 9, gen)).householderQ();
  Vector d(4);
  d << 7.0, 4.0, 2.0, 1.0;
  const Matrix m = qu.leftCols(4) * d.asDiagonal() * qv.leftCols(4).transpose();
  const SvdTriple s1 = svd_leading(m);
  const SvdTriple s2 = svd_leading(m - s1.delta * s1.u * s1.v.transpose());
  c.expect(std::abs(s1.delta - 7.0) <= 1e-8, "leading value off");
  c.expect(std::abs(s2.delta - 4.0) <= 1e-8, "deflated value off");
  return c.ok;
}

// --------------------------------------------------------------- criterion 6
// Penalty closed forms: the lasso output must match a per-coordinate grid
// minimization of u^2 - 2mu + 2*lambda*|u|, and the mixed penalty must hit its
// two limiting directions.

bool criterion6(Checker& c) {
  std::mt19937 gen(606);
  std::uniform_real_distribution<double> u01(0.0, 1.0);

  const double step = 1e-4;
  for (int t = 0; t < 20; ++t) {
    const Matrix mm = randn(8, 5, gen);
    Vector v = randn(5, 1, gen);
    v /= v.norm();
    const Vector m = mm * v;
    std::vector<double> mags;
    for (Index i = 0; i < m.size(); ++i) mags.push_back(std::abs(m[i]));
    std::sort(mags.begin(), mags.end());
    const double lam = mags[4] * (0.5 + u01(gen)); // some coordinates die, some survive

    const Vector out = sparsify(m, PenaltySpec::lasso(lam));
    for (Index i = 0; i < m.size(); ++i) {
      const double a = std::abs(m[i]) + 0.1;
      double best_t = 0.0, best = 1e300;
      for (double x = -a; x <= a; x += step) {
        const double f = x * x - 2.0 * m[i] * x + 2.0 * lam * std::abs(x);
        if (f < best) {
          best = f;
          best_t = x;
        }
      }
      c.expect(std::abs(out[i] - best_t) <= 2.0 * step,
               "lasso output off the grid minimum at instance " + std::to_string(t));
    }
  }

  // alpha limits of the mixed penalty, as angular deviation of unit vectors
  const auto chord = [](const Vector& a, const Vector& b) {
    const Vector ua = a / a.norm();
    const Vector ub = b / b.norm();
    return std::min((ua - ub).norm(), (ua + ub).norm());
  };
  const auto g = GroupStructure::uniform(3, 4);
  for (int t = 0; t < 20; ++t) {
    const Vector m = randn(12, 1, gen);
    const double lam = 0.3 * m.cwiseAbs().mean();
    const Vector pure_lasso = sparsify(m, PenaltySpec::sparse_group(lam, 1.0, g));
    const Vector pure_group = sparsify(m, PenaltySpec::sparse_group(lam, 0.0, g));
    const Vector want_lasso = sparsify(m, PenaltySpec::lasso(lam / 2.0));
    const Vector want_group = sparsify(m, PenaltySpec::group(2.0 * lam, g));
    c.expect(chord(pure_lasso, want_lasso) <= 1e-12,
             "alpha=1 direction off at instance " + std::to_string(t));
    c.expect(chord(pure_group, want_group) <= 1e-12,
             "alpha=0 direction off at instance " + std::to_string(t));
  }
  return c.ok;
}

// --------------------------------------------------------------- criterion 7
// Requesting as many regression components as X has rank reproduces the
// centered X block exactly from scores and loadings.

bool criterion7(Checker& c) {
  std::mt19937 gen(707);
  FitOptions opts;
  opts.svd_max_iter = 200000;

  int done = 0, attempts = 0;
  while (done < 20 && attempts < 200) {
    ++attempts;
    const Index p = 2 + static_cast<Index>(gen() % 11);
    const Index q = 1 + static_cast<Index>(gen() % 6);
    const Index n = p + 5 + static_cast<Index>(gen() % 20);
    const Matrix x = randn(n, p, gen);
    const Matrix y = randn(n, q, gen);

    const CenterScale cs = center_scale(x);
    const Vector sx = svd_full(cs.x).values;
    if (sx[p - 1] < 1e-3 * sx[0]) continue; // keep the instances honestly full-rank
    ++done;

    const PlsFit f = fit(x, y, ModeSpec::pls_r(), static_cast<int>(p), {}, {}, opts);
    c.expect(f.n_components == static_cast<int>(p),
             "instance " + std::to_string(done) + ": expected rank-many components");
    if (f.n_components != static_cast<int>(p)) continue;
    const double rel = (f.xi * f.c.transpose() - cs.x).norm() / cs.x.norm();
    c.expect(rel <= 1e-8,
             "instance " + std::to_string(done) + ": reconstruction error " + std::to_string(rel));
  }
  c.expect(done == 20, "could not draw 20 full-rank instances");
  return c.ok;
}

} // namespace

int main() {
  struct Criterion {
    int id;
    const char* what;
    double budget_s;
    bool (*run)(Checker&);
  };
  const Criterion table[] = {
      {1, "group recovery and leading-weight correlation", 10.0, criterion1},
      {2, "chunked estimator matches in-memory fits", 60.0, criterion2},
      {3, "group discriminant fit selects linked groups and classifies", 30.0, criterion3},
      {4, "mode equivalences and orthogonality invariants", 60.0, criterion4},
      {5, "block, streaming, and deflation SVD kernels", 60.0, criterion5},
      {6, "penalty closed forms against brute force", 30.0, criterion6},
      {7, "exact decomposition at full rank", 10.0, criterion7},
  };

  int failures = 0;
  for (const Criterion& cr : table) {
    Checker ck;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      cr.run(ck);
    } catch (const std::exception& e) {
      ck.expect(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs >= cr.budget_s) ck.expect(false, "over time budget");
    std::printf("[%s] criterion %d: %s (%.1fs of %.0fs)%s%s\n", ck.ok ? "PASS" : "FAIL", cr.id,
                cr.what, secs, cr.budget_s, ck.why.empty() ? "" : " -- ", ck.why.c_str());
    std::fflush(stdout);
    failures += !ck.ok;
  }
  return failures == 0 ? 0 : 1;
}
