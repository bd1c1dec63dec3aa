#pragma once

#include "plsforge/penalty.hpp"
#include "plsforge/types.hpp"

#include <string>
#include <vector>

namespace plsforge {

// The four two-block methods under one component loop.
//   pls_svd : symmetric covariance decomposition, rank-one deflation of M
//   pls_w2a : Wold's two-block mode A, both blocks deflated by their own scores
//   rcca    : ridge-regularized CCA; pls_svd on metric-transformed blocks
//   pls_r   : predictive PLS regression (NIPALS); see also fit_simpls
enum class Method { pls_svd, pls_w2a, rcca, pls_r };

struct ModeSpec {
  Method method = Method::pls_r;

  // rcca only.  Plain form uses (S + ridge I)^(-1/2); the convex form uses
  // ((1 - ridge) S + ridge I)^(-1/2) with ridge in [0, 1], which reproduces
  // CCA at 0 and pls_svd at 1 (the identity transform is taken literally
  // there instead of routing an exact identity through the eigensolver).
  double ridge_x = 0.0;
  double ridge_y = 0.0;
  bool convex_ridge = false;

  // pls_r only: scaled NIPALS convention (omega_h = Y_{h-1} v_h and
  // P_H = diag(1/alpha_h)) instead of the default unscaled one.
  bool scaled_nipals = false;

  static ModeSpec pls_svd();
  static ModeSpec pls_w2a();
  static ModeSpec rcca(double ridge_x, double ridge_y, bool convex = false);
  static ModeSpec pls_r(bool scaled = false);
};

struct FitOptions {
  bool center = true;
  bool scale = false;
  double inner_eps = 1e-8; // relative change of u between sweeps
  int inner_max_iter = 500;
  double svd_tol = 1e-10;
  int svd_max_iter = 1000;
  // Run the sufficient-statistic ((p,q)-space) kernel instead of explicit
  // X/Y deflation.  Identical results; this is the kernel the chunked path
  // reuses, so it exists in-memory both for testing and for small-n use.
  bool use_m_recursion = false;
  int threads = 1; // consumed by the chunked driver, ignored in-memory
};

struct ComponentDiag {
  int svd_iterations = 0;
  double svd_residual = 0.0;
  int inner_iterations = 0;
  bool inner_converged = true;
  bool degenerate = false;
};

struct PlsFit {
  ModeSpec mode;
  PenaltySpec pen_u, pen_v;
  bool simpls = false;

  int requested = 0;    // components asked for
  int n_components = 0; // components stored (early stop shrinks this)

  Matrix u, v;         // weight vectors, one component per column, unit columns
  Matrix w_adj, z_adj; // adjusted weights: scores on the *original* block
  Matrix xi, omega;    // score columns, n rows
  Matrix c, d;         // loading rows (stored as columns); semantics per mode
  Matrix g;            // pls_r response deflation loadings Y_{h-1}'xi / ||xi||^2
  Vector delta;        // u' M_{h-1} v; the leading singular value when unpenalized
  Vector p_inner;      // realized inner-relation coefficients xi'omega/||xi||^2
  Vector alpha;        // pls_r: ||xi||^2 / ||Y_{h-1}' xi||

  Matrix b_stored; // simpls keeps its coefficient matrix (needs Y to rebuild)

  // Score maps, filled by the recursion/chunked paths: applied to *centered*
  // blocks, xi_h = Xc map_x.col(h) and omega_h = Xc map_omega_x.col(h) +
  // Yc map_omega_y.col(h).  Empty on explicit-deflation fits.
  Matrix map_x, map_omega_x, map_omega_y;

  Vector x_means, x_sds, y_means, y_sds;
  bool centered = false, scaled = false;

  std::vector<std::string> class_labels; // nonempty for discriminant fits

  std::vector<ComponentDiag> diag;
  std::vector<std::string> warnings;
};

// One penalized rank-one subproblem: alternate sparsify/normalize sweeps from
// the given initial triple until the relative change of u drops below eps.
// A sweep that zeroes a weight vector marks the result degenerate.
// Exceeding max_iter is reported through converged = false, not an error.
struct InnerLoopResult {
  Vector u, v;
  int iterations = 0;
  bool converged = false;
  bool degenerate = false;
};

InnerLoopResult inner_loop(const Matrix& m, Vector u0, Vector v0, const PenaltySpec& pen_u,
                           const PenaltySpec& pen_v, double eps = 1e-8, int max_iter = 500);

PlsFit fit(const Matrix& x, const Matrix& y, const ModeSpec& mode, int ncomp,
           const PenaltySpec& pen_u = {}, const PenaltySpec& pen_v = {},
           const FitOptions& opts = {});

// SIMPLS-style regression: weights live on the original variables, the
// cross-product is deflated by projecting out accumulated X-loadings.
// Penalties apply directly to the weight vectors.
PlsFit fit_simpls(const Matrix& x, const Matrix& y, int ncomp, const PenaltySpec& pen_u = {},
                  const PenaltySpec& pen_v = {}, const FitOptions& opts = {});

// Regression coefficient matrix of a predictive fit (pls_r or simpls).
// pls_r: W_adj G' (unscaled convention) == W_adj diag(1/alpha_h) V' (scaled);
// identical when unpenalized.
Matrix regression_coefficients(const PlsFit& fit);

// Apply a predictive fit to new rows: centered/scaled with the training
// statistics, multiplied by the coefficient matrix, response statistics
// folded back.  Accepts 0-row input.
Matrix predict(const PlsFit& fit, const Matrix& x_new);

// Indicator coding of a categorical response, classes ordered by first
// appearance.  Needs at least two distinct labels.
struct DummyResponse {
  std::vector<std::string> labels; // distinct class names in coding order
  std::vector<int> indices;        // per-row class index
  Matrix y;                        // n x #classes indicator matrix
};

DummyResponse encode_dummy(const std::vector<std::string>& labels);

// Discriminant fit: pls_r (or SIMPLS via opts-less helper below) on the
// indicator matrix, remembering the class ordering for classify().
PlsFit fit(const Matrix& x, const DummyResponse& y, const ModeSpec& mode, int ncomp,
           const PenaltySpec& pen_u = {}, const PenaltySpec& pen_v = {},
           const FitOptions& opts = {});

// Predicted class per row: argmax over predicted indicator columns, ties
// resolved to the lowest column index.
std::vector<std::string> classify(const PlsFit& fit, const Matrix& x_new);

} // namespace plsforge
