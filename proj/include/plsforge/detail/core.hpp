#pragma once

// Sufficient-statistic component loop shared by the in-memory recursion path
// and the chunked driver.  Everything here lives in (p, q)-space: the caller
// supplies the centered cross-product (and Gram matrices where the mode needs
// them) and gets back weights, loadings, and per-component combination
// vectors that turn rows of the original blocks into scores.

#include "plsforge/pls.hpp"

namespace plsforge::detail {

struct CoreStats {
  Matrix m0;   // X'Y, already metric-transformed for rcca
  Matrix n0;   // X'X   (pls_w2a, pls_r); empty otherwise
  Matrix o0;   // Y'Y   (pls_w2a); empty otherwise
  Matrix a, b; // rcca transforms; empty otherwise
};

struct CoreOut {
  Matrix u, v;
  Matrix w_adj, z_adj;
  Matrix c, d, g;
  Vector delta, p_inner, alpha;
  // xi_h = X * xi_xc.col(h);  omega_h = X * om_xc.col(h) + Y * om_yc.col(h)
  Matrix xi_xc, om_xc, om_yc;
  std::vector<ComponentDiag> diag;
  std::vector<std::string> warnings;
  int done = 0;
};

CoreOut core_loop_stats(const CoreStats& stats, const ModeSpec& mode, int ncomp,
                        const PenaltySpec& pen_u, const PenaltySpec& pen_v,
                        const FitOptions& opts);

// Shared single-component extraction: leading triple, optional penalized
// sweeps, diagnostics.  Returns false when extraction must stop (exhausted
// or degenerate); a warning is appended in that case.
bool extract_component(const Matrix& m, double m0_norm, const PenaltySpec& pen_u,
                       const PenaltySpec& pen_v, const FitOptions& opts, int h, Vector& u,
                       Vector& v, ComponentDiag& dg, std::vector<std::string>& warnings);

// w -= dirs_j (covs_j . w) applied for j = count-1 .. 0 (rightmost factor of
// the accumulated projector product acts first).
Vector apply_projection_chain(Vector w, const Matrix& dirs, const Matrix& covs, int count);

// q bounds the count only for the modes that exhaust M itself (i)-(iii);
// pls_r / simpls keep extracting until X runs out of rank, so they pass
// q_bounds = false (univariate-response regression needs H up to rank(X)).
int cap_components(int requested, Index n, Index p, Index q, bool q_bounds, bool centered,
                   std::vector<std::string>& warnings);

// ((1 - l) S + l I)^(-1/2) or (S + l I)^(-1/2); exact identity short-circuit
// for the convex form at l = 1.
Matrix rcca_transform(const Matrix& gram, double ridge, bool convex);

} // namespace plsforge::detail
