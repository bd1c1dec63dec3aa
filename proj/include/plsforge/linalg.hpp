#pragma once

#include "plsforge/types.hpp"

namespace plsforge {

// Compact SVD (thin U/V, values descending).  Column signs follow the
// deterministic convention in fix_sign.
SvdFactorization svd_full(const Matrix& m);

// Leading singular triple by power iteration on the smaller of M'M / MM'.
// Rayleigh-quotient residual test: stops when ||G w - rho w|| <= tol * rho.
// A zero matrix yields the degenerate zero triple; failure to converge
// within max_iter throws convergence_error.
SvdTriple svd_leading(const Matrix& m, double tol = 1e-10, int max_iter = 1000);

// (A + ridge I)^(-1/2) for symmetric positive semidefinite A, via
// eigendecomposition.  Eigenvalues below 1e-12 * lambda_max (after the ridge)
// are clamped up to that floor before the inverse square root.
Matrix inv_sqrt_sym(const Matrix& a, double ridge = 0.0);

struct CenterScale {
  Matrix x;
  Vector means; // applied shift (zeros when center = false)
  Vector sds;   // sample sd when scale = true (0 marks a constant column,
                // which is centered but not divided); ones otherwise
};

CenterScale center_scale(const Matrix& x, bool center = true, bool scale = false);

// X - B (B'B)^(-1) B'X, the projection of X onto the orthocomplement of
// span(basis).  Rank deficiency of the basis (Gram condition below
// 1e-12 relative) throws degenerate_basis.  An empty basis returns X.
Matrix residual_projection(const Matrix& basis, const Matrix& x);

} // namespace plsforge
