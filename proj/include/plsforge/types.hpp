#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace plsforge {

// Column-major double storage throughout; Eigen::MatrixXd is exactly that.
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

struct error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Bad arguments: shapes, non-finite values, group layouts, parameter ranges.
struct invalid_input : error {
  using error::error;
};

// Iteration budget exhausted before reaching the requested tolerance.
struct convergence_error : error {
  using error::error;
};

// Projection basis (or other factor) is numerically rank deficient.
struct degenerate_basis : error {
  using error::error;
};

// Chunked-dataset manifest missing, malformed, or inconsistent with its files.
struct manifest_error : error {
  using error::error;
};

// Operation requested on a fit whose mode does not define it.
struct mode_error : error {
  using error::error;
};

struct io_error : error {
  using error::error;
};

// Leading singular triple.  degenerate marks the all-zero result produced
// for a zero input matrix (delta == 0, u == 0, v == 0).
struct SvdTriple {
  double delta = 0.0;
  Vector u;
  Vector v;
  bool degenerate = false;
  int iterations = 0;    // filled by iterative backends
  double residual = 0.0; // last eigen-residual of the iteration
};

// Compact SVD, singular values descending.
struct SvdFactorization {
  Matrix u;      // p x r
  Vector values; // r, descending, nonnegative
  Matrix v;      // q x r
};

inline void require_finite(const Matrix& m, const char* name) {
  if (!m.allFinite()) throw invalid_input(std::string(name) + ": non-finite entries");
}

inline void require_finite(const Vector& v, const char* name) {
  if (!v.allFinite()) throw invalid_input(std::string(name) + ": non-finite entries");
}

// Deterministic sign convention: the entry of u with largest absolute value
// (lowest index on ties) is made positive; v flips with u so u delta v' is
// preserved.
inline void fix_sign(Vector& u, Vector& v) {
  if (u.size() == 0) return;
  Index imax = 0;
  double amax = -1.0;
  for (Index i = 0; i < u.size(); ++i) {
    const double a = std::abs(u[i]);
    if (a > amax) {
      amax = a;
      imax = i;
    }
  }
  if (u[imax] < 0.0) {
    u = -u;
    v = -v;
  }
}

} // namespace plsforge
