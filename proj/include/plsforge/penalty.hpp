#pragma once

#include "plsforge/types.hpp"

#include <optional>
#include <vector>

namespace plsforge {

// Contiguous group layout over a coefficient vector: sizes[k] consecutive
// entries form group k.
struct GroupStructure {
  std::vector<int> sizes;
  std::vector<int> offsets; // derived; offsets[k] = start of group k

  GroupStructure() = default;
  explicit GroupStructure(std::vector<int> group_sizes);
  static GroupStructure uniform(int count, int size);

  int dim() const { return offsets.empty() ? 0 : offsets.back() + sizes.back(); }
  int count() const { return static_cast<int>(sizes.size()); }
  void validate(Index expected_dim) const; // throws invalid_input
};

struct PenaltySpec {
  enum class Kind { none, lasso, group, sparse_group };

  Kind kind = Kind::none;
  double lambda = 0.0;
  double alpha = 0.0; // sparse_group mix in [0, 1]: 1 = pure lasso term
  std::optional<GroupStructure> groups;

  static PenaltySpec none() { return {}; }
  static PenaltySpec lasso(double lambda);
  static PenaltySpec group(double lambda, GroupStructure g);
  static PenaltySpec sparse_group(double lambda, double alpha, GroupStructure g);

  void validate(Index dim) const; // throws invalid_input
  bool active() const { return kind != Kind::none && lambda > 0.0; }
};

// Componentwise sign(x) * (|x| - lambda)_+ .
double soft_threshold(double x, double lambda);
Vector soft_threshold(const Vector& x, double lambda);

// Closed-form solution direction of the penalized rank-one subproblem, applied
// to the unconstrained target m (= M v or M'u).  Scale is whatever the closed
// form yields; callers normalize.
//   none:         m
//   lasso:        soft_threshold(m, lambda)
//   group:        per group k, (1 - (lambda/2) sqrt(p_k) / ||m_k||)_+ m_k
//   sparse_group: per group k with g1 = soft_threshold(m_k, lambda alpha / 2):
//                 0 when ||g1|| / ((1-alpha) sqrt(p_k)) <= lambda,
//                 else g1/2 - lambda (1-alpha) sqrt(p_k) g1 / (2 ||g1||).
//                 At alpha = 1 the zero test degenerates to g1 == 0.
Vector sparsify(const Vector& m, const PenaltySpec& pen);

// Self-check of the documented limiting behaviour of the sparse-group form on
// seeded random inputs: angular deviation from lasso(lambda/2) at alpha = 1,
// from group(2 lambda) at alpha = 0, and from the input at lambda = 0.
struct SparsifierLimitsReport {
  int trials = 0;
  double max_angle_alpha1 = 0.0; // radians vs lasso(lambda/2)
  double max_angle_alpha0 = 0.0; // radians vs group(2 lambda)
  double max_angle_lambda0 = 0.0; // radians vs identity
};

SparsifierLimitsReport sparsifier_limits_check(int trials = 50, std::uint64_t seed = 1234);

} // namespace plsforge
