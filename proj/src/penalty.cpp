#include "plsforge/penalty.hpp"

#include "plsforge/rng.hpp"

#include <cmath>

namespace plsforge {

GroupStructure::GroupStructure(std::vector<int> group_sizes) : sizes(std::move(group_sizes)) {
  offsets.reserve(sizes.size());
  int at = 0;
  for (int s : sizes) {
    if (s <= 0) throw invalid_input("GroupStructure: nonpositive group size");
    offsets.push_back(at);
    at += s;
  }
}

GroupStructure GroupStructure::uniform(int count, int size) {
  if (count <= 0 || size <= 0) throw invalid_input("GroupStructure: nonpositive layout");
  return GroupStructure(std::vector<int>(static_cast<std::size_t>(count), size));
}

void GroupStructure::validate(Index expected_dim) const {
  if (sizes.empty()) throw invalid_input("GroupStructure: empty");
  if (dim() != expected_dim)
    throw invalid_input("GroupStructure: sizes sum to " + std::to_string(dim()) +
                        ", expected " + std::to_string(expected_dim));
}

PenaltySpec PenaltySpec::lasso(double lambda) {
  PenaltySpec p;
  p.kind = Kind::lasso;
  p.lambda = lambda;
  return p;
}

PenaltySpec PenaltySpec::group(double lambda, GroupStructure g) {
  PenaltySpec p;
  p.kind = Kind::group;
  p.lambda = lambda;
  p.groups = std::move(g);
  return p;
}

PenaltySpec PenaltySpec::sparse_group(double lambda, double alpha, GroupStructure g) {
  PenaltySpec p;
  p.kind = Kind::sparse_group;
  p.lambda = lambda;
  p.alpha = alpha;
  p.groups = std::move(g);
  return p;
}

void PenaltySpec::validate(Index dim) const {
  if (lambda < 0) throw invalid_input("PenaltySpec: negative lambda");
  if (kind == Kind::sparse_group && (alpha < 0 || alpha > 1))
    throw invalid_input("PenaltySpec: alpha outside [0, 1]");
  if (kind == Kind::group || kind == Kind::sparse_group) {
    if (!groups) throw invalid_input("PenaltySpec: group penalty without group structure");
    groups->validate(dim);
  }
}

double soft_threshold(double x, double lambda) {
  const double a = std::abs(x) - lambda;
  return a > 0 ? (x > 0 ? a : -a) : 0.0;
}

Vector soft_threshold(const Vector& x, double lambda) {
  Vector out(x.size());
  for (Index i = 0; i < x.size(); ++i) out[i] = soft_threshold(x[i], lambda);
  return out;
}

Vector sparsify(const Vector& m, const PenaltySpec& pen) {
  require_finite(m, "sparsify");
  pen.validate(m.size());
  switch (pen.kind) {
    case PenaltySpec::Kind::none:
      return m;
    case PenaltySpec::Kind::lasso:
      return soft_threshold(m, pen.lambda);
    case PenaltySpec::Kind::group: {
      Vector out = Vector::Zero(m.size());
      const GroupStructure& gs = *pen.groups;
      for (int k = 0; k < gs.count(); ++k) {
        const auto seg = m.segment(gs.offsets[k], gs.sizes[k]);
        const double nrm = seg.norm();
        if (nrm == 0.0) continue; // zero block stays zero
        const double f = 1.0 - 0.5 * pen.lambda * std::sqrt(double(gs.sizes[k])) / nrm;
        if (f > 0) out.segment(gs.offsets[k], gs.sizes[k]) = f * seg;
      }
      return out;
    }
    case PenaltySpec::Kind::sparse_group: {
      Vector out = Vector::Zero(m.size());
      const GroupStructure& gs = *pen.groups;
      for (int k = 0; k < gs.count(); ++k) {
        const int off = gs.offsets[k], sz = gs.sizes[k];
        Vector g1 = soft_threshold(Vector(m.segment(off, sz)), 0.5 * pen.lambda * pen.alpha);
        const double g1n = g1.norm();
        const double denom = (1.0 - pen.alpha) * std::sqrt(double(sz));
        if (denom == 0.0) { // alpha = 1: block survives iff anything survived the threshold
          if (g1n > 0.0) out.segment(off, sz) = 0.5 * g1;
          continue;
        }
        if (g1n / denom <= pen.lambda) continue; // block zeroed
        out.segment(off, sz) = 0.5 * g1 - (0.5 * pen.lambda * denom / g1n) * g1;
      }
      return out;
    }
  }
  throw invalid_input("sparsify: unknown penalty kind");
}

namespace {

double angle_between(const Vector& a, const Vector& b) {
  const double na = a.norm(), nb = b.norm();
  if (na == 0.0 && nb == 0.0) return 0.0;
  if (na == 0.0 || nb == 0.0) return 1.5707963267948966; // orthogonal by convention
  // acos(dot) cannot resolve angles below ~1e-8; the chord between the unit
  // vectors can, and 2*asin(chord/2) is exact for the nearly-parallel case too
  const double chord = std::min((a / na - b / nb).norm(), 2.0);
  return 2.0 * std::asin(0.5 * chord);
}

} // namespace

SparsifierLimitsReport sparsifier_limits_check(int trials, std::uint64_t seed) {
  SparsifierLimitsReport rep;
  rep.trials = trials;
  Rng rng(seed);
  for (int t = 0; t < trials; ++t) {
    const int ngroups = 2 + static_cast<int>(rng.below(4));
    std::vector<int> sizes;
    int dim = 0;
    for (int k = 0; k < ngroups; ++k) {
      sizes.push_back(2 + static_cast<int>(rng.below(5)));
      dim += sizes.back();
    }
    GroupStructure gs(sizes);
    Vector m(dim);
    for (int i = 0; i < dim; ++i) m[i] = 2.0 * rng.normal();
    const double lambda = 0.2 + rng.u01();

    // alpha = 1: direction of lasso with threshold lambda/2
    Vector sg1 = sparsify(m, PenaltySpec::sparse_group(lambda, 1.0, gs));
    Vector la = sparsify(m, PenaltySpec::lasso(0.5 * lambda));
    rep.max_angle_alpha1 = std::max(rep.max_angle_alpha1, angle_between(sg1, la));

    // alpha = 0: direction of the group form at twice the level
    Vector sg0 = sparsify(m, PenaltySpec::sparse_group(lambda, 0.0, gs));
    Vector gr = sparsify(m, PenaltySpec::group(2.0 * lambda, gs));
    rep.max_angle_alpha0 = std::max(rep.max_angle_alpha0, angle_between(sg0, gr));

    // lambda = 0: identity direction for any alpha
    const double alpha = rng.u01();
    Vector sg = sparsify(m, PenaltySpec::sparse_group(0.0, alpha, gs));
    rep.max_angle_lambda0 = std::max(rep.max_angle_lambda0, angle_between(sg, m));
  }
  return rep;
}

} // namespace plsforge
