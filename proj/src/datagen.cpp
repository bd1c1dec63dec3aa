#include "plsforge/datagen.hpp"

#include "plsforge/rng.hpp"

#include <algorithm>

namespace plsforge {

namespace {

// k distinct ascending indices out of [0, total)
std::vector<int> draw_groups(Rng& rng, int total, int k) {
  std::vector<int> all(static_cast<std::size_t>(total));
  for (int i = 0; i < total; ++i) all[static_cast<std::size_t>(i)] = i;
  rng.shuffle(all);
  all.resize(static_cast<std::size_t>(k));
  std::sort(all.begin(), all.end());
  return all;
}

// global positions of the 15 signal slots per active group, ascending
std::vector<Index> signal_positions(Rng& rng, const std::vector<int>& active, int group_size,
                                    int signal_per_group) {
  std::vector<Index> pos;
  for (int g : active) {
    std::vector<int> local(static_cast<std::size_t>(group_size));
    for (int i = 0; i < group_size; ++i) local[static_cast<std::size_t>(i)] = i;
    rng.shuffle(local);
    local.resize(static_cast<std::size_t>(signal_per_group));
    std::sort(local.begin(), local.end());
    for (int i : local) pos.push_back(static_cast<Index>(g) * group_size + i);
  }
  return pos;
}

Vector deal_pattern(Rng& rng, Index dim, const std::vector<Index>& slots,
                    std::vector<double> pattern) {
  rng.shuffle(pattern);
  Vector c = Vector::Zero(dim);
  for (std::size_t i = 0; i < slots.size(); ++i) c[slots[i]] = pattern[i];
  return c;
}

std::vector<double> x_pattern() {
  std::vector<double> v;
  v.insert(v.end(), 15, 1.0);
  v.insert(v.end(), 30, -1.0);
  v.insert(v.end(), 15, 1.5);
  return v;
}

std::vector<double> y_pattern() {
  std::vector<double> v;
  v.insert(v.end(), 15, -1.0);
  v.insert(v.end(), 15, -1.5);
  v.insert(v.end(), 30, 1.0);
  return v;
}

} // namespace

GroupPlsTruth stream_group_pls(Index n, std::uint64_t seed, Index block_rows,
                               const PairSink& sink) {
  if (n < 4) throw invalid_input("stream_group_pls: need n >= 4");
  if (block_rows < 1) throw invalid_input("stream_group_pls: block_rows must be >= 1");
  Rng rng(seed);

  GroupPlsTruth t;
  t.seed = seed;
  t.active_x = draw_groups(rng, GroupPlsTruth::x_groups, 4);
  t.active_y = draw_groups(rng, GroupPlsTruth::y_groups, 4);
  const auto x_slots = signal_positions(rng, t.active_x, GroupPlsTruth::group_size, 15);
  const auto y_slots = signal_positions(rng, t.active_y, GroupPlsTruth::group_size, 15);
  t.c1 = deal_pattern(rng, GroupPlsTruth::p, x_slots, x_pattern());
  t.c2 = deal_pattern(rng, GroupPlsTruth::p, x_slots, x_pattern());
  t.d1 = deal_pattern(rng, GroupPlsTruth::q, y_slots, y_pattern());
  t.d2 = deal_pattern(rng, GroupPlsTruth::q, y_slots, y_pattern());

  const Index p = GroupPlsTruth::p, q = GroupPlsTruth::q;
  Matrix bx(block_rows, p), by(block_rows, q);
  Index filled = 0;
  for (Index i = 0; i < n; ++i) {
    const double xi1 = rng.normal();
    const double xi2 = rng.normal();
    for (Index j = 0; j < p; ++j)
      bx(filled, j) = xi1 * t.c1[j] + xi2 * t.c2[j] + t.noise_sd * rng.normal();
    for (Index j = 0; j < q; ++j)
      by(filled, j) = xi1 * t.d1[j] + xi2 * t.d2[j] + t.noise_sd * rng.normal();
    if (++filled == block_rows || i + 1 == n) {
      sink(bx.topRows(filled), by.topRows(filled));
      filled = 0;
    }
  }
  return t;
}

GroupPlsTruth gen_group_pls(Index n, std::uint64_t seed, Matrix& x, Matrix& y) {
  x.resize(n, GroupPlsTruth::p);
  y.resize(n, GroupPlsTruth::q);
  Index at = 0;
  return stream_group_pls(n, seed, n, [&](const Matrix& bx, const Matrix& by) {
    x.middleRows(at, bx.rows()) = bx;
    y.middleRows(at, by.rows()) = by;
    at += bx.rows();
  });
}

PlsdaTruth stream_plsda(Index n, std::uint64_t seed, Index block_rows, const LabeledSink& sink) {
  if (n < 3) throw invalid_input("stream_plsda: need n >= 3");
  if (block_rows < 1) throw invalid_input("stream_plsda: block_rows must be >= 1");

  PlsdaTruth t;
  t.seed = seed;
  t.mu.resize(6);
  t.mu << -1.0, 1.5, 1.0, 2.5, -0.5, 2.0;
  t.classes = {"1", "2", "3"};
  for (int k = 0; k < 3; ++k) t.class_groups.push_back({2 * k, 2 * k + 1});

  // nearest multiple of 3 (ties cannot occur); report via n_adjusted
  const Index rem = n % 3;
  t.n = rem == 0 ? n : (rem == 1 ? n - 1 : n + 1);
  t.n_adjusted = rem != 0;

  Rng rng(seed);
  const Index per_class = t.n / 3;
  const Index p = PlsdaTruth::p;
  const int gs = PlsdaTruth::group_size;

  Matrix bx(block_rows, p);
  std::vector<std::string> blab;
  Index filled = 0;
  for (Index i = 0; i < t.n; ++i) {
    const int k = static_cast<int>(std::min<Index>(i / per_class, 2));
    for (Index j = 0; j < p; ++j) bx(filled, j) = rng.normal();
    for (int g : t.class_groups[static_cast<std::size_t>(k)])
      bx.row(filled).segment(g * gs, gs).array() += t.mu[g];
    blab.push_back(t.classes[static_cast<std::size_t>(k)]);
    if (++filled == block_rows || i + 1 == t.n) {
      sink(bx.topRows(filled), blab);
      filled = 0;
      blab.clear();
    }
  }
  return t;
}

PlsdaTruth gen_plsda(Index n, std::uint64_t seed, Matrix& x, std::vector<std::string>& labels) {
  labels.clear();
  std::vector<Matrix> blocks;
  PlsdaTruth t = stream_plsda(n, seed, std::max<Index>(n, 3),
                              [&](const Matrix& bx, const std::vector<std::string>& blab) {
                                blocks.push_back(bx);
                                labels.insert(labels.end(), blab.begin(), blab.end());
                              });
  x.resize(t.n, PlsdaTruth::p);
  Index at = 0;
  for (const Matrix& b : blocks) {
    x.middleRows(at, b.rows()) = b;
    at += b.rows();
  }
  return t;
}

Matrix plsda_dummy(const std::vector<std::string>& labels) {
  Matrix y = Matrix::Zero(static_cast<Index>(labels.size()), 3);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const int k = std::stoi(labels[i]) - 1;
    if (k < 0 || k > 2) throw invalid_input("plsda_dummy: label outside {1, 2, 3}");
    y(static_cast<Index>(i), k) = 1.0;
  }
  return y;
}

} // namespace plsforge
