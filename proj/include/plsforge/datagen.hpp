#pragma once

#include "plsforge/types.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace plsforge {

// Two-block latent-variable design: X = Xi C' + E_x, Y = Xi D' + E_y with two
// shared standard-normal latent columns.  Coefficients live in 4 active groups
// per block (15 signal + 5 zero positions each); per component the 60-value
// pattern (X: 15 ones, 30 minus-ones, 15 1.5s / Y: 15 minus-ones, 15 minus-1.5s,
// 30 ones) is shuffled and dealt across the signal positions.  Residual sd 1.5.
struct GroupPlsTruth {
  static constexpr Index p = 400, q = 500;
  static constexpr int x_groups = 20, y_groups = 25, group_size = 20;

  Vector c1, c2; // length p
  Vector d1, d2; // length q
  std::vector<int> active_x; // 4 ascending group indices out of 20
  std::vector<int> active_y; // 4 ascending group indices out of 25
  double noise_sd = 1.5;
  std::uint64_t seed = 0;
};

// Six-group discriminant design: p = 600 variables in 6 groups of 100, three
// balanced classes, class k (1-based) carrying means mu_{2k-1}, mu_{2k} on its
// two linked groups, standard-normal noise everywhere.
struct PlsdaTruth {
  static constexpr Index p = 600;
  static constexpr int groups = 6, group_size = 100;

  Vector mu;                                   // the six group means
  std::vector<std::array<int, 2>> class_groups; // class k -> 0-based group pair
  std::vector<std::string> classes;            // "1", "2", "3"
  Index n = 0;        // realized row count (balanced)
  bool n_adjusted = false;
  std::uint64_t seed = 0;
};

// Row-block sink; blocks arrive in row order and partition the dataset.
using PairSink = std::function<void(const Matrix& x_rows, const Matrix& y_rows)>;
using LabeledSink =
    std::function<void(const Matrix& x_rows, const std::vector<std::string>& labels)>;

// Streaming cores.  The scalar stream order is fixed (coefficient placement
// first, then per row: latent values, X noise, Y noise), so any block size
// yields identical data; block_rows only sets how many rows arrive per call.
GroupPlsTruth stream_group_pls(Index n, std::uint64_t seed, Index block_rows,
                               const PairSink& sink);
PlsdaTruth stream_plsda(Index n, std::uint64_t seed, Index block_rows, const LabeledSink& sink);

// In-memory materializations.
GroupPlsTruth gen_group_pls(Index n, std::uint64_t seed, Matrix& x, Matrix& y);
PlsdaTruth gen_plsda(Index n, std::uint64_t seed, Matrix& x, std::vector<std::string>& labels);

// Dummy-coded Y block for a label sequence in class order "1" < "2" < "3".
Matrix plsda_dummy(const std::vector<std::string>& labels);

} // namespace plsforge
