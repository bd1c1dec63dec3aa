#pragma once

#include "plsforge/pls.hpp"
#include "plsforge/types.hpp"

#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace plsforge {

// Aligned row-blocks of the two data blocks; chunk g yields the same rows of
// X and Y.  Implementations must be safe for repeated reads of the same chunk.
class ChunkSource {
 public:
  virtual ~ChunkSource() = default;
  virtual int chunk_count() const = 0;
  virtual Index rows() const = 0;
  virtual Index x_cols() const = 0;
  virtual Index y_cols() const = 0;
  virtual void read_chunk(int g, Matrix& x, Matrix& y) const = 0;
};

// Contiguous row-range view over in-memory matrices.
class MemoryChunkSource final : public ChunkSource {
 public:
  MemoryChunkSource(const Matrix& x, const Matrix& y, int chunks);
  // explicit row counts per chunk (must sum to n)
  MemoryChunkSource(const Matrix& x, const Matrix& y, std::vector<Index> chunk_rows);

  int chunk_count() const override { return static_cast<int>(rows_.size()); }
  Index rows() const override;
  Index x_cols() const override { return x_->cols(); }
  Index y_cols() const override { return y_->cols(); }
  void read_chunk(int g, Matrix& x, Matrix& y) const override;

 private:
  const Matrix* x_;
  const Matrix* y_;
  std::vector<Index> rows_;
  std::vector<Index> starts_;
};

// Chunked dataset directory: manifest.json plus raw row-major little-endian
// float64 chunk files, X and Y paired per chunk.
struct ManifestChunk {
  Index rows = 0;
  std::string x_file, y_file;
};

struct Manifest {
  int version = 1;
  Index n = 0, p = 0, q = 0;
  std::vector<ManifestChunk> chunks;
  std::vector<std::string> classes; // optional, discriminant datasets
};

Manifest read_manifest(const std::string& dir);
void write_manifest(const std::string& dir, const Manifest& mf);

class DirectoryChunkSource final : public ChunkSource {
 public:
  explicit DirectoryChunkSource(const std::string& dir);

  int chunk_count() const override { return static_cast<int>(mf_.chunks.size()); }
  Index rows() const override { return mf_.n; }
  Index x_cols() const override { return mf_.p; }
  Index y_cols() const override { return mf_.q; }
  void read_chunk(int g, Matrix& x, Matrix& y) const override;

  const Manifest& manifest() const { return mf_; }

 private:
  std::string dir_;
  Manifest mf_;
};

// Streaming writer: buffers appended row blocks and emits chunk files of
// rows_per_chunk rows (last chunk smaller), then the manifest.
class ChunkedDatasetWriter {
 public:
  ChunkedDatasetWriter(std::string dir, Index p, Index q, Index rows_per_chunk);
  void append(const Matrix& x_rows, const Matrix& y_rows);
  Manifest finish(std::vector<std::string> classes = {});

 private:
  void flush(Index take);

  std::string dir_;
  Index p_, q_, per_chunk_;
  Matrix buf_x_, buf_y_;
  Index buffered_ = 0;
  Manifest mf_;
  bool finished_ = false;
};

Index default_chunk_rows(Index p, Index q);

// Mean/sd view over another source (training-statistics semantics identical
// to center_scale: sd == 0 marks a constant column, centered but undivided).
class CenteredChunkSource final : public ChunkSource {
 public:
  CenteredChunkSource(const ChunkSource& inner, Vector x_means, Vector x_sds, Vector y_means,
                      Vector y_sds, bool center, bool scale);

  int chunk_count() const override { return inner_->chunk_count(); }
  Index rows() const override { return inner_->rows(); }
  Index x_cols() const override { return inner_->x_cols(); }
  Index y_cols() const override { return inner_->y_cols(); }
  void read_chunk(int g, Matrix& x, Matrix& y) const override;

 private:
  const ChunkSource* inner_;
  Vector x_means_, x_sds_, y_means_, y_sds_;
  bool center_, scale_;
};

// Two-pass column statistics (means, then sample sds about them).
struct ColumnStats {
  Vector x_means, x_sds, y_means, y_sds;
  Index n = 0;
};

ColumnStats chunked_column_stats(const ChunkSource& src);

// Sum over chunks of X_g' Y_g, accumulated in chunk-index order regardless of
// thread count, so the result is deterministic for a fixed chunking.
Matrix chunked_cross_product(const ChunkSource& src, int threads = 1);

struct ChunkedMoments {
  Matrix m0;      // X'Y
  Matrix n0, o0;  // X'X / Y'Y when requested, empty otherwise
  Index n = 0;
};

ChunkedMoments chunked_moments(const ChunkSource& src, bool need_n0, bool need_o0,
                               int threads = 1);

// Split-and-merge leading triple of a tall matrix partitioned by row blocks
// (every block must have at least q rows): per-block thin SVDs, a stacked
// (s q) x q merge, then either blockwise assembly of u or one extra product
// u = M v / ||M v||.
SvdTriple block_svd_leading(const Matrix& m, const std::vector<Index>& block_rows,
                            bool assemble_by_multiply = false);

// One-pass rank-H maintenance of the running centered cross-product
//   M_n = sum_i (x_i - mean_x)(y_i - mean_y)' / scaled by the update rule.
// Exact when H >= rank; re-orthonormalizes every renorm_every updates.
struct IncrementalState {
  Index n = 0;
  int hmax = 0;
  int r = 0; // realized rank, grows to hmax
  Vector mu_x, mu_y;
  Matrix u, v; // p x r / q x r, orthonormal columns
  Vector delta;
  int since_renorm = 0;
  int renorm_every = 512;
};

IncrementalState incremental_init(Index p, Index q, int hmax);
void incremental_update(IncrementalState& st, const Vector& x, const Vector& y);
Matrix incremental_estimate(const IncrementalState& st); // U diag(delta) V'

// Chunked fit: identical component loop as fit(..., use_m_recursion = true),
// with moments and scores accumulated chunk by chunk.
PlsFit fit_bigdata(const ChunkSource& src, const ModeSpec& mode, int ncomp,
                   const PenaltySpec& pen_u = {}, const PenaltySpec& pen_v = {},
                   const FitOptions& opts = {});

// Score rows for each chunk of src pushed through sink, using the score
// combination maps a recursion-path or chunked fit carries.
void stream_scores(const ChunkSource& src, const PlsFit& fit,
                   const std::function<void(const Matrix& xi_rows, const Matrix& omega_rows)>& sink);

} // namespace plsforge
