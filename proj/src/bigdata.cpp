#include "plsforge/bigdata.hpp"

#include "plsforge/detail/core.hpp"
#include "plsforge/linalg.hpp"

#include <json.hpp>

#include <Eigen/QR>
#include <Eigen/SVD>

#include <bit>
#include <filesystem>
#include <fstream>
#include <thread>

namespace fs = std::filesystem;
using nlohmann::json;

namespace plsforge {

// ---------------------------------------------------------------- sources

MemoryChunkSource::MemoryChunkSource(const Matrix& x, const Matrix& y, int chunks)
    : x_(&x), y_(&y) {
  if (x.rows() != y.rows()) throw invalid_input("MemoryChunkSource: row mismatch");
  if (chunks < 1 || chunks > x.rows())
    throw invalid_input("MemoryChunkSource: bad chunk count");
  const Index n = x.rows();
  const Index base = n / chunks, extra = n % chunks;
  Index at = 0;
  for (int g = 0; g < chunks; ++g) {
    const Index r = base + (g < extra ? 1 : 0);
    starts_.push_back(at);
    rows_.push_back(r);
    at += r;
  }
}

MemoryChunkSource::MemoryChunkSource(const Matrix& x, const Matrix& y,
                                     std::vector<Index> chunk_rows)
    : x_(&x), y_(&y), rows_(std::move(chunk_rows)) {
  if (x.rows() != y.rows()) throw invalid_input("MemoryChunkSource: row mismatch");
  Index at = 0;
  for (Index r : rows_) {
    if (r < 1) throw invalid_input("MemoryChunkSource: empty chunk");
    starts_.push_back(at);
    at += r;
  }
  if (at != x.rows()) throw invalid_input("MemoryChunkSource: chunk rows do not sum to n");
}

Index MemoryChunkSource::rows() const { return x_->rows(); }

void MemoryChunkSource::read_chunk(int g, Matrix& x, Matrix& y) const {
  if (g < 0 || g >= chunk_count()) throw invalid_input("MemoryChunkSource: chunk out of range");
  x = x_->middleRows(starts_[g], rows_[g]);
  y = y_->middleRows(starts_[g], rows_[g]);
}

// -------------------------------------------------------------- manifest

namespace {

void check_little_endian_platform() {
  if constexpr (std::endian::native != std::endian::little)
    throw io_error("chunked datasets require a little-endian platform");
}

using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

void write_raw(const fs::path& file, const Matrix& m) {
  check_little_endian_platform();
  RowMajor tmp = m;
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw io_error("cannot open for write: " + file.string());
  out.write(reinterpret_cast<const char*>(tmp.data()),
            static_cast<std::streamsize>(sizeof(double)) * tmp.size());
  if (!out) throw io_error("short write: " + file.string());
}

Matrix read_raw(const fs::path& file, Index rows, Index cols) {
  check_little_endian_platform();
  std::ifstream in(file, std::ios::binary);
  if (!in) throw manifest_error("missing chunk file: " + file.string());
  in.seekg(0, std::ios::end);
  const auto bytes = static_cast<std::uint64_t>(in.tellg());
  const auto want = static_cast<std::uint64_t>(rows) * static_cast<std::uint64_t>(cols) * 8u;
  if (bytes != want)
    throw manifest_error("chunk file size mismatch: " + file.string() + " has " +
                         std::to_string(bytes) + " bytes, manifest implies " +
                         std::to_string(want));
  in.seekg(0);
  RowMajor tmp(rows, cols);
  in.read(reinterpret_cast<char*>(tmp.data()), static_cast<std::streamsize>(want));
  if (!in) throw io_error("short read: " + file.string());
  return tmp;
}

} // namespace

Manifest read_manifest(const std::string& dir) {
  const fs::path path = fs::path(dir) / "manifest.json";
  std::ifstream in(path);
  if (!in) throw manifest_error("missing manifest: " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw manifest_error("malformed manifest " + path.string() + ": " + e.what());
  }
  Manifest mf;
  try {
    mf.version = j.at("version").get<int>();
    if (mf.version != 1) throw manifest_error("unsupported manifest version");
    if (j.at("endianness").get<std::string>() != "little")
      throw manifest_error("unsupported endianness in manifest");
    if (j.at("dtype").get<std::string>() != "float64")
      throw manifest_error("unsupported dtype in manifest");
    mf.n = j.at("n").get<Index>();
    mf.p = j.at("p").get<Index>();
    mf.q = j.at("q").get<Index>();
    Index total = 0;
    for (const auto& jc : j.at("chunks")) {
      ManifestChunk c;
      c.rows = jc.at("rows").get<Index>();
      c.x_file = jc.at("x").get<std::string>();
      c.y_file = jc.at("y").get<std::string>();
      if (c.rows < 1) throw manifest_error("manifest chunk with no rows");
      total += c.rows;
      mf.chunks.push_back(std::move(c));
    }
    if (total != mf.n) throw manifest_error("manifest chunk rows do not sum to n");
    if (mf.chunks.empty()) throw manifest_error("manifest lists no chunks");
    if (j.contains("classes")) mf.classes = j["classes"].get<std::vector<std::string>>();
  } catch (const json::exception& e) {
    throw manifest_error("malformed manifest " + path.string() + ": " + e.what());
  }
  return mf;
}

void write_manifest(const std::string& dir, const Manifest& mf) {
  json j;
  j["version"] = mf.version;
  j["n"] = mf.n;
  j["p"] = mf.p;
  j["q"] = mf.q;
  j["chunk_count"] = mf.chunks.size();
  j["endianness"] = "little";
  j["dtype"] = "float64";
  j["order"] = "row-major";
  j["chunks"] = json::array();
  for (const auto& c : mf.chunks)
    j["chunks"].push_back({{"rows", c.rows}, {"x", c.x_file}, {"y", c.y_file}});
  if (!mf.classes.empty()) j["classes"] = mf.classes;
  const fs::path path = fs::path(dir) / "manifest.json";
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw io_error("cannot write manifest: " + path.string());
  out << j.dump(2) << "\n";
}

DirectoryChunkSource::DirectoryChunkSource(const std::string& dir)
    : dir_(dir), mf_(read_manifest(dir)) {}

void DirectoryChunkSource::read_chunk(int g, Matrix& x, Matrix& y) const {
  if (g < 0 || g >= chunk_count())
    throw invalid_input("DirectoryChunkSource: chunk out of range");
  const ManifestChunk& c = mf_.chunks[static_cast<std::size_t>(g)];
  x = read_raw(fs::path(dir_) / c.x_file, c.rows, mf_.p);
  y = read_raw(fs::path(dir_) / c.y_file, c.rows, mf_.q);
}

// ---------------------------------------------------------------- writer

ChunkedDatasetWriter::ChunkedDatasetWriter(std::string dir, Index p, Index q,
                                           Index rows_per_chunk)
    : dir_(std::move(dir)), p_(p), q_(q), per_chunk_(rows_per_chunk) {
  if (p < 1 || q < 1 || rows_per_chunk < 1)
    throw invalid_input("ChunkedDatasetWriter: bad dimensions");
  fs::create_directories(dir_);
  buf_x_.resize(per_chunk_, p_);
  buf_y_.resize(per_chunk_, q_);
  mf_.p = p_;
  mf_.q = q_;
}

void ChunkedDatasetWriter::flush(Index take) {
  char name[32];
  std::snprintf(name, sizeof name, "chunk_%04zu", mf_.chunks.size());
  ManifestChunk c;
  c.rows = take;
  c.x_file = std::string(name) + "_x.bin";
  c.y_file = std::string(name) + "_y.bin";
  write_raw(fs::path(dir_) / c.x_file, buf_x_.topRows(take));
  write_raw(fs::path(dir_) / c.y_file, buf_y_.topRows(take));
  mf_.chunks.push_back(std::move(c));
  mf_.n += take;
  buffered_ = 0;
}

void ChunkedDatasetWriter::append(const Matrix& x_rows, const Matrix& y_rows) {
  if (finished_) throw invalid_input("ChunkedDatasetWriter: already finished");
  if (x_rows.rows() != y_rows.rows() || x_rows.cols() != p_ || y_rows.cols() != q_)
    throw invalid_input("ChunkedDatasetWriter: block shape mismatch");
  Index done = 0;
  while (done < x_rows.rows()) {
    const Index take = std::min(per_chunk_ - buffered_, x_rows.rows() - done);
    buf_x_.middleRows(buffered_, take) = x_rows.middleRows(done, take);
    buf_y_.middleRows(buffered_, take) = y_rows.middleRows(done, take);
    buffered_ += take;
    done += take;
    if (buffered_ == per_chunk_) flush(per_chunk_);
  }
}

Manifest ChunkedDatasetWriter::finish(std::vector<std::string> classes) {
  if (finished_) throw invalid_input("ChunkedDatasetWriter: already finished");
  if (buffered_ > 0) flush(buffered_);
  if (mf_.chunks.empty()) throw invalid_input("ChunkedDatasetWriter: no rows written");
  mf_.classes = std::move(classes);
  finished_ = true;
  write_manifest(dir_, mf_);
  return mf_;
}

Index default_chunk_rows(Index p, Index q) {
  const Index by_bytes = (256LL << 20) / (static_cast<Index>(8) * std::max<Index>(p + q, 1));
  return std::max<Index>(1, std::min<Index>(100000, by_bytes));
}

// ------------------------------------------------------------- centering

CenteredChunkSource::CenteredChunkSource(const ChunkSource& inner, Vector x_means, Vector x_sds,
                                         Vector y_means, Vector y_sds, bool center, bool scale)
    : inner_(&inner), x_means_(std::move(x_means)), x_sds_(std::move(x_sds)),
      y_means_(std::move(y_means)), y_sds_(std::move(y_sds)), center_(center), scale_(scale) {}

void CenteredChunkSource::read_chunk(int g, Matrix& x, Matrix& y) const {
  inner_->read_chunk(g, x, y);
  if (center_) {
    x.rowwise() -= x_means_.transpose();
    y.rowwise() -= y_means_.transpose();
  }
  if (scale_) {
    for (Index j = 0; j < x.cols(); ++j)
      if (x_sds_[j] > 0) x.col(j) /= x_sds_[j];
    for (Index j = 0; j < y.cols(); ++j)
      if (y_sds_[j] > 0) y.col(j) /= y_sds_[j];
  }
}

ColumnStats chunked_column_stats(const ChunkSource& src) {
  const Index p = src.x_cols(), q = src.y_cols();
  ColumnStats st;
  Vector sx = Vector::Zero(p), sy = Vector::Zero(q);
  Matrix x, y;
  for (int g = 0; g < src.chunk_count(); ++g) {
    src.read_chunk(g, x, y);
    if (!x.allFinite() || !y.allFinite())
      throw invalid_input("chunk " + std::to_string(g) + ": non-finite entries");
    sx += x.colwise().sum();
    sy += y.colwise().sum();
    st.n += x.rows();
  }
  if (st.n < 1) throw invalid_input("chunked_column_stats: no rows");
  st.x_means = sx / static_cast<double>(st.n);
  st.y_means = sy / static_cast<double>(st.n);
  Vector qx = Vector::Zero(p), qy = Vector::Zero(q);
  for (int g = 0; g < src.chunk_count(); ++g) {
    src.read_chunk(g, x, y);
    qx += (x.rowwise() - st.x_means.transpose()).array().square().colwise().sum().matrix();
    qy += (y.rowwise() - st.y_means.transpose()).array().square().colwise().sum().matrix();
  }
  const double denom = st.n > 1 ? static_cast<double>(st.n - 1) : 1.0;
  st.x_sds = (qx / denom).cwiseSqrt();
  st.y_sds = (qy / denom).cwiseSqrt();
  return st;
}

// --------------------------------------------------------------- moments

namespace {

struct MomentPartial {
  Matrix m, n, o;
};

// Chunk partials may be computed on worker threads, but reduction always
// walks chunk indices in order, so the sum is independent of thread count.
ChunkedMoments accumulate_moments(const ChunkSource& src, bool need_n0, bool need_o0,
                                  int threads) {
  const Index p = src.x_cols(), q = src.y_cols();
  ChunkedMoments acc;
  acc.m0 = Matrix::Zero(p, q);
  if (need_n0) acc.n0 = Matrix::Zero(p, p);
  if (need_o0) acc.o0 = Matrix::Zero(q, q);

  const int g_total = src.chunk_count();
  threads = std::max(1, std::min(threads, g_total));

  auto compute = [&](int g, MomentPartial& out) {
    Matrix x, y;
    src.read_chunk(g, x, y);
    if (!x.allFinite() || !y.allFinite())
      throw invalid_input("chunk " + std::to_string(g) + ": non-finite entries");
    out.m = x.transpose() * y;
    if (need_n0) out.n = x.transpose() * x;
    if (need_o0) out.o = y.transpose() * y;
  };

  for (int base = 0; base < g_total; base += threads) {
    const int batch = std::min(threads, g_total - base);
    std::vector<MomentPartial> parts(static_cast<std::size_t>(batch));
    if (batch == 1) {
      compute(base, parts[0]);
    } else {
      std::vector<std::thread> pool;
      std::exception_ptr err;
      std::mutex err_mx;
      for (int t = 0; t < batch; ++t) {
        pool.emplace_back([&, t] {
          try {
            compute(base + t, parts[static_cast<std::size_t>(t)]);
          } catch (...) {
            std::lock_guard<std::mutex> lk(err_mx);
            if (!err) err = std::current_exception();
          }
        });
      }
      for (auto& th : pool) th.join();
      if (err) std::rethrow_exception(err);
    }
    for (int t = 0; t < batch; ++t) {
      acc.m0 += parts[static_cast<std::size_t>(t)].m;
      if (need_n0) acc.n0 += parts[static_cast<std::size_t>(t)].n;
      if (need_o0) acc.o0 += parts[static_cast<std::size_t>(t)].o;
    }
  }
  acc.n = src.rows();
  return acc;
}

} // namespace

Matrix chunked_cross_product(const ChunkSource& src, int threads) {
  return accumulate_moments(src, false, false, threads).m0;
}

ChunkedMoments chunked_moments(const ChunkSource& src, bool need_n0, bool need_o0, int threads) {
  return accumulate_moments(src, need_n0, need_o0, threads);
}

// ---------------------------------------------------- split-merge leading

SvdTriple block_svd_leading(const Matrix& m, const std::vector<Index>& block_rows,
                            bool assemble_by_multiply) {
  if (m.size() == 0) throw invalid_input("block_svd_leading: empty matrix");
  require_finite(m, "block_svd_leading");
  const Index p = m.rows(), q = m.cols();
  Index total = 0;
  for (Index r : block_rows) {
    if (r < q)
      throw invalid_input("block_svd_leading: block with fewer rows than columns");
    total += r;
  }
  if (total != p) throw invalid_input("block_svd_leading: block rows do not sum to p");

  SvdTriple t;
  if (m.lpNorm<Eigen::Infinity>() == 0.0) {
    t.u = Vector::Zero(p);
    t.v = Vector::Zero(q);
    t.degenerate = true;
    return t;
  }

  const auto s = static_cast<Index>(block_rows.size());
  Matrix stacked(s * q, q);
  std::vector<Matrix> left_blocks;
  left_blocks.reserve(static_cast<std::size_t>(s));
  Index off = 0;
  for (Index i = 0; i < s; ++i) {
    Eigen::BDCSVD<Matrix> svd(m.middleRows(off, block_rows[static_cast<std::size_t>(i)]),
                              Eigen::ComputeThinU | Eigen::ComputeThinV);
    stacked.middleRows(i * q, q) =
        svd.singularValues().asDiagonal() * svd.matrixV().transpose();
    left_blocks.push_back(svd.matrixU());
    off += block_rows[static_cast<std::size_t>(i)];
  }

  Eigen::BDCSVD<Matrix> merge(stacked, Eigen::ComputeThinU | Eigen::ComputeThinV);
  t.delta = merge.singularValues()[0];
  t.v = merge.matrixV().col(0);
  if (assemble_by_multiply) {
    Vector mv = m * t.v;
    const double nrm = mv.norm();
    t.u = nrm > 0 ? Vector(mv / nrm) : Vector(Vector::Zero(p));
  } else {
    t.u.resize(p);
    const Vector ustar = merge.matrixU().col(0);
    off = 0;
    for (Index i = 0; i < s; ++i) {
      const Index r = block_rows[static_cast<std::size_t>(i)];
      t.u.segment(off, r) = left_blocks[static_cast<std::size_t>(i)] * ustar.segment(i * q, q);
      off += r;
    }
  }
  fix_sign(t.u, t.v);
  return t;
}

// ------------------------------------------------------- incremental SVD

IncrementalState incremental_init(Index p, Index q, int hmax) {
  if (p < 1 || q < 1) throw invalid_input("incremental_init: empty dimensions");
  if (hmax < 1 || hmax > std::min(p, q))
    throw invalid_input("incremental_init: hmax outside [1, min(p, q)]");
  IncrementalState st;
  st.hmax = hmax;
  st.mu_x = Vector::Zero(p);
  st.mu_y = Vector::Zero(q);
  st.u = Matrix::Zero(p, 0);
  st.v = Matrix::Zero(q, 0);
  st.delta = Vector::Zero(0);
  return st;
}

namespace {

void incremental_renormalize(IncrementalState& st) {
  if (st.r == 0) return;
  Eigen::HouseholderQR<Matrix> qru(st.u);
  Eigen::HouseholderQR<Matrix> qrv(st.v);
  Matrix qu = qru.householderQ() * Matrix::Identity(st.u.rows(), st.r);
  Matrix ru = qru.matrixQR().topLeftCorner(st.r, st.r).triangularView<Eigen::Upper>();
  Matrix qv = qrv.householderQ() * Matrix::Identity(st.v.rows(), st.r);
  Matrix rv = qrv.matrixQR().topLeftCorner(st.r, st.r).triangularView<Eigen::Upper>();
  Matrix mid = ru * st.delta.asDiagonal() * rv.transpose();
  Eigen::JacobiSVD<Matrix> svd(mid, Eigen::ComputeFullU | Eigen::ComputeFullV);
  st.u = qu * svd.matrixU();
  st.v = qv * svd.matrixV();
  st.delta = svd.singularValues();
  st.since_renorm = 0;
}

} // namespace

void incremental_update(IncrementalState& st, const Vector& x, const Vector& y) {
  if (x.size() != st.mu_x.size() || y.size() != st.mu_y.size())
    throw invalid_input("incremental_update: dimension mismatch");
  require_finite(x, "incremental_update: x");
  require_finite(y, "incremental_update: y");

  if (st.n == 0) { // base case: means only, empty factorization
    st.mu_x = x;
    st.mu_y = y;
    st.n = 1;
    return;
  }

  const double n = static_cast<double>(st.n);
  const Vector xt = x - st.mu_x;
  const Vector yt = y - st.mu_y;
  const Vector c = st.u.transpose() * xt;
  const Vector d = st.v.transpose() * yt;
  Vector x_perp = xt - st.u * c;
  Vector y_perp = yt - st.v * d;
  double rx = x_perp.norm();
  double ry = y_perp.norm();
  if (rx <= 1e-12 * xt.norm() || rx == 0.0) {
    rx = 0.0;
    x_perp.setZero();
  } else {
    x_perp /= rx;
  }
  if (ry <= 1e-12 * yt.norm() || ry == 0.0) {
    ry = 0.0;
    y_perp.setZero();
  } else {
    y_perp /= ry;
  }

  const int r = st.r;
  const double f = n / (n + 1.0);
  Matrix qmat(r + 1, r + 1);
  qmat.topLeftCorner(r, r) = Matrix(st.delta.asDiagonal()) + f * c * d.transpose();
  qmat.topRightCorner(r, 1) = f * ry * c;
  qmat.bottomLeftCorner(1, r) = f * rx * d.transpose();
  qmat(r, r) = f * rx * ry;

  Eigen::JacobiSVD<Matrix> svd(qmat, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Vector s = svd.singularValues();

  int keep = std::min(r + 1, st.hmax);
  const double smax = s.size() > 0 ? s[0] : 0.0;
  while (keep > 0 && s[keep - 1] <= 1e-14 * smax) --keep;

  Matrix u_ext(st.u.rows(), r + 1);
  u_ext.leftCols(r) = st.u;
  u_ext.col(r) = x_perp;
  Matrix v_ext(st.v.rows(), r + 1);
  v_ext.leftCols(r) = st.v;
  v_ext.col(r) = y_perp;

  st.u = u_ext * svd.matrixU().leftCols(keep);
  st.v = v_ext * svd.matrixV().leftCols(keep);
  st.delta = s.head(keep);
  st.r = keep;

  st.mu_x = (n * st.mu_x + x) / (n + 1.0);
  st.mu_y = (n * st.mu_y + y) / (n + 1.0);
  st.n += 1;

  if (++st.since_renorm >= st.renorm_every) incremental_renormalize(st);
}

Matrix incremental_estimate(const IncrementalState& st) {
  if (st.r == 0) return Matrix::Zero(st.mu_x.size(), st.mu_y.size());
  return st.u * st.delta.asDiagonal() * st.v.transpose();
}

// ------------------------------------------------------------ chunked fit

PlsFit fit_bigdata(const ChunkSource& src, const ModeSpec& mode, int ncomp,
                   const PenaltySpec& pen_u, const PenaltySpec& pen_v, const FitOptions& opts) {
  const Index n = src.rows(), p = src.x_cols(), q = src.y_cols();
  if (n < 2) throw invalid_input("fit_bigdata: need at least 2 rows");
  if (ncomp < 1) throw invalid_input("fit_bigdata: ncomp must be >= 1");
  pen_u.validate(p);
  pen_v.validate(q);
  if (mode.method == Method::rcca) {
    if (mode.ridge_x < 0 || mode.ridge_y < 0) throw invalid_input("fit_bigdata: negative ridge");
    if (mode.convex_ridge && (mode.ridge_x > 1 || mode.ridge_y > 1))
      throw invalid_input("fit_bigdata: convex ridge outside [0, 1]");
  }

  PlsFit out;
  out.mode = mode;
  out.pen_u = pen_u;
  out.pen_v = pen_v;
  out.requested = ncomp;

  ColumnStats stx = chunked_column_stats(src);
  Vector x_means = opts.center ? stx.x_means : Vector(Vector::Zero(p));
  Vector y_means = opts.center ? stx.y_means : Vector(Vector::Zero(q));
  Vector x_sds = opts.scale ? stx.x_sds : Vector(Vector::Ones(p));
  Vector y_sds = opts.scale ? stx.y_sds : Vector(Vector::Ones(q));
  CenteredChunkSource view(src, x_means, x_sds, y_means, y_sds, opts.center, opts.scale);

  const int hmax = detail::cap_components(ncomp, n, p, q, mode.method != Method::pls_r,
                                          opts.center, out.warnings);

  const bool need_n0 = mode.method == Method::pls_w2a || mode.method == Method::pls_r ||
                       mode.method == Method::rcca;
  const bool need_o0 = mode.method == Method::pls_w2a || mode.method == Method::rcca;
  ChunkedMoments mom = chunked_moments(view, need_n0, need_o0, opts.threads);

  detail::CoreStats stats;
  stats.m0 = std::move(mom.m0);
  if (mode.method == Method::rcca) {
    stats.a = detail::rcca_transform(mom.n0, mode.ridge_x, mode.convex_ridge);
    stats.b = detail::rcca_transform(mom.o0, mode.ridge_y, mode.convex_ridge);
    stats.m0 = stats.a * stats.m0 * stats.b;
  } else {
    if (need_n0) stats.n0 = std::move(mom.n0);
    if (need_o0) stats.o0 = std::move(mom.o0);
  }

  detail::CoreOut core = detail::core_loop_stats(stats, mode, hmax, pen_u, pen_v, opts);

  // one pass to materialize scores
  out.xi.resize(n, core.done);
  out.omega.resize(n, core.done);
  const bool with_om_x = mode.method == Method::pls_r && core.done > 0;
  Index at = 0;
  Matrix xg, yg;
  for (int g = 0; g < view.chunk_count(); ++g) {
    view.read_chunk(g, xg, yg);
    out.xi.middleRows(at, xg.rows()) = xg * core.xi_xc;
    out.omega.middleRows(at, xg.rows()) = yg * core.om_yc;
    if (with_om_x) out.omega.middleRows(at, xg.rows()) += xg * core.om_xc;
    at += xg.rows();
  }

  out.map_x = core.xi_xc;
  out.map_omega_x = core.om_xc;
  out.map_omega_y = core.om_yc;

  out.n_components = core.done;
  out.u = std::move(core.u);
  out.v = std::move(core.v);
  out.w_adj = std::move(core.w_adj);
  out.z_adj = std::move(core.z_adj);
  out.c = std::move(core.c);
  out.d = std::move(core.d);
  out.g = std::move(core.g);
  out.delta = std::move(core.delta);
  out.p_inner = std::move(core.p_inner);
  out.alpha = std::move(core.alpha);
  out.diag = std::move(core.diag);
  for (auto& w : core.warnings) out.warnings.push_back(std::move(w));
  out.x_means = std::move(x_means);
  out.x_sds = std::move(x_sds);
  out.y_means = std::move(y_means);
  out.y_sds = std::move(y_sds);
  out.centered = opts.center;
  out.scaled = opts.scale;
  return out;
}

void stream_scores(const ChunkSource& src, const PlsFit& fit,
                   const std::function<void(const Matrix&, const Matrix&)>& sink) {
  if (fit.map_x.size() == 0 && fit.n_components > 0)
    throw invalid_input("stream_scores: fit carries no score maps");
  if (src.x_cols() != fit.x_means.size() || src.y_cols() != fit.y_means.size())
    throw invalid_input("stream_scores: dimension mismatch");
  CenteredChunkSource view(src, fit.x_means, fit.x_sds, fit.y_means, fit.y_sds, fit.centered,
                           fit.scaled);
  const bool with_om_x = fit.map_omega_x.size() > 0 && fit.mode.method == Method::pls_r;
  Matrix xg, yg;
  for (int g = 0; g < view.chunk_count(); ++g) {
    view.read_chunk(g, xg, yg);
    Matrix xi = xg * fit.map_x;
    Matrix om = yg * fit.map_omega_y;
    if (with_om_x) om += xg * fit.map_omega_x;
    sink(xi, om);
  }
}

} // namespace plsforge
