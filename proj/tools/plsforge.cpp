// plsforge command-line front end: dataset import/export, fitting, prediction,
// and simulation-design generation.
//
// Exit codes: 0 success; 1 unexpected failure; 2 invalid usage or input;
// 3 file/format errors; 4 numerical failure (non-convergence, degenerate basis).

#include "plsforge/bigdata.hpp"
#include "plsforge/datagen.hpp"
#include "plsforge/io.hpp"
#include "plsforge/linalg.hpp"
#include "plsforge/penalty.hpp"
#include "plsforge/pls.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace plsforge;

namespace {

// Removes everything registered since construction unless commit() ran, so a
// failed command never leaves partial artifacts behind.
class OutputGuard {
 public:
  ~OutputGuard() {
    if (committed_) return;
    std::error_code ec;
    for (auto it = files_.rbegin(); it != files_.rend(); ++it) fs::remove(*it, ec);
    for (auto it = dirs_.rbegin(); it != dirs_.rend(); ++it) fs::remove_all(*it, ec);
  }
  // dir created by this run: removed wholesale on failure
  void own_dir(const fs::path& d) { dirs_.push_back(d); }
  void own_file(const fs::path& f) { files_.push_back(f); }
  void commit() { committed_ = true; }

 private:
  std::vector<fs::path> files_, dirs_;
  bool committed_ = false;
};

fs::path prepare_out_dir(const std::string& out, OutputGuard& guard) {
  fs::path dir(out);
  if (fs::exists(dir)) {
    if (!fs::is_directory(dir)) throw io_error(out + " exists and is not a directory");
  } else {
    fs::create_directories(dir);
    guard.own_dir(dir);
  }
  return dir;
}

int resolve_threads(int flag) {
  if (flag > 0) return flag;
  if (const char* env = std::getenv("PLSFORGE_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  return 1;
}

// "a,b,c" size list, "NxS" uniform shorthand, or a .json file holding an
// integer array.
GroupStructure parse_groups(const std::string& text, Index dim, const std::string& side) {
  std::vector<int> sizes;
  if (text.size() > 5 && text.substr(text.size() - 5) == ".json") {
    std::ifstream in(text);
    if (!in) throw io_error("cannot open group file " + text);
    json j;
    try {
      in >> j;
    } catch (const json::exception& e) {
      throw io_error("bad group file " + text + ": " + e.what());
    }
    if (!j.is_array()) throw invalid_input("group file " + text + " must hold an array");
    for (const auto& v : j) sizes.push_back(v.get<int>());
  } else if (text.find('x') != std::string::npos) {
    const auto at = text.find('x');
    try {
      const int count = std::stoi(text.substr(0, at));
      const int size = std::stoi(text.substr(at + 1));
      GroupStructure g = GroupStructure::uniform(count, size);
      g.validate(dim);
      return g;
    } catch (const invalid_input&) {
      throw;
    } catch (const std::exception&) {
      throw invalid_input(side + ": cannot parse group shorthand '" + text + "'");
    }
  } else {
    std::size_t start = 0;
    while (start <= text.size()) {
      const auto comma = text.find(',', start);
      const auto piece = text.substr(start, comma == std::string::npos ? comma : comma - start);
      try {
        sizes.push_back(std::stoi(piece));
      } catch (const std::exception&) {
        throw invalid_input(side + ": cannot parse group size '" + piece + "'");
      }
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
  }
  GroupStructure g(std::move(sizes));
  g.validate(dim);
  return g;
}

PenaltySpec make_penalty(double lambda, double alpha, const std::string& groups, Index dim,
                         const std::string& side) {
  if (lambda < 0) throw invalid_input(side + ": negative lambda");
  if (lambda == 0) {
    if (alpha >= 0 && !groups.empty())
      throw invalid_input(side + ": alpha/groups given but lambda is 0");
    return PenaltySpec::none();
  }
  if (groups.empty()) {
    if (alpha >= 0) throw invalid_input(side + ": alpha requires a group structure");
    return PenaltySpec::lasso(lambda);
  }
  GroupStructure g = parse_groups(groups, dim, side);
  if (alpha >= 0) return PenaltySpec::sparse_group(lambda, alpha, g);
  return PenaltySpec::group(lambda, g);
}

json penalty_json(const PenaltySpec& p) {
  json j;
  switch (p.kind) {
    case PenaltySpec::Kind::none: j["kind"] = "none"; break;
    case PenaltySpec::Kind::lasso: j["kind"] = "lasso"; break;
    case PenaltySpec::Kind::group: j["kind"] = "group"; break;
    case PenaltySpec::Kind::sparse_group: j["kind"] = "sparse-group"; break;
  }
  j["lambda"] = p.lambda;
  if (p.kind == PenaltySpec::Kind::sparse_group) j["alpha"] = p.alpha;
  if (p.groups) j["group_sizes"] = p.groups->sizes;
  return j;
}

std::vector<std::string> comp_header(Index h) {
  std::vector<std::string> names;
  for (Index i = 1; i <= h; ++i) names.push_back("comp" + std::to_string(i));
  return names;
}

void write_weight_csv(const fs::path& dir, const char* name, const Matrix& m,
                      OutputGuard& guard) {
  const fs::path f = dir / name;
  guard.own_file(f);
  write_csv(f.string(), m, comp_header(m.cols()));
}

json vector_json(const Vector& v) {
  json a = json::array();
  for (Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

Vector vector_from_json(const json& a) {
  Vector v(static_cast<Index>(a.size()));
  Index i = 0;
  for (const auto& x : a) v[i++] = x.get<double>();
  return v;
}

const char* mode_name(const ModeSpec& m) {
  switch (m.method) {
    case Method::pls_svd: return "pls-svd";
    case Method::pls_w2a: return "pls-w2a";
    case Method::rcca: return "rcca";
    case Method::pls_r: return "pls-r";
  }
  return "?";
}

// ----------------------------------------------------------------- import

struct ImportArgs {
  std::string x_csv, y_csv, labels_csv, out;
  int chunks = 0;
  Index chunk_rows = 0;
};

void cmd_import(const ImportArgs& a) {
  const CsvTable xt = read_csv(a.x_csv);
  const Matrix& x = xt.values;
  Matrix y;
  std::vector<std::string> classes, labels;
  if (!a.labels_csv.empty()) {
    labels = read_labels(a.labels_csv);
    if (static_cast<Index>(labels.size()) != x.rows())
      throw invalid_input("row count mismatch: " + std::to_string(x.rows()) + " X rows vs " +
                          std::to_string(labels.size()) + " labels");
    const DummyResponse d = encode_dummy(labels);
    y = d.y;
    classes = d.labels;
  } else {
    const CsvTable yt = read_csv(a.y_csv);
    y = yt.values;
    if (y.rows() != x.rows())
      throw invalid_input("row count mismatch: " + std::to_string(x.rows()) + " X rows vs " +
                          std::to_string(y.rows()) + " Y rows");
  }

  Index per = a.chunk_rows;
  if (per <= 0)
    per = a.chunks > 0 ? (x.rows() + a.chunks - 1) / a.chunks
                       : default_chunk_rows(x.cols(), y.cols());

  OutputGuard guard;
  prepare_out_dir(a.out, guard);
  ChunkedDatasetWriter writer(a.out, x.cols(), y.cols(), per);
  writer.append(x, y);
  const Manifest mf = writer.finish(classes);
  if (!labels.empty()) write_labels((fs::path(a.out) / "labels.csv").string(), labels);
  guard.commit();
  std::cout << "imported " << mf.n << " rows, p=" << mf.p << ", q=" << mf.q << ", "
            << mf.chunks.size() << " chunk(s) -> " << a.out << "\n";
}

// -------------------------------------------------------------------- fit

struct FitArgs {
  std::string data_dir, x_csv, y_csv, labels_csv, out;
  std::string mode_s = "pls-r";
  int H = 2;
  double lambda_u = 0, lambda_v = 0, alpha_u = -1, alpha_v = -1;
  std::string groups_u, groups_v;
  double ridge_x = 0, ridge_y = 0;
  bool convex_ridge = false, scaled_nipals = false, simpls = false;
  bool center = true, scale = false;
  int chunks = 0, threads = 0;
  bool scores = false, force_big = false, force_mem = false;
};

ModeSpec make_mode(const FitArgs& a) {
  ModeSpec m;
  if (a.mode_s == "pls-svd") m = ModeSpec::pls_svd();
  else if (a.mode_s == "pls-w2a") m = ModeSpec::pls_w2a();
  else if (a.mode_s == "rcca") m = ModeSpec::rcca(a.ridge_x, a.ridge_y, a.convex_ridge);
  else if (a.mode_s == "pls-r") m = ModeSpec::pls_r(a.scaled_nipals);
  else throw invalid_input("unknown mode '" + a.mode_s + "'");
  if (a.mode_s != "rcca" && (a.ridge_x != 0 || a.ridge_y != 0 || a.convex_ridge))
    throw invalid_input("ridge flags apply to --mode rcca only");
  if (a.mode_s != "pls-r" && a.scaled_nipals)
    throw invalid_input("--scaled-nipals applies to --mode pls-r only");
  if (a.simpls && a.mode_s != "pls-r")
    throw invalid_input("--simpls applies to --mode pls-r only");
  return m;
}

void write_fit_artifacts(const fs::path& dir, const PlsFit& f, OutputGuard& guard,
                         bool scores_in_memory) {
  write_weight_csv(dir, "u.csv", f.u, guard);
  write_weight_csv(dir, "v.csv", f.v, guard);
  write_weight_csv(dir, "w_adj.csv", f.w_adj, guard);
  write_weight_csv(dir, "z_adj.csv", f.z_adj, guard);
  write_weight_csv(dir, "c.csv", f.c, guard);
  write_weight_csv(dir, "d.csv", f.d, guard);
  if (f.g.size() > 0) write_weight_csv(dir, "g.csv", f.g, guard);
  {
    const fs::path fdel = dir / "delta.csv";
    guard.own_file(fdel);
    write_csv(fdel.string(), f.delta, {"delta"});
  }
  const bool regression = f.simpls || f.mode.method == Method::pls_r;
  if (regression && f.n_components > 0) {
    const fs::path fb = dir / "b_pls.csv";
    guard.own_file(fb);
    write_csv(fb.string(), regression_coefficients(f));
  }
  if (scores_in_memory && f.xi.size() > 0) {
    write_weight_csv(dir, "xi.csv", f.xi, guard);
    write_weight_csv(dir, "omega.csv", f.omega, guard);
  }

  json meta;
  meta["mode"] = mode_name(f.mode);
  meta["simpls"] = f.simpls;
  if (f.mode.method == Method::pls_r) meta["scaled_nipals"] = f.mode.scaled_nipals;
  if (f.mode.method == Method::rcca) {
    meta["ridge_x"] = f.mode.ridge_x;
    meta["ridge_y"] = f.mode.ridge_y;
    meta["convex_ridge"] = f.mode.convex_ridge;
  }
  meta["H_requested"] = f.requested;
  meta["n_components"] = f.n_components;
  meta["penalty_u"] = penalty_json(f.pen_u);
  meta["penalty_v"] = penalty_json(f.pen_v);
  meta["centered"] = f.centered;
  meta["scaled"] = f.scaled;
  meta["x_means"] = vector_json(f.x_means);
  meta["x_sds"] = vector_json(f.x_sds);
  meta["y_means"] = vector_json(f.y_means);
  meta["y_sds"] = vector_json(f.y_sds);
  meta["delta"] = vector_json(f.delta);
  meta["p_inner"] = vector_json(f.p_inner);
  if (f.alpha.size() > 0) meta["alpha"] = vector_json(f.alpha);
  if (!f.class_labels.empty()) meta["classes"] = f.class_labels;
  meta["warnings"] = f.warnings;
  json conv = json::array();
  for (std::size_t h = 0; h < f.diag.size(); ++h) {
    const auto& d = f.diag[h];
    conv.push_back({{"component", h + 1},
                    {"svd_iterations", d.svd_iterations},
                    {"svd_residual", d.svd_residual},
                    {"inner_iterations", d.inner_iterations},
                    {"inner_converged", d.inner_converged},
                    {"degenerate", d.degenerate}});
  }
  meta["convergence"] = conv;

  const fs::path fmeta = dir / "meta.json";
  guard.own_file(fmeta);
  std::ofstream out(fmeta);
  if (!out) throw io_error("cannot write " + fmeta.string());
  out << meta.dump(2) << "\n";
}

void append_csv_rows(std::ofstream& out, const Matrix& m) {
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) out << (j ? "," : "") << format_double(m(i, j));
    out << '\n';
  }
}

void cmd_fit(const FitArgs& a) {
  const ModeSpec mode = make_mode(a);
  FitOptions opts;
  opts.center = a.center;
  opts.scale = a.scale;
  opts.threads = resolve_threads(a.threads);
  if (a.H < 1) throw invalid_input("--H must be >= 1");

  const bool from_dir = !a.data_dir.empty();
  if (from_dir && (!a.x_csv.empty() || !a.y_csv.empty() || !a.labels_csv.empty()))
    throw invalid_input("--data excludes --x/--y/--labels");
  if (!from_dir && a.x_csv.empty()) throw invalid_input("need --data or --x");
  if (!from_dir && a.y_csv.empty() == a.labels_csv.empty())
    throw invalid_input("need exactly one of --y / --labels with --x");
  if (from_dir && a.chunks > 0)
    throw invalid_input("--chunks is fixed by the dataset directory; use import to re-chunk");
  if (a.force_big && a.force_mem) throw invalid_input("--big and --in-memory conflict");

  PlsFit f;
  Matrix x, y; // in-memory copies when the small path runs
  std::vector<std::string> classes;
  std::unique_ptr<DirectoryChunkSource> dcs;
  bool big = false;

  if (from_dir) {
    dcs = std::make_unique<DirectoryChunkSource>(a.data_dir);
    classes = dcs->manifest().classes;
    const double bytes = static_cast<double>(dcs->rows()) *
                         static_cast<double>(dcs->x_cols() + dcs->y_cols()) * 8.0;
    big = a.force_big || (!a.force_mem && bytes > 1024.0 * 1024.0 * 1024.0);
  } else {
    x = read_csv(a.x_csv).values;
    if (!a.labels_csv.empty()) {
      const auto labels = read_labels(a.labels_csv);
      if (static_cast<Index>(labels.size()) != x.rows())
        throw invalid_input("row count mismatch between --x and --labels");
      const DummyResponse d = encode_dummy(labels);
      y = d.y;
      classes = d.labels;
    } else {
      y = read_csv(a.y_csv).values;
    }
    big = a.force_big || a.chunks > 0;
  }

  if (a.simpls && big)
    throw invalid_input("--simpls runs in memory only; pass --in-memory or drop --big/--chunks");

  const Index p = from_dir ? dcs->x_cols() : x.cols();
  const Index q = from_dir ? dcs->y_cols() : y.cols();
  const PenaltySpec pen_u = make_penalty(a.lambda_u, a.alpha_u, a.groups_u, p, "--penalty-u");
  const PenaltySpec pen_v = make_penalty(a.lambda_v, a.alpha_v, a.groups_v, q, "--penalty-v");

  if (big) {
    if (from_dir) {
      f = fit_bigdata(*dcs, mode, a.H, pen_u, pen_v, opts);
    } else {
      MemoryChunkSource mcs(x, y, a.chunks > 0 ? a.chunks : 1);
      f = fit_bigdata(mcs, mode, a.H, pen_u, pen_v, opts);
    }
  } else {
    if (from_dir) { // materialize
      x.resize(dcs->rows(), p);
      y.resize(dcs->rows(), q);
      Matrix cx, cy;
      Index at = 0;
      for (int g = 0; g < dcs->chunk_count(); ++g) {
        dcs->read_chunk(g, cx, cy);
        x.middleRows(at, cx.rows()) = cx;
        y.middleRows(at, cy.rows()) = cy;
        at += cx.rows();
      }
    }
    f = a.simpls ? fit_simpls(x, y, a.H, pen_u, pen_v, opts)
                 : fit(x, y, mode, a.H, pen_u, pen_v, opts);
  }
  f.class_labels = classes;

  OutputGuard guard;
  const fs::path dir = prepare_out_dir(a.out, guard);
  write_fit_artifacts(dir, f, guard, a.scores && !big);

  const bool regression = f.simpls || f.mode.method == Method::pls_r;
  if (a.scores && big) {
    const fs::path fxi = dir / "xi.csv", fom = dir / "omega.csv";
    guard.own_file(fxi);
    guard.own_file(fom);
    std::ofstream oxi(fxi), oom(fom);
    const auto hdr = comp_header(f.n_components);
    for (std::size_t j = 0; j < hdr.size(); ++j) {
      oxi << (j ? "," : "") << hdr[j];
      oom << (j ? "," : "") << hdr[j];
    }
    oxi << '\n';
    oom << '\n';
    std::unique_ptr<MemoryChunkSource> mem;
    const ChunkSource* src = dcs.get();
    if (!from_dir) {
      mem = std::make_unique<MemoryChunkSource>(x, y, std::max(a.chunks, 1));
      src = mem.get();
    }
    stream_scores(*src, f, [&](const Matrix& xi, const Matrix& om) {
      append_csv_rows(oxi, xi);
      append_csv_rows(oom, om);
    });
    if (regression && f.n_components > 0) {
      const fs::path ff = dir / "fitted.csv";
      guard.own_file(ff);
      std::ofstream off(ff);
      Matrix cx, cy;
      for (int g = 0; g < src->chunk_count(); ++g) {
        src->read_chunk(g, cx, cy);
        append_csv_rows(off, predict(f, cx));
      }
    }
  } else if (a.scores && regression && f.n_components > 0) {
    const fs::path ff = dir / "fitted.csv";
    guard.own_file(ff);
    write_csv(ff.string(), predict(f, x));
  }

  guard.commit();
  std::cout << "fit: mode " << mode_name(f.mode) << (f.simpls ? " (simpls)" : "") << ", "
            << f.n_components << "/" << f.requested << " component(s)"
            << (big ? ", chunked path" : ", in-memory path") << " -> " << a.out << "\n";
  for (const auto& w : f.warnings) std::cout << "warning: " << w << "\n";
}

// ---------------------------------------------------------------- predict

struct PredictArgs {
  std::string model, x_csv, out;
  bool do_classify = false;
};

PlsFit load_model(const std::string& dir) {
  const fs::path fmeta = fs::path(dir) / "meta.json";
  std::ifstream in(fmeta);
  if (!in) throw io_error("missing model metadata: " + fmeta.string());
  json meta;
  try {
    in >> meta;
  } catch (const json::exception& e) {
    throw io_error("bad model metadata: " + std::string(e.what()));
  }
  PlsFit f;
  const std::string mode = meta.at("mode").get<std::string>();
  f.simpls = meta.value("simpls", false);
  if (mode == "pls-r") f.mode = ModeSpec::pls_r(meta.value("scaled_nipals", false));
  else if (mode == "pls-svd") f.mode = ModeSpec::pls_svd();
  else if (mode == "pls-w2a") f.mode = ModeSpec::pls_w2a();
  else if (mode == "rcca")
    f.mode = ModeSpec::rcca(meta.value("ridge_x", 0.0), meta.value("ridge_y", 0.0),
                            meta.value("convex_ridge", false));
  f.n_components = meta.at("n_components").get<int>();
  f.requested = meta.value("H_requested", f.n_components);
  f.centered = meta.at("centered").get<bool>();
  f.scaled = meta.at("scaled").get<bool>();
  f.x_means = vector_from_json(meta.at("x_means"));
  f.x_sds = vector_from_json(meta.at("x_sds"));
  f.y_means = vector_from_json(meta.at("y_means"));
  f.y_sds = vector_from_json(meta.at("y_sds"));
  if (meta.contains("classes")) f.class_labels = meta["classes"].get<std::vector<std::string>>();

  const fs::path fb = fs::path(dir) / "b_pls.csv";
  if (fs::exists(fb)) {
    // store as simpls-style coefficients so prediction reuses the saved matrix
    f.b_stored = read_csv(fb.string()).values;
    f.simpls = true;
  }
  return f;
}

void cmd_predict(const PredictArgs& a) {
  PlsFit f = load_model(a.model);
  const bool regression = f.simpls || f.mode.method == Method::pls_r;
  if (!regression) throw mode_error("model was not fit in a regression mode");

  // vacuous input: header-only (or fully empty) CSV gives header-only output
  Matrix x;
  bool empty;
  try {
    x = read_csv(a.x_csv).values;
    empty = x.rows() == 0;
  } catch (const io_error& e) {
    if (std::string(e.what()).find("empty CSV") == std::string::npos) throw;
    empty = true;
  }

  OutputGuard guard;
  guard.own_file(a.out);
  std::ofstream out(a.out, std::ios::trunc);
  if (!out) throw io_error("cannot write " + a.out);

  const Index q = f.y_means.size();
  std::vector<std::string> hdr;
  if (a.do_classify) {
    hdr = {"label"};
  } else {
    for (Index j = 1; j <= q; ++j) hdr.push_back("y" + std::to_string(j));
  }
  for (std::size_t j = 0; j < hdr.size(); ++j) out << (j ? "," : "") << hdr[j];
  out << '\n';

  if (!empty) {
    if (a.do_classify) {
      for (const auto& s : classify(f, x)) out << s << '\n';
    } else {
      append_csv_rows(out, predict(f, x));
    }
  }
  out.flush();
  if (!out) throw io_error("write failed: " + a.out);
  guard.commit();
}

// --------------------------------------------------------------- simulate

struct SimArgs {
  std::string design, out;
  Index n = 0;
  std::uint64_t seed = 1;
  int chunks = 0;
  Index chunk_rows = 0;
  bool csv = false;
};

Index sim_chunk_rows(const SimArgs& a, Index n, Index p, Index q) {
  if (a.chunk_rows > 0) return a.chunk_rows;
  if (a.chunks > 0) return (n + a.chunks - 1) / a.chunks;
  return default_chunk_rows(p, q);
}

void cmd_simulate(const SimArgs& a) {
  if (a.n < 1) throw invalid_input("--n must be positive");
  OutputGuard guard;
  prepare_out_dir(a.out, guard);
  json truth;
  truth["seed"] = a.seed;

  if (a.design == "group-pls") {
    truth["design"] = "group-pls";
    GroupPlsTruth t;
    if (a.csv) {
      Matrix x, y;
      t = gen_group_pls(a.n, a.seed, x, y);
      guard.own_file(fs::path(a.out) / "x.csv");
      guard.own_file(fs::path(a.out) / "y.csv");
      write_csv((fs::path(a.out) / "x.csv").string(), x);
      write_csv((fs::path(a.out) / "y.csv").string(), y);
    } else {
      const Index per = sim_chunk_rows(a, a.n, GroupPlsTruth::p, GroupPlsTruth::q);
      ChunkedDatasetWriter writer(a.out, GroupPlsTruth::p, GroupPlsTruth::q, per);
      t = stream_group_pls(a.n, a.seed, per,
                           [&](const Matrix& bx, const Matrix& by) { writer.append(bx, by); });
      writer.finish();
    }
    truth["n"] = a.n;
    truth["active_x_groups"] = t.active_x;
    truth["active_y_groups"] = t.active_y;
    truth["group_indexing"] = "0-based";
    truth["noise_sd"] = t.noise_sd;
    truth["x_group_sizes"] = std::vector<int>(GroupPlsTruth::x_groups, GroupPlsTruth::group_size);
    truth["y_group_sizes"] = std::vector<int>(GroupPlsTruth::y_groups, GroupPlsTruth::group_size);
    truth["c1"] = vector_json(t.c1);
    truth["c2"] = vector_json(t.c2);
    truth["d1"] = vector_json(t.d1);
    truth["d2"] = vector_json(t.d2);
  } else if (a.design == "plsda") {
    truth["design"] = "plsda";
    PlsdaTruth t;
    std::vector<std::string> labels;
    if (a.csv) {
      Matrix x;
      t = gen_plsda(a.n, a.seed, x, labels);
      guard.own_file(fs::path(a.out) / "x.csv");
      write_csv((fs::path(a.out) / "x.csv").string(), x);
    } else {
      const Index rem = a.n % 3;
      const Index realized = rem == 0 ? a.n : (rem == 1 ? a.n - 1 : a.n + 1);
      const Index per = sim_chunk_rows(a, realized, PlsdaTruth::p, 3);
      ChunkedDatasetWriter writer(a.out, PlsdaTruth::p, 3, per);
      t = stream_plsda(a.n, a.seed, per,
                       [&](const Matrix& bx, const std::vector<std::string>& blab) {
                         writer.append(bx, plsda_dummy(blab));
                         labels.insert(labels.end(), blab.begin(), blab.end());
                       });
      writer.finish({"1", "2", "3"});
    }
    guard.own_file(fs::path(a.out) / "labels.csv");
    write_labels((fs::path(a.out) / "labels.csv").string(), labels);
    if (t.n_adjusted)
      std::cout << "note: n adjusted to " << t.n << " for balanced classes\n";
    truth["n"] = t.n;
    truth["mu"] = vector_json(t.mu);
    json cg = json::array();
    for (const auto& pr : t.class_groups) cg.push_back({pr[0], pr[1]});
    truth["class_groups"] = cg;
    truth["group_indexing"] = "0-based";
    truth["classes"] = t.classes;
    truth["group_sizes"] = std::vector<int>(PlsdaTruth::groups, PlsdaTruth::group_size);
  } else {
    throw invalid_input("unknown design '" + a.design + "' (group-pls | plsda)");
  }

  const fs::path ft = fs::path(a.out) / "truth.json";
  guard.own_file(ft);
  std::ofstream out(ft);
  if (!out) throw io_error("cannot write " + ft.string());
  out << truth.dump(2) << "\n";
  guard.commit();
  std::cout << "simulated " << a.design << " -> " << a.out << "\n";
}

// ------------------------------------------------------------------- info

struct InfoArgs {
  std::string path, export_x, export_y, export_labels;
};

void cmd_info(const InfoArgs& a) {
  const fs::path dir(a.path);
  if (fs::exists(dir / "manifest.json")) {
    DirectoryChunkSource src(a.path);
    const Manifest& mf = src.manifest();
    std::cout << "chunked dataset: n=" << mf.n << " p=" << mf.p << " q=" << mf.q
              << " chunks=" << mf.chunks.size() << "\n";
    for (std::size_t g = 0; g < mf.chunks.size(); ++g)
      std::cout << "  chunk " << g << ": " << mf.chunks[g].rows << " rows (" << mf.chunks[g].x_file
                << ", " << mf.chunks[g].y_file << ")\n";
    if (!mf.classes.empty()) {
      std::cout << "  classes:";
      for (const auto& c : mf.classes) std::cout << " " << c;
      std::cout << "\n";
    }
    if (!a.export_x.empty() || !a.export_y.empty() || !a.export_labels.empty()) {
      Matrix x(mf.n, mf.p), y(mf.n, mf.q);
      Matrix cx, cy;
      Index at = 0;
      for (int g = 0; g < src.chunk_count(); ++g) {
        src.read_chunk(g, cx, cy);
        x.middleRows(at, cx.rows()) = cx;
        y.middleRows(at, cy.rows()) = cy;
        at += cx.rows();
      }
      OutputGuard guard;
      if (!a.export_x.empty()) {
        guard.own_file(a.export_x);
        write_csv(a.export_x, x);
      }
      if (!a.export_y.empty()) {
        guard.own_file(a.export_y);
        write_csv(a.export_y, y);
      }
      if (!a.export_labels.empty()) {
        if (mf.classes.empty()) throw invalid_input("dataset has no class information");
        std::vector<std::string> labels;
        for (Index i = 0; i < y.rows(); ++i) {
          Index k;
          y.row(i).maxCoeff(&k);
          labels.push_back(mf.classes[static_cast<std::size_t>(k)]);
        }
        guard.own_file(a.export_labels);
        write_labels(a.export_labels, labels);
      }
      guard.commit();
    }
  } else if (fs::exists(dir / "meta.json")) {
    std::ifstream in(dir / "meta.json");
    json meta;
    in >> meta;
    std::cout << "model: mode=" << meta.value("mode", "?")
              << " components=" << meta.value("n_components", 0) << "/"
              << meta.value("H_requested", 0) << (meta.value("simpls", false) ? " simpls" : "")
              << "\n";
    if (meta.contains("warnings"))
      for (const auto& w : meta["warnings"]) std::cout << "  warning: " << w.get<std::string>() << "\n";
  } else {
    throw io_error(a.path + ": neither manifest.json nor meta.json found");
  }
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"penalized two-block PLS (four modes) with chunked out-of-core paths"};
  app.require_subcommand(1);

  ImportArgs im;
  auto* s_import = app.add_subcommand("import", "convert CSV blocks to a chunked dataset");
  s_import->add_option("--x", im.x_csv, "X block CSV")->required();
  s_import->add_option("--y", im.y_csv, "Y block CSV");
  s_import->add_option("--labels", im.labels_csv, "label file (dummy-coded into Y)");
  s_import->add_option("--out", im.out, "output dataset directory")->required();
  s_import->add_option("--chunks", im.chunks, "target chunk count");
  s_import->add_option("--chunk-rows", im.chunk_rows, "rows per chunk");

  FitArgs fa;
  auto* s_fit = app.add_subcommand("fit", "fit a two-block model");
  s_fit->add_option("--data", fa.data_dir, "chunked dataset directory");
  s_fit->add_option("--x", fa.x_csv, "X block CSV");
  s_fit->add_option("--y", fa.y_csv, "Y block CSV");
  s_fit->add_option("--labels", fa.labels_csv, "label file (discriminant fit)");
  s_fit->add_option("--mode", fa.mode_s, "pls-svd | pls-w2a | rcca | pls-r (default)");
  s_fit->add_option("--H", fa.H, "number of components")->required();
  s_fit->add_option("--lambda-u", fa.lambda_u, "X-side penalty strength");
  s_fit->add_option("--lambda-v", fa.lambda_v, "Y-side penalty strength");
  s_fit->add_option("--alpha-u", fa.alpha_u, "X-side sparse-group mix in [0,1]");
  s_fit->add_option("--alpha-v", fa.alpha_v, "Y-side sparse-group mix in [0,1]");
  s_fit->add_option("--groups-u", fa.groups_u, "X groups: sizes a,b,c | NxS | file.json");
  s_fit->add_option("--groups-v", fa.groups_v, "Y groups: sizes a,b,c | NxS | file.json");
  s_fit->add_option("--ridge-x", fa.ridge_x, "rcca X ridge");
  s_fit->add_option("--ridge-y", fa.ridge_y, "rcca Y ridge");
  s_fit->add_flag("--convex-ridge", fa.convex_ridge, "rcca convex-combination ridge form");
  s_fit->add_flag("--scaled-nipals", fa.scaled_nipals, "scaled NIPALS variant (mode pls-r)");
  s_fit->add_flag("--simpls", fa.simpls, "SIMPLS variant (in-memory)");
  s_fit->add_flag("--center,!--no-center", fa.center, "column centering (default on)");
  s_fit->add_flag("--scale", fa.scale, "unit-variance scaling");
  s_fit->add_option("--chunks", fa.chunks, "chunk CSV input into G blocks (forces big path)");
  s_fit->add_option("--threads", fa.threads, "worker threads (or PLSFORGE_THREADS)");
  s_fit->add_flag("--scores", fa.scores, "write score matrices (and fitted values)");
  s_fit->add_flag("--big", fa.force_big, "force the chunked path");
  s_fit->add_flag("--in-memory", fa.force_mem, "force the in-memory path");
  s_fit->add_option("--out", fa.out, "output model directory")->required();

  PredictArgs pa;
  auto* s_pred = app.add_subcommand("predict", "predict responses (or classes) for new rows");
  s_pred->add_option("--model", pa.model, "model directory from fit")->required();
  s_pred->add_option("--x", pa.x_csv, "new X rows CSV")->required();
  s_pred->add_option("--out", pa.out, "predictions CSV")->required();
  s_pred->add_flag("--classify", pa.do_classify, "emit class labels instead of scores");

  SimArgs sa;
  auto* s_sim = app.add_subcommand("simulate", "generate a simulation-design dataset");
  s_sim->add_option("--design", sa.design, "group-pls | plsda")->required();
  s_sim->add_option("--n", sa.n, "rows")->required();
  s_sim->add_option("--seed", sa.seed, "RNG seed (default 1)");
  s_sim->add_option("--chunks", sa.chunks, "target chunk count");
  s_sim->add_option("--chunk-rows", sa.chunk_rows, "rows per chunk");
  s_sim->add_flag("--csv", sa.csv, "emit CSV files instead of a chunked dataset");
  s_sim->add_option("--out", sa.out, "output directory")->required();

  InfoArgs ia;
  auto* s_info = app.add_subcommand("info", "describe a dataset or model directory");
  s_info->add_option("path", ia.path, "dataset or model directory")->required();
  s_info->add_option("--export-x", ia.export_x, "write the X block to CSV");
  s_info->add_option("--export-y", ia.export_y, "write the Y block to CSV");
  s_info->add_option("--export-labels", ia.export_labels, "write labels recovered from Y");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (s_import->parsed()) cmd_import(im);
    else if (s_fit->parsed()) cmd_fit(fa);
    else if (s_pred->parsed()) cmd_predict(pa);
    else if (s_sim->parsed()) cmd_simulate(sa);
    else if (s_info->parsed()) cmd_info(ia);
    return 0;
  } catch (const invalid_input& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const mode_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const manifest_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const io_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const convergence_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const degenerate_basis& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "unexpected error: " << e.what() << "\n";
    return 1;
  }
}
