#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include "ict/bench.hpp"
#include "ict/equimap.hpp"
#include "ict/oracle.hpp"
#include "ict/parallel.hpp"
#include "ict/specparse.hpp"
#include "ict/store.hpp"
#include "ict/verify_container.hpp"

namespace {

using nlohmann::ordered_json;
using cd = std::complex<double>;

// exit codes: 0 pass, 1 verification failure, 2 container corruption, 3 usage error
constexpr int kExitPass = 0;
constexpr int kExitVerifyFail = 1;
constexpr int kExitCorrupt = 2;
constexpr int kExitUsage = 3;

struct CommonOpts {
  std::string group = "o3";
  std::string basis;  // empty: default per group
  int threads = -1;
};

ict::Group parse_group(const std::string& g) {
  if (g == "o3") return ict::Group::O3;
  if (g == "so3") return ict::Group::SO3;
  if (g == "su2") return ict::Group::SU2;
  throw CLI::ValidationError("--group must be one of o3, so3, su2");
}

ict::BasisKind parse_basis(const CommonOpts& c, ict::Group group) {
  std::string b = c.basis;
  if (b.empty()) b = (group == ict::Group::SU2) ? "spherical" : "cartesian";
  if (b == "cartesian") {
    if (group == ict::Group::SU2)
      throw CLI::ValidationError("--basis cartesian is not available for su2");
    return ict::BasisKind::Cartesian;
  }
  if (b == "spherical") return ict::BasisKind::Spherical;
  throw CLI::ValidationError("--basis must be cartesian or spherical");
}

void add_common(CLI::App* cmd, CommonOpts& c) {
  cmd->add_option("--group", c.group, "Group: o3 (default), so3, su2");
  cmd->add_option("--basis", c.basis, "Basis: cartesian (default for o3/so3) or spherical");
  cmd->add_option("--threads", c.threads, "Worker threads (0 = all cores; ICT_THREADS overrides)");
}

std::string weight_label(ict::Weight w) {
  std::string s = w.str();
  for (auto& ch : s)
    if (ch == '/') ch = '_';
  return s;
}

ict::SpaceSpec spec_from_args(const std::string& space, int rank, ict::Group group) {
  if (!space.empty()) return ict::parse_space_spec(space, group);
  return ict::cartesian_space(rank, group);
}

std::set<int> parse_weight_list(const std::string& text, ict::Group group) {
  std::set<int> out;
  std::string tok;
  std::stringstream ss(text);
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    const ict::SpaceSpec s = ict::parse_space_spec("(" + tok + ")", group);
    out.insert(s.terms[0].factors[0].l.doubled());
  }
  return out;
}

template <typename Scalar>
int run_decompose(const ict::SpaceSpec& spec, ict::BasisKind basis, const std::string& out_file,
                  const std::optional<std::set<int>>& weights, bool materialize, int threads) {
  ict::DecomposeOptions opts;
  opts.weight_filter_doubled = weights;
  opts.materialize = materialize;
  opts.basis = basis;
  opts.threads = threads;
  const auto t0 = std::chrono::steady_clock::now();
  auto projs = ict::decompose<Scalar>(spec, opts);
  const auto t1 = std::chrono::steady_clock::now();

  std::vector<ict::StoredObject> objects;
  std::map<int, int> per_weight;
  for (const auto& p : projs) {
    ++per_weight[p.weight().doubled()];
    ict::StoredObject obj;
    obj.name = "path/t" + std::to_string(p.path.term_index) + "/l" + weight_label(p.weight()) +
               "/q" + std::to_string(p.q);
    obj.kind = "path_matrix";
    obj.path = p.path;
    if constexpr (std::is_same_v<Scalar, double>) {
      obj.dtype = "f64";
      obj.f64 = p.phat;
    } else {
      obj.dtype = "c128";
      obj.c128 = p.phat;
    }
    objects.push_back(std::move(obj));
  }
  for (const auto& p : projs) {
    if (!p.dense) continue;
    ict::StoredObject obj;
    obj.name = "proj/t" + std::to_string(p.path.term_index) + "/l" + weight_label(p.weight()) +
               "/q" + std::to_string(p.q);
    obj.kind = "projector_dense";
    obj.path = p.path;
    if constexpr (std::is_same_v<Scalar, double>) {
      obj.dtype = "f64";
      obj.f64 = *p.dense;
    } else {
      obj.dtype = "c128";
      obj.c128 = *p.dense;
    }
    objects.push_back(std::move(obj));
  }

  ict::ContainerMeta meta;
  meta.group = spec.group;
  meta.space_spec = ict::render_space_spec(spec);
  meta.basis = basis == ict::BasisKind::Cartesian ? "cartesian" : "spherical";
  ict::save_container(out_file, meta, objects);

  std::cout << "space " << meta.space_spec << " (dim " << spec.dim() << ")\n";
  for (const auto& [ld, n] : per_weight)
    std::cout << "  l=" << ict::Weight::from_doubled(ld).str() << ": " << n << " projector(s)\n";
  std::cout << projs.size() << " path matrices in "
            << std::chrono::duration<double>(t1 - t0).count() << " s -> " << out_file << "\n";
  return kExitPass;
}

template <typename Scalar>
int run_basis(const ict::SpaceSpec& vin, const ict::SpaceSpec& vout, ict::BasisKind basis,
              const std::string& out_file, bool dense, int threads) {
  const std::uint64_t dim = ict::hom_dimension(vin, vout);
  ict::BasisOptions opts{true, basis, threads};
  std::vector<ict::StoredObject> objects;

  auto fill = [](ict::StoredObject& obj, const ict::Mat<Scalar>& m) {
    if constexpr (std::is_same_v<Scalar, double>) {
      obj.dtype = "f64";
      obj.f64 = m;
    } else {
      obj.dtype = "c128";
      obj.c128 = m;
    }
  };

  std::cout << "hom dimension " << dim << "\n";
  if (dense) {
    constexpr Eigen::Index kDenseCap = Eigen::Index(1) << 28;
    if (vin.dim() * vout.dim() > kDenseCap) {
      std::cerr << "dense refused: dim(vout)*dim(vin) = " << vin.dim() * vout.dim()
                << " exceeds " << kDenseCap << " entries; use --factored\n";
      return kExitUsage;
    }
    auto elems = ict::hom_basis<Scalar>(vin, vout, opts);
    for (const auto& e : elems) {
      ict::StoredObject obj;
      obj.name = "basis/l" + weight_label(e.weight()) + (e.parity() > 0 ? "p+" : "p-") + "/out_t" +
                 std::to_string(e.out_path.term_index) + "q" + std::to_string(e.out_q) + "/in_t" +
                 std::to_string(e.in_path.term_index) + "q" + std::to_string(e.in_q);
      obj.kind = "basis_element";
      obj.path = e.out_path;
      obj.path_in = e.in_path;
      fill(obj, e.dense(vin, vout));
      objects.push_back(std::move(obj));
    }
  } else {
    auto fmap = ict::factored_map<Scalar>(vin, vout, opts);
    for (const auto& b : fmap.blocks) {
      const std::string ltag = "l" + weight_label(b.l) + (b.parity > 0 ? "p+" : "p-");
      std::cout << "  " << ltag << ": mix " << b.mix.rows() << "x" << b.mix.cols() << "\n";
      ict::StoredObject mix;
      mix.name = "mix/" + ltag;
      mix.kind = "mix_shape";
      fill(mix, b.mix);
      objects.push_back(std::move(mix));
    }
    // stacks stored once per path, matched terminals only
    auto store_stack = [&](const ict::SpaceSpec& sp, const char* side, bool in_side) {
      auto paths = ict::enumerate_paths(sp);
      const auto qs = ict::path_q_indices(paths);
      std::map<ict::TerminalKey, bool> matched;
      for (const auto& b : fmap.blocks) matched[{b.l, b.parity}] = true;
      for (std::size_t i = 0; i < paths.size(); ++i) {
        if (!matched.count({paths[i].terminal(), paths[i].terminal_parity})) continue;
        ict::Term term = sp.terms[paths[i].term_index];
        if (sp.group != ict::Group::O3) term.parity = 1;
        auto pm = ict::build_path_matrix<Scalar>(paths[i], term);
        if constexpr (std::is_same_v<Scalar, double>) {
          if (basis == ict::BasisKind::Cartesian)
            pm.entries = ict::convert_rows_basis(pm.entries, term, ict::BasisKind::Spherical,
                                                 ict::BasisKind::Cartesian);
        }
        ict::StoredObject obj;
        obj.name = std::string(side) + "/path/t" + std::to_string(paths[i].term_index) + "/l" +
                   weight_label(paths[i].terminal()) + "/q" + std::to_string(qs[i]);
        obj.kind = "path_matrix";
        obj.path = paths[i];
        fill(obj, pm.entries);
        objects.push_back(std::move(obj));
        (void)in_side;
      }
    };
    store_stack(vout, "out", false);
    store_stack(vin, "in", true);
  }

  ict::ContainerMeta meta;
  meta.group = vin.group;
  meta.space_spec = ict::render_space_spec(vin);
  meta.space_spec_out = ict::render_space_spec(vout);
  meta.basis = basis == ict::BasisKind::Cartesian ? "cartesian" : "spherical";
  ict::save_container(out_file, meta, objects);
  std::cout << objects.size() << " objects -> " << out_file << "\n";
  return kExitPass;
}

ordered_json result_to_json(const ict::ContainerVerifyResult& result) {
  ordered_json j;
  j["pass"] = result.pass();
  ordered_json checks = ordered_json::array();
  for (const auto& c : result.checks) {
    ordered_json jc;
    jc["name"] = c.name;
    jc["value"] = c.value;
    jc["tolerance"] = c.tolerance;
    jc["pass"] = c.pass;
    if (!c.note.empty()) jc["note"] = c.note;
    checks.push_back(std::move(jc));
  }
  j["checks"] = std::move(checks);
  j["notes"] = result.notes;
  return j;
}

int run_verify(const std::string& file, const ict::ContainerVerifyOptions& opts) {
  ict::Container c;
  try {
    c = ict::load_container(file);
  } catch (const ict::store_error& e) {
    ordered_json j;
    j["pass"] = false;
    j["error"] = std::string("container corruption: ") + e.what();
    if (!e.object().empty()) j["object"] = e.object();
    std::cout << j.dump() << "\n";
    return kExitCorrupt;
  }
  const auto result = ict::verify_container(c, opts);
  for (const auto& chk : result.checks)
    std::cout << (chk.pass ? "PASS " : "FAIL ") << chk.name << " = " << chk.value
              << " (tol " << chk.tolerance << ")" << (chk.note.empty() ? "" : "  [" + chk.note + "]")
              << "\n";
  for (const auto& note : result.notes) std::cout << "note: " << note << "\n";
  std::cout << result_to_json(result).dump() << "\n";
  return result.pass() ? kExitPass : kExitVerifyFail;
}

int run_info(const std::string& space, int rank, ict::Group group, bool json) {
  ordered_json j;
  if (rank > 0 && space.empty()) {
    j["rank"] = rank;
    j["dim"] = ict::cartesian_space(rank, group).dim();
    ordered_json mult = ordered_json::object();
    for (int l = 0; l <= rank; ++l)
      mult[std::to_string(l)] = ict::multiplicity(rank, ict::Weight::integer(l));
    j["multiplicity"] = std::move(mult);
    j["end_dimension"] = ict::end_dimension(rank);
    const ict::SpaceSpec spec = ict::cartesian_space(rank, group);
    ordered_json paths = ordered_json::array();
    for (const auto& p : ict::enumerate_paths(spec)) paths.push_back(p.str());
    j["n_paths"] = paths.size();
    j["paths"] = std::move(paths);
  } else {
    const ict::SpaceSpec spec = ict::parse_space_spec(space, group);
    j["space"] = ict::render_space_spec(spec);
    j["dim"] = spec.dim();
    const auto paths = ict::enumerate_paths(spec);
    ordered_json jp = ordered_json::array();
    std::map<std::string, int> per_terminal;
    for (const auto& p : paths) {
      jp.push_back(p.str());
      ++per_terminal[p.terminal().str() + (spec.group == ict::Group::O3 ? (p.terminal_parity > 0 ? "+" : "-") : "")];
    }
    j["n_paths"] = paths.size();
    j["paths_per_terminal"] = per_terminal;
    j["paths"] = std::move(jp);
    j["end_dimension"] = ict::hom_dimension(spec, spec);
  }
  if (json) {
    std::cout << j.dump(2) << "\n";
  } else {
    for (const auto& [k, v] : j.items()) {
      if (k == "paths") continue;
      std::cout << k << ": " << v.dump() << "\n";
    }
    std::cout << "paths:\n";
    for (const auto& p : j["paths"]) std::cout << "  " << p.get<std::string>() << "\n";
  }
  return kExitPass;
}

int run_bench(int max_rank, bool json, int threads) {
  const auto records = ict::run_decomposition_bench(max_rank, 2, threads);
  if (json) {
    for (const auto& r : records) {
      ordered_json j;
      j["rank"] = r.rank;
      j["seconds"] = r.wall_seconds;
      j["n_paths"] = r.n_paths;
      j["threads"] = r.threads;
      j["peak_bytes_estimate"] = r.peak_bytes_estimate;
      j["host"] = r.host;
      if (r.oracle_seconds > 0) j["oracle_seconds"] = r.oracle_seconds;
      std::cout << j.dump() << "\n";
    }
  } else {
    std::cout << "rank  seconds     paths  peak_bytes\n";
    for (const auto& r : records)
      std::cout << r.rank << "     " << r.wall_seconds << "  " << r.n_paths << "  "
                << r.peak_bytes_estimate << "\n";
  }
  return kExitPass;
}

int run_render(const std::string& file, const std::string& object, const std::string& out_file) {
  ict::Container c;
  try {
    c = ict::load_container(file);
  } catch (const ict::store_error& e) {
    std::cerr << "container corruption: " << e.what() << "\n";
    return kExitCorrupt;
  }
  const ict::StoredObject* target = nullptr;
  for (const auto& obj : c.objects)
    if (obj.name == object) target = &obj;
  if (!target) {
    std::cerr << "object '" << object << "' not found; container holds:\n";
    for (const auto& obj : c.objects) std::cerr << "  " << obj.name << "\n";
    return kExitUsage;
  }
  if (target->dtype != "f64") {
    std::cerr << "render supports real (f64) objects only\n";
    return kExitUsage;
  }
  const ict::MatD& m = target->f64;
  const double peak = m.size() ? m.cwiseAbs().maxCoeff() : 0.0;
  std::ofstream out(out_file, std::ios::binary | std::ios::trunc);
  out << "P5\n" << m.cols() << " " << m.rows() << "\n255\n";
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      // linear [-peak, peak] -> [0, 255]; zero lands on 128
      const double v = peak > 0 ? m(i, j) / peak : 0.0;
      const long px = std::lround(v * 127.5 + 127.5);
      out.put(static_cast<char>(std::min(255L, std::max(0L, px))));
    }
  if (!out) {
    std::cerr << "write failed for " << out_file << "\n";
    return kExitUsage;
  }
  std::cout << m.rows() << "x" << m.cols() << " -> " << out_file << "\n";
  return kExitPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Orthogonal irreducible Cartesian tensor decompositions and equivariant bases"};
  app.require_subcommand(1);

  // decompose
  auto* dec = app.add_subcommand("decompose", "Generate decomposition (path) matrices");
  CommonOpts dec_common;
  add_common(dec, dec_common);
  int dec_rank = 0;
  std::string dec_space, dec_weights, dec_out;
  bool dec_materialize = false, dec_force = false;
  auto* opt_rank = dec->add_option("--rank", dec_rank, "Cartesian rank n for (R^3)^(x n)");
  auto* opt_space = dec->add_option("--space", dec_space, "Space spec, e.g. \"(2x2x2)-+(1x3)-\"");
  opt_rank->excludes(opt_space);
  opt_space->excludes(opt_rank);
  dec->add_option("--weights", dec_weights, "Comma-separated terminal weights to keep");
  dec->add_flag("--materialize", dec_materialize, "Also store dense projectors H = P P^T");
  dec->add_flag("--force", dec_force, "Allow rank > 9");
  dec->add_option("--out", dec_out, "Output container file")->required();

  // basis
  auto* bas = app.add_subcommand("basis", "Generate an equivariant basis between two spaces");
  CommonOpts bas_common;
  add_common(bas, bas_common);
  std::string bas_in, bas_out_space, bas_out;
  bool bas_dense = false, bas_factored = false;
  bas->add_option("--in", bas_in, "Input space spec")->required();
  bas->add_option("--out-space", bas_out_space, "Output space spec")->required();
  auto* opt_dense = bas->add_flag("--dense", bas_dense, "Store dense basis elements");
  auto* opt_fact = bas->add_flag("--factored", bas_factored, "Store factored stacks (default)");
  opt_dense->excludes(opt_fact);
  bas->add_option("--out", bas_out, "Output container file")->required();

  // verify
  auto* ver = app.add_subcommand("verify", "Verify a container");
  std::string ver_file;
  ict::ContainerVerifyOptions ver_opts;
  double ver_tol = -1;
  bool ver_oracle = false;
  int ver_threads = -1;
  ver->add_option("file", ver_file, "Container file")->required();
  ver->add_option("--samples", ver_opts.samples, "Random group elements for equivariance checks");
  ver->add_flag("--oracle", ver_oracle, "Compare spans against the commutant nullspace");
  ver->add_option("--tol", ver_tol, "Override every residual tolerance");
  ver->add_option("--threads", ver_threads, "Worker threads");

  // info
  auto* inf = app.add_subcommand("info", "Dimensions, multiplicities and paths");
  CommonOpts inf_common;
  add_common(inf, inf_common);
  int inf_rank = 0;
  std::string inf_space;
  bool inf_json = false;
  auto* io_rank = inf->add_option("--rank", inf_rank, "Cartesian rank");
  auto* io_space = inf->add_option("--space", inf_space, "Space spec");
  io_rank->excludes(io_space);
  io_space->excludes(io_rank);
  inf->add_flag("--json", inf_json, "Machine-readable output");

  // bench
  auto* ben = app.add_subcommand("bench", "Time full decompositions per rank");
  int ben_max = 6, ben_threads = -1;
  bool ben_json = false;
  ben->add_option("--max-rank", ben_max, "Largest rank to time (<= 9)");
  ben->add_flag("--json", ben_json, "JSON lines output");
  ben->add_option("--threads", ben_threads, "Worker threads");

  // render
  auto* ren = app.add_subcommand("render", "Render a stored matrix as a PGM heatmap");
  std::string ren_file, ren_object, ren_out;
  ren->add_option("file", ren_file, "Container file")->required();
  ren->add_option("--object", ren_object, "Object name to render")->required();
  ren->add_option("--out", ren_out, "Output .pgm file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (dec->parsed()) {
      const ict::Group group = parse_group(dec_common.group);
      if (dec_space.empty() && dec_rank <= 0)
        throw CLI::ValidationError("decompose needs exactly one of --rank/--space");
      if (dec_space.empty() && dec_rank > 9 && !dec_force) {
        std::cerr << "rank " << dec_rank << " refused: concatenated path matrices need ~"
                  << (std::pow(9.0, dec_rank) * 8.0 / (1u << 30))
                  << " GiB; pass --force to proceed\n";
        return kExitUsage;
      }
      const ict::SpaceSpec spec = spec_from_args(dec_space, dec_rank, group);
      const ict::BasisKind basis = parse_basis(dec_common, group);
      std::optional<std::set<int>> weights;
      if (!dec_weights.empty()) weights = parse_weight_list(dec_weights, group);
      if (group == ict::Group::SU2)
        return run_decompose<cd>(spec, basis, dec_out, weights, dec_materialize, dec_common.threads);
      return run_decompose<double>(spec, basis, dec_out, weights, dec_materialize,
                                   dec_common.threads);
    }
    if (bas->parsed()) {
      const ict::Group group = parse_group(bas_common.group);
      const ict::SpaceSpec vin = ict::parse_space_spec(bas_in, group);
      const ict::SpaceSpec vout = ict::parse_space_spec(bas_out_space, group);
      const ict::BasisKind basis = parse_basis(bas_common, group);
      if (group == ict::Group::SU2)
        return run_basis<cd>(vin, vout, basis, bas_out, bas_dense, bas_common.threads);
      return run_basis<double>(vin, vout, basis, bas_out, bas_dense, bas_common.threads);
    }
    if (ver->parsed()) {
      ver_opts.with_oracle = ver_oracle;
      ver_opts.threads = ver_threads;
      if (ver_tol > 0) ver_opts.tol_override = ver_tol;
      return run_verify(ver_file, ver_opts);
    }
    if (inf->parsed()) {
      const ict::Group group = parse_group(inf_common.group);
      if (inf_space.empty() && inf_rank <= 0)
        throw CLI::ValidationError("info needs exactly one of --rank/--space");
      return run_info(inf_space, inf_rank, group, inf_json);
    }
    if (ben->parsed()) {
      if (ben_max > 9) throw CLI::ValidationError("--max-rank is capped at 9");
      return run_bench(ben_max, ben_json, ben_threads);
    }
    if (ren->parsed()) return run_render(ren_file, ren_object, ren_out);
  } catch (const CLI::ValidationError& e) {
    std::cerr << e.what() << "\n";
    return kExitUsage;
  } catch (const ict::parse_error& e) {
    std::cerr << "spec error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ict::store_error& e) {
    std::cerr << "container error: " << e.what() << "\n";
    return kExitCorrupt;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitVerifyFail;
  }
  return kExitUsage;
}
