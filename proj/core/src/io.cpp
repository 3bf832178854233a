#include "dtnlab/io.hpp"

#include <cstdio>
#include <filesystem>
#include <cstring>
#include <fstream>
#include <sstream>

namespace dtnlab::io {

namespace fs = std::filesystem;

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_text_atomic(const std::string& path, const std::string& content) {
  const fs::path target(path);
  if (target.has_parent_path() && !fs::exists(target.parent_path()))
    throw Error("output directory does not exist: " + target.parent_path().string());
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out << content;
    if (!out.good()) throw Error("short write to " + tmp.string());
  }
  fs::rename(tmp, target);
}

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hex64(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(value));
  return buf;
}

void expect_keys(const json& obj, const std::string& where,
                 const std::vector<std::string>& allowed) {
  if (!obj.is_object()) throw Error(where + ": expected an object");
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (const auto& k : allowed)
      if (it.key() == k) {
        ok = true;
        break;
      }
    if (!ok) throw Error(where + "." + it.key() + ": unknown key");
  }
}

namespace {

double require_number(const json& j, const std::string& where, const char* key) {
  if (!j.contains(key) || !j[key].is_number())
    throw Error(where + "." + key + ": required number missing");
  return j[key].get<double>();
}

Vec vec_from_json(const json& j, const std::string& where) {
  if (!j.is_array() || (j.size() != 2 && j.size() != 3))
    throw Error(where + ": expected an array of 2 or 3 numbers");
  Vec v{0, 0, 0};
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw Error(where + ": expected numbers");
    v[i] = j[i].get<double>();
  }
  return v;
}

}  // namespace

json potential_spec_to_json(const PotentialSpec& spec) {
  json j;
  switch (spec.kind) {
    case BumpKind::Gaussian: j["kind"] = "gaussian"; break;
    case BumpKind::CompactBump: j["kind"] = "compact_bump"; break;
    case BumpKind::PolyBump: j["kind"] = "poly_bump"; break;
    case BumpKind::Sum: j["kind"] = "sum"; break;
  }
  if (spec.kind == BumpKind::Sum) {
    json comps = json::array();
    for (const auto& c : spec.components) comps.push_back(potential_spec_to_json(c));
    j["components"] = comps;
  } else {
    j["amplitude"] = spec.amplitude;
    j["center"] = json::array({spec.center[0], spec.center[1], spec.center[2]});
    j["width"] = spec.width;
    if (spec.kind == BumpKind::PolyBump) j["poly_order"] = spec.poly_order;
    j["clip_inner"] = spec.clip_inner;
    j["clip_outer"] = spec.clip_outer;
  }
  return j;
}

PotentialSpec potential_spec_from_json(const json& j, const std::string& where) {
  expect_keys(j, where,
              {"kind", "amplitude", "center", "width", "poly_order", "components",
               "clip_inner", "clip_outer"});
  if (!j.contains("kind") || !j["kind"].is_string())
    throw Error(where + ".kind: required string missing");
  const std::string kind = j["kind"].get<std::string>();

  PotentialSpec spec;
  if (kind == "sum") {
    spec.kind = BumpKind::Sum;
    if (!j.contains("components") || !j["components"].is_array())
      throw Error(where + ".components: required array missing");
    std::size_t idx = 0;
    for (const auto& c : j["components"]) {
      spec.components.push_back(
          potential_spec_from_json(c, where + ".components[" + std::to_string(idx) + "]"));
      ++idx;
    }
    return spec;
  }

  if (kind == "gaussian")
    spec.kind = BumpKind::Gaussian;
  else if (kind == "compact_bump")
    spec.kind = BumpKind::CompactBump;
  else if (kind == "poly_bump")
    spec.kind = BumpKind::PolyBump;
  else
    throw Error(where + ".kind: unknown kind '" + kind + "'");

  spec.amplitude = require_number(j, where, "amplitude");
  if (j.contains("center")) spec.center = vec_from_json(j["center"], where + ".center");
  spec.width = require_number(j, where, "width");
  if (spec.width <= 0.0) throw Error(where + ".width: must be positive");
  if (spec.kind == BumpKind::PolyBump) {
    if (!j.contains("poly_order") || !j["poly_order"].is_number_integer())
      throw Error(where + ".poly_order: required integer missing");
    spec.poly_order = j["poly_order"].get<int>();
    if (spec.poly_order < 1) throw Error(where + ".poly_order: must be >= 1");
  }
  if (j.contains("clip_inner")) spec.clip_inner = j["clip_inner"].get<double>();
  if (j.contains("clip_outer")) spec.clip_outer = j["clip_outer"].get<double>();
  if (!(spec.clip_outer > spec.clip_inner) || spec.clip_inner < 0.0)
    throw Error(where + ": clip window must satisfy 0 <= inner < outer");
  return spec;
}

json config_to_json(const ExperimentConfig& cfg) {
  json j;
  j["domain"] = {{"dimension", cfg.dimension},
                 {"resolution", cfg.resolution},
                 {"side", cfg.side}};
  j["fourier"] = {{"p_max", cfg.p_max}, {"points_per_axis", cfg.points_per_axis}};
  j["cutoff"] = {{"alpha", cfg.alpha}};
  j["sweep"] = {{"base", potential_spec_to_json(cfg.base)},
                {"bump", potential_spec_to_json(cfg.bump)},
                {"epsilons", cfg.epsilons},
                {"smoothness_m", cfg.smoothness_m},
                {"band_rho_min", cfg.band_rho_min},
                {"band_rho_max", cfg.band_rho_max},
                {"band_points", cfg.band_points}};
  j["threads"] = cfg.threads;
  j["pad_factor"] = cfg.pad_factor;
  return j;
}

ExperimentConfig sweep_config_from_json(const json& root) {
  expect_keys(root, "$", {"domain", "fourier", "cutoff", "sweep", "threads", "pad_factor"});
  ExperimentConfig cfg;

  if (!root.contains("domain")) throw Error("$.domain: required section missing");
  const json& dj = root["domain"];
  expect_keys(dj, "$.domain", {"dimension", "resolution", "side"});
  cfg.dimension = static_cast<int>(require_number(dj, "$.domain", "dimension"));
  cfg.resolution = static_cast<int>(require_number(dj, "$.domain", "resolution"));
  cfg.side = require_number(dj, "$.domain", "side");

  if (root.contains("fourier")) {
    const json& fj = root["fourier"];
    expect_keys(fj, "$.fourier", {"p_max", "points_per_axis"});
    cfg.p_max = require_number(fj, "$.fourier", "p_max");
    cfg.points_per_axis = static_cast<int>(require_number(fj, "$.fourier", "points_per_axis"));
  }
  if (root.contains("cutoff")) {
    expect_keys(root["cutoff"], "$.cutoff", {"alpha"});
    cfg.alpha = require_number(root["cutoff"], "$.cutoff", "alpha");
  }
  if (!root.contains("sweep")) throw Error("$.sweep: required section missing");
  const json& sj = root["sweep"];
  expect_keys(sj, "$.sweep",
              {"base", "bump", "epsilons", "smoothness_m", "band_rho_min",
               "band_rho_max", "band_points"});
  if (!sj.contains("base") || !sj.contains("bump") || !sj.contains("epsilons"))
    throw Error("$.sweep: base, bump and epsilons are required");
  cfg.base = potential_spec_from_json(sj["base"], "$.sweep.base");
  cfg.bump = potential_spec_from_json(sj["bump"], "$.sweep.bump");
  if (!sj["epsilons"].is_array()) throw Error("$.sweep.epsilons: expected an array");
  for (const auto& e : sj["epsilons"]) cfg.epsilons.push_back(e.get<double>());
  if (sj.contains("smoothness_m")) cfg.smoothness_m = sj["smoothness_m"].get<int>();
  if (sj.contains("band_rho_min")) cfg.band_rho_min = sj["band_rho_min"].get<double>();
  if (sj.contains("band_rho_max")) cfg.band_rho_max = sj["band_rho_max"].get<double>();
  if (sj.contains("band_points")) cfg.band_points = sj["band_points"].get<int>();
  if (root.contains("threads")) cfg.threads = root["threads"].get<int>();
  if (root.contains("pad_factor")) cfg.pad_factor = root["pad_factor"].get<int>();
  cfg.validate();
  return cfg;
}

std::string config_hash_hex(const ExperimentConfig& cfg) {
  return hex64(fnv1a(config_to_json(cfg).dump()));
}

namespace {

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

void write_potential_csv(const std::string& path, const Potential& v) {
  const Domain& dom = v.domain();
  std::ostringstream os;
  os << "x1,x2";
  if (dom.dim() == 3) os << ",x3";
  os << ",value\n";
  for (std::size_t i = 0; i < dom.num_interior(); ++i) {
    const Vec& x = dom.interior_node(i);
    os << format_double(x[0]) << ',' << format_double(x[1]);
    if (dom.dim() == 3) os << ',' << format_double(x[2]);
    os << ',' << format_double(v.value(i)) << '\n';
  }
  write_text_atomic(path, os.str());
}

std::vector<double> read_potential_csv(const std::string& path, const Domain& dom) {
  std::istringstream in(read_text_file(path));
  std::string line;
  if (!std::getline(in, line)) throw Error(path + ": empty file");
  std::vector<double> vals;
  vals.reserve(dom.num_interior());
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto pos = line.rfind(',');
    if (pos == std::string::npos) throw Error(path + ": malformed row");
    vals.push_back(std::stod(line.substr(pos + 1)));
  }
  if (vals.size() != dom.num_interior())
    throw Error(path + ": row count does not match the grid");
  return vals;
}

void write_dtn(const std::string& base_path, const DtnMap& map, bool binary) {
  const Domain& dom = *map.dom;
  const std::size_t nb = dom.num_boundary();

  json meta;
  meta["format"] = binary ? "gdtn" : "csv";
  meta["kernel_file"] = fs::path(base_path).filename().string() + (binary ? ".gdtn" : ".csv");
  meta["dimension"] = dom.dim();
  meta["resolution"] = dom.resolution();
  meta["side"] = dom.side();
  meta["domain_hash"] = hex64(dom.hash());
  meta["boundary_count"] = nb;
  meta["solve_residual"] = map.solve_residual;
  meta["guard_margin"] = map.guard.margin;

  if (binary) {
    std::string blob;
    blob.reserve(8 + nb * nb * sizeof(double));
    blob.append("GDTN0001", 8);
    for (std::size_t i = 0; i < nb; ++i)
      for (std::size_t j = 0; j < nb; ++j) {
        const double v = map.kernel(i, j);
        blob.append(reinterpret_cast<const char*>(&v), sizeof(double));
      }
    write_text_atomic(base_path + ".gdtn", blob);
  } else {
    std::ostringstream os;
    os << "row,col,value\n";
    for (std::size_t i = 0; i < nb; ++i)
      for (std::size_t j = 0; j < nb; ++j)
        os << i << ',' << j << ',' << format_double(map.kernel(i, j)) << '\n';
    write_text_atomic(base_path + ".csv", os.str());
  }
  write_text_atomic(base_path + ".json", meta.dump(2) + "\n");
}

Eigen::MatrixXd read_dtn_kernel(const std::string& meta_path, const Domain& dom) {
  const json meta = json::parse(read_text_file(meta_path));
  if (meta["domain_hash"].get<std::string>() != hex64(dom.hash()))
    throw Error(meta_path + ": kernel was written for a different domain");
  const std::size_t nb = meta["boundary_count"].get<std::size_t>();
  if (nb != dom.num_boundary()) throw Error(meta_path + ": boundary count mismatch");

  const fs::path dir = fs::path(meta_path).parent_path();
  const std::string kernel_file = (dir / meta["kernel_file"].get<std::string>()).string();
  Eigen::MatrixXd K(nb, nb);

  if (meta["format"] == "gdtn") {
    const std::string blob = read_text_file(kernel_file);
    if (blob.size() != 8 + nb * nb * sizeof(double) || blob.compare(0, 8, "GDTN0001") != 0)
      throw Error(kernel_file + ": bad magic or size");
    const char* ptr = blob.data() + 8;
    for (std::size_t i = 0; i < nb; ++i)
      for (std::size_t j = 0; j < nb; ++j) {
        double v;
        std::memcpy(&v, ptr, sizeof(double));
        ptr += sizeof(double);
        K(i, j) = v;
      }
  } else {
    std::istringstream in(read_text_file(kernel_file));
    std::string line;
    std::getline(in, line);  // header
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      std::size_t i, j;
      double v;
      if (std::sscanf(line.c_str(), "%zu,%zu,%lf", &i, &j, &v) != 3)
        throw Error(kernel_file + ": malformed row");
      K(i, j) = v;
    }
  }
  return K;
}

std::string scattering_csv(const std::vector<ScatterRow>& rows, int dim) {
  std::ostringstream os;
  os << "p1,p2";
  if (dim == 3) os << ",p3";
  os << ",rho,re_h,im_h,re_vhat,im_vhat\n";
  for (const auto& r : rows) {
    os << format_double(r.p[0]) << ',' << format_double(r.p[1]);
    if (dim == 3) os << ',' << format_double(r.p[2]);
    os << ',' << format_double(r.rho) << ',' << format_double(r.h.real()) << ','
       << format_double(r.h.imag()) << ',' << format_double(r.vhat.real()) << ','
       << format_double(r.vhat.imag()) << '\n';
  }
  return os.str();
}

json report_to_json(const StabilityReport& rep) {
  json j;
  j["code_version"] = rep.code_version;
  j["config_hash"] = rep.config_hash;
  j["dimension"] = rep.dimension;
  j["resolution"] = rep.resolution;
  j["smoothness_m"] = rep.smoothness_m;
  j["side"] = rep.side;
  j["alpha"] = rep.alpha;
  j["lambda"] = rep.lambda;
  j["radius_bound"] = rep.radius_bound;
  j["c5_explicit"] = rep.c5_explicit;
  j["alpha1_ref"] = rep.alpha1_ref;
  j["alpha2_ref"] = rep.alpha2_ref;
  j["fitted_slope"] = rep.fitted_slope;
  j["fitted_slope_residual"] = rep.fitted_slope_residual;
  j["i2_slope"] = rep.i2_slope;
  j["i2_slope_residual"] = rep.i2_slope_residual;
  json curve = json::array();
  for (const auto& [rho, i2] : rep.i2_curve)
    curve.push_back({{"rho", rho}, {"i2", i2}});
  j["i2_curve"] = curve;
  json records = json::array();
  for (const auto& r : rep.records) {
    json rj;
    rj["eps"] = r.eps;
    rj["delta"] = r.delta;
    rj["rho"] = r.rho;
    rj["sup_err"] = r.sup_err;
    rj["sup_true_diff"] = r.sup_true_diff;
    rj["i1"] = r.i1;
    rj["i2"] = r.i2;
    rj["vhat_band_ratio"] = r.vhat_band_ratio;
    rj["i1_growth_ratio"] = r.i1_growth_ratio;
    rj["imag_residue"] = r.imag_residue;
    rj["exact_branch"] = r.exact_branch;
    rj["guard_ok"] = r.guard_ok;
    rj["coarse"] = r.coarse;
    rj["note"] = r.note;
    records.push_back(rj);
  }
  j["records"] = records;
  return j;
}

std::string report_csv(const StabilityReport& rep) {
  std::ostringstream os;
  os << "eps,delta,rho,sup_err,i1,i2,fitted_slope,alpha1_ref,alpha2_ref\n";
  for (const auto& r : rep.records) {
    os << format_double(r.eps) << ',' << format_double(r.delta) << ','
       << format_double(r.rho) << ',' << format_double(r.sup_err) << ','
       << format_double(r.i1) << ',' << format_double(r.i2) << ','
       << format_double(rep.fitted_slope) << ',' << format_double(rep.alpha1_ref)
       << ',' << format_double(rep.alpha2_ref) << '\n';
  }
  return os.str();
}

json ledger_to_json(const BoundsLedger& ledger) {
  json arr = json::array();
  for (const auto& e : ledger.entries)
    arr.push_back({{"name", e.name},
                   {"pass", e.pass},
                   {"margin", e.margin},
                   {"detail", e.detail}});
  return {{"entries", arr}, {"all_pass", ledger.all_pass()}};
}

}  // namespace dtnlab::io
