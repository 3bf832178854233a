// Command-line front end: forward DtN computation, scattering samples via
// the direct and the boundary-reduction route, Born reconstruction with the
// logarithmic frequency cutoff, stability sweeps, and a self-test suite.

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <iostream>

#include "dtnlab/io.hpp"
#include "dtnlab/parallel.hpp"

namespace fs = std::filesystem;
using namespace dtnlab;
using io::json;

namespace {

struct CommonOptions {
  std::string config_path;
  std::string out_dir;
  int threads = 0;
  bool verbose = false;
};

json load_config(const CommonOptions& opt) {
  json root;
  try {
    root = json::parse(io::read_text_file(opt.config_path));
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(std::string("config parse error: ") + e.what());
  }
  return root;
}

void require_out_dir(const CommonOptions& opt) {
  if (opt.out_dir.empty()) throw Error("--out directory is required");
  if (!fs::is_directory(opt.out_dir))
    throw Error("output directory does not exist: " + opt.out_dir);
}

Domain domain_from_config(const json& root) {
  if (!root.contains("domain")) throw Error("$.domain: required section missing");
  const json& dj = root["domain"];
  io::expect_keys(dj, "$.domain", {"dimension", "resolution", "side"});
  for (const char* key : {"dimension", "resolution", "side"})
    if (!dj.contains(key)) throw Error(std::string("$.domain.") + key + ": missing");
  return build_square_domain(dj["dimension"].get<int>(), dj["resolution"].get<int>(),
                             dj["side"].get<double>());
}

int threads_of(const json& root, const CommonOptions& opt) {
  if (opt.threads > 0) return opt.threads;
  if (root.contains("threads")) return root["threads"].get<int>();
  return default_threads();
}

// ---------------------------------------------------------------------------

int cmd_forward(const CommonOptions& opt) {
  const json root = load_config(opt);
  io::expect_keys(root, "$", {"domain", "potentials", "threads", "binary_kernels"});
  require_out_dir(opt);
  const Domain dom = domain_from_config(root);

  if (!root.contains("potentials") || !root["potentials"].is_array() ||
      root["potentials"].empty())
    throw Error("$.potentials: need a non-empty array of potential specs");
  const bool binary = root.value("binary_kernels", false);

  std::vector<PotentialSpec> specs;
  std::size_t idx = 0;
  for (const auto& pj : root["potentials"]) {
    specs.push_back(io::potential_spec_from_json(
        pj, "$.potentials[" + std::to_string(idx) + "]"));
    ++idx;
  }

  // Compute everything first; only then touch the filesystem.
  std::vector<DtnMap> maps;
  for (std::size_t i = 0; i < specs.size(); ++i) {
    const Potential v = sample_potential(specs[i], dom);
    maps.push_back(dtn_map(v));
    if (opt.verbose)
      std::cerr << "phi_" << i << ": guard margin " << maps.back().guard.margin
                << ", solve residual " << maps.back().solve_residual << "\n";
  }

  json manifest;
  manifest["domain"] = {{"dimension", dom.dim()},
                        {"resolution", dom.resolution()},
                        {"side", dom.side()},
                        {"hash", io::hex64(dom.hash())}};
  json entries = json::array();
  for (std::size_t i = 0; i < maps.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof(name), "phi_%03zu", i);
    const std::string base = (fs::path(opt.out_dir) / name).string();
    io::write_dtn(base, maps[i], binary);
    const std::string kernel_file = base + (binary ? ".gdtn" : ".csv");
    entries.push_back({{"name", name},
                       {"metadata", std::string(name) + ".json"},
                       {"kernel", fs::path(kernel_file).filename().string()},
                       {"kernel_fnv64", io::hex64(io::fnv1a(io::read_text_file(kernel_file)))}});
  }
  manifest["maps"] = entries;
  io::write_text_atomic((fs::path(opt.out_dir) / "manifest.json").string(),
                        manifest.dump(2) + "\n");
  std::cout << "wrote " << maps.size() << " DtN map(s) and manifest.json to "
            << opt.out_dir << "\n";
  return 0;
}

// ---------------------------------------------------------------------------

int cmd_scatter(const CommonOptions& opt) {
  const json root = load_config(opt);
  io::expect_keys(root, "$", {"domain", "scatter", "threads", "pad_factor"});
  require_out_dir(opt);
  const Domain dom = domain_from_config(root);

  if (!root.contains("scatter")) throw Error("$.scatter: required section missing");
  const json& sj = root["scatter"];
  io::expect_keys(sj, "$.scatter", {"v1", "v2", "pairs", "pad_factor"});
  if (!sj.contains("v2")) throw Error("$.scatter.v2: required potential missing");
  if (!sj.contains("pairs") || !sj["pairs"].is_array() || sj["pairs"].empty())
    throw Error("$.scatter.pairs: need a non-empty array");
  const int pad = sj.value("pad_factor", root.value("pad_factor", 0));

  PotentialSpec v1s = PotentialSpec::gaussian(0.0, {0, 0, 0}, 0.2);
  const bool has_background = sj.contains("v1");
  if (has_background) v1s = io::potential_spec_from_json(sj["v1"], "$.scatter.v1");
  const PotentialSpec v2s = io::potential_spec_from_json(sj["v2"], "$.scatter.v2");

  const Potential v1 = sample_potential(v1s, dom);
  const Potential v2 = sample_potential(v2s, dom);
  const bool zero_background = (v1.max_abs() == 0.0);

  struct PairTask {
    ThetaPair pair;
    double rho;
  };
  std::vector<PairTask> tasks;
  std::size_t idx = 0;
  for (const auto& pj : sj["pairs"]) {
    const std::string where = "$.scatter.pairs[" + std::to_string(idx) + "]";
    io::expect_keys(pj, where, {"p", "rho"});
    if (!pj.contains("p")) throw Error(where + ".p: missing");
    Vec p{0, 0, 0};
    for (std::size_t a = 0; a < pj["p"].size(); ++a) p[a] = pj["p"][a].get<double>();
    const double born_rho = 0.5 * norm2(p);
    double rho = pj.value("rho", born_rho);
    if (dom.dim() == 2 && rho > born_rho + 1e-12)
      throw Error(where + ": in two dimensions the variety pins |Im k| = |p|/2 "
                          "(requested rho exceeds it)");
    PairTask t;
    t.rho = rho;
    t.pair = (dom.dim() == 3) ? theta_pair_3d(p, rho) : born_pair(p, 2);
    tasks.push_back(t);
    ++idx;
  }

  // direct route
  std::vector<io::ScatterRow> direct_rows, reduced_rows;
  std::vector<double> route_gaps;
  json skipped = json::array();
  DtnMap phi1 = dtn_map(v1);
  DtnMap phi2 = dtn_map(v2);
  const Eigen::MatrixXd dk = phi2.kernel - phi1.kernel;

  std::size_t pair_index = 0;
  for (const auto& t : tasks) {
    const std::size_t this_index = pair_index++;
    const ComplexFrequency k = t.pair.k();
    const cplx vhat_diff = fourier_at(v2, t.pair.p()) - fourier_at(v1, t.pair.p());
    try {

    GreenTable g = faddeev_green(k, dom, pad);
    FaddeevField f2 = lippmann_schwinger(v2, k, g);
    cplx h_direct = amplitude_h(v2, f2, t.pair).h;
    if (!zero_background) {
      FaddeevField f1 = lippmann_schwinger(v1, k, g);
      h_direct -= amplitude_h(v1, f1, t.pair).h;
    }

    cplx h_reduced;
    if (zero_background) {
      h_reduced = reduce_zero_background(t.pair, dk, dom, pad).h;
    } else {
      BoundaryKernel r1 = background_r1(v1, k, g);
      BoundaryKernel A = kernel_A(r1, dk, dom);
      const ComplexFrequency ml = t.pair.l().negated();
      GreenTable gml = faddeev_green(ml, dom, pad);
      FaddeevField f1ml = lippmann_schwinger(v1, ml, gml);
      const std::vector<cplx> mu1_b = mu_on_boundary(f1ml, v1, gml);
      std::vector<cplx> psi1_ml(dom.num_boundary());
      const CVec mlc = ml.components();
      for (std::size_t b = 0; b < dom.num_boundary(); ++b)
        psi1_ml[b] = std::exp(cplx(0, 1) * dot(mlc, dom.face(b).position)) * mu1_b[b];

      FaddeevField f1k = lippmann_schwinger(v1, k, g);
      const std::vector<cplx> mu1k_b = mu_on_boundary(f1k, v1, g);
      std::vector<cplx> psi1_k(dom.num_boundary());
      const CVec kc = k.components();
      for (std::size_t b = 0; b < dom.num_boundary(); ++b)
        psi1_k[b] = std::exp(cplx(0, 1) * dot(kc, dom.face(b).position)) * mu1k_b[b];

      Psi2Solution psi2 = solve_psi2(A, psi1_k);
      h_reduced = h_from_dtn(t.pair, dk, psi1_ml, psi2.values, dom);
    }

    io::ScatterRow row;
    row.p = t.pair.p();
    row.rho = t.rho;
    row.vhat = vhat_diff;
    row.h = h_direct;
    direct_rows.push_back(row);
    row.h = h_reduced;
    reduced_rows.push_back(row);
    const double scale = std::max(std::abs(h_direct), 1e-300);
    route_gaps.push_back(std::abs(h_direct - h_reduced) / scale);
    } catch (const SolverError& e) {
      // a near-singular reduction system at this frequency: skip and record
      skipped.push_back({{"pair", this_index}, {"reason", e.what()}});
    }
  }

  io::write_text_atomic((fs::path(opt.out_dir) / "scatter_direct.csv").string(),
                        io::scattering_csv(direct_rows, dom.dim()));
  io::write_text_atomic((fs::path(opt.out_dir) / "scatter_reduced.csv").string(),
                        io::scattering_csv(reduced_rows, dom.dim()));

  json summary;
  summary["pairs"] = tasks.size();
  summary["skipped"] = skipped;
  summary["route_relative_gaps"] = route_gaps;
  summary["max_route_relative_gap"] =
      route_gaps.empty() ? 0.0
                         : *std::max_element(route_gaps.begin(), route_gaps.end());
  io::write_text_atomic((fs::path(opt.out_dir) / "scatter_summary.json").string(),
                        summary.dump(2) + "\n");
  std::cout << "scatter: max relative route gap "
            << summary["max_route_relative_gap"].get<double>() << "\n";
  return skipped.empty() ? 0 : 1;
}

// ---------------------------------------------------------------------------

int cmd_reconstruct(const CommonOptions& opt) {
  const json root = load_config(opt);
  io::expect_keys(root, "$", {"domain", "fourier", "cutoff", "reconstruct", "threads"});
  require_out_dir(opt);
  const Domain dom = domain_from_config(root);
  const int threads = threads_of(root, opt);

  if (!root.contains("fourier")) throw Error("$.fourier: required section missing");
  io::expect_keys(root["fourier"], "$.fourier", {"p_max", "points_per_axis"});
  const FourierGrid fg = fourier_grid(dom, root["fourier"]["p_max"].get<double>(),
                                      root["fourier"]["points_per_axis"].get<int>());
  double alpha = 0.5;
  if (root.contains("cutoff")) {
    io::expect_keys(root["cutoff"], "$.cutoff", {"alpha"});
    alpha = root["cutoff"].value("alpha", 0.5);
  }

  if (!root.contains("reconstruct")) throw Error("$.reconstruct: required section missing");
  const json& rj = root["reconstruct"];
  io::expect_keys(rj, "$.reconstruct", {"v", "rho"});
  if (!rj.contains("v")) throw Error("$.reconstruct.v: required potential missing");
  const PotentialSpec spec = io::potential_spec_from_json(rj["v"], "$.reconstruct.v");

  const Potential v = sample_potential(spec, dom);
  const Potential zero(dom, std::vector<double>(dom.num_interior(), 0.0), dom.dim() + 1);

  DtnMap phi = dtn_map(v);
  DtnMap phi0 = dtn_map(zero);
  const double delta = dtn_diff_norm(phi, phi0);
  const CutoffRule rule = make_cutoff_rule(dom, alpha);

  json summary;
  summary["delta"] = delta;
  summary["alpha"] = alpha;
  summary["lambda"] = rule.lambda();

  if (delta == 0.0) {
    summary["branch"] = "exact-data";
    summary["rho"] = 0.0;
    summary["sup_err"] = 0.0;
    std::ostringstream os;
    os << "x1,x2";
    if (dom.dim() == 3) os << ",x3";
    os << ",value\n";
    for (std::size_t i = 0; i < dom.num_interior(); ++i) {
      const Vec& x = dom.interior_node(i);
      os << x[0] << ',' << x[1];
      if (dom.dim() == 3) os << ',' << x[2];
      os << ",0\n";
    }
    io::write_text_atomic((fs::path(opt.out_dir) / "reconstruction.csv").string(), os.str());
    io::write_text_atomic((fs::path(opt.out_dir) / "reconstruction_summary.json").string(),
                          summary.dump(2) + "\n");
    return 0;
  }

  const bool rho_given = rj.contains("rho");
  const double rho = rho_given ? rj["rho"].get<double>() : cutoff_rho(delta, rule);
  summary["rho"] = rho;
  summary["rho_from_cutoff_rule"] = !rho_given;

  const Eigen::MatrixXd dk = phi.kernel - phi0.kernel;
  Reconstruction rec = reconstruct(dk, rho, fg, dom, threads);

  double sup_err = 0.0, sup_v = 0.0;
  for (std::size_t i = 0; i < dom.num_interior(); ++i) {
    sup_err = std::max(sup_err, std::abs(rec.values[i] - v.value(i)));
    sup_v = std::max(sup_v, std::abs(v.value(i)));
  }
  const Spectrum sv = fourier_transform(v, fg);
  const Spectrum s0(fg, std::vector<cplx>(fg.size(), cplx(0, 0)));
  const ErrorSplit es = error_split(sv, s0, rho);

  summary["sup_err"] = sup_err;
  summary["sup_v"] = sup_v;
  summary["rel_sup_err"] = (sup_v > 0) ? sup_err / sup_v : 0.0;
  summary["i1"] = es.i1;
  summary["i2"] = es.i2;
  summary["imag_residue"] = rec.imag_residue;

  std::ostringstream os;
  os << "x1,x2";
  if (dom.dim() == 3) os << ",x3";
  os << ",value\n";
  for (std::size_t i = 0; i < dom.num_interior(); ++i) {
    const Vec& x = dom.interior_node(i);
    os << x[0] << ',' << x[1];
    if (dom.dim() == 3) os << ',' << x[2];
    os << ',' << rec.values[i] << '\n';
  }
  io::write_text_atomic((fs::path(opt.out_dir) / "reconstruction.csv").string(), os.str());
  io::write_text_atomic((fs::path(opt.out_dir) / "reconstruction_summary.json").string(),
                        summary.dump(2) + "\n");
  std::cout << "reconstruct: rho " << rho << ", relative sup error "
            << summary["rel_sup_err"].get<double>() << "\n";
  return 0;
}

// ---------------------------------------------------------------------------

int cmd_sweep(const CommonOptions& opt) {
  const json root = load_config(opt);
  require_out_dir(opt);
  ExperimentConfig cfg = io::sweep_config_from_json(root);
  if (opt.threads > 0) cfg.threads = opt.threads;

  StabilityReport rep = run_sweep(cfg);
  BoundsLedger ledger = verify_bounds(rep);

  json out = io::report_to_json(rep);
  out["bounds"] = io::ledger_to_json(ledger);
  io::write_text_atomic((fs::path(opt.out_dir) / "report.json").string(),
                        out.dump(2) + "\n");
  io::write_text_atomic((fs::path(opt.out_dir) / "report.csv").string(),
                        io::report_csv(rep));

  bool guards_ok = true;
  for (const auto& r : rep.records) guards_ok = guards_ok && r.guard_ok;
  for (const auto& e : ledger.entries)
    std::cout << (e.pass ? "[PASS] " : "[FAIL] ") << e.name << ": " << e.detail << "\n";
  std::cout << "sweep: " << rep.records.size() << " records, fitted slope "
            << rep.fitted_slope << "\n";
  return (ledger.all_pass() && guards_ok) ? 0 : 1;
}

// ---------------------------------------------------------------------------

int cmd_selftest(bool verbose) {
  int failures = 0;
  auto check = [&](const std::string& name, bool ok, const std::string& detail = "") {
    std::cout << (ok ? "[PASS] " : "[FAIL] ") << name;
    if (!ok && !detail.empty()) std::cout << " (" << detail << ")";
    std::cout << "\n";
    if (!ok) ++failures;
  };

  try {
    {
      Domain dom = build_square_domain(2, 16, 1.0);
      check("square face count", dom.num_boundary() == 64);
      check("square perimeter", std::abs(dom.boundary_measure() - 4.0) < 1e-12);
      check("radius bound below the corner",
            dom.radius_bound() < std::sqrt(2.0) / 2.0);
      Domain cube = build_square_domain(3, 8, 1.0);
      check("cube area", std::abs(cube.boundary_measure() - 6.0) < 1e-12);
    }
    {
      FourierGrid fg(2, 10.0, 21);
      check("lattice node count", fg.size() == 441);
      check("cubic lattice node count", FourierGrid(3, 6.0, 13).size() == 2197);
      bool sym = true;
      for (std::size_t i = 0; i < fg.size(); ++i) {
        const Vec q = fg.node(fg.negation_index(i));
        if (norm2(fg.node(i) + q) > 1e-14) sym = false;
      }
      check("lattice negation symmetry", sym);
      bool rejected = false;
      try {
        FourierGrid bad(2, 10.0, 20);
      } catch (const Error&) {
        rejected = true;
      }
      check("even lattice rejected", rejected);
    }
    {
      Domain dom = build_square_domain(2, 32, 1.0);
      Potential zero = sample_potential(PotentialSpec::gaussian(0.0, {0, 0, 0}, 0.2), dom);
      check("zero amplitude samples to zero", zero.max_abs() == 0.0);
      auto a = PotentialSpec::gaussian(0.5, {0.08, 0, 0}, 0.12);
      auto b = PotentialSpec::poly_bump(-0.2, {-0.06, 0.04, 0}, 0.2, 4);
      Potential va = sample_potential(a, dom);
      Potential vb = sample_potential(b, dom);
      Potential vs = sample_potential(PotentialSpec::sum({a, b}), dom);
      double gap = 0.0;
      for (std::size_t i = 0; i < dom.num_interior(); ++i)
        gap = std::max(gap, std::abs(vs.value(i) - va.value(i) - vb.value(i)));
      check("sampling is additive", gap < 1e-14);

      FourierGrid fg(2, 10.0, 21);
      Spectrum s0 = fourier_transform(zero, fg);
      double smax = 0.0;
      for (std::size_t i = 0; i < fg.size(); ++i)
        smax = std::max(smax, std::abs(s0.value(i)));
      check("zero potential has zero spectrum", smax == 0.0);

      Spectrum sa = fourier_transform(va, fg);
      double herm = 0.0, scale = 0.0;
      for (std::size_t i = 0; i < fg.size(); ++i) {
        scale = std::max(scale, std::abs(sa.value(i)));
        herm = std::max(herm,
                        std::abs(sa.value(i) - std::conj(sa.value(fg.negation_index(i)))));
      }
      check("spectrum of a real field is hermitian", herm <= 1e-12 * scale);

      InverseFourierResult w = inverse_fourier(sa, dom.interior_nodes(), 0.0);
      double wmax = 0.0;
      for (double x : w.values) wmax = std::max(wmax, std::abs(x));
      check("empty cutoff ball inverts to zero", wmax == 0.0);

      ThetaPair degenerate = born_pair({0, 0, 0}, 2);
      check("zero frequency degenerates", norm2(degenerate.k_re) == 0.0 &&
                                              norm2(degenerate.im) == 0.0);
    }
    {
      ThetaPair pair = born_pair({1, 0, 0}, 2);
      const CVec kc = pair.k().components();
      check("born pair on the variety",
            std::abs(cdot(kc, kc)) < 1e-14 && std::abs(pair.k_re[0] - 0.5) < 1e-15);
      check("gamma orthogonal", std::abs(dot(pair.im, pair.p())) < 1e-15);
      ThetaPair t3 = theta_pair_3d({1, 0, 0}, 1.0, {0, 1, 0}, {0, 0, 1});
      const CVec k3 = t3.k().components();
      check("3-d pair on the variety", std::abs(cdot(k3, k3)) < 1e-12);
    }
    {
      CutoffRule rule{0.5, std::sqrt(2.0) / 2.0, 2};
      check("cutoff lambda", std::abs(rule.lambda() - 0.18469) < 1e-4);
      check("cutoff value", std::abs(cutoff_rho(1.0, rule) - rule.lambda() * std::log(2.0)) < 1e-15);
      check("cutoff log identity",
            std::abs(cutoff_rho(1.0 / (std::exp(10.0) - 1.0), rule) - 10.0 * rule.lambda()) < 1e-10);
      check("cutoff monotone", cutoff_rho(1e-4, rule) > cutoff_rho(1e-2, rule));
    }
    {
      Domain dom = build_square_domain(2, 32, 1.0);
      Potential zero(dom, std::vector<double>(dom.num_interior(), 0.0), 3);
      std::vector<double> f(dom.num_boundary());
      for (std::size_t b = 0; b < dom.num_boundary(); ++b)
        f[b] = dom.face(b).position[0];
      SolveResult sol = solve_dirichlet(zero, f);
      double err = 0.0;
      for (std::size_t i = 0; i < dom.num_interior(); ++i)
        err = std::max(err, std::abs(sol.field[i] - dom.interior_node(i)[0]));
      check("harmonic trace solve", err < 1e-10);

      DtnMap phi0 = dtn_map(zero);
      std::vector<double> dn = phi0.apply(f);
      double e1 = 0.0;
      for (std::size_t b = 0; b < dom.num_boundary(); ++b)
        e1 = std::max(e1, std::abs(dn[b] - dom.face(b).normal[0]));
      check("zero-potential map on the linear trace", e1 < 5.0 * dom.spacing());
      std::vector<double> ones(dom.num_boundary(), 1.0);
      std::vector<double> dn1 = phi0.apply(ones);
      double e2 = 0.0;
      for (double x : dn1) e2 = std::max(e2, std::abs(x));
      check("zero-potential map on the constant", e2 < 5.0 * dom.spacing());
      check("identical maps have zero distance", dtn_diff_norm(phi0, phi0) == 0.0);

      Eigen::MatrixXd kb = phi0.kernel;
      kb(3, 7) += 2.5;
      check("single-entry distance",
            std::abs(dtn_diff_norm(phi0.kernel, kb, dom) - 2.5 * dom.face(7).weight) < 1e-12);
    }
    {
      Domain dom = build_square_domain(2, 32, 1.0);
      Potential zero(dom, std::vector<double>(dom.num_interior(), 0.0), 3);
      ThetaPair pair = born_pair({2, 0, 0}, 2);
      GreenTable g = faddeev_green(pair.k(), dom);
      FaddeevField f = lippmann_schwinger(zero, pair.k(), g);
      check("free field is the plane wave", f.sup_mu_minus_one() < 1e-14);
      check("free amplitude vanishes", std::abs(amplitude_h(zero, f, pair).h) == 0.0);
      check("green identity", green_delta_residual(g) < 1e-3);
    }
    {
      Domain dom = build_square_domain(2, 16, 1.0);
      BoundaryKernel A;
      A.dom = &dom;
      A.mat = Eigen::MatrixXcd::Zero(dom.num_boundary(), dom.num_boundary());
      std::vector<cplx> psi1(dom.num_boundary(), cplx(1.0, -0.5));
      Psi2Solution sol = solve_psi2(A, psi1);
      double gap = 0.0;
      for (std::size_t b = 0; b < psi1.size(); ++b)
        gap = std::max(gap, std::abs(sol.values[b] - psi1[b]));
      check("trivial boundary system", gap == 0.0);

      Eigen::MatrixXd dk = Eigen::MatrixXd::Zero(dom.num_boundary(), dom.num_boundary());
      check("zero data gives zero amplitude",
            std::abs(h_from_dtn(born_pair({1, 0, 0}, 2), dk, psi1, psi1, dom)) == 0.0);
      check("zero data gives zero spectrum",
            std::abs(vhat_from_dtn({1, 0, 0}, dk, dom)) == 0.0);
    }
    {
      Domain dom = build_square_domain(2, 16, 1.0);
      FourierGrid fg(2, 8.0, 17);
      std::vector<cplx> sv(fg.size(), cplx(0.5, 0.1));
      Spectrum s1(fg, sv), s2(fg, sv);
      ErrorSplit es = error_split(s1, s2, 4.0);
      check("identical spectra split to zero", es.i1 == 0.0 && es.i2 == 0.0);
      Spectrum s0(fg, std::vector<cplx>(fg.size(), cplx(0, 0)));
      ErrorSplit es0 = error_split(s1, s0, 0.0);
      check("empty ball puts everything in the tail", es0.i1 == 0.0 && es0.i2 > 0.0);
    }
    {
      std::vector<std::pair<double, double>> pts;
      for (double delta : {1e-1, 1e-2, 1e-3, 1e-4, 1e-5}) {
        const double X = std::log1p(1.0 / delta);
        pts.emplace_back(delta, 2.7 * std::pow(X, -3.0));
      }
      FitResult fit = fit_exponent(pts);
      check("exact power-law slope", std::abs(fit.slope + 3.0) < 1e-10);
      std::vector<std::pair<double, double>> flat;
      for (double delta : {1e-1, 1e-3, 1e-5}) flat.emplace_back(delta, 0.42);
      check("constant points fit to slope zero",
            std::abs(fit_exponent(flat).slope) < 1e-12);
      bool refused = false;
      try {
        std::vector<std::pair<double, double>> narrow{{1e-3, 1.0}, {2e-3, 0.9}, {4e-3, 0.8}};
        fit_exponent(narrow);
      } catch (const Error&) {
        refused = true;
      }
      check("narrow span refused", refused);
    }
  } catch (const std::exception& e) {
    check("self-test execution", false, e.what());
  }

  if (verbose) std::cout << "failures: " << failures << "\n";
  return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"zero-energy boundary-data laboratory: DtN maps, Faddeev-type "
               "scattering, Born reconstruction, stability sweeps"};
  app.require_subcommand(1);

  CommonOptions opt;
  auto add_common = [&](CLI::App* sub, bool needs_out) {
    sub->add_option("--config", opt.config_path, "JSON config")->required();
    if (needs_out)
      sub->add_option("--out", opt.out_dir, "output directory (must exist)")->required();
    sub->add_option("--threads", opt.threads, "worker threads (overrides config)");
    sub->add_flag("--verbose", opt.verbose, "chatty progress output");
  };

  CLI::App* forward = app.add_subcommand("forward", "compute and persist DtN maps");
  add_common(forward, true);
  CLI::App* scatter =
      app.add_subcommand("scatter", "amplitude samples via direct and reduced routes");
  add_common(scatter, true);
  CLI::App* reconstruct =
      app.add_subcommand("reconstruct", "Born reconstruction with frequency cutoff");
  add_common(reconstruct, true);
  CLI::App* sweep = app.add_subcommand("sweep", "stability experiment over a ladder");
  add_common(sweep, true);
  CLI::App* selftest = app.add_subcommand("selftest", "run the built-in invariant suite");
  bool st_verbose = false;
  selftest->add_flag("--verbose", st_verbose, "print failure counts");

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand(forward)) return cmd_forward(opt);
    if (app.got_subcommand(scatter)) return cmd_scatter(opt);
    if (app.got_subcommand(reconstruct)) return cmd_reconstruct(opt);
    if (app.got_subcommand(sweep)) return cmd_sweep(opt);
    if (app.got_subcommand(selftest)) return cmd_selftest(st_verbose);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
