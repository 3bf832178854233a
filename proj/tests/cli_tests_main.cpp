#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "dtnlab/io.hpp"

using namespace dtnlab;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() / ("dtnlab_cli_" + tag + "_" + std::to_string(::getpid()));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

struct RunResult {
  int exit_code = -1;
  std::string output;
};

RunResult run_cli(const std::string& args, const TempDir& tmp) {
  const std::string log = tmp.file("cli_log.txt");
  const std::string cmd = std::string(DTNLAB_CLI_PATH) + " " + args + " > " + log + " 2>&1";
  const int status = std::system(cmd.c_str());
  RunResult r;
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream in(log);
  r.output.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
  return r;
}

void write_json(const std::string& path, const io::json& j) {
  std::ofstream out(path);
  out << j.dump(2);
}

io::json gaussian_spec(double amp, double width) {
  return {{"kind", "gaussian"}, {"amplitude", amp}, {"width", width}};
}

}  // namespace

TEST_CASE("selftest passes") {
  TempDir tmp("selftest");
  RunResult r = run_cli("selftest", tmp);
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("[PASS]") != std::string::npos);
  CHECK(r.output.find("[FAIL]") == std::string::npos);
}

TEST_CASE("forward writes maps plus a manifest and the smoke check holds") {
  TempDir tmp("forward");
  io::json cfg;
  cfg["domain"] = {{"dimension", 2}, {"resolution", 32}, {"side", 1.0}};
  cfg["potentials"] = io::json::array({gaussian_spec(0.0, 0.2), gaussian_spec(0.1, 0.15)});
  write_json(tmp.file("cfg.json"), cfg);
  fs::create_directories(tmp.file("out"));

  RunResult r = run_cli("forward --config " + tmp.file("cfg.json") + " --out " + tmp.file("out"), tmp);
  REQUIRE(r.exit_code == 0);

  const io::json manifest = io::json::parse(io::read_text_file(tmp.file("out/manifest.json")));
  REQUIRE(manifest["maps"].size() == 2);
  CHECK(manifest["maps"][0]["kernel_fnv64"].get<std::string>().size() == 16);

  // the zero-potential map must send the linear trace to the normal component
  Domain dom = build_square_domain(2, 32, 1.0);
  Eigen::MatrixXd k0 = io::read_dtn_kernel(tmp.file("out/phi_000.json"), dom);
  double err = 0.0;
  for (std::size_t i = 0; i < dom.num_boundary(); ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < dom.num_boundary(); ++j)
      acc += k0(i, j) * dom.face(j).position[0] * dom.face(j).weight;
    err = std::max(err, std::abs(acc - dom.face(i).normal[0]));
  }
  CHECK(err <= 5.0 * dom.spacing());
}

TEST_CASE("forward refuses a missing output directory without partial files") {
  TempDir tmp("forward_missing");
  io::json cfg;
  cfg["domain"] = {{"dimension", 2}, {"resolution", 32}, {"side", 1.0}};
  cfg["potentials"] = io::json::array({gaussian_spec(0.0, 0.2)});
  write_json(tmp.file("cfg.json"), cfg);
  RunResult r = run_cli(
      "forward --config " + tmp.file("cfg.json") + " --out " + tmp.file("absent"), tmp);
  CHECK(r.exit_code != 0);
  CHECK(r.output.find("does not exist") != std::string::npos);
  CHECK_FALSE(fs::exists(tmp.file("absent")));
}

TEST_CASE("malformed configs exit with the schema path") {
  TempDir tmp("badcfg");
  io::json cfg;
  cfg["domain"] = {{"dimension", 2}, {"resolution", 32}, {"side", 1.0}};
  cfg["potentials"] = io::json::array({gaussian_spec(0.0, 0.2)});
  cfg["wrong_section"] = 1;
  write_json(tmp.file("cfg.json"), cfg);
  fs::create_directories(tmp.file("out"));
  RunResult r = run_cli("forward --config " + tmp.file("cfg.json") + " --out " + tmp.file("out"), tmp);
  CHECK(r.exit_code == 2);
  CHECK(r.output.find("$.wrong_section") != std::string::npos);

  io::json bad = cfg;
  bad.erase("wrong_section");
  bad["potentials"][0]["sigma"] = 0.2;
  write_json(tmp.file("cfg2.json"), bad);
  RunResult r2 = run_cli("forward --config " + tmp.file("cfg2.json") + " --out " + tmp.file("out"), tmp);
  CHECK(r2.exit_code == 2);
  CHECK(r2.output.find("$.potentials[0].sigma") != std::string::npos);

  io::write_text_atomic(tmp.file("cfg3.json"), "{ not json");
  RunResult r3 = run_cli("forward --config " + tmp.file("cfg3.json") + " --out " + tmp.file("out"), tmp);
  CHECK(r3.exit_code == 2);
  CHECK(r3.output.find("parse error") != std::string::npos);
}

TEST_CASE("scatter produces matching routes for a small potential") {
  TempDir tmp("scatter");
  io::json cfg;
  cfg["domain"] = {{"dimension", 2}, {"resolution", 32}, {"side", 1.0}};
  io::json pairs = io::json::array();
  for (double ang : {0.0, 0.7, 1.9}) {
    pairs.push_back({{"p", {4.0 * std::cos(ang), 4.0 * std::sin(ang)}}});
  }
  cfg["scatter"] = {{"v2", gaussian_spec(0.1, 0.2)}, {"pairs", pairs}};
  write_json(tmp.file("cfg.json"), cfg);
  fs::create_directories(tmp.file("out"));
  RunResult r = run_cli("scatter --config " + tmp.file("cfg.json") + " --out " + tmp.file("out"), tmp);
  REQUIRE(r.exit_code == 0);
  const io::json summary =
      io::json::parse(io::read_text_file(tmp.file("out/scatter_summary.json")));
  CHECK(summary["max_route_relative_gap"].get<double>() <= 0.03);
  const std::string direct = io::read_text_file(tmp.file("out/scatter_direct.csv"));
  CHECK(direct.find("p1,p2,rho,re_h,im_h,re_vhat,im_vhat") == 0);
  CHECK(fs::exists(tmp.file("out/scatter_reduced.csv")));
}

TEST_CASE("scatter with the zero potential emits zero amplitudes") {
  TempDir tmp("scatter0");
  io::json cfg;
  cfg["domain"] = {{"dimension", 2}, {"resolution", 32}, {"side", 1.0}};
  cfg["scatter"] = {{"v2", gaussian_spec(0.0, 0.2)},
                    {"pairs", io::json::array({{{"p", {2.0, 0.0}}}})}};
  write_json(tmp.file("cfg.json"), cfg);
  fs::create_directories(tmp.file("out"));
  RunResult r = run_cli("scatter --config " + tmp.file("cfg.json") + " --out " + tmp.file("out"), tmp);
  REQUIRE(r.exit_code == 0);
  std::istringstream in(io::read_text_file(tmp.file("out/scatter_direct.csv")));
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    // re_h and im_h columns are exactly zero
    std::size_t pos = 0;
    for (int c = 0; c < 3; ++c) pos = line.find(',', pos) + 1;
    CHECK(line.substr(pos, 4) == "0,0,");
  }
}

TEST_CASE("planar scatter rejects off-variety imaginary sizes") {
  TempDir tmp("scatter_rigid");
  io::json cfg;
  cfg["domain"] = {{"dimension", 2}, {"resolution", 32}, {"side", 1.0}};
  cfg["scatter"] = {{"v2", gaussian_spec(0.1, 0.2)},
                    {"pairs", io::json::array({{{"p", {2.0, 0.0}}, {"rho", 4.0}}})}};
  write_json(tmp.file("cfg.json"), cfg);
  fs::create_directories(tmp.file("out"));
  RunResult r = run_cli("scatter --config " + tmp.file("cfg.json") + " --out " + tmp.file("out"), tmp);
  CHECK(r.exit_code == 2);
  CHECK(r.output.find("variety") != std::string::npos);
}

TEST_CASE("reconstruct emits the field and a summary, echoing the cutoff rule") {
  TempDir tmp("recon");
  io::json cfg;
  cfg["domain"] = {{"dimension", 2}, {"resolution", 64}, {"side", 2.0}};
  cfg["fourier"] = {{"p_max", 10.0}, {"points_per_axis", 21}};
  cfg["cutoff"] = {{"alpha", 0.5}};
  cfg["reconstruct"] = {{"v", gaussian_spec(0.05, 0.30)}};
  write_json(tmp.file("cfg.json"), cfg);
  fs::create_directories(tmp.file("out"));
  RunResult r = run_cli("reconstruct --config " + tmp.file("cfg.json") + " --out " + tmp.file("out"), tmp);
  REQUIRE(r.exit_code == 0);
  const io::json summary =
      io::json::parse(io::read_text_file(tmp.file("out/reconstruction_summary.json")));
  CHECK(summary["rho_from_cutoff_rule"].get<bool>());
  CHECK(summary["lambda"].get<double>() > 0.0);
  CHECK(summary["rho"].get<double>() > 0.0);
  CHECK(fs::exists(tmp.file("out/reconstruction.csv")));
}

TEST_CASE("reconstruct takes the exact-data branch for the zero potential") {
  TempDir tmp("recon0");
  io::json cfg;
  cfg["domain"] = {{"dimension", 2}, {"resolution", 32}, {"side", 1.0}};
  cfg["fourier"] = {{"p_max", 10.0}, {"points_per_axis", 21}};
  cfg["reconstruct"] = {{"v", gaussian_spec(0.0, 0.2)}};
  write_json(tmp.file("cfg.json"), cfg);
  fs::create_directories(tmp.file("out"));
  RunResult r = run_cli("reconstruct --config " + tmp.file("cfg.json") + " --out " + tmp.file("out"), tmp);
  REQUIRE(r.exit_code == 0);
  const io::json summary =
      io::json::parse(io::read_text_file(tmp.file("out/reconstruction_summary.json")));
  CHECK(summary["branch"] == "exact-data");
  CHECK(summary["delta"].get<double>() == 0.0);
}

TEST_CASE("sweep runs green and reproducibly through the command line") {
  TempDir tmp("sweep");
  io::json cfg;
  cfg["domain"] = {{"dimension", 2}, {"resolution", 32}, {"side", 1.0}};
  cfg["fourier"] = {{"p_max", 30.0}, {"points_per_axis", 61}};
  cfg["cutoff"] = {{"alpha", 0.5}};
  cfg["sweep"] = {
      {"base", gaussian_spec(0.05, 0.15)},
      {"bump",
       {{"kind", "poly_bump"}, {"amplitude", 1.0}, {"width", 0.42}, {"poly_order", 4}}},
      {"epsilons", {2e-1, 2e-2, 1e-3}},
      {"smoothness_m", 4},
      {"band_rho_min", 8.0},
      {"band_rho_max", 20.0},
      {"band_points", 4}};
  write_json(tmp.file("cfg.json"), cfg);
  fs::create_directories(tmp.file("out1"));
  fs::create_directories(tmp.file("out2"));
  RunResult r1 = run_cli("sweep --config " + tmp.file("cfg.json") + " --out " + tmp.file("out1"), tmp);
  REQUIRE(r1.exit_code == 0);
  RunResult r2 = run_cli("sweep --config " + tmp.file("cfg.json") + " --out " + tmp.file("out2"), tmp);
  REQUIRE(r2.exit_code == 0);
  CHECK(io::read_text_file(tmp.file("out1/report.json")) ==
        io::read_text_file(tmp.file("out2/report.json")));
  CHECK(io::read_text_file(tmp.file("out1/report.csv")) ==
        io::read_text_file(tmp.file("out2/report.csv")));
  const io::json rep = io::json::parse(io::read_text_file(tmp.file("out1/report.json")));
  CHECK(rep["bounds"]["all_pass"].get<bool>());
  CHECK(rep["records"].size() == 3);
}
