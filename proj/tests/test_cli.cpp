#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

#include "vskf/io.hpp"
#include "vskf/sampling.hpp"
#include "vskf/sources.hpp"

using namespace vskf;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string make_clean_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "vskf_cli_tests" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir.string();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void spit(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
  REQUIRE(out.good());
}

struct RunResult {
  int code = -1;
  std::string out;
  std::string err;
};

/// Runs the installed command-line binary with the given arguments.
RunResult run_cli(const std::string& args, const std::string& dir) {
  const std::string out_file = dir + "/stdout.txt";
  const std::string err_file = dir + "/stderr.txt";
  const std::string cmd =
      std::string(VSKF_CLI_PATH) + " " + args + " >" + out_file + " 2>" + err_file;
  const int rc = std::system(cmd.c_str());
  RunResult r;
  if (rc != -1 && WIFEXITED(rc)) r.code = WEXITSTATUS(rc);
  r.out = slurp(out_file);
  r.err = slurp(err_file);
  return r;
}

json parse_error(const RunResult& r) {
  REQUIRE(!r.err.empty());
  return json::parse(r.err);
}

std::string write_config(const std::string& dir, const json& cfg) {
  const std::string path = dir + "/config.json";
  spit(path, cfg.dump(2));
  return path;
}

json base_pipeline_config(const std::string& out_dir, const std::string& prefix) {
  json cfg;
  cfg["seed"] = 7;
  cfg["kernel"] = {{"family", "matern_c0"}, {"epsilon", 0.01}};
  cfg["grid"] = {{"eval_side", 64}, {"eval_mesh", 2e-3}};
  cfg["landweber"] = {{"max_iterations", 40},
                      {"rel_change_tol", 1e-3},
                      {"pad_side", 256},
                      {"output_side", 64}};
  cfg["sampling"] = {{"kind", "fibonacci"}, {"n", 40}, {"radius", 0.05}};
  cfg["source"] = {
      {"sources", json::array({{{"position", {0.0, 0.0}}, {"fwhm", 12.0}, {"flux", 1e4}}})},
      {"noise_level", 0.0}};
  cfg["io"] = {{"out_dir", out_dir}, {"prefix", prefix}};
  return cfg;
}

}  // namespace

TEST_SUITE_BEGIN("cli");

TEST_CASE("simulate writes a deterministic visibility csv") {
  const std::string dir = make_clean_dir("simulate");
  json cfg;
  cfg["seed"] = 5;
  cfg["source"] = {
      {"sources", json::array({{{"position", {0.0, 0.0}}, {"fwhm", 11.0}, {"flux", 1e4}}})},
      {"noise_level", 0.05}};
  cfg["io"] = {{"out_dir", dir}, {"prefix", "sim"}};
  const std::string cfg_path = write_config(dir, cfg);

  const RunResult r = run_cli("simulate --config " + cfg_path, dir);
  CHECK(r.code == 0);
  const std::string csv = dir + "/sim_visibilities.csv";
  CHECK(r.out == csv + "\n");

  const VisibilitySet data = read_visibility_csv(csv);
  CHECK(data.size() == 60);  // default pattern: ten rings of six

  const json report = json::parse(slurp(dir + "/sim_simulate_report.json"));
  CHECK(report.at("rows") == 60);
  CHECK(report.at("seed") == 5);
  CHECK(report.at("noise_sigma").get<double>() > 0.0);

  // same seed, fresh directory: byte-identical data
  const std::string dir2 = make_clean_dir("simulate_again");
  const RunResult r2 = run_cli("simulate --config " + cfg_path + " --out " + dir2, dir2);
  CHECK(r2.code == 0);
  CHECK(slurp(dir2 + "/sim_visibilities.csv") == slurp(csv));

  // different seed: different noise
  const std::string dir3 = make_clean_dir("simulate_seed");
  const RunResult r3 =
      run_cli("simulate --config " + cfg_path + " --out " + dir3 + " --seed 6", dir3);
  CHECK(r3.code == 0);
  CHECK(slurp(dir3 + "/sim_visibilities.csv") != slurp(csv));
}

TEST_CASE("simulate honors the sampling pattern size") {
  const std::string dir = make_clean_dir("simulate_fib");
  json cfg;
  cfg["sampling"] = {{"kind", "fibonacci"}, {"n", 100}, {"radius", 0.05}};
  cfg["source"] = {
      {"sources", json::array({{{"position", {5.0, -5.0}}, {"fwhm", 10.0}, {"flux", 5e3}}})}};
  cfg["io"] = {{"out_dir", dir}, {"prefix", "fib"}};
  const RunResult r = run_cli("simulate --config " + write_config(dir, cfg), dir);
  CHECK(r.code == 0);
  CHECK(read_visibility_csv(dir + "/fib_visibilities.csv").size() == 100);
}

TEST_CASE("pipeline produces the full artifact set for both algorithms") {
  const std::string dir = make_clean_dir("pipeline_rbf");
  const std::string cfg_path = write_config(dir, base_pipeline_config(dir, "p"));

  const RunResult rbf = run_cli("pipeline --config " + cfg_path + " --vsk off", dir);
  CHECK(rbf.code == 0);
  CHECK(rbf.out == dir + "/p_report.json\n");
  for (const char* name :
       {"p_image.txt", "p_image.json", "p_surface_re.txt", "p_surface_im.txt",
        "p_surface.json", "p_surface_mod.txt", "p_diagnostics.json", "p_report.json"})
    CHECK(fs::exists(dir + "/" + name));

  const json report = json::parse(slurp(dir + "/p_report.json"));
  CHECK(report.at("algorithm") == "Land-RBF");
  CHECK(report.at("epsilon") == 0.01);
  CHECK(report.at("iterations").get<int>() >= 1);
  CHECK(!report.at("rrmse").is_null());  // inline simulation knows the truth surface
  CHECK(report.at("rrmse").get<double>() >= 0.0);
  CHECK(!report.at("peaks").empty());
  CHECK(report.at("total_flux").get<double>() > 0.0);
  CHECK(report.at("config").at("sampling").at("kind") == "fibonacci");

  const json diag = json::parse(slurp(dir + "/p_diagnostics.json"));
  CHECK(diag.at("cond_classic").is_number());
  CHECK(diag.at("cond_vsk").is_null());  // classic run computes no scaled figures

  const std::string dir_vsk = make_clean_dir("pipeline_vsk");
  const RunResult vsk =
      run_cli("pipeline --config " + cfg_path + " --vsk on --out " + dir_vsk, dir_vsk);
  CHECK(vsk.code == 0);
  const json vsk_report = json::parse(slurp(dir_vsk + "/p_report.json"));
  CHECK(vsk_report.at("algorithm") == "Land-VSK");
  CHECK(json::parse(slurp(dir_vsk + "/p_diagnostics.json")).at("cond_vsk").is_number());

  // reruns with the same seed reproduce the image bit for bit
  const std::string dir_rep = make_clean_dir("pipeline_repeat_run");
  const RunResult again =
      run_cli("pipeline --config " + cfg_path + " --vsk off --out " + dir_rep, dir_rep);
  CHECK(again.code == 0);
  CHECK(slurp(dir_rep + "/p_image.txt") == slurp(dir + "/p_image.txt"));
}

TEST_CASE("interpolate then invert chains through grid files") {
  const std::string dir = make_clean_dir("chain");

  // stage the input data with the library simulator
  const SourceModel model{{ExpSource{{0.0, 0.0}, 12.0, 1.0e4}}};
  VisibilitySet data = simulate_visibilities(model, fibonacci_nodes(40, 0.05), 0.0, 3);
  const std::string csv = dir + "/input.csv";
  write_visibility_csv(csv, data);

  json icfg;
  icfg["kernel"] = {{"family", "matern_c0"}, {"epsilon", 0.01}};
  icfg["grid"] = {{"eval_side", 64}, {"eval_mesh", 2e-3}};
  icfg["io"] = {{"out_dir", dir}, {"prefix", "c"}};
  const std::string icfg_path = dir + "/icfg.json";
  spit(icfg_path, icfg.dump(2));

  const RunResult interp = run_cli("interpolate " + csv + " --config " + icfg_path, dir);
  CHECK(interp.code == 0);
  CHECK(interp.out == dir + "/c_surface\n");
  CHECK(fs::exists(dir + "/c_surface_re.txt"));
  CHECK(fs::exists(dir + "/c_interpolate_report.json"));
  const json ireport = json::parse(slurp(dir + "/c_interpolate_report.json"));
  CHECK(ireport.at("algorithm") == "Land-RBF");

  json vcfg;
  vcfg["landweber"] = {{"max_iterations", 30},
                       {"rel_change_tol", 1e-3},
                       {"pad_side", 256},
                       {"output_side", 64}};
  vcfg["io"] = {{"out_dir", dir}, {"prefix", "c"}};
  const std::string vcfg_path = dir + "/vcfg.json";
  spit(vcfg_path, vcfg.dump(2));

  const RunResult inv = run_cli(
      "invert " + dir + "/c_surface --config " + vcfg_path + " --iterlog", dir);
  CHECK(inv.code == 0);
  CHECK(inv.out == dir + "/c_image\n");
  CHECK(fs::exists(dir + "/c_image.txt"));
  CHECK(fs::exists(dir + "/c_iterations.csv"));
  const json vreport = json::parse(slurp(dir + "/c_invert_report.json"));
  CHECK(vreport.at("iterations").get<int>() >= 1);
  CHECK(vreport.at("final_residual").is_number());

  const ImageGrid image = read_image(dir + "/c_image");
  CHECK(image.side == 64);
  CHECK(image.data.minCoeff() >= 0.0);
  CHECK(image.data.maxCoeff() > 0.0);
}

TEST_CASE("pipeline repeat aggregates independent seeded runs") {
  const std::string dir = make_clean_dir("repeat");
  json cfg = base_pipeline_config(dir, "rp");
  cfg["grid"] = {{"eval_side", 32}, {"eval_mesh", 2e-3}};
  cfg["landweber"] = {{"max_iterations", 10},
                      {"rel_change_tol", 1e-3},
                      {"pad_side", 64},
                      {"output_side", 32}};
  cfg["sampling"] = {{"kind", "fibonacci"}, {"n", 20}, {"radius", 0.012}};
  cfg["source"] = {
      {"sources", json::array({{{"position", {0.0, 0.0}}, {"fwhm", 40.0}, {"flux", 1e4}}})},
      {"noise_level", 0.01}};
  const RunResult r =
      run_cli("pipeline --config " + write_config(dir, cfg) + " --repeat 2", dir);
  CHECK(r.code == 0);
  CHECK(r.out == dir + "/rp_aggregate.json\n");
  CHECK(fs::exists(dir + "/rp_r0_report.json"));
  CHECK(fs::exists(dir + "/rp_r1_report.json"));

  const json agg = json::parse(slurp(dir + "/rp_aggregate.json"));
  REQUIRE(agg.at("runs").size() == 2);
  CHECK(agg.at("runs")[0].at("seed") == 7);
  CHECK(agg.at("runs")[1].at("seed") == 8);
  CHECK(agg.at("mean_rrmse").is_number());
}

TEST_CASE("paramfit estimates source parameters from an image file") {
  const std::string dir = make_clean_dir("paramfit");
  const SourceModel model{{ExpSource{{3.0, -2.0}, 11.0, 1.0e4}}};
  const ImageGrid img = render_image(model, ImageGrid(256, 1.0));
  write_image(dir + "/input_image", img);

  json cfg;
  cfg["io"] = {{"out_dir", dir}, {"prefix", "pf"}};
  const RunResult r = run_cli(
      "paramfit " + dir + "/input_image --config " + write_config(dir, cfg), dir);
  CHECK(r.code == 0);
  CHECK(r.out == dir + "/pf_sources.json\n");

  const json report = json::parse(slurp(dir + "/pf_sources.json"));
  REQUIRE(report.at("peaks").size() == 1);
  const json& peak = report.at("peaks")[0];
  CHECK(std::abs(peak.at("position")[0].get<double>() - 3.0) <= 0.5);
  CHECK(std::abs(peak.at("position")[1].get<double>() + 2.0) <= 0.5);
  CHECK(peak.at("flux").get<double>() == doctest::Approx(1e4).epsilon(0.10));
  CHECK(report.at("total_flux").get<double>() == doctest::Approx(1e4).epsilon(0.05));
}

TEST_CASE("diagnose reports conditioning figures for a visibility set") {
  const std::string dir = make_clean_dir("diagnose");
  const SourceModel model{{ExpSource{{-15.0, -15.0}, 11.0, 4.88e3},
                           ExpSource{{15.0, 15.0}, 11.0, 4.88e3}}};
  VisibilitySet data = simulate_visibilities(model, stix_nodes(6), 0.0, 1);
  const std::string csv = dir + "/double.csv";
  write_visibility_csv(csv, data);

  json cfg;
  cfg["kernel"] = {{"family", "matern_c0"}, {"epsilon", 0.01}};
  cfg["grid"] = {{"eval_side", 32}, {"eval_mesh", 2e-3}};
  cfg["io"] = {{"out_dir", dir}, {"prefix", "d"}};
  const RunResult r =
      run_cli("diagnose " + csv + " --config " + write_config(dir, cfg), dir);
  CHECK(r.code == 0);
  CHECK(r.out == dir + "/d_diagnostics.json\n");

  const json report = json::parse(slurp(dir + "/d_diagnostics.json"));
  CHECK(report.at("n") == 60);
  CHECK(report.at("epsilon") == 0.01);
  CHECK(report.at("cond_classic").is_number());
  CHECK(report.at("cond_vsk").is_number());
  CHECK(report.at("spectral_ratio_classic").is_number());
  CHECK(report.at("spectral_ratio_vsk").is_number());
  CHECK(report.at("certificate_min_eig").is_number());
  CHECK(report.at("hadamard_max_dev").get<double>() <= 1e-10);
}

TEST_CASE("select-epsilon writes the scan curve and the minimizer") {
  const std::string dir = make_clean_dir("select_eps");
  const SourceModel model{{ExpSource{{-15.0, -15.0}, 11.0, 4.88e3},
                           ExpSource{{15.0, 15.0}, 11.0, 4.88e3}}};
  VisibilitySet data = simulate_visibilities(model, stix_nodes(6), 0.0, 1);
  const std::string csv = dir + "/double.csv";
  write_visibility_csv(csv, data);

  json cfg;
  cfg["kernel"] = {{"family", "matern_c0"}};
  cfg["grid"] = {{"eval_side", 64}, {"eval_mesh", 2e-3}};
  cfg["io"] = {{"out_dir", dir}, {"prefix", "s"}};
  const RunResult r =
      run_cli("select-epsilon " + csv + " --config " + write_config(dir, cfg), dir);
  CHECK(r.code == 0);
  CHECK(r.out == dir + "/s_epsilon.json\n");

  const json report = json::parse(slurp(dir + "/s_epsilon.json"));
  REQUIRE(report.at("candidates").size() == 100);
  REQUIRE(report.at("max_power").size() == 100);
  CHECK(report.at("candidates")[0].get<double>() == 0.01);
  CHECK(report.at("candidates")[99].get<double>() == 1.0);
  const double selected = report.at("selected_epsilon").get<double>();
  CHECK(selected >= 0.01);
  CHECK(selected <= 1.0);

  // the curve file carries one row per candidate
  const std::string curve = slurp(dir + "/s_power_curve.csv");
  CHECK(curve.substr(0, 18) == "epsilon,max_power\n");
  CHECK(std::count(curve.begin(), curve.end(), '\n') == 101);
}

TEST_CASE("print-config echoes the effective configuration without running") {
  const std::string dir = make_clean_dir("print_config");
  json cfg;
  cfg["kernel"] = {{"family", "gaussian"}, {"epsilon", "auto"}};
  cfg["io"] = {{"out_dir", dir + "/never_created"}, {"prefix", "x"}};
  const RunResult r = run_cli(
      "simulate --config " + write_config(dir, cfg) + " --print-config", dir);
  CHECK(r.code == 0);
  const json echoed = json::parse(r.out);
  CHECK(echoed.at("kernel").at("family") == "gaussian");
  CHECK(echoed.at("kernel").at("epsilon") == "auto");
  CHECK(echoed.at("vsk").at("enabled") == false);
  CHECK(!fs::exists(dir + "/never_created"));
}

TEST_CASE("failure modes map to exit codes and structured errors") {
  const std::string dir = make_clean_dir("failures");

  // missing input file -> E_IO, exit 2
  const RunResult io_err = run_cli("interpolate " + dir + "/missing.csv", dir);
  CHECK(io_err.code == 2);
  CHECK(parse_error(io_err).at("code") == "E_IO");

  // unknown config key -> E_CONFIG, exit 2
  spit(dir + "/bad.json", "{\"bogus\": 1}");
  const RunResult cfg_err = run_cli("simulate --config " + dir + "/bad.json", dir);
  CHECK(cfg_err.code == 2);
  const json cfg_err_json = parse_error(cfg_err);
  CHECK(cfg_err_json.at("code") == "E_CONFIG");
  CHECK(cfg_err_json.at("message").get<std::string>().find("unknown config key 'bogus'") !=
        std::string::npos);

  // no subcommand -> E_USAGE, exit 2
  const RunResult usage_err = run_cli("", dir);
  CHECK(usage_err.code == 2);
  CHECK(parse_error(usage_err).at("code") == "E_USAGE");

  // bad flag value -> E_USAGE, exit 2
  const RunResult flag_err = run_cli("pipeline --vsk sideways", dir);
  CHECK(flag_err.code == 2);
  CHECK(parse_error(flag_err).at("code") == "E_USAGE");

  // all-zero data with scaled kernels -> E_NUMERIC, exit 1
  VisibilitySet zero;
  zero.points = {{0.01, 0.0}, {-0.01, 0.0}};
  zero.values = {{0.0, 0.0}, {0.0, 0.0}};
  write_visibility_csv(dir + "/zero.csv", zero);
  json zcfg;
  zcfg["grid"] = {{"eval_side", 32}, {"eval_mesh", 2e-3}};
  zcfg["io"] = {{"out_dir", dir}, {"prefix", "z"}};
  const RunResult num_err = run_cli("interpolate " + dir + "/zero.csv --config " +
                                        write_config(dir, zcfg) + " --vsk on",
                                    dir);
  CHECK(num_err.code == 1);
  CHECK(parse_error(num_err).at("code") == "E_NUMERIC");
}

TEST_SUITE_END();
