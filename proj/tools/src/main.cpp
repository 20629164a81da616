#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "config.hpp"
#include "vskf/errors.hpp"
#include "vskf/io.hpp"
#include "vskf/metrics.hpp"
#include "vskf/sampling.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace vskf;
using namespace vskf::cli;

namespace {

/// CLI flag overrides applied on top of the JSON config.
struct Flags {
  std::string config_path;
  std::string input;  // positional input path (visibility CSV / grid base / image base)
  std::string vsk;    // "on" | "off" | ""
  std::string out_dir;
  std::string truth;  // frequency-grid base path for RRMSE
  std::optional<std::uint64_t> seed;
  bool iterlog = false;
  int repeat = 1;
  bool print_config = false;
};

RunConfig effective_config(const Flags& flags) {
  RunConfig cfg = load_config(flags.config_path);
  if (flags.seed) cfg.seed = *flags.seed;
  if (flags.vsk == "on") cfg.vsk.enabled = true;
  if (flags.vsk == "off") cfg.vsk.enabled = false;
  if (!flags.out_dir.empty()) cfg.io.out_dir = flags.out_dir;
  if (!flags.input.empty()) cfg.io.visibilities = flags.input;
  return cfg;
}

std::string out_path(const RunConfig& cfg, const std::string& suffix) {
  fs::create_directories(cfg.io.out_dir);
  return (fs::path(cfg.io.out_dir) / (cfg.io.prefix + suffix)).string();
}

void write_report(const std::string& path, const json& report) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << report.dump(2) << '\n';
  if (!out) throw IoError("write failed: " + path);
}

std::string require_input(const RunConfig& cfg, const char* what) {
  if (cfg.io.visibilities.empty())
    throw ConfigError(std::string("missing input: pass a ") + what +
                      " as the positional argument or set io.visibilities");
  return cfg.io.visibilities;
}

json diagnostics_to_json(const KernelDiagnostics& d, std::optional<double> rrmse) {
  auto opt = [](double v) { return std::isnan(v) ? json() : json(v); };
  json j;
  j["spectral_ratio_classic"] = opt(d.spectral_ratio_classic);
  j["spectral_ratio_vsk"] = opt(d.spectral_ratio_vsk);
  j["cond_classic"] = opt(d.cond_classic);
  j["cond_vsk"] = opt(d.cond_vsk);
  j["certificate_min_eig"] = opt(d.certificate_min_eig);
  j["rrmse"] = rrmse ? json(*rrmse) : json();
  return j;
}

json peaks_to_json(const std::vector<SourceEstimate>& peaks) {
  json j = json::array();
  for (const SourceEstimate& p : peaks)
    j.push_back({{"position", p.position}, {"fwhm", p.fwhm}, {"flux", p.flux}});
  return j;
}

json report_to_json(const RunReport& r, const RunConfig& cfg) {
  json j;
  j["algorithm"] = r.algorithm;
  j["epsilon"] = r.epsilon;
  j["diagnostics"] = diagnostics_to_json(r.diagnostics, r.rrmse);
  j["iterations"] = r.iterations.size();
  j["rrmse"] = r.rrmse ? json(*r.rrmse) : json();
  j["peaks"] = peaks_to_json(r.peaks);
  j["total_flux"] = r.total_flux;
  j["elapsed_seconds"] = r.elapsed_seconds;
  j["seed"] = cfg.seed;
  j["config"] = config_to_json(cfg);
  return j;
}

/// Shape-parameter selection on the configured eval grid (stride-16 targets
/// inside the data disk), 100 log-spaced candidates in [0.01, 1].
double auto_epsilon(const RunConfig& cfg, const std::vector<UVPoint>& nodes,
                    std::vector<double>* curve_out = nullptr,
                    std::vector<double>* candidates_out = nullptr) {
  double radius = 0.0;
  for (const UVPoint& p : nodes) radius = std::max(radius, norm(p));
  const FrequencyGrid grid(cfg.eval_side, cfg.eval_mesh);
  const std::vector<UVPoint> targets = subsampled_disk_targets(grid, radius, 16);
  const std::vector<double> candidates = log_spaced(0.01, 1.0, 100);
  if (candidates_out) *candidates_out = candidates;
  return select_shape_parameter(cfg.kernel.family, nodes, targets, candidates,
                                curve_out);
}

/// Resolves the kernel (auto-selection) and optional scaling for a dataset.
std::pair<KernelModel, std::optional<ScalingFunction>> prepare_kernel(
    RunConfig& cfg, const VisibilitySet& data) {
  if (cfg.epsilon_auto) {
    cfg.kernel.epsilon = auto_epsilon(cfg, data.points);
    cfg.epsilon_auto = false;  // reports embed the resolved value
  }
  std::optional<ScalingFunction> scaling;
  if (cfg.vsk.enabled) {
    const FrequencyGrid eval_grid(cfg.eval_side, cfg.eval_mesh);
    scaling = build_scaling(data, eval_grid, cfg.vsk.back_projection, cfg.vsk.build);
  }
  return {cfg.kernel, std::move(scaling)};
}

ReconstructConfig reconstruct_config(const RunConfig& cfg) {
  ReconstructConfig rc;
  rc.eval_side = cfg.eval_side;
  rc.eval_mesh = cfg.eval_mesh;
  rc.landweber = cfg.landweber;
  if (cfg.support_radius > 0.0) {
    rc.landweber.support = SupportMask::disk(cfg.support_radius);
    rc.auto_support = false;
  } else {
    rc.auto_support = true;
  }
  return rc;
}

/// True visibility-surface modulus on the eval grid for a known source model.
Eigen::MatrixXd model_truth_modulus(const SourceModel& model, int side, double mesh) {
  const FrequencyGrid grid(side, mesh);
  Eigen::MatrixXd truth(side, side);
  for (int i = 0; i < side; ++i)
    for (int j = 0; j < side; ++j) {
      const auto [u, v] = grid.coordinate(i, j);
      truth(i, j) = std::abs(exact_visibility(model, {u, v}));
    }
  return truth;
}

int pool_size(int repeat) {
  unsigned n = std::thread::hardware_concurrency();
  if (n == 0) n = 1;
  if (const char* env = std::getenv("VSKF_THREADS")) {
    char* end = nullptr;
    const long cap = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || cap < 1)
      throw ConfigError("VSKF_THREADS must be a positive integer");
    n = std::min<unsigned>(n, static_cast<unsigned>(cap));
  }
  return static_cast<int>(std::min<unsigned>(n, static_cast<unsigned>(repeat)));
}

int cmd_simulate(const Flags& flags) {
  RunConfig cfg = effective_config(flags);
  if (flags.print_config) {
    std::cout << config_to_json(cfg).dump(2) << '\n';
    return 0;
  }
  cfg.source.validate();
  const std::vector<UVPoint> pattern = make_pattern(cfg);
  const double v0 = std::abs(exact_visibility(cfg.source, {0.0, 0.0}));
  const double sigma = cfg.noise_level * v0;
  VisibilitySet data = simulate_visibilities(cfg.source, pattern, sigma, cfg.seed);
  data.label = cfg.io.prefix;
  const std::string csv = out_path(cfg, "_visibilities.csv");
  write_visibility_csv(csv, data);
  json report;
  report["rows"] = data.points.size();
  report["noise_sigma"] = sigma;
  report["visibilities"] = csv;
  report["seed"] = cfg.seed;
  report["config"] = config_to_json(cfg);
  write_report(out_path(cfg, "_simulate_report.json"), report);
  std::cout << csv << '\n';
  return 0;
}

int cmd_interpolate(const Flags& flags) {
  RunConfig cfg = effective_config(flags);
  if (flags.print_config) {
    std::cout << config_to_json(cfg).dump(2) << '\n';
    return 0;
  }
  const VisibilitySet data = read_visibility_csv(require_input(cfg, "visibility CSV"));
  data.validate();
  auto [kernel, scaling] = prepare_kernel(cfg, data);
  const Interpolant interp = fit(kernel, data, scaling);
  const FrequencyGrid eval_grid(cfg.eval_side, cfg.eval_mesh);
  const std::vector<UVPoint> targets = grid_coordinates(eval_grid);
  const std::vector<std::complex<double>> values =
      evaluate(interp, targets, scaling ? &scaling->eval_values : nullptr);
  FrequencyGrid surface(cfg.eval_side, cfg.eval_mesh);
  for (int i = 0; i < cfg.eval_side; ++i)
    for (int j = 0; j < cfg.eval_side; ++j)
      surface.data(i, j) = values[static_cast<std::size_t>(i) * cfg.eval_side + j];
  surface = hermitian_symmetrize(surface);
  const std::string base = out_path(cfg, "_surface");
  write_frequency_grid(base, surface);
  const KernelDiagnostics diag =
      kernel_diagnostics(kernel, data.points, scaling ? &*scaling : nullptr);
  json report;
  report["algorithm"] = scaling ? "Land-VSK" : "Land-RBF";
  report["epsilon"] = kernel.epsilon;
  report["diagnostics"] = diagnostics_to_json(diag, std::nullopt);
  report["surface"] = base;
  report["seed"] = cfg.seed;
  report["config"] = config_to_json(cfg);
  write_report(out_path(cfg, "_interpolate_report.json"), report);
  std::cout << base << '\n';
  return 0;
}

int cmd_invert(const Flags& flags) {
  RunConfig cfg = effective_config(flags);
  if (flags.print_config) {
    std::cout << config_to_json(cfg).dump(2) << '\n';
    return 0;
  }
  const FrequencyGrid surface =
      read_frequency_grid(require_input(cfg, "frequency-grid base path"));
  LandweberConfig lw = cfg.landweber;
  lw.support = cfg.support_radius > 0.0 ? SupportMask::disk(cfg.support_radius)
                                        : SupportMask::block(surface.side);
  const FrequencyGrid projected = project_support(hermitian_symmetrize(surface), lw.support);
  const FrequencyGrid padded = zero_pad(projected, lw.pad_side);
  const LandweberResult result = landweber(padded, lw);
  const ImageGrid image = reduce(result.image, lw);
  const std::string base = out_path(cfg, "_image");
  write_image(base, image);
  if (cfg.io.pgm) write_pgm(base + ".pgm", image);
  if (flags.iterlog) write_iteration_log(out_path(cfg, "_iterations.csv"), result.log);
  json report;
  report["iterations"] = result.log.size();
  report["final_residual"] = result.log.empty() ? json() : json(result.log.back().residual);
  report["image"] = base;
  report["seed"] = cfg.seed;
  report["config"] = config_to_json(cfg);
  write_report(out_path(cfg, "_invert_report.json"), report);
  std::cout << base << '\n';
  return 0;
}

/// One full reconstruction; `tag` prefixes output names for --repeat runs.
json pipeline_run(RunConfig cfg, const Flags& flags, const std::string& tag) {
  VisibilitySet data;
  std::optional<Eigen::MatrixXd> truth;
  if (cfg.io.visibilities.empty()) {
    if (cfg.source.sources.empty())
      throw ConfigError("pipeline needs either io.visibilities or source.sources");
    cfg.source.validate();
    const double v0 = std::abs(exact_visibility(cfg.source, {0.0, 0.0}));
    data = simulate_visibilities(cfg.source, make_pattern(cfg),
                                 cfg.noise_level * v0, cfg.seed);
    truth = model_truth_modulus(cfg.source, cfg.eval_side, cfg.eval_mesh);
  } else {
    data = read_visibility_csv(cfg.io.visibilities);
    data.validate();
  }
  if (!flags.truth.empty()) {
    const FrequencyGrid g = read_frequency_grid(flags.truth);
    if (g.side != cfg.eval_side)
      throw ConfigError("--truth grid side does not match grid.eval_side");
    truth = g.data.cwiseAbs();
  }

  auto [kernel, scaling] = prepare_kernel(cfg, data);
  const ReconstructResult result = reconstruct(data, kernel, scaling,
                                               reconstruct_config(cfg),
                                               truth ? &*truth : nullptr);

  const std::string image_base = out_path(cfg, tag + "_image");
  write_image(image_base, result.image);
  if (cfg.io.pgm) write_pgm(image_base + ".pgm", result.image);
  write_frequency_grid(out_path(cfg, tag + "_surface"), result.surface);
  write_matrix_text(out_path(cfg, tag + "_surface_mod.txt"),
                    result.surface.data.cwiseAbs());
  if (flags.iterlog)
    write_iteration_log(out_path(cfg, tag + "_iterations.csv"),
                        result.report.iterations);
  write_report(out_path(cfg, tag + "_diagnostics.json"),
               diagnostics_to_json(result.report.diagnostics, result.report.rrmse));
  const json report = report_to_json(result.report, cfg);
  write_report(out_path(cfg, tag + "_report.json"), report);
  return report;
}

int cmd_pipeline(const Flags& flags) {
  RunConfig cfg = effective_config(flags);
  if (flags.print_config) {
    std::cout << config_to_json(cfg).dump(2) << '\n';
    return 0;
  }
  if (flags.repeat <= 1) {
    const json report = pipeline_run(cfg, flags, "");
    std::cout << out_path(cfg, "_report.json") << '\n';
    return 0;
  }

  const int workers = pool_size(flags.repeat);
  std::vector<json> reports(flags.repeat);
  std::vector<std::future<json>> futures;
  int next = 0;
  int done = 0;
  while (done < flags.repeat) {
    while (next < flags.repeat && static_cast<int>(futures.size()) < workers) {
      RunConfig run_cfg = cfg;
      run_cfg.seed = cfg.seed + static_cast<std::uint64_t>(next);
      const std::string tag = "_r" + std::to_string(next);
      futures.emplace_back(std::async(std::launch::async, pipeline_run, run_cfg,
                                      flags, tag));
      ++next;
    }
    reports[done] = futures.front().get();
    futures.erase(futures.begin());
    ++done;
  }

  json aggregate;
  aggregate["runs"] = json::array();
  double rrmse_sum = 0.0;
  int rrmse_count = 0;
  for (const json& r : reports) {
    aggregate["runs"].push_back({{"seed", r.at("seed")},
                                 {"rrmse", r.at("rrmse")},
                                 {"iterations", r.at("iterations")},
                                 {"total_flux", r.at("total_flux")},
                                 {"peaks", r.at("peaks")}});
    if (!r.at("rrmse").is_null()) {
      rrmse_sum += r.at("rrmse").get<double>();
      ++rrmse_count;
    }
  }
  aggregate["mean_rrmse"] = rrmse_count ? json(rrmse_sum / rrmse_count) : json();
  aggregate["config"] = config_to_json(cfg);
  const std::string path = out_path(cfg, "_aggregate.json");
  write_report(path, aggregate);
  std::cout << path << '\n';
  return 0;
}

int cmd_diagnose(const Flags& flags) {
  RunConfig cfg = effective_config(flags);
  if (flags.print_config) {
    std::cout << config_to_json(cfg).dump(2) << '\n';
    return 0;
  }
  const VisibilitySet data = read_visibility_csv(require_input(cfg, "visibility CSV"));
  data.validate();
  if (cfg.epsilon_auto) {
    cfg.kernel.epsilon = auto_epsilon(cfg, data.points);
    cfg.epsilon_auto = false;
  }
  const FrequencyGrid eval_grid(cfg.eval_side, cfg.eval_mesh);
  const ScalingFunction scaling =
      build_scaling(data, eval_grid, cfg.vsk.back_projection, cfg.vsk.build);
  const KernelDiagnostics diag = kernel_diagnostics(cfg.kernel, data.points, &scaling);
  json report = diagnostics_to_json(diag, std::nullopt);
  report["hadamard_max_dev"] =
      hadamard_identity_check(data.points, scaling, cfg.kernel.epsilon);
  report["epsilon"] = cfg.kernel.epsilon;
  report["n"] = data.points.size();
  report["seed"] = cfg.seed;
  report["config"] = config_to_json(cfg);
  const std::string path = out_path(cfg, "_diagnostics.json");
  write_report(path, report);
  std::cout << path << '\n';
  return 0;
}

int cmd_paramfit(const Flags& flags) {
  RunConfig cfg = effective_config(flags);
  if (flags.print_config) {
    std::cout << config_to_json(cfg).dump(2) << '\n';
    return 0;
  }
  const ImageGrid image = read_image(require_input(cfg, "image base path"));
  const SourceExtraction extraction = extract_sources(image, 4);
  json report;
  report["peaks"] = peaks_to_json(extraction.peaks);
  report["total_flux"] = extraction.total_flux;
  report["seed"] = cfg.seed;
  report["config"] = config_to_json(cfg);
  const std::string path = out_path(cfg, "_sources.json");
  write_report(path, report);
  std::cout << path << '\n';
  return 0;
}

int cmd_select_epsilon(const Flags& flags) {
  RunConfig cfg = effective_config(flags);
  if (flags.print_config) {
    std::cout << config_to_json(cfg).dump(2) << '\n';
    return 0;
  }
  const VisibilitySet data = read_visibility_csv(require_input(cfg, "visibility CSV"));
  data.validate();
  std::vector<double> curve, candidates;
  const double selected = auto_epsilon(cfg, data.points, &curve, &candidates);
  {
    std::ofstream out(out_path(cfg, "_power_curve.csv"));
    if (!out) throw IoError("cannot open for writing: power curve CSV");
    out << "epsilon,max_power\n";
    char buf[80];
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      std::snprintf(buf, sizeof(buf), "%.17g,%.17g\n", candidates[i], curve[i]);
      out << buf;
    }
  }
  json report;
  report["selected_epsilon"] = selected;
  report["candidates"] = candidates;
  report["max_power"] = curve;
  report["seed"] = cfg.seed;
  report["config"] = config_to_json(cfg);
  const std::string path = out_path(cfg, "_epsilon.json");
  write_report(path, report);
  std::cout << path << '\n';
  return 0;
}

void fail(const char* code, const std::string& message) {
  json err;
  err["code"] = code;
  err["message"] = message;
  std::cerr << err.dump() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Scattered-frequency image reconstruction: kernel interpolation of "
               "visibility data plus projected Landweber inversion"};
  app.require_subcommand(1);

  Flags flags;
  auto add_common = [&](CLI::App* sub, bool with_input, const char* input_desc) {
    sub->add_option("--config", flags.config_path, "JSON config file");
    sub->add_option("--seed", flags.seed, "override config seed");
    sub->add_option("--vsk", flags.vsk, "enable/disable variably scaled kernel")
        ->check(CLI::IsMember({"on", "off"}));
    sub->add_option("--out", flags.out_dir, "output directory");
    sub->add_flag("--print-config", flags.print_config,
                  "print the effective config and exit");
    if (with_input) sub->add_option("input", flags.input, input_desc);
  };

  CLI::App* simulate = app.add_subcommand("simulate", "sample a source model into a visibility CSV");
  add_common(simulate, false, "");

  CLI::App* interpolate = app.add_subcommand("interpolate", "fit visibilities and evaluate the frequency surface");
  add_common(interpolate, true, "visibility CSV");

  CLI::App* invert = app.add_subcommand("invert", "projected Landweber inversion of a frequency grid");
  add_common(invert, true, "frequency-grid base path");
  invert->add_flag("--iterlog", flags.iterlog, "write per-iteration CSV");

  CLI::App* pipeline = app.add_subcommand("pipeline", "full reconstruction: interpolate + invert + diagnostics");
  add_common(pipeline, true, "visibility CSV (omit to simulate from config)");
  pipeline->add_option("--truth", flags.truth,
                       "frequency-grid base path with the true surface (enables RRMSE)");
  pipeline->add_flag("--iterlog", flags.iterlog, "write per-iteration CSV");
  pipeline->add_option("--repeat", flags.repeat, "independent runs with seeds seed+i")
      ->check(CLI::PositiveNumber);

  CLI::App* diagnose = app.add_subcommand("diagnose", "kernel conditioning diagnostics for a visibility set");
  add_common(diagnose, true, "visibility CSV");

  CLI::App* paramfit = app.add_subcommand("paramfit", "estimate source parameters from an image");
  add_common(paramfit, true, "image base path");

  CLI::App* select_epsilon = app.add_subcommand("select-epsilon", "scan the shape parameter by worst-case power");
  add_common(select_epsilon, true, "visibility CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    fail("E_USAGE", e.what());
    return 2;
  }

  try {
    if (simulate->parsed()) return cmd_simulate(flags);
    if (interpolate->parsed()) return cmd_interpolate(flags);
    if (invert->parsed()) return cmd_invert(flags);
    if (pipeline->parsed()) return cmd_pipeline(flags);
    if (diagnose->parsed()) return cmd_diagnose(flags);
    if (paramfit->parsed()) return cmd_paramfit(flags);
    if (select_epsilon->parsed()) return cmd_select_epsilon(flags);
    fail("E_USAGE", "no subcommand");
    return 2;
  } catch (const ConfigError& e) {
    fail("E_CONFIG", e.what());
    return 2;
  } catch (const ContractError& e) {
    fail("E_CONFIG", e.what());
    return 2;
  } catch (const IoError& e) {
    fail("E_IO", e.what());
    return 2;
  } catch (const NumericError& e) {
    fail("E_NUMERIC", e.what());
    return 1;
  } catch (const std::exception& e) {
    fail("E_NUMERIC", e.what());
    return 1;
  }
}
