#include "config.hpp"

#include <fstream>

#include "vskf/errors.hpp"
#include "vskf/sampling.hpp"

namespace vskf::cli {

namespace {

using nlohmann::json;

void check_keys(const json& j, const std::string& where,
                std::initializer_list<const char*> allowed) {
  for (const auto& [key, value] : j.items()) {
    bool known = false;
    for (const char* a : allowed)
      if (key == a) known = true;
    if (!known) throw ConfigError("unknown config key '" + where + key + "'");
  }
}

template <typename T>
void read_to(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("config key '") + key + "' has the wrong type");
  }
}

void parse_kernel(const json& j, RunConfig& cfg) {
  check_keys(j, "kernel.", {"family", "epsilon"});
  if (j.contains("family")) {
    const std::string family = j.at("family").get<std::string>();
    if (family == "matern_c0")
      cfg.kernel.family = KernelFamily::matern_c0;
    else if (family == "gaussian")
      cfg.kernel.family = KernelFamily::gaussian;
    else
      throw ConfigError("kernel.family must be 'matern_c0' or 'gaussian'");
  }
  if (j.contains("epsilon")) {
    const json& eps = j.at("epsilon");
    if (eps.is_string()) {
      if (eps.get<std::string>() != "auto")
        throw ConfigError("kernel.epsilon must be a number or 'auto'");
      cfg.epsilon_auto = true;
    } else if (eps.is_number()) {
      cfg.kernel.epsilon = eps.get<double>();
      cfg.epsilon_auto = false;
    } else {
      throw ConfigError("kernel.epsilon must be a number or 'auto'");
    }
  }
}

void parse_vsk(const json& j, RunConfig& cfg) {
  check_keys(j, "vsk.",
             {"enabled", "threshold", "scale_mode", "window", "manual_size", "bp_side",
              "bp_pixel_size"});
  read_to(j, "enabled", cfg.vsk.enabled);
  read_to(j, "threshold", cfg.vsk.build.threshold);
  if (j.contains("scale_mode")) {
    const std::string mode = j.at("scale_mode").get<std::string>();
    if (mode == "raw")
      cfg.vsk.build.scale_mode = ScalingBuildConfig::PsiScaleMode::raw;
    else if (mode == "match_uv_extent")
      cfg.vsk.build.scale_mode = ScalingBuildConfig::PsiScaleMode::match_uv_extent;
    else
      throw ConfigError("vsk.scale_mode must be 'raw' or 'match_uv_extent'");
  }
  if (j.contains("window")) {
    const std::string window = j.at("window").get<std::string>();
    if (window == "auto")
      cfg.vsk.build.window = ScalingBuildConfig::Window::auto_by_data_extent;
    else if (window == "manual")
      cfg.vsk.build.window = ScalingBuildConfig::Window::manual;
    else
      throw ConfigError("vsk.window must be 'auto' or 'manual'");
  }
  read_to(j, "manual_size", cfg.vsk.build.manual_size);
  read_to(j, "bp_side", cfg.vsk.back_projection.side);
  read_to(j, "bp_pixel_size", cfg.vsk.back_projection.pixel_size);
}

void parse_grid(const json& j, RunConfig& cfg) {
  check_keys(j, "grid.", {"eval_side", "eval_mesh"});
  read_to(j, "eval_side", cfg.eval_side);
  read_to(j, "eval_mesh", cfg.eval_mesh);
}

void parse_landweber(const json& j, RunConfig& cfg) {
  check_keys(j, "landweber.",
             {"tau", "max_iterations", "rel_change_tol", "support_radius", "pad_side",
              "output_side", "reduction", "subsample"});
  read_to(j, "tau", cfg.landweber.tau);
  read_to(j, "max_iterations", cfg.landweber.max_iterations);
  read_to(j, "rel_change_tol", cfg.landweber.rel_change_tol);
  read_to(j, "support_radius", cfg.support_radius);
  read_to(j, "pad_side", cfg.landweber.pad_side);
  read_to(j, "output_side", cfg.landweber.output_side);
  if (j.contains("reduction")) {
    const std::string reduction = j.at("reduction").get<std::string>();
    if (reduction == "center_crop")
      cfg.landweber.reduction = LandweberConfig::Reduction::center_crop;
    else if (reduction == "mask_subsample")
      cfg.landweber.reduction = LandweberConfig::Reduction::mask_subsample;
    else
      throw ConfigError("landweber.reduction must be 'center_crop' or 'mask_subsample'");
  }
  read_to(j, "subsample", cfg.landweber.subsample);
}

void parse_sampling(const json& j, RunConfig& cfg) {
  check_keys(j, "sampling.",
             {"kind", "per_ring", "n", "radius", "first_detector", "last_detector",
              "jitter"});
  if (j.contains("kind")) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "stix")
      cfg.sampling.kind = SamplingConfig::Kind::stix;
    else if (kind == "rhessi")
      cfg.sampling.kind = SamplingConfig::Kind::rhessi;
    else if (kind == "fibonacci")
      cfg.sampling.kind = SamplingConfig::Kind::fibonacci;
    else
      throw ConfigError("sampling.kind must be 'stix', 'rhessi' or 'fibonacci'");
  }
  read_to(j, "per_ring", cfg.sampling.per_ring);
  read_to(j, "n", cfg.sampling.n);
  read_to(j, "radius", cfg.sampling.radius);
  read_to(j, "first_detector", cfg.sampling.first_detector);
  read_to(j, "last_detector", cfg.sampling.last_detector);
  read_to(j, "jitter", cfg.sampling.jitter);
}

void parse_source(const json& j, RunConfig& cfg) {
  check_keys(j, "source.", {"sources", "noise_level"});
  if (j.contains("sources")) {
    cfg.source.sources.clear();
    for (const json& s : j.at("sources")) {
      check_keys(s, "source.sources[].", {"position", "fwhm", "flux"});
      ExpSource src;
      read_to(s, "position", src.position);
      read_to(s, "fwhm", src.fwhm);
      read_to(s, "flux", src.flux);
      cfg.source.sources.push_back(src);
    }
  }
  read_to(j, "noise_level", cfg.noise_level);
}

void parse_io(const json& j, RunConfig& cfg) {
  check_keys(j, "io.", {"visibilities", "out_dir", "prefix", "pgm"});
  read_to(j, "visibilities", cfg.io.visibilities);
  read_to(j, "out_dir", cfg.io.out_dir);
  read_to(j, "prefix", cfg.io.prefix);
  read_to(j, "pgm", cfg.io.pgm);
}

}  // namespace

RunConfig load_config(const std::string& path) {
  RunConfig cfg;
  if (path.empty()) return cfg;
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
  check_keys(j, "", {"seed", "kernel", "vsk", "grid", "landweber", "sampling", "source",
                     "io"});
  read_to(j, "seed", cfg.seed);
  if (j.contains("kernel")) parse_kernel(j.at("kernel"), cfg);
  if (j.contains("vsk")) parse_vsk(j.at("vsk"), cfg);
  if (j.contains("grid")) parse_grid(j.at("grid"), cfg);
  if (j.contains("landweber")) parse_landweber(j.at("landweber"), cfg);
  if (j.contains("sampling")) parse_sampling(j.at("sampling"), cfg);
  if (j.contains("source")) parse_source(j.at("source"), cfg);
  if (j.contains("io")) parse_io(j.at("io"), cfg);
  return cfg;
}

nlohmann::json config_to_json(const RunConfig& cfg) {
  json j;
  j["seed"] = cfg.seed;
  j["kernel"]["family"] =
      cfg.kernel.family == KernelFamily::matern_c0 ? "matern_c0" : "gaussian";
  if (cfg.epsilon_auto)
    j["kernel"]["epsilon"] = "auto";
  else
    j["kernel"]["epsilon"] = cfg.kernel.epsilon;
  j["vsk"]["enabled"] = cfg.vsk.enabled;
  j["vsk"]["threshold"] = cfg.vsk.build.threshold;
  j["vsk"]["scale_mode"] =
      cfg.vsk.build.scale_mode == ScalingBuildConfig::PsiScaleMode::raw
          ? "raw"
          : "match_uv_extent";
  j["vsk"]["window"] = cfg.vsk.build.window == ScalingBuildConfig::Window::manual
                           ? "manual"
                           : "auto";
  j["vsk"]["manual_size"] = cfg.vsk.build.manual_size;
  j["vsk"]["bp_side"] = cfg.vsk.back_projection.side;
  j["vsk"]["bp_pixel_size"] = cfg.vsk.back_projection.pixel_size;
  j["grid"]["eval_side"] = cfg.eval_side;
  j["grid"]["eval_mesh"] = cfg.eval_mesh;
  j["landweber"]["tau"] = cfg.landweber.tau;
  j["landweber"]["max_iterations"] = cfg.landweber.max_iterations;
  j["landweber"]["rel_change_tol"] = cfg.landweber.rel_change_tol;
  j["landweber"]["support_radius"] = cfg.support_radius;
  j["landweber"]["pad_side"] = cfg.landweber.pad_side;
  j["landweber"]["output_side"] = cfg.landweber.output_side;
  j["landweber"]["reduction"] =
      cfg.landweber.reduction == LandweberConfig::Reduction::center_crop
          ? "center_crop"
          : "mask_subsample";
  j["landweber"]["subsample"] = cfg.landweber.subsample;
  switch (cfg.sampling.kind) {
    case SamplingConfig::Kind::stix: j["sampling"]["kind"] = "stix"; break;
    case SamplingConfig::Kind::rhessi: j["sampling"]["kind"] = "rhessi"; break;
    case SamplingConfig::Kind::fibonacci: j["sampling"]["kind"] = "fibonacci"; break;
  }
  j["sampling"]["per_ring"] = cfg.sampling.per_ring;
  j["sampling"]["n"] = cfg.sampling.n;
  j["sampling"]["radius"] = cfg.sampling.radius;
  j["sampling"]["first_detector"] = cfg.sampling.first_detector;
  j["sampling"]["last_detector"] = cfg.sampling.last_detector;
  j["sampling"]["jitter"] = cfg.sampling.jitter;
  j["source"]["sources"] = json::array();
  for (const ExpSource& s : cfg.source.sources)
    j["source"]["sources"].push_back(
        {{"position", s.position}, {"fwhm", s.fwhm}, {"flux", s.flux}});
  j["source"]["noise_level"] = cfg.noise_level;
  j["io"]["visibilities"] = cfg.io.visibilities;
  j["io"]["out_dir"] = cfg.io.out_dir;
  j["io"]["prefix"] = cfg.io.prefix;
  j["io"]["pgm"] = cfg.io.pgm;
  return j;
}

std::vector<UVPoint> make_pattern(const RunConfig& cfg) {
  std::optional<unsigned> jitter;
  if (cfg.sampling.jitter) jitter = static_cast<unsigned>(cfg.seed);
  switch (cfg.sampling.kind) {
    case SamplingConfig::Kind::stix: {
      const int per_ring = cfg.sampling.per_ring > 0 ? cfg.sampling.per_ring : 6;
      return stix_nodes(per_ring, jitter);
    }
    case SamplingConfig::Kind::rhessi: {
      const int per_ring = cfg.sampling.per_ring > 0 ? cfg.sampling.per_ring : 34;
      return rhessi_nodes(cfg.sampling.first_detector, cfg.sampling.last_detector,
                          per_ring, jitter);
    }
    case SamplingConfig::Kind::fibonacci:
      return fibonacci_nodes(cfg.sampling.n, cfg.sampling.radius);
  }
  throw ConfigError("unreachable sampling kind");
}

}  // namespace vskf::cli
