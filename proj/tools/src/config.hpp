#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "vskf/inversion.hpp"
#include "vskf/kernels.hpp"
#include "vskf/scaling.hpp"
#include "vskf/sources.hpp"

namespace vskf::cli {

struct SamplingConfig {
  enum class Kind { stix, rhessi, fibonacci };
  Kind kind = Kind::stix;
  int per_ring = 0;  // 0 = kind default (stix 6, rhessi 34)
  int n = 100;       // fibonacci point count
  double radius = 0.07;
  int first_detector = 3;
  int last_detector = 9;
  bool jitter = false;  // per-ring phase jitter derived from the run seed
};

struct VskConfig {
  bool enabled = false;
  ScalingBuildConfig build;
  BackProjectionConfig back_projection;
};

struct IoConfig {
  std::string visibilities;  // input CSV; empty = simulate inline (pipeline)
  std::string out_dir = ".";
  std::string prefix = "run";
  bool pgm = false;  // also write a 16-bit PGM preview of images
};

/// Effective run configuration: JSON file -> defaults -> CLI flag overrides.
struct RunConfig {
  std::uint64_t seed = 0;
  KernelModel kernel;       // kernel.epsilon < 0 encodes "auto"
  bool epsilon_auto = false;
  VskConfig vsk;
  int eval_side = 320;
  double eval_mesh = 5e-4;
  LandweberConfig landweber;
  double support_radius = 0.0;  // 0 = auto (data extent for pipeline, full for invert)
  SamplingConfig sampling;
  SourceModel source;
  double noise_level = 0.0;  // sigma = noise_level * |V(0)|
  IoConfig io;
};

/// Parses the JSON file over the defaults. Unknown keys anywhere are rejected.
RunConfig load_config(const std::string& path);

/// The effective configuration as JSON (embedded in reports, --print-config).
nlohmann::json config_to_json(const RunConfig& config);

/// Sampling nodes for the configured pattern (jitter seeded from config.seed).
std::vector<UVPoint> make_pattern(const RunConfig& config);

}  // namespace vskf::cli
