#pragma once

#include "vskf/fft.hpp"
#include "vskf/geometry.hpp"
#include "vskf/kernels.hpp"

namespace vskf {

struct BackProjectionConfig {
  int side = 128;
  double pixel_size = 1.0;  // arcsec
  enum class Weighting { uniform };
  Weighting weighting = Weighting::uniform;
};

struct ScalingBuildConfig {
  double threshold = 0.8;  // segmentation fraction p, nominal range 0.70..0.90
  enum class PsiScaleMode { raw, match_uv_extent };
  PsiScaleMode scale_mode = PsiScaleMode::match_uv_extent;
  enum class Window { auto_by_data_extent, manual };
  Window window = Window::auto_by_data_extent;
  int manual_size = 0;  // L; half-extent floor(L/2)+1 cells when window == manual
};

/// Rough inverse of the scattered data on an image grid:
/// I(x) = (1/n) * sum_j Re(V_j * e^(-2*pi*i*u_j.x)).
ImageGrid back_project(const VisibilitySet& data, const BackProjectionConfig& config = {});

/// Keeps pixels with |value| > p * max(image), zeroes the rest.
/// Throws NumericError on an all-zero image.
ImageGrid segment(const ImageGrid& image, double p);

/// Builds the feature map Psi for variably scaled kernels: back-projection ->
/// segmentation -> forward transform -> central window covering the data extent
/// -> bilinear samples at the nodes and at every eval_grid sample (queries
/// outside the window are clamped to its edge). With match_uv_extent the raw
/// (Re,Im) features are rescaled so their peak norm equals the window radius
/// q_max; stored values are already scaled.
ScalingFunction build_scaling(const VisibilitySet& data, const FrequencyGrid& eval_grid,
                              const BackProjectionConfig& bp_config = {},
                              const ScalingBuildConfig& build_config = {});

}  // namespace vskf
