#include "vskf/scaling.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "vskf/errors.hpp"

namespace vskf {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Bilinear sample of the window of grid at frequency (u,v); queries are clamped
// into the window box [-extent, extent]^2 first.
std::complex<double> sample_window(const Eigen::MatrixXcd& grid, int side, double mesh,
                                   int half_cells, double u, double v) {
  const double extent = half_cells * mesh;
  const double cu = std::clamp(u, -extent, extent);
  const double cv = std::clamp(v, -extent, extent);
  const int lo = side / 2 - half_cells;
  const int hi = side / 2 + half_cells;
  double si = cu / mesh + side / 2;
  double sj = cv / mesh + side / 2;
  int i0 = std::clamp(static_cast<int>(std::floor(si)), lo, hi - 1);
  int j0 = std::clamp(static_cast<int>(std::floor(sj)), lo, hi - 1);
  const double fi = si - i0;
  const double fj = sj - j0;
  return (1 - fi) * (1 - fj) * grid(i0, j0) + fi * (1 - fj) * grid(i0 + 1, j0) +
         (1 - fi) * fj * grid(i0, j0 + 1) + fi * fj * grid(i0 + 1, j0 + 1);
}

}  // namespace

ImageGrid back_project(const VisibilitySet& data, const BackProjectionConfig& config) {
  data.validate();
  ImageGrid out(config.side, config.pixel_size);
  const double weight = 1.0 / static_cast<double>(data.size());
  for (int i = 0; i < out.side; ++i)
    for (int j = 0; j < out.side; ++j) {
      const auto x = out.coordinate(i, j);
      double acc = 0.0;
      for (std::size_t k = 0; k < data.size(); ++k) {
        const double phase = -kTwoPi * (data.points[k].u * x[0] + data.points[k].v * x[1]);
        acc += data.values[k].real() * std::cos(phase) -
               data.values[k].imag() * std::sin(phase);
      }
      out.data(i, j) = weight * acc;
    }
  return out;
}

ImageGrid segment(const ImageGrid& image, double p) {
  if (!(p > 0.0 && p < 1.0)) throw ContractError("segmentation threshold must be in (0,1)");
  const double maxv = image.data.maxCoeff();
  if ((image.data.array() == 0.0).all())
    throw NumericError("segmentation input image is identically zero");
  ImageGrid out = image;
  const double cut = p * maxv;
  for (int i = 0; i < out.side; ++i)
    for (int j = 0; j < out.side; ++j)
      if (!(std::abs(out.data(i, j)) > cut)) out.data(i, j) = 0.0;
  return out;
}

ScalingFunction build_scaling(const VisibilitySet& data, const FrequencyGrid& eval_grid,
                              const BackProjectionConfig& bp_config,
                              const ScalingBuildConfig& build_config) {
  const ImageGrid rough = back_project(data, bp_config);
  const ImageGrid segmented = segment(rough, build_config.threshold);
  const FrequencyGrid vbar = forward_transform(segmented);

  double data_radius = 0.0;
  for (const auto& p : data.points) data_radius = std::max(data_radius, norm(p));
  const double q_max = data_radius + vbar.mesh;  // one cell margin

  int half_cells;
  if (build_config.window == ScalingBuildConfig::Window::manual) {
    if (build_config.manual_size < 0) throw ContractError("manual window size must be >= 0");
    half_cells = build_config.manual_size / 2 + 1;
  } else {
    half_cells = static_cast<int>(std::ceil(q_max / vbar.mesh));
  }
  if (half_cells > vbar.side / 2 - 1)
    throw ConfigError(
        "data frequency extent exceeds the transformed back-projection grid; "
        "choose a smaller back-projection pixel_size");

  const auto sample = [&](double u, double v) {
    return sample_window(vbar.data, vbar.side, vbar.mesh, half_cells, u, v);
  };

  ScalingFunction out;
  out.node_values.resize(static_cast<Eigen::Index>(data.size()), 2);
  for (std::size_t k = 0; k < data.size(); ++k) {
    const std::complex<double> value = sample(data.points[k].u, data.points[k].v);
    out.node_values(static_cast<Eigen::Index>(k), 0) = value.real();
    out.node_values(static_cast<Eigen::Index>(k), 1) = value.imag();
  }
  const std::vector<UVPoint> eval_points = grid_coordinates(eval_grid);
  out.eval_values.resize(static_cast<Eigen::Index>(eval_points.size()), 2);
  for (std::size_t k = 0; k < eval_points.size(); ++k) {
    const std::complex<double> value = sample(eval_points[k].u, eval_points[k].v);
    out.eval_values(static_cast<Eigen::Index>(k), 0) = value.real();
    out.eval_values(static_cast<Eigen::Index>(k), 1) = value.imag();
  }

  out.scale_factor = 1.0;
  if (build_config.scale_mode == ScalingBuildConfig::PsiScaleMode::match_uv_extent) {
    const double peak = std::max(out.node_values.rowwise().norm().maxCoeff(),
                                 out.eval_values.rowwise().norm().maxCoeff());
    if (peak > 0.0) out.scale_factor = q_max / peak;
    out.node_values *= out.scale_factor;
    out.eval_values *= out.scale_factor;
  }
  return out;
}

}  // namespace vskf
