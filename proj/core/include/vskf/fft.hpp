#pragma once

#include <array>
#include <memory>

#include <Eigen/Core>

#include "vskf/geometry.hpp"

namespace vskf {

/// Discrete Fourier transforms between a centered image grid and a centered
/// frequency grid of the same even side, under the physical conventions
///
///   image -> frequency:  V(q) = sum_x I(x) * e^(+2*pi*i*q.x) * pixel_size^2
///   frequency -> image:  I(x) = sum_q V(q) * e^(-2*pi*i*q.x) * mesh^2
///
/// with mesh * pixel_size = 1/side, so the two maps are exact inverses.
/// Plans and buffers are owned per instance; use one instance per thread.
class CenteredTransform {
public:
  explicit CenteredTransform(int side);
  ~CenteredTransform();
  CenteredTransform(const CenteredTransform&) = delete;
  CenteredTransform& operator=(const CenteredTransform&) = delete;

  int side() const;

  Eigen::MatrixXcd image_to_frequency(const Eigen::MatrixXcd& image, double pixel_size,
                                      std::array<double, 2> center = {0.0, 0.0});
  Eigen::MatrixXcd frequency_to_image(const Eigen::MatrixXcd& grid, double mesh,
                                      std::array<double, 2> center = {0.0, 0.0});

private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// DFT of the image with the e^(+2*pi*i*q.x) sign convention;
/// output mesh = 1/(side * pixel_size).
FrequencyGrid forward_transform(const ImageGrid& image);

/// Inverse DFT onto an image grid with pixel_size = 1/(side * mesh) at the given
/// center. The imaginary part (rounding-level for Hermitian input) is discarded.
ImageGrid inverse_transform(const FrequencyGrid& grid,
                            std::array<double, 2> center = {0.0, 0.0});

/// Averages the grid with its conjugate reflection q -> -q (periodic index map),
/// making the inverse transform real.
FrequencyGrid hermitian_symmetrize(const FrequencyGrid& grid);

/// Embeds the grid in the center of a pad_side x pad_side zero grid, same mesh.
FrequencyGrid zero_pad(const FrequencyGrid& grid, int pad_side);

/// Zeros every sample outside the mask set.
FrequencyGrid project_support(const FrequencyGrid& grid, const SupportMask& mask);

}  // namespace vskf
