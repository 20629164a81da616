#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "vskf/errors.hpp"

namespace vskf {

/// A point of the spatial-frequency plane, units arcsec^-1.
struct UVPoint {
  double u = 0.0;
  double v = 0.0;
};

inline double distance(const UVPoint& a, const UVPoint& b) {
  return std::hypot(a.u - b.u, a.v - b.v);
}

inline double norm(const UVPoint& p) { return std::hypot(p.u, p.v); }

/// Scattered Fourier samples: (u,v) nodes plus complex values,
/// units photon cm^-2 s^-1.
struct VisibilitySet {
  std::vector<UVPoint> points;
  std::vector<std::complex<double>> values;
  std::string label;

  std::size_t size() const { return points.size(); }

  /// Throws ContractError on size mismatch, non-finite or duplicate nodes.
  void validate() const;
};

/// Regular real-valued pixel grid. Pixel (i,j) sits at
/// ((i - side/2)*pixel_size + center[0], (j - side/2)*pixel_size + center[1]);
/// sides are even so index side/2 lands exactly on the grid center.
struct ImageGrid {
  int side = 0;
  double pixel_size = 0.0;
  std::array<double, 2> center{0.0, 0.0};
  Eigen::MatrixXd data;

  ImageGrid() = default;
  ImageGrid(int side, double pixel_size, std::array<double, 2> center = {0.0, 0.0});
  ImageGrid(int side, double pixel_size, std::array<double, 2> center, Eigen::MatrixXd values);

  std::array<double, 2> coordinate(int i, int j) const {
    return {(i - side / 2) * pixel_size + center[0],
            (j - side / 2) * pixel_size + center[1]};
  }
};

/// Regular complex-valued grid in the (u,v) plane, centered on the origin:
/// sample (i,j) sits at ((i - side/2)*mesh, (j - side/2)*mesh).
struct FrequencyGrid {
  int side = 0;
  double mesh = 0.0;
  Eigen::MatrixXcd data;

  FrequencyGrid() = default;
  FrequencyGrid(int side, double mesh);
  FrequencyGrid(int side, double mesh, Eigen::MatrixXcd values);

  UVPoint coordinate(int i, int j) const {
    return {(i - side / 2) * mesh, (j - side / 2) * mesh};
  }
};

/// Characteristic set D of the frequency plane: a disk, a centered square
/// block, or everything. block(n) is the symmetric core of an n-sided grid —
/// samples with both index offsets within n/2 - 1 of the center. It excludes
/// the unpaired Nyquist row/column (index 0), whose mirror only exists after
/// zero padding, so a block-projected grid stays Hermitian once padded.
struct SupportMask {
  enum class Kind { disk, block, full };
  Kind kind = Kind::full;
  double radius = 0.0;
  int block_side = 0;

  static SupportMask disk(double radius) {
    if (!(radius > 0.0)) throw ContractError("disk mask radius must be > 0");
    return {Kind::disk, radius, 0};
  }
  static SupportMask block(int side) {
    if (side < 2 || side % 2 != 0)
      throw ContractError("block mask side must be even and >= 2");
    return {Kind::block, 0.0, side};
  }
  static SupportMask full() { return {Kind::full, 0.0, 0}; }
};

/// Physical coordinates of every sample, row-major ((i,j) -> i*side + j).
std::vector<UVPoint> grid_coordinates(const FrequencyGrid& grid);
std::vector<std::array<double, 2>> grid_coordinates(const ImageGrid& grid);

/// 0/1 matrix: entry is 1 iff the sample coordinate lies in the mask set
/// (disk: ||q||_2 <= radius).
Eigen::MatrixXd mask_realize(const SupportMask& mask, const FrequencyGrid& grid);

}  // namespace vskf
