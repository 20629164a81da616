#include "vskf/geometry.hpp"

#include <cmath>

namespace vskf {

namespace {

void check_side(int side) {
  if (side < 2) throw ContractError("grid side must be >= 2");
  if (side % 2 != 0) throw ContractError("grid side must be even");
}

}  // namespace

void VisibilitySet::validate() const {
  if (points.size() != values.size())
    throw ContractError("visibility set: points/values length mismatch");
  if (points.empty()) throw ContractError("visibility set: empty");
  for (const auto& p : points)
    if (!std::isfinite(p.u) || !std::isfinite(p.v))
      throw ContractError("visibility set: non-finite node coordinate");
  for (std::size_t i = 0; i < points.size(); ++i)
    for (std::size_t j = i + 1; j < points.size(); ++j)
      if (distance(points[i], points[j]) == 0.0)
        throw ContractError("visibility set: duplicate nodes at indices " +
                            std::to_string(i) + " and " + std::to_string(j));
}

ImageGrid::ImageGrid(int side, double pixel_size, std::array<double, 2> center)
    : side(side), pixel_size(pixel_size), center(center),
      data(Eigen::MatrixXd::Zero(side, side)) {
  check_side(side);
  if (!(pixel_size > 0.0)) throw ContractError("pixel size must be > 0");
}

ImageGrid::ImageGrid(int side, double pixel_size, std::array<double, 2> center,
                     Eigen::MatrixXd values)
    : side(side), pixel_size(pixel_size), center(center), data(std::move(values)) {
  check_side(side);
  if (!(pixel_size > 0.0)) throw ContractError("pixel size must be > 0");
  if (data.rows() != side || data.cols() != side)
    throw ContractError("image data dimensions do not match side");
}

FrequencyGrid::FrequencyGrid(int side, double mesh)
    : side(side), mesh(mesh), data(Eigen::MatrixXcd::Zero(side, side)) {
  check_side(side);
  if (!(mesh > 0.0)) throw ContractError("mesh must be > 0");
}

FrequencyGrid::FrequencyGrid(int side, double mesh, Eigen::MatrixXcd values)
    : side(side), mesh(mesh), data(std::move(values)) {
  check_side(side);
  if (!(mesh > 0.0)) throw ContractError("mesh must be > 0");
  if (data.rows() != side || data.cols() != side)
    throw ContractError("frequency data dimensions do not match side");
}

std::vector<UVPoint> grid_coordinates(const FrequencyGrid& grid) {
  std::vector<UVPoint> out;
  out.reserve(static_cast<std::size_t>(grid.side) * grid.side);
  for (int i = 0; i < grid.side; ++i)
    for (int j = 0; j < grid.side; ++j) out.push_back(grid.coordinate(i, j));
  return out;
}

std::vector<std::array<double, 2>> grid_coordinates(const ImageGrid& grid) {
  std::vector<std::array<double, 2>> out;
  out.reserve(static_cast<std::size_t>(grid.side) * grid.side);
  for (int i = 0; i < grid.side; ++i)
    for (int j = 0; j < grid.side; ++j) out.push_back(grid.coordinate(i, j));
  return out;
}

Eigen::MatrixXd mask_realize(const SupportMask& mask, const FrequencyGrid& grid) {
  if (mask.kind == SupportMask::Kind::full)
    return Eigen::MatrixXd::Ones(grid.side, grid.side);
  if (mask.kind == SupportMask::Kind::block) {
    if (mask.block_side > grid.side)
      throw ContractError("block mask larger than the grid");
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(grid.side, grid.side);
    const int half = mask.block_side / 2 - 1;  // symmetric core, Nyquist edge excluded
    const int center = grid.side / 2;
    out.block(center - half, center - half, 2 * half + 1, 2 * half + 1).setOnes();
    return out;
  }
  Eigen::MatrixXd out(grid.side, grid.side);
  for (int i = 0; i < grid.side; ++i)
    for (int j = 0; j < grid.side; ++j) {
      const UVPoint q = grid.coordinate(i, j);
      out(i, j) = norm(q) <= mask.radius ? 1.0 : 0.0;
    }
  return out;
}

}  // namespace vskf
