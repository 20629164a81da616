#pragma once

#include <optional>
#include <vector>

#include "vskf/geometry.hpp"

namespace vskf {

/// n quasi-uniform points on the disk of the given radius, from the golden-angle
/// spiral lattice: r_k = radius*sqrt((k - 1/2)/n), theta_k = 2*pi*k/phi^2, k = 1..n.
std::vector<UVPoint> fibonacci_nodes(int n, double radius);

/// Concentric rings at the detector radii R(k) = 2.21e-1 / sqrt(3)^(k-1),
/// detector indices first..last within 1..9, per_ring even points per ring,
/// phase 0 at angle 0. The returned set is closed under p -> -p exactly.
/// jitter_seed, when set, rotates each ring by a random phase (symmetry kept).
std::vector<UVPoint> rhessi_nodes(int first_detector, int last_detector, int per_ring,
                                  std::optional<unsigned> jitter_seed = std::nullopt);

/// Ten rings with radii geometrically spaced from 2.79e-3 to 7.02e-2 arcsec^-1,
/// per_ring even points per ring (default 6 gives the 60-point pattern).
std::vector<UVPoint> stix_nodes(int per_ring,
                                std::optional<unsigned> jitter_seed = std::nullopt);

}  // namespace vskf
