#include "vskf/sampling.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace vskf {

namespace {

constexpr double kRhessiMaxRadius = 2.21e-1;   // detector 1, arcsec^-1
constexpr double kStixMinRadius = 2.79e-3;     // ring 1, arcsec^-1
constexpr double kStixMaxRadius = 7.02e-2;     // ring 10, arcsec^-1
constexpr int kStixRings = 10;

// Appends one ring of per_ring equally spaced points, built half-by-half so the
// second half is the exact IEEE negation of the first (grants bit-exact closure
// under p -> -p, which the Hermitian pairing downstream relies on).
void append_ring(std::vector<UVPoint>& out, double radius, int per_ring, double phase) {
  const double step = 2.0 * std::numbers::pi / per_ring;
  for (int k = 0; k < per_ring / 2; ++k) {
    const double theta = phase + k * step;
    const UVPoint p{radius * std::cos(theta), radius * std::sin(theta)};
    out.push_back(p);
    out.push_back({-p.u, -p.v});
  }
}

void check_per_ring(int per_ring) {
  if (per_ring < 2) throw ContractError("per_ring must be >= 2");
  if (per_ring % 2 != 0)
    throw ContractError("per_ring must be even (odd counts break conjugate symmetry)");
}

double ring_phase(std::mt19937_64* rng, int per_ring) {
  if (!rng) return 0.0;
  std::uniform_real_distribution<double> dist(0.0, 2.0 * std::numbers::pi / per_ring);
  return dist(*rng);
}

}  // namespace

std::vector<UVPoint> fibonacci_nodes(int n, double radius) {
  if (n < 1) throw ContractError("fibonacci pattern needs at least one node");
  if (!(radius > 0.0)) throw ContractError("fibonacci radius must be > 0");
  const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
  const double golden_angle = 2.0 * std::numbers::pi / (phi * phi);
  std::vector<UVPoint> out;
  out.reserve(n);
  for (int k = 1; k <= n; ++k) {
    const double r = radius * std::sqrt((k - 0.5) / n);
    const double theta = golden_angle * k;
    out.push_back({r * std::cos(theta), r * std::sin(theta)});
  }
  return out;
}

std::vector<UVPoint> rhessi_nodes(int first_detector, int last_detector, int per_ring,
                                  std::optional<unsigned> jitter_seed) {
  if (first_detector < 1 || last_detector > 9 || first_detector > last_detector)
    throw ContractError("detector indices must satisfy 1 <= first <= last <= 9");
  check_per_ring(per_ring);
  std::optional<std::mt19937_64> rng;
  if (jitter_seed) rng.emplace(*jitter_seed);
  std::vector<UVPoint> out;
  out.reserve(static_cast<std::size_t>(last_detector - first_detector + 1) * per_ring);
  for (int k = first_detector; k <= last_detector; ++k) {
    const double radius = kRhessiMaxRadius / std::pow(std::sqrt(3.0), k - 1);
    append_ring(out, radius, per_ring, ring_phase(rng ? &*rng : nullptr, per_ring));
  }
  return out;
}

std::vector<UVPoint> stix_nodes(int per_ring, std::optional<unsigned> jitter_seed) {
  check_per_ring(per_ring);
  const double ratio = std::pow(kStixMaxRadius / kStixMinRadius, 1.0 / (kStixRings - 1));
  std::optional<std::mt19937_64> rng;
  if (jitter_seed) rng.emplace(*jitter_seed);
  std::vector<UVPoint> out;
  out.reserve(static_cast<std::size_t>(kStixRings) * per_ring);
  for (int k = 0; k < kStixRings; ++k) {
    const double radius = kStixMinRadius * std::pow(ratio, k);
    append_ring(out, radius, per_ring, ring_phase(rng ? &*rng : nullptr, per_ring));
  }
  return out;
}

}  // namespace vskf
