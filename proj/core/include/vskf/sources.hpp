#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <vector>

#include "vskf/geometry.hpp"

namespace vskf {

/// Exponential-profile source I(x) = A * e^(-B*||x - position||) with
/// B = 2*ln2 / fwhm and A = flux * B^2 / (2*pi), so the plane integral is flux.
struct ExpSource {
  std::array<double, 2> position{0.0, 0.0};  // arcsec
  double fwhm = 0.0;                         // arcsec
  double flux = 0.0;                         // photon cm^-2 s^-1

  double decay() const;      // B
  double amplitude() const;  // A
};

struct SourceModel {
  std::vector<ExpSource> sources;

  void validate() const;
};

/// Samples the model onto the grid geometry; every pixel is strictly positive.
ImageGrid render_image(const SourceModel& model, const ImageGrid& geometry);

/// Closed-form visibility V(u) = sum_s A*2*pi*B / (B^2 + 4*pi^2*q^2)^(3/2)
/// * e^(+2*pi*i*u.x_s), q = ||u||_2.
std::complex<double> exact_visibility(const SourceModel& model, const UVPoint& point);

/// Exact visibilities plus additive Gaussian noise (sigma on Re and Im
/// separately), drawn once per conjugate pair: if -p is also in the pattern it
/// receives the conjugated noisy value, so V(-u) = conj(V(u)) holds exactly.
/// Self-paired points (the origin) receive real noise only.
VisibilitySet simulate_visibilities(const SourceModel& model,
                                    const std::vector<UVPoint>& pattern,
                                    double noise_sigma, std::uint64_t seed);

}  // namespace vskf
