#pragma once

// Test-side reference implementations, written independently of the library
// code paths they check: brute-force centered DFTs, 2-D quadrature of the
// forward transform, the determinant-ratio power function, and random
// instance generators for the property suites.

#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "vskf/geometry.hpp"
#include "vskf/kernels.hpp"
#include "vskf/sources.hpp"

namespace oracle {

inline constexpr double two_pi = 2.0 * std::numbers::pi;

/// Centered DFT by direct O(side^4) summation from physical coordinates:
/// out(p,q) = scale * sum_ij in(i,j) * e^(sign * 2*pi*i * q_pq . x_ij).
inline Eigen::MatrixXcd brute_centered_dft(const Eigen::MatrixXcd& in, double in_step,
                                           double out_step, double sign, double scale) {
  const int side = static_cast<int>(in.rows());
  Eigen::MatrixXcd out(side, side);
  for (int p = 0; p < side; ++p)
    for (int q = 0; q < side; ++q) {
      const double fu = (p - side / 2) * out_step;
      const double fv = (q - side / 2) * out_step;
      std::complex<double> acc = 0.0;
      for (int i = 0; i < side; ++i)
        for (int j = 0; j < side; ++j) {
          const double x = (i - side / 2) * in_step;
          const double y = (j - side / 2) * in_step;
          const double phase = sign * two_pi * (fu * x + fv * y);
          acc += in(i, j) * std::complex<double>(std::cos(phase), std::sin(phase));
        }
      out(p, q) = scale * acc;
    }
  return out;
}

inline Eigen::MatrixXcd brute_image_to_freq(const Eigen::MatrixXcd& image,
                                            double pixel_size) {
  const int side = static_cast<int>(image.rows());
  const double mesh = 1.0 / (side * pixel_size);
  return brute_centered_dft(image, pixel_size, mesh, +1.0, pixel_size * pixel_size);
}

inline Eigen::MatrixXcd brute_freq_to_image(const Eigen::MatrixXcd& grid, double mesh) {
  const int side = static_cast<int>(grid.rows());
  const double pixel_size = 1.0 / (side * mesh);
  return brute_centered_dft(grid, mesh, pixel_size, -1.0, mesh * mesh);
}

/// V(u) = integral of I(x) e^(2*pi*i*u.x) dx for the exponential-profile model,
/// by polar quadrature around each source: unit radial panels with 12-point
/// Gauss-Legendre out to where the profile has decayed to ~e^-60, and a
/// 1024-point trapezoid rule in the angle (spectrally accurate; the angular
/// oscillation index 2*pi*q*r stays far below the point count here).
inline std::complex<double> quadrature_visibility(const vskf::SourceModel& model,
                                                  const vskf::UVPoint& point) {
  static const double gl_x[6] = {0.1252334085114689, 0.3678314989981802,
                                 0.5873179542866175, 0.7699026741943047,
                                 0.9041172563704749, 0.9815606342467192};
  static const double gl_w[6] = {0.2491470458134028, 0.2334925365383548,
                                 0.2031674267230659, 0.1600783285433462,
                                 0.1069393259953184, 0.0471753363865118};
  const int n_theta = 1024;

  std::complex<double> total = 0.0;
  for (const vskf::ExpSource& s : model.sources) {
    const double b = 2.0 * std::numbers::ln2 / s.fwhm;
    const double a = s.flux * b * b / two_pi;
    const int panels = static_cast<int>(std::ceil(60.0 / b));
    std::complex<double> acc = 0.0;
    for (int panel = 0; panel < panels; ++panel)
      for (int g = 0; g < 12; ++g) {
        const double t = g < 6 ? -gl_x[g] : gl_x[g - 6];
        const double w = gl_w[g % 6] * 0.5;  // panel half-length
        const double r = panel + 0.5 + 0.5 * t;
        std::complex<double> ring = 0.0;
        for (int m = 0; m < n_theta; ++m) {
          const double theta = two_pi * m / n_theta;
          const double x = s.position[0] + r * std::cos(theta);
          const double y = s.position[1] + r * std::sin(theta);
          const double phase = two_pi * (point.u * x + point.v * y);
          ring += std::complex<double>(std::cos(phase), std::sin(phase));
        }
        acc += w * a * std::exp(-b * r) * r * ring * (two_pi / n_theta);
      }
    total += acc;
  }
  return total;
}

/// Kernel entry computed from scratch (no library matrix code).
inline double kernel_value(const vskf::KernelModel& kernel, double dist) {
  if (kernel.family == vskf::KernelFamily::matern_c0) return std::exp(-kernel.epsilon * dist);
  return std::exp(-kernel.epsilon * kernel.epsilon * dist * dist);
}

inline double augmented_distance(const vskf::UVPoint& a, const vskf::UVPoint& b,
                                 const double* psi_a, const double* psi_b) {
  double sq = (a.u - b.u) * (a.u - b.u) + (a.v - b.v) * (a.v - b.v);
  if (psi_a) {
    sq += (psi_a[0] - psi_b[0]) * (psi_a[0] - psi_b[0]);
    sq += (psi_a[1] - psi_b[1]) * (psi_a[1] - psi_b[1]);
  }
  return std::sqrt(sq);
}

inline double augmented_distance(const vskf::UVPoint& a, const vskf::UVPoint& b,
                                 const std::array<double, 2>& psi_a,
                                 const std::array<double, 2>& psi_b) {
  return augmented_distance(a, b, psi_a.data(), psi_b.data());
}

/// Power function via the determinant ratio sqrt(det(K_augmented)/det(K)),
/// the form the library's Schur-complement evaluation must agree with.
inline double det_ratio_power(const vskf::KernelModel& kernel,
                              const std::vector<vskf::UVPoint>& nodes,
                              const Eigen::MatrixX2d* psi, const vskf::UVPoint& target,
                              std::optional<std::array<double, 2>> target_psi) {
  const int n = static_cast<int>(nodes.size());
  Eigen::MatrixXd full(n + 1, n + 1);
  // MatrixX2d is column-major; copy rows into contiguous pairs.
  std::vector<std::array<double, 2>> psi_nodes(psi ? nodes.size() : 0);
  for (std::size_t i = 0; i < psi_nodes.size(); ++i)
    psi_nodes[i] = {(*psi)(static_cast<Eigen::Index>(i), 0),
                    (*psi)(static_cast<Eigen::Index>(i), 1)};
  const double* tp = target_psi ? target_psi->data() : nullptr;
  for (int i = 0; i <= n; ++i)
    for (int j = 0; j <= n; ++j) {
      const vskf::UVPoint& pi = i < n ? nodes[i] : target;
      const vskf::UVPoint& pj = j < n ? nodes[j] : target;
      const double* qi = psi ? (i < n ? psi_nodes[i].data() : tp) : nullptr;
      const double* qj = psi ? (j < n ? psi_nodes[j].data() : tp) : nullptr;
      full(i, j) = kernel_value(kernel, augmented_distance(pi, pj, qi, qj));
    }
  const double det_full = full.fullPivLu().determinant();
  const double det_base = full.topLeftCorner(n, n).fullPivLu().determinant();
  const double ratio = det_full / det_base;
  return std::sqrt(std::max(0.0, ratio));
}

/// n distinct points, uniform over [-extent, extent]^2 with a minimum
/// pairwise separation so kernel matrices stay comfortably factorizable.
inline std::vector<vskf::UVPoint> random_nodes(std::mt19937_64& rng, int n, double extent,
                                               double min_sep) {
  std::uniform_real_distribution<double> coord(-extent, extent);
  std::vector<vskf::UVPoint> nodes;
  while (static_cast<int>(nodes.size()) < n) {
    const vskf::UVPoint cand{coord(rng), coord(rng)};
    bool clear = true;
    for (const auto& p : nodes)
      if (vskf::distance(p, cand) < min_sep) {
        clear = false;
        break;
      }
    if (clear) nodes.push_back(cand);
  }
  return nodes;
}

inline Eigen::MatrixX2d random_psi(std::mt19937_64& rng, int n, double amplitude) {
  std::uniform_real_distribution<double> val(-amplitude, amplitude);
  Eigen::MatrixX2d psi(n, 2);
  for (int i = 0; i < n; ++i) {
    psi(i, 0) = val(rng);
    psi(i, 1) = val(rng);
  }
  return psi;
}

/// ScalingFunction wrapper for property tests that only touch node features.
inline vskf::ScalingFunction node_scaling(Eigen::MatrixX2d node_values) {
  vskf::ScalingFunction sf;
  sf.node_values = std::move(node_values);
  sf.eval_values = Eigen::MatrixX2d(0, 2);
  return sf;
}

/// Random SPD matrix with eigenvalues uniform in [lo, hi].
inline Eigen::MatrixXd random_spd(std::mt19937_64& rng, int n, double lo, double hi) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::MatrixXd raw(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) raw(i, j) = gauss(rng);
  const Eigen::HouseholderQR<Eigen::MatrixXd> qr(raw);
  Eigen::MatrixXd q = qr.householderQ();
  std::uniform_real_distribution<double> eig(lo, hi);
  Eigen::VectorXd lambda(n);
  for (int i = 0; i < n; ++i) lambda(i) = eig(rng);
  Eigen::MatrixXd spd = q * lambda.asDiagonal() * q.transpose();
  return 0.5 * (spd + spd.transpose());
}

}  // namespace oracle
