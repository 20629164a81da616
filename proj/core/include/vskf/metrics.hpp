#pragma once

#include <array>
#include <limits>
#include <vector>

#include <Eigen/Core>

#include "vskf/geometry.hpp"
#include "vskf/kernels.hpp"

namespace vskf {

/// Conditioning and expressiveness figures for a kernel matrix and its
/// variably-scaled counterpart. NaN marks fields that were not computed.
struct KernelDiagnostics {
  double spectral_ratio_classic = std::numeric_limits<double>::quiet_NaN();
  double spectral_ratio_vsk = std::numeric_limits<double>::quiet_NaN();
  double cond_classic = std::numeric_limits<double>::quiet_NaN();
  double cond_vsk = std::numeric_limits<double>::quiet_NaN();
  double certificate_min_eig = std::numeric_limits<double>::quiet_NaN();
};

/// trace / Frobenius norm. Throws on the zero matrix.
double spectral_ratio(const Eigen::MatrixXd& matrix);

/// lambda_max / lambda_min of a symmetric matrix; +inf when lambda_min <= 0.
double condition_number(const Eigen::MatrixXd& matrix);

/// Max entrywise deviation over the Hadamard factorizations tying the Matern
/// and Gaussian families together (off-diagonal exponent convention
/// e^(-eps*d*(eps*d - 1)), 1 on the diagonal):
///   (i)  K_gauss = K_matern o K^(eps*D - 1)
///   (ii) K_gauss^Psi = K_gauss o K_gauss^phi,  (K_gauss^phi)_ij = e^(-eps^2*||Psi_i - Psi_j||^2)
double hadamard_identity_check(const std::vector<UVPoint>& nodes,
                               const ScalingFunction& scaling, double epsilon);

/// Smallest eigenvalue of H = K^(eps*D-1) o K_gauss^phi o ((K^Psi)^(eps*D^Psi-1))^(o-1);
/// H has unit diagonal and closed form H_ij = e^(-eps*(d^Psi_ij - d_ij)).
/// A nonnegative value (>= -1e-10) certifies cond(K^Psi) <= cond(K).
double conditioning_certificate(const std::vector<UVPoint>& nodes,
                                const ScalingFunction& scaling, double epsilon);

/// Frobenius-relative error between two same-shape surfaces: ||R - W||_F / ||W||_F.
double rrmse(const Eigen::MatrixXd& reconstruction, const Eigen::MatrixXd& truth);

/// One detected source: position (arcsec), FWHM (arcsec), flux (photon cm^-2 s^-1).
struct SourceEstimate {
  std::array<double, 2> position{0.0, 0.0};
  double fwhm = 0.0;
  double flux = 0.0;
};

struct SourceExtraction {
  std::vector<SourceEstimate> peaks;
  double total_flux = 0.0;
};

/// Deterministic peak extraction on a nonnegative image: local maxima >= 50% of
/// the global maximum, non-maximum suppression at 2x the running FWHM
/// estimates, rejection of peaks whose half-maximum region touches the border
/// (degenerate), then per peak: centroid of the half-maximum pixels, FWHM from
/// the half-maximum area, flux over all pixels assigned by the nearest-peak rule.
SourceExtraction extract_sources(const ImageGrid& image, int max_peaks);

/// Assembles spectral ratios, condition numbers and (when scaling is given)
/// the conditioning-certificate figure for one node set.
KernelDiagnostics kernel_diagnostics(const KernelModel& kernel,
                                     const std::vector<UVPoint>& nodes,
                                     const ScalingFunction* scaling = nullptr);

}  // namespace vskf
