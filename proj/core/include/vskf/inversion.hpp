#pragma once

#include <optional>
#include <string>
#include <vector>

#include "vskf/fft.hpp"
#include "vskf/geometry.hpp"
#include "vskf/kernels.hpp"
#include "vskf/metrics.hpp"

namespace vskf {

struct LandweberConfig {
  double tau = 1.0;             // relaxation, must lie in (0, 2)
  int max_iterations = 500;
  double rel_change_tol = 1e-4;
  SupportMask support = SupportMask::full();
  int pad_side = 1920;
  int output_side = 128;
  enum class Reduction { center_crop, mask_subsample };
  Reduction reduction = Reduction::center_crop;
  int subsample = 15;  // tile size for mask_subsample (needs pad_side == output_side * subsample)

  void validate() const;
};

struct IterationRecord {
  int k = 0;
  double residual = 0.0;    // ||chi_D(F(I^k) - F(data))||_F after the update
  double rel_change = 0.0;  // ||I^k - I^(k-1)||_F / ||I^(k-1)||_F
};

struct LandweberResult {
  ImageGrid image;  // pad_side x pad_side, pixelwise >= 0
  std::vector<IterationRecord> log;
};

/// Projected Landweber extrapolation: starting from I^0 = 0,
///   F(I^(k+1)) = tau*F(data) + (1 - tau*chi_D)*F(I^k),  I^(k+1) = max(I^(k+1), 0),
/// stopping at max_iterations or when the relative change drops below tol.
/// `data` must be the Hermitian-symmetrized, support-projected, zero-padded grid.
LandweberResult landweber(const FrequencyGrid& data, const LandweberConfig& config);

/// Shrinks the padded image to output_side: center_crop takes the central
/// block (pixel size kept); mask_subsample takes the first pixel of each
/// subsample x subsample tile (pixel size multiplied accordingly).
ImageGrid reduce(const ImageGrid& image, const LandweberConfig& config);

struct ReconstructConfig {
  int eval_side = 320;
  double eval_mesh = 5e-4;  // arcsec^-1
  LandweberConfig landweber;
  // Realize the support as the symmetric block covering the evaluation grid,
  // overriding landweber.support. A disk of radius max ||u_j|| discards the
  // grid corners, where the interpolant's extrapolated energy raises the
  // attainable resolution well beyond the sampled band.
  bool auto_support = true;
  int max_report_peaks = 4;
};

struct RunReport {
  std::string algorithm;  // "Land-RBF" or "Land-VSK"
  double epsilon = 0.0;
  KernelDiagnostics diagnostics;
  std::vector<IterationRecord> iterations;
  std::optional<double> rrmse;
  std::vector<SourceEstimate> peaks;
  double total_flux = 0.0;
  double elapsed_seconds = 0.0;
};

struct ReconstructResult {
  ImageGrid image;        // output_side x output_side
  FrequencyGrid surface;  // symmetrized interpolant on the evaluation grid
  RunReport report;
};

/// Full pipeline: fit -> evaluate on the eval grid -> Hermitian symmetrization
/// -> support projection -> zero padding -> projected Landweber -> reduction.
/// When truth_modulus (eval grid shape) is given, the report carries the RRMSE
/// of the interpolated modulus surface against it.
ReconstructResult reconstruct(const VisibilitySet& data, const KernelModel& kernel,
                              const std::optional<ScalingFunction>& scaling,
                              const ReconstructConfig& config,
                              const Eigen::MatrixXd* truth_modulus = nullptr);

}  // namespace vskf
