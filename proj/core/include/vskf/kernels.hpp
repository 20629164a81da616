#pragma once

#include <array>
#include <complex>
#include <memory>
#include <optional>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "vskf/geometry.hpp"

namespace vskf {

enum class KernelFamily { matern_c0, gaussian };

/// Radial kernel: matern_c0 is e^(-epsilon*d), gaussian is e^(-epsilon^2*d^2).
struct KernelModel {
  KernelFamily family = KernelFamily::matern_c0;
  double epsilon = 0.01;

  double apply(double distance) const;
  void validate() const;
};

/// Feature map Psi: (u,v) -> R^2. Kernels act on the augmented coordinates
/// ((u,v), Psi(u,v)) in R^4. node_values/eval_values hold the already-scaled
/// features at the interpolation nodes and at the evaluation-grid samples
/// (row-major); scale_factor records the factor that was applied to both.
struct ScalingFunction {
  Eigen::MatrixX2d node_values;
  Eigen::MatrixX2d eval_values;
  double scale_factor = 1.0;
};

/// Fitted kernel expansion: value at t is sum_k (alpha_k + i*beta_k) * K(t, u_k).
struct Interpolant {
  KernelModel kernel;
  std::vector<UVPoint> nodes;
  std::optional<ScalingFunction> scaling;
  Eigen::VectorXd alpha;
  Eigen::VectorXd beta;
};

/// Pairwise Euclidean distances, in R^2 or (with scaling) in R^4.
/// Throws on off-diagonal zeros (duplicate nodes).
Eigen::MatrixXd distance_matrix(const std::vector<UVPoint>& nodes,
                                const ScalingFunction* scaling = nullptr);

/// Kernel applied entrywise to the distance matrix: symmetric, unit diagonal.
Eigen::MatrixXd kernel_matrix(const KernelModel& kernel,
                              const std::vector<UVPoint>& nodes,
                              const ScalingFunction* scaling = nullptr);

/// Solves K*alpha = Re(V) and K*beta = Im(V) with one Cholesky factorization
/// (diagonal jitter ladder on failure, iterative refinement to ~1e-9 relative).
Interpolant fit(const KernelModel& kernel, const VisibilitySet& data,
                std::optional<ScalingFunction> scaling = std::nullopt);

/// Interpolant values at arbitrary targets. When the interpolant carries a
/// scaling function, target_psi must supply matching features per target.
std::vector<std::complex<double>> evaluate(const Interpolant& interpolant,
                                           const std::vector<UVPoint>& targets,
                                           const Eigen::MatrixX2d* target_psi = nullptr);

/// Pointwise worst-case interpolation error factor
/// P(t) = sqrt(K(t,t) - k(t)^T K^-1 k(t)), sharing one factorization across
/// targets. Equals the determinant-ratio form sqrt(det(K~)/det(K)).
class PowerEvaluator {
public:
  PowerEvaluator(const KernelModel& kernel, const std::vector<UVPoint>& nodes,
                 const ScalingFunction* scaling = nullptr);
  ~PowerEvaluator();
  PowerEvaluator(PowerEvaluator&&) noexcept;
  PowerEvaluator& operator=(PowerEvaluator&&) noexcept;

  double at(const UVPoint& target,
            std::optional<std::array<double, 2>> target_psi = std::nullopt) const;

private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// One-shot convenience wrapper around PowerEvaluator.
double power_function(const KernelModel& kernel, const std::vector<UVPoint>& nodes,
                      const ScalingFunction* scaling, const UVPoint& target,
                      std::optional<std::array<double, 2>> target_psi = std::nullopt);

/// Every stride-th grid sample whose coordinate lies inside the disk;
/// the standard target set for shape-parameter scans.
std::vector<UVPoint> subsampled_disk_targets(const FrequencyGrid& grid, double radius,
                                             int stride);

/// max over targets of the power function, per epsilon candidate
/// (+inf where the kernel matrix is numerically singular).
std::vector<double> power_curve(KernelFamily family, const std::vector<UVPoint>& nodes,
                                const std::vector<UVPoint>& targets,
                                const std::vector<double>& candidates);

/// Candidate minimizing the max power over targets; ties break toward the
/// smallest epsilon. Throws when every candidate is singular.
double select_shape_parameter(KernelFamily family, const std::vector<UVPoint>& nodes,
                              const std::vector<UVPoint>& targets,
                              const std::vector<double>& candidates,
                              std::vector<double>* curve_out = nullptr);

/// count values log-spaced over [lo, hi] with exact endpoints.
std::vector<double> log_spaced(double lo, double hi, int count);

}  // namespace vskf
