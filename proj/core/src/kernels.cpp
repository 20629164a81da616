#include "vskf/kernels.hpp"

#include <cmath>
#include <iostream>
#include <limits>

#include <Eigen/Eigenvalues>

#include "vskf/errors.hpp"

namespace vskf {

namespace {

double augmented_distance(const UVPoint& a, const UVPoint& b,
                          const Eigen::RowVector2d& pa, const Eigen::RowVector2d& pb) {
  const double du = a.u - b.u;
  const double dv = a.v - b.v;
  const double d0 = pa(0) - pb(0);
  const double d1 = pa(1) - pb(1);
  return std::sqrt(du * du + dv * dv + d0 * d0 + d1 * d1);
}

struct SpdFactor {
  Eigen::LLT<Eigen::MatrixXd> llt;
  double jitter = 0.0;
};

// Cholesky with a diagonal jitter ladder 1e-12..1e-6 relative to the mean
// diagonal; throws IllConditionedError (with a condition estimate) beyond that.
SpdFactor factor_spd(const Eigen::MatrixXd& k) {
  const int n = static_cast<int>(k.rows());
  const double scale = k.trace() / n;
  SpdFactor f;
  f.llt.compute(k);
  if (f.llt.info() == Eigen::Success) return f;
  for (double rel = 1e-12; rel <= 1.0001e-6; rel *= 10.0) {
    f.jitter = rel * scale;
    f.llt.compute(k + f.jitter * Eigen::MatrixXd::Identity(n, n));
    if (f.llt.info() == Eigen::Success) return f;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(k, Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues().minCoeff();
  const double hi = es.eigenvalues().maxCoeff();
  const double cond = lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
  throw IllConditionedError(
      "kernel matrix not positive definite after jitter (cond estimate " +
          std::to_string(cond) + ")",
      cond);
}

// One shared-factorization solve with iterative refinement against the
// unjittered matrix; targets ~1e-9 relative residual.
Eigen::VectorXd solve_refined(const SpdFactor& f, const Eigen::MatrixXd& k,
                              const Eigen::VectorXd& b, double scale) {
  Eigen::VectorXd x = f.llt.solve(b);
  if (scale <= 0.0) return x;
  for (int step = 0; step < 4; ++step) {
    const Eigen::VectorXd r = b - k * x;
    if (r.lpNorm<Eigen::Infinity>() <= 1e-9 * scale) break;
    x += f.llt.solve(r);
  }
  return x;
}

void check_scaling_nodes(const std::vector<UVPoint>& nodes, const ScalingFunction* scaling) {
  if (scaling && scaling->node_values.rows() != static_cast<Eigen::Index>(nodes.size()))
    throw ContractError("scaling function node values do not match node count");
}

}  // namespace

double KernelModel::apply(double distance) const {
  switch (family) {
    case KernelFamily::matern_c0:
      return std::exp(-epsilon * distance);
    case KernelFamily::gaussian: {
      const double t = epsilon * distance;
      return std::exp(-t * t);
    }
  }
  throw ContractError("unknown kernel family");
}

void KernelModel::validate() const {
  if (!(epsilon > 0.0)) throw ContractError("kernel shape parameter must be > 0");
}

Eigen::MatrixXd distance_matrix(const std::vector<UVPoint>& nodes,
                                const ScalingFunction* scaling) {
  check_scaling_nodes(nodes, scaling);
  const int n = static_cast<int>(nodes.size());
  Eigen::MatrixXd d(n, n);
  for (int i = 0; i < n; ++i) {
    d(i, i) = 0.0;
    for (int j = i + 1; j < n; ++j) {
      const double dist =
          scaling ? augmented_distance(nodes[i], nodes[j], scaling->node_values.row(i),
                                       scaling->node_values.row(j))
                  : distance(nodes[i], nodes[j]);
      if (dist == 0.0)
        throw ContractError("duplicate nodes at indices " + std::to_string(i) +
                            " and " + std::to_string(j));
      d(i, j) = d(j, i) = dist;
    }
  }
  return d;
}

Eigen::MatrixXd kernel_matrix(const KernelModel& kernel, const std::vector<UVPoint>& nodes,
                              const ScalingFunction* scaling) {
  kernel.validate();
  Eigen::MatrixXd k = distance_matrix(nodes, scaling);
  for (Eigen::Index j = 0; j < k.cols(); ++j)
    for (Eigen::Index i = 0; i < k.rows(); ++i) k(i, j) = kernel.apply(k(i, j));
  return k;
}

Interpolant fit(const KernelModel& kernel, const VisibilitySet& data,
                std::optional<ScalingFunction> scaling) {
  data.validate();
  const int n = static_cast<int>(data.size());
  const Eigen::MatrixXd k =
      kernel_matrix(kernel, data.points, scaling ? &*scaling : nullptr);
  const SpdFactor f = factor_spd(k);

  Eigen::VectorXd re(n), im(n);
  for (int i = 0; i < n; ++i) {
    re(i) = data.values[i].real();
    im(i) = data.values[i].imag();
  }
  double scale = 0.0;
  for (const auto& v : data.values) scale = std::max(scale, std::abs(v));

  Interpolant out;
  out.kernel = kernel;
  out.nodes = data.points;
  out.scaling = std::move(scaling);
  out.alpha = solve_refined(f, k, re, scale);
  out.beta = solve_refined(f, k, im, scale);
  return out;
}

std::vector<std::complex<double>> evaluate(const Interpolant& interpolant,
                                           const std::vector<UVPoint>& targets,
                                           const Eigen::MatrixX2d* target_psi) {
  if (interpolant.scaling.has_value() != (target_psi != nullptr))
    throw ContractError("target scaling features must be supplied iff the "
                        "interpolant carries a scaling function");
  if (target_psi && target_psi->rows() != static_cast<Eigen::Index>(targets.size()))
    throw ContractError("target scaling features do not match target count");

  const auto& nodes = interpolant.nodes;
  const int n = static_cast<int>(nodes.size());
  const ScalingFunction* scaling =
      interpolant.scaling ? &*interpolant.scaling : nullptr;
  std::vector<std::complex<double>> out(targets.size());
  for (std::size_t t = 0; t < targets.size(); ++t) {
    double acc_re = 0.0, acc_im = 0.0;
    for (int j = 0; j < n; ++j) {
      const double d =
          scaling ? augmented_distance(targets[t], nodes[j], target_psi->row(t),
                                       scaling->node_values.row(j))
                  : distance(targets[t], nodes[j]);
      const double kv = interpolant.kernel.apply(d);
      acc_re += interpolant.alpha(j) * kv;
      acc_im += interpolant.beta(j) * kv;
    }
    out[t] = {acc_re, acc_im};
  }
  return out;
}

struct PowerEvaluator::Impl {
  KernelModel kernel;
  std::vector<UVPoint> nodes;
  std::optional<ScalingFunction> scaling;
  SpdFactor factor;
};

PowerEvaluator::PowerEvaluator(const KernelModel& kernel,
                               const std::vector<UVPoint>& nodes,
                               const ScalingFunction* scaling)
    : impl_(std::make_unique<Impl>()) {
  check_scaling_nodes(nodes, scaling);
  impl_->kernel = kernel;
  impl_->nodes = nodes;
  if (scaling) impl_->scaling = *scaling;
  impl_->factor = factor_spd(kernel_matrix(kernel, nodes, scaling));
}

PowerEvaluator::~PowerEvaluator() = default;
PowerEvaluator::PowerEvaluator(PowerEvaluator&&) noexcept = default;
PowerEvaluator& PowerEvaluator::operator=(PowerEvaluator&&) noexcept = default;

double PowerEvaluator::at(const UVPoint& target,
                          std::optional<std::array<double, 2>> target_psi) const {
  const bool scaled = impl_->scaling.has_value();
  if (scaled != target_psi.has_value())
    throw ContractError("target scaling features must be supplied iff the "
                        "power evaluator carries a scaling function");
  const int n = static_cast<int>(impl_->nodes.size());
  Eigen::VectorXd k(n);
  for (int j = 0; j < n; ++j) {
    double d;
    if (scaled) {
      const Eigen::RowVector2d pt((*target_psi)[0], (*target_psi)[1]);
      d = augmented_distance(target, impl_->nodes[j], pt,
                             impl_->scaling->node_values.row(j));
    } else {
      d = distance(target, impl_->nodes[j]);
    }
    k(j) = impl_->kernel.apply(d);
  }
  const double p2 = impl_->kernel.apply(0.0) - k.dot(impl_->factor.llt.solve(k));
  if (p2 < -1e-10)
    std::cerr << "warning: power function squared evaluated to " << p2
              << "; clamping to zero\n";
  return std::sqrt(std::max(p2, 0.0));
}

double power_function(const KernelModel& kernel, const std::vector<UVPoint>& nodes,
                      const ScalingFunction* scaling, const UVPoint& target,
                      std::optional<std::array<double, 2>> target_psi) {
  return PowerEvaluator(kernel, nodes, scaling).at(target, target_psi);
}

std::vector<UVPoint> subsampled_disk_targets(const FrequencyGrid& grid, double radius,
                                             int stride) {
  if (stride < 1) throw ContractError("stride must be >= 1");
  std::vector<UVPoint> out;
  for (int i = 0; i < grid.side; i += stride)
    for (int j = 0; j < grid.side; j += stride) {
      const UVPoint q = grid.coordinate(i, j);
      if (norm(q) <= radius) out.push_back(q);
    }
  return out;
}

std::vector<double> power_curve(KernelFamily family, const std::vector<UVPoint>& nodes,
                                const std::vector<UVPoint>& targets,
                                const std::vector<double>& candidates) {
  std::vector<double> curve;
  curve.reserve(candidates.size());
  for (const double eps : candidates) {
    double score;
    try {
      const PowerEvaluator pe({family, eps}, nodes);
      score = 0.0;
      for (const auto& t : targets) score = std::max(score, pe.at(t));
    } catch (const IllConditionedError&) {
      score = std::numeric_limits<double>::infinity();
    }
    curve.push_back(score);
  }
  return curve;
}

double select_shape_parameter(KernelFamily family, const std::vector<UVPoint>& nodes,
                              const std::vector<UVPoint>& targets,
                              const std::vector<double>& candidates,
                              std::vector<double>* curve_out) {
  if (candidates.empty()) throw ContractError("shape-parameter candidate grid is empty");
  const std::vector<double> curve = power_curve(family, nodes, targets, candidates);
  if (curve_out) *curve_out = curve;
  double best_eps = 0.0;
  double best_score = std::numeric_limits<double>::infinity();
  bool found = false;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (std::isinf(curve[i])) continue;
    if (!found || curve[i] < best_score ||
        (curve[i] == best_score && candidates[i] < best_eps)) {
      best_eps = candidates[i];
      best_score = curve[i];
      found = true;
    }
  }
  if (!found)
    throw NumericError("every shape-parameter candidate produced a singular system");
  return best_eps;
}

std::vector<double> log_spaced(double lo, double hi, int count) {
  if (!(lo > 0.0) || !(hi >= lo) || count < 1)
    throw ContractError("log_spaced needs 0 < lo <= hi and count >= 1");
  std::vector<double> out(count);
  if (count == 1) {
    out[0] = lo;
    return out;
  }
  const double llo = std::log(lo), lhi = std::log(hi);
  for (int i = 0; i < count; ++i)
    out[i] = std::exp(llo + (lhi - llo) * i / (count - 1));
  out.front() = lo;
  out.back() = hi;
  return out;
}

}  // namespace vskf
