#include "vskf/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <tuple>

#include <Eigen/Eigenvalues>

#include "vskf/errors.hpp"

namespace vskf {

namespace {

// Squared feature distances ||Psi_i - Psi_j||^2.
Eigen::MatrixXd feature_sq_distances(const ScalingFunction& scaling) {
  const Eigen::Index n = scaling.node_values.rows();
  Eigen::MatrixXd out(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    out(i, i) = 0.0;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double a = scaling.node_values(i, 0) - scaling.node_values(j, 0);
      const double b = scaling.node_values(i, 1) - scaling.node_values(j, 1);
      out(i, j) = out(j, i) = a * a + b * b;
    }
  }
  return out;
}

// Off-diagonal e^(-t*(t-1)) with t = eps*d, 1 on the diagonal (the Hadamard
// power K^(eps*D - 1) under the plain-distance exponent convention).
Eigen::MatrixXd hadamard_power(const Eigen::MatrixXd& dist, double epsilon,
                               bool inverted) {
  Eigen::MatrixXd out(dist.rows(), dist.cols());
  for (Eigen::Index j = 0; j < dist.cols(); ++j)
    for (Eigen::Index i = 0; i < dist.rows(); ++i) {
      if (i == j) {
        out(i, j) = 1.0;
        continue;
      }
      const double t = epsilon * dist(i, j);
      out(i, j) = std::exp(inverted ? t * (t - 1.0) : -t * (t - 1.0));
    }
  return out;
}

}  // namespace

double spectral_ratio(const Eigen::MatrixXd& matrix) {
  if (matrix.rows() != matrix.cols()) throw ContractError("spectral ratio needs a square matrix");
  const double frob = matrix.norm();
  if (frob == 0.0) throw NumericError("spectral ratio of the zero matrix");
  return matrix.trace() / frob;
}

double condition_number(const Eigen::MatrixXd& matrix) {
  if (matrix.rows() != matrix.cols()) throw ContractError("condition number needs a square matrix");
  const double scale = matrix.cwiseAbs().maxCoeff();
  if ((matrix - matrix.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(scale, 1.0))
    throw ContractError("condition number needs a symmetric matrix");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(matrix, Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues().minCoeff();
  const double hi = es.eigenvalues().maxCoeff();
  if (lo <= 0.0) return std::numeric_limits<double>::infinity();
  return hi / lo;
}

double hadamard_identity_check(const std::vector<UVPoint>& nodes,
                               const ScalingFunction& scaling, double epsilon) {
  const KernelModel matern{KernelFamily::matern_c0, epsilon};
  const KernelModel gauss{KernelFamily::gaussian, epsilon};
  const Eigen::MatrixXd d = distance_matrix(nodes);
  const Eigen::MatrixXd k = kernel_matrix(matern, nodes);
  const Eigen::MatrixXd kg = kernel_matrix(gauss, nodes);
  const Eigen::MatrixXd kg_vsk = kernel_matrix(gauss, nodes, &scaling);

  // (i) K_gauss = K_matern o K^(eps*D - 1)
  const Eigen::MatrixXd power = hadamard_power(d, epsilon, /*inverted=*/false);
  double dev = (kg - k.cwiseProduct(power)).cwiseAbs().maxCoeff();

  // (ii) K_gauss^Psi = K_gauss o K_gauss^phi
  const Eigen::MatrixXd delta_sq = feature_sq_distances(scaling);
  const Eigen::MatrixXd kg_phi =
      (-epsilon * epsilon * delta_sq.array()).exp().matrix();
  dev = std::max(dev, (kg_vsk - kg.cwiseProduct(kg_phi)).cwiseAbs().maxCoeff());
  return dev;
}

double conditioning_certificate(const std::vector<UVPoint>& nodes,
                                const ScalingFunction& scaling, double epsilon) {
  const Eigen::MatrixXd d = distance_matrix(nodes);
  const Eigen::MatrixXd d_vsk = distance_matrix(nodes, &scaling);
  const Eigen::MatrixXd delta_sq = feature_sq_distances(scaling);

  const Eigen::MatrixXd f1 = hadamard_power(d, epsilon, /*inverted=*/false);
  const Eigen::MatrixXd f2 = (-epsilon * epsilon * delta_sq.array()).exp().matrix();
  const Eigen::MatrixXd f3 = hadamard_power(d_vsk, epsilon, /*inverted=*/true);
  Eigen::MatrixXd h = f1.cwiseProduct(f2).cwiseProduct(f3);

  if ((h.diagonal().array() - 1.0).abs().maxCoeff() > 0.0)
    throw NumericError("hypothesis matrix lost its unit diagonal");
  // Closed form H_ij = e^(-eps*(d^Psi - d)) is an internal consistency oracle.
  const Eigen::MatrixXd closed = (-epsilon * (d_vsk - d).array()).exp().matrix();
  if ((h - closed).cwiseAbs().maxCoeff() > 1e-10)
    throw NumericError("hypothesis matrix deviates from its closed form");

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

double rrmse(const Eigen::MatrixXd& reconstruction, const Eigen::MatrixXd& truth) {
  if (reconstruction.rows() != truth.rows() || reconstruction.cols() != truth.cols())
    throw ContractError("rrmse needs matching shapes");
  const double norm = truth.norm();
  if (norm == 0.0) throw NumericError("rrmse against a zero truth surface");
  return (reconstruction - truth).norm() / norm;
}

namespace {

struct Peak {
  int i, j;
  double value;
  double fwhm_px = 0.0;
};

// Index of the nearest peak in pixel space (ties toward the lower index).
int nearest_peak(const std::vector<Peak>& peaks, int i, int j) {
  int best = 0;
  double best_d2 = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < peaks.size(); ++k) {
    const double di = i - peaks[k].i;
    const double dj = j - peaks[k].j;
    const double d2 = di * di + dj * dj;
    if (d2 < best_d2) {
      best_d2 = d2;
      best = static_cast<int>(k);
    }
  }
  return best;
}

// Half-maximum areas (pixel counts) per peak under the nearest-peak partition;
// fills fwhm_px and reports which peaks touch the border with their region.
std::vector<bool> measure_peaks(const Eigen::MatrixXd& m, std::vector<Peak>& peaks) {
  const int side = static_cast<int>(m.rows());
  std::vector<long> area(peaks.size(), 0);
  std::vector<bool> touches_border(peaks.size(), false);
  for (int i = 0; i < side; ++i)
    for (int j = 0; j < side; ++j) {
      const int k = nearest_peak(peaks, i, j);
      if (m(i, j) >= 0.5 * peaks[k].value) {
        ++area[k];
        if (i == 0 || j == 0 || i == side - 1 || j == side - 1)
          touches_border[k] = true;
      }
    }
  for (std::size_t k = 0; k < peaks.size(); ++k)
    peaks[k].fwhm_px = 2.0 * std::sqrt(static_cast<double>(area[k]) / std::numbers::pi);
  return touches_border;
}

}  // namespace

SourceExtraction extract_sources(const ImageGrid& image, int max_peaks) {
  if (max_peaks < 1) throw ContractError("max_peaks must be >= 1");
  const Eigen::MatrixXd& m = image.data;
  const int side = image.side;
  if (m.minCoeff() < 0.0) throw ContractError("source extraction needs a nonnegative image");

  SourceExtraction out;
  const double px = image.pixel_size;
  out.total_flux = m.sum() * px * px;
  const double gmax = m.maxCoeff();
  if (!(gmax > 0.0)) return out;  // zero image -> no peaks

  // Local maxima at or above half the global maximum.
  std::vector<Peak> candidates;
  for (int i = 0; i < side; ++i)
    for (int j = 0; j < side; ++j) {
      const double v = m(i, j);
      if (v < 0.5 * gmax) continue;
      bool is_max = true;
      for (int di = -1; di <= 1 && is_max; ++di)
        for (int dj = -1; dj <= 1 && is_max; ++dj) {
          if (di == 0 && dj == 0) continue;
          const int ni = i + di, nj = j + dj;
          if (ni < 0 || nj < 0 || ni >= side || nj >= side) continue;
          if (m(ni, nj) > v) is_max = false;
        }
      if (is_max) candidates.push_back({i, j, v});
    }
  std::sort(candidates.begin(), candidates.end(), [](const Peak& a, const Peak& b) {
    if (a.value != b.value) return a.value > b.value;
    return std::tie(a.i, a.j) < std::tie(b.i, b.j);
  });

  // Merge plateau duplicates: greedy acceptance with a 2-pixel guard.
  std::vector<Peak> kept;
  for (const Peak& c : candidates) {
    bool clear = true;
    for (const Peak& a : kept) {
      const double di = c.i - a.i, dj = c.j - a.j;
      if (di * di + dj * dj <= 4.0) {
        clear = false;
        break;
      }
    }
    if (clear) kept.push_back(c);
  }

  // Non-maximum suppression at 2x the running FWHM estimates, to a fixed point.
  while (true) {
    measure_peaks(m, kept);
    std::vector<Peak> survivors;
    for (const Peak& c : kept) {
      bool clear = true;
      for (const Peak& s : survivors) {
        const double di = c.i - s.i, dj = c.j - s.j;
        const double sep = std::sqrt(di * di + dj * dj);
        if (sep < 2.0 * std::max(c.fwhm_px, s.fwhm_px)) {
          clear = false;
          break;
        }
      }
      if (clear) survivors.push_back(c);
    }
    const bool stable = survivors.size() == kept.size();
    kept = std::move(survivors);
    if (stable) break;
  }

  // Degenerate peaks: the half-maximum region must not touch the border.
  {
    const std::vector<bool> touches = measure_peaks(m, kept);
    std::vector<Peak> bounded;
    for (std::size_t k = 0; k < kept.size(); ++k)
      if (!touches[k]) bounded.push_back(kept[k]);
    if (bounded.empty())
      throw NumericError(
          "degenerate peak: every half-maximum region touches the image border");
    kept = std::move(bounded);
  }

  if (static_cast<int>(kept.size()) > max_peaks) kept.resize(max_peaks);

  // Final parameters under the nearest-peak partition of all pixels.
  std::vector<double> flux(kept.size(), 0.0);
  std::vector<double> cx(kept.size(), 0.0), cy(kept.size(), 0.0);
  std::vector<long> area(kept.size(), 0);
  for (int i = 0; i < side; ++i)
    for (int j = 0; j < side; ++j) {
      const int k = nearest_peak(kept, i, j);
      flux[k] += m(i, j);
      if (m(i, j) >= 0.5 * kept[k].value) {
        const auto x = image.coordinate(i, j);
        cx[k] += x[0];
        cy[k] += x[1];
        ++area[k];
      }
    }
  for (std::size_t k = 0; k < kept.size(); ++k) {
    SourceEstimate e;
    e.position = {cx[k] / area[k], cy[k] / area[k]};
    e.fwhm = 2.0 * std::sqrt(static_cast<double>(area[k]) / std::numbers::pi) * px;
    e.flux = flux[k] * px * px;
    out.peaks.push_back(e);
  }
  return out;
}

KernelDiagnostics kernel_diagnostics(const KernelModel& kernel,
                                     const std::vector<UVPoint>& nodes,
                                     const ScalingFunction* scaling) {
  KernelDiagnostics d;
  const Eigen::MatrixXd k = kernel_matrix(kernel, nodes);
  d.spectral_ratio_classic = spectral_ratio(k);
  d.cond_classic = condition_number(k);
  if (scaling) {
    const Eigen::MatrixXd k_vsk = kernel_matrix(kernel, nodes, scaling);
    d.spectral_ratio_vsk = spectral_ratio(k_vsk);
    d.cond_vsk = condition_number(k_vsk);
    d.certificate_min_eig = conditioning_certificate(nodes, *scaling, kernel.epsilon);
  }
  return d;
}

}  // namespace vskf
