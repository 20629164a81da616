#include "vskf/inversion.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <limits>
#include <memory>
#include <mutex>
#include <utility>

#include <fftw3.h>

#include "vskf/errors.hpp"

namespace vskf {

namespace {

// Same planner lock as the centered-transform module; FFTW planning is not
// thread-safe while executing distinct plans is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwRealDeleter {
  void operator()(double* p) const { fftw_free(p); }
};
struct FftwComplexDeleter {
  void operator()(fftw_complex* p) const { fftw_free(p); }
};

using RealBuf = std::unique_ptr<double[], FftwRealDeleter>;
using ComplexBuf = std::unique_ptr<fftw_complex[], FftwComplexDeleter>;

RealBuf alloc_real(std::size_t n) {
  double* p = fftw_alloc_real(n);
  if (!p) throw std::bad_alloc();
  return RealBuf(p);
}

ComplexBuf alloc_complex(std::size_t n) {
  fftw_complex* p = fftw_alloc_complex(n);
  if (!p) throw std::bad_alloc();
  return ComplexBuf(p);
}

}  // namespace

void LandweberConfig::validate() const {
  if (!(tau > 0.0 && tau < 2.0)) throw ContractError("relaxation tau must lie in (0, 2)");
  if (max_iterations < 1) throw ContractError("max_iterations must be >= 1");
  if (!(rel_change_tol >= 0.0)) throw ContractError("rel_change_tol must be >= 0");
  if (reduction == Reduction::center_crop) {
    if (output_side > pad_side) throw ContractError("output side exceeds padded side");
  } else {
    if (subsample < 1 || pad_side != output_side * subsample)
      throw ContractError("mask_subsample needs pad_side == output_side * subsample");
  }
}

// The iteration runs in a half-spectrum representation: with the modulation
// M(i,j) = (-1)^(i+j) and even side, the centered transform obeys
//   G(p,q) = px^2 * M(p,q) * conj(W(p,q)),   W = DFT_-[M * I],
// at identical array indices, and W of the real array M*I is Hermitian, so an
// r2c/c2r plan pair over roughly half the samples replaces the two full
// complex transforms per iteration. Pinning, masking and the residual are
// entrywise, hence identical in W-space up to the fixed px^2 scale.
LandweberResult landweber(const FrequencyGrid& data, const LandweberConfig& config) {
  config.validate();
  const int side = data.side;
  const std::size_t count = static_cast<std::size_t>(side) * side;
  const int half = side / 2 + 1;  // stored range of the first (fast) index
  const std::size_t half_count = static_cast<std::size_t>(side) * half;
  const double pixel_size = 1.0 / (side * data.mesh);
  const double data_norm = data.data.norm();

  // The scheme needs a real iterate, i.e. Hermitian-symmetric input.
  if (data_norm > 0.0) {
    double dev = 0.0;
    for (int j = 0; j < side; ++j)
      for (int i = 0; i < side; ++i) {
        const std::complex<double> mirror =
            std::conj(data.data((side - i) % side, (side - j) % side));
        dev += std::norm(data.data(i, j) - mirror);
      }
    if (std::sqrt(dev) > 1e-10 * data_norm)
      throw ContractError(
          "landweber input grid is not Hermitian-symmetric (inverse transform "
          "came out complex)");
  }

  const Eigen::MatrixXd mask = mask_realize(config.support, data);

  RealBuf spatial = alloc_real(count);       // M * I^k, fftw layout == Eigen layout
  RealBuf image = alloc_real(count);         // I^k
  RealBuf image_prev = alloc_real(count);    // I^(k-1)
  ComplexBuf freq = alloc_complex(half_count);       // W(I^k), half spectrum
  ComplexBuf freq_data = alloc_complex(half_count);  // W-form of the input grid
  std::fill(image_prev.get(), image_prev.get() + count, 0.0);

  fftw_plan plan_r2c, plan_c2r;
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    plan_r2c = fftw_plan_dft_r2c_2d(side, side, spatial.get(), freq.get(), FFTW_ESTIMATE);
    plan_c2r = fftw_plan_dft_c2r_2d(side, side, freq.get(), spatial.get(), FFTW_ESTIMATE);
    if (!plan_r2c || !plan_c2r) {
      if (plan_r2c) fftw_destroy_plan(plan_r2c);
      throw NumericError("fftw could not build real-transform plans");
    }
  }

  // Half-spectrum entry (q*half + p) <-> full index (p, q), p <= side/2; the
  // column-major Eigen data passed as row-major swaps the axes, which the
  // symmetric 2-D kernel absorbs. sign/px^2 converts G to W; chi and the
  // weight (1 for the self-mirrored p columns, else 2) act per entry.
  const double inv_px2 = 1.0 / (pixel_size * pixel_size);
  Eigen::VectorXd chi(half_count);
  Eigen::VectorXd weight(half_count);
  for (int q = 0; q < side; ++q)
    for (int p = 0; p < half; ++p) {
      const std::size_t idx = static_cast<std::size_t>(q) * half + p;
      const double sign = ((p + q) & 1) ? -1.0 : 1.0;
      const std::complex<double> w = sign * inv_px2 * std::conj(data.data(p, q));
      freq_data[idx][0] = w.real();
      freq_data[idx][1] = w.imag();
      chi(idx) = mask(p, q);
      weight(idx) = (p == 0 || p == side / 2) ? 1.0 : 2.0;
    }

  LandweberResult result;
  const double tau = config.tau;
  const double inv_count = 1.0 / static_cast<double>(count);

  for (int k = 1; k <= config.max_iterations; ++k) {
    // F(I^(k+1)) = tau*F(data) + (1 - tau*chi) F(I^k); at k = 1, F(I^0) = 0.
    if (k == 1) {
      for (std::size_t idx = 0; idx < half_count; ++idx) {
        freq[idx][0] = tau * freq_data[idx][0];
        freq[idx][1] = tau * freq_data[idx][1];
      }
    } else {
      for (std::size_t idx = 0; idx < half_count; ++idx) {
        const double keep = 1.0 - tau * chi(idx);
        freq[idx][0] = tau * freq_data[idx][0] + keep * freq[idx][0];
        freq[idx][1] = tau * freq_data[idx][1] + keep * freq[idx][1];
      }
    }

    fftw_execute(plan_c2r);  // spatial = side^2 * M * I^(k+1), pre-clamp

    // Positivity projection and norms, demodulating in place.
    double change_sq = 0.0;
    double prev_sq = 0.0;
    bool finite = true;
    for (int j = 0; j < side; ++j) {
      const std::size_t base = static_cast<std::size_t>(j) * side;
      for (int i = 0; i < side; ++i) {
        const double sign = ((i + j) & 1) ? -1.0 : 1.0;
        double value = sign * spatial[base + i] * inv_count;
        if (value < 0.0) value = 0.0;
        if (!std::isfinite(value)) finite = false;
        const double prev = image_prev[base + i];
        change_sq += (value - prev) * (value - prev);
        prev_sq += prev * prev;
        image[base + i] = value;
        spatial[base + i] = sign * value;
      }
    }
    if (!finite) throw DivergenceError("non-finite values in landweber iterate", k);

    fftw_execute(plan_r2c);  // freq = W(I^(k+1))

    double residual_sq = 0.0;
    for (std::size_t idx = 0; idx < half_count; ++idx) {
      if (chi(idx) == 0.0) continue;
      const double dr = freq[idx][0] - freq_data[idx][0];
      const double di = freq[idx][1] - freq_data[idx][1];
      residual_sq += weight(idx) * (dr * dr + di * di);
    }
    const double residual =
        pixel_size * pixel_size * std::sqrt(residual_sq);  // back to G units

    double rel_change;
    if (prev_sq > 0.0)
      rel_change = std::sqrt(change_sq / prev_sq);
    else
      rel_change = change_sq > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;

    result.log.push_back({k, residual, rel_change});
    std::swap(image, image_prev);
    if (rel_change < config.rel_change_tol) break;
  }

  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(plan_r2c);
    fftw_destroy_plan(plan_c2r);
  }

  Eigen::MatrixXd final_image(side, side);
  std::copy(image_prev.get(), image_prev.get() + count, final_image.data());
  result.image = ImageGrid(side, pixel_size, {0.0, 0.0}, std::move(final_image));
  return result;
}

ImageGrid reduce(const ImageGrid& image, const LandweberConfig& config) {
  config.validate();
  const int t = image.side;
  const int m = config.output_side;
  if (config.reduction == LandweberConfig::Reduction::center_crop) {
    if (t < m) throw ContractError("cannot crop to a larger side");
    if (t == m) return image;
    const int offset = (t - m) / 2;
    return ImageGrid(m, image.pixel_size, image.center,
                     image.data.block(offset, offset, m, m));
  }
  const int s = config.subsample;
  if (t != m * s) throw ContractError("mask_subsample needs side == output_side * subsample");
  Eigen::MatrixXd out(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) out(i, j) = image.data(s * i, s * j);
  return ImageGrid(m, image.pixel_size * s, image.center, std::move(out));
}

ReconstructResult reconstruct(const VisibilitySet& data, const KernelModel& kernel,
                              const std::optional<ScalingFunction>& scaling,
                              const ReconstructConfig& config,
                              const Eigen::MatrixXd* truth_modulus) {
  const auto start = std::chrono::steady_clock::now();
  data.validate();

  FrequencyGrid eval_grid(config.eval_side, config.eval_mesh);
  if (scaling &&
      scaling->eval_values.rows() != static_cast<Eigen::Index>(eval_grid.side) * eval_grid.side)
    throw ContractError("scaling eval features do not match the evaluation grid");

  const Interpolant interpolant = fit(kernel, data, scaling);
  const std::vector<UVPoint> targets = grid_coordinates(eval_grid);
  const std::vector<std::complex<double>> values =
      evaluate(interpolant, targets, scaling ? &scaling->eval_values : nullptr);
  for (int i = 0; i < eval_grid.side; ++i)
    for (int j = 0; j < eval_grid.side; ++j)
      eval_grid.data(i, j) = values[static_cast<std::size_t>(i) * eval_grid.side + j];

  const FrequencyGrid surface = hermitian_symmetrize(eval_grid);

  ReconstructResult result;
  result.report.algorithm = scaling ? "Land-VSK" : "Land-RBF";
  result.report.epsilon = kernel.epsilon;
  result.report.diagnostics =
      kernel_diagnostics(kernel, data.points, scaling ? &*scaling : nullptr);
  if (truth_modulus)
    result.report.rrmse = rrmse(surface.data.cwiseAbs(), *truth_modulus);

  LandweberConfig lw = config.landweber;
  if (config.auto_support) lw.support = SupportMask::block(config.eval_side);
  const FrequencyGrid projected = project_support(surface, lw.support);
  const FrequencyGrid padded = zero_pad(projected, lw.pad_side);
  LandweberResult lw_result = landweber(padded, lw);
  result.image = reduce(lw_result.image, lw);
  result.report.iterations = std::move(lw_result.log);

  result.report.total_flux =
      result.image.data.sum() * result.image.pixel_size * result.image.pixel_size;
  try {
    SourceExtraction extraction = extract_sources(result.image, config.max_report_peaks);
    result.report.peaks = std::move(extraction.peaks);
  } catch (const NumericError&) {
    // degenerate image; report simply carries no peaks
  }

  result.surface = surface;
  result.report.elapsed_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

}  // namespace vskf
