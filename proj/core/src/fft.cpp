#include "vskf/fft.hpp"

#include <complex>
#include <cstring>
#include <mutex>
#include <numbers>

#include <fftw3.h>

namespace vskf {

namespace {

// FFTW's planner is not thread-safe; executing distinct plans is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

constexpr double kTwoPi = 2.0 * std::numbers::pi;

}  // namespace

struct CenteredTransform::Impl {
  int side;
  fftw_complex* in;
  fftw_complex* out;
  fftw_plan plan_plus;   // e^(+2*pi*i*...) kernel (FFTW_BACKWARD)
  fftw_plan plan_minus;  // e^(-2*pi*i*...) kernel (FFTW_FORWARD)

  explicit Impl(int side) : side(side) {
    if (side < 2 || side % 2 != 0)
      throw ContractError("transform side must be even and >= 2");
    const std::size_t count = static_cast<std::size_t>(side) * side;
    in = fftw_alloc_complex(count);
    out = fftw_alloc_complex(count);
    if (!in || !out) {
      fftw_free(in);
      fftw_free(out);
      throw std::bad_alloc();
    }
    std::lock_guard<std::mutex> lock(planner_mutex());
    plan_plus = fftw_plan_dft_2d(side, side, in, out, FFTW_BACKWARD, FFTW_ESTIMATE);
    plan_minus = fftw_plan_dft_2d(side, side, in, out, FFTW_FORWARD, FFTW_ESTIMATE);
  }

  ~Impl() {
    {
      std::lock_guard<std::mutex> lock(planner_mutex());
      fftw_destroy_plan(plan_plus);
      fftw_destroy_plan(plan_minus);
    }
    fftw_free(in);
    fftw_free(out);
  }

  // Centered DFT of an even-sided square grid. For even side,
  //   sum_kl A(k,l) e^(s*2*pi*i*((i-S/2)(k-S/2)+(j-S/2)(l-S/2))/S)
  // equals (-1)^(i+j) * DFT_s[(-1)^(k+l) * A](i,j); the modulation replaces
  // explicit fftshift rolls. Works identically on Eigen's column-major data
  // because the 2-D kernel is symmetric in its axes.
  Eigen::MatrixXcd execute(const Eigen::MatrixXcd& a, bool plus_sign) {
    if (a.rows() != side || a.cols() != side)
      throw ContractError("transform input does not match planned side");
    Eigen::MatrixXcd tmp(side, side);
    for (int j = 0; j < side; ++j)
      for (int i = 0; i < side; ++i)
        tmp(i, j) = ((i + j) & 1) ? -a(i, j) : a(i, j);
    std::memcpy(in, static_cast<const void*>(tmp.data()), sizeof(fftw_complex) * tmp.size());
    fftw_execute(plus_sign ? plan_plus : plan_minus);
    std::memcpy(static_cast<void*>(tmp.data()), out, sizeof(fftw_complex) * tmp.size());
    for (int j = 0; j < side; ++j)
      for (int i = 0; i < side; ++i)
        if ((i + j) & 1) tmp(i, j) = -tmp(i, j);
    return tmp;
  }
};

CenteredTransform::CenteredTransform(int side) : impl_(std::make_unique<Impl>(side)) {}

CenteredTransform::~CenteredTransform() = default;

int CenteredTransform::side() const { return impl_->side; }

Eigen::MatrixXcd CenteredTransform::image_to_frequency(const Eigen::MatrixXcd& image,
                                                       double pixel_size,
                                                       std::array<double, 2> center) {
  if (!(pixel_size > 0.0)) throw ContractError("pixel size must be > 0");
  const int s = impl_->side;
  Eigen::MatrixXcd result = impl_->execute(image, /*plus_sign=*/true);
  const double scale = pixel_size * pixel_size;
  result *= scale;
  if (center[0] != 0.0 || center[1] != 0.0) {
    const double mesh = 1.0 / (s * pixel_size);
    for (int j = 0; j < s; ++j)
      for (int i = 0; i < s; ++i) {
        const double qu = (i - s / 2) * mesh;
        const double qv = (j - s / 2) * mesh;
        const double phase = kTwoPi * (qu * center[0] + qv * center[1]);
        result(i, j) *= std::complex<double>(std::cos(phase), std::sin(phase));
      }
  }
  return result;
}

Eigen::MatrixXcd CenteredTransform::frequency_to_image(const Eigen::MatrixXcd& grid,
                                                       double mesh,
                                                       std::array<double, 2> center) {
  if (!(mesh > 0.0)) throw ContractError("mesh must be > 0");
  const int s = impl_->side;
  Eigen::MatrixXcd input = grid;
  if (center[0] != 0.0 || center[1] != 0.0) {
    for (int j = 0; j < s; ++j)
      for (int i = 0; i < s; ++i) {
        const double qu = (i - s / 2) * mesh;
        const double qv = (j - s / 2) * mesh;
        const double phase = -kTwoPi * (qu * center[0] + qv * center[1]);
        input(i, j) *= std::complex<double>(std::cos(phase), std::sin(phase));
      }
  }
  Eigen::MatrixXcd result = impl_->execute(input, /*plus_sign=*/false);
  result *= mesh * mesh;
  return result;
}

FrequencyGrid forward_transform(const ImageGrid& image) {
  CenteredTransform transform(image.side);
  const double mesh = 1.0 / (image.side * image.pixel_size);
  Eigen::MatrixXcd data =
      transform.image_to_frequency(image.data.cast<std::complex<double>>(),
                                   image.pixel_size, image.center);
  return FrequencyGrid(image.side, mesh, std::move(data));
}

ImageGrid inverse_transform(const FrequencyGrid& grid, std::array<double, 2> center) {
  CenteredTransform transform(grid.side);
  const double pixel_size = 1.0 / (grid.side * grid.mesh);
  Eigen::MatrixXcd data = transform.frequency_to_image(grid.data, grid.mesh, center);
  return ImageGrid(grid.side, pixel_size, center, data.real());
}

FrequencyGrid hermitian_symmetrize(const FrequencyGrid& grid) {
  const int s = grid.side;
  Eigen::MatrixXcd out(s, s);
  for (int j = 0; j < s; ++j)
    for (int i = 0; i < s; ++i) {
      const int ri = (s - i) % s;
      const int rj = (s - j) % s;
      out(i, j) = 0.5 * (grid.data(i, j) + std::conj(grid.data(ri, rj)));
    }
  return FrequencyGrid(s, grid.mesh, std::move(out));
}

FrequencyGrid zero_pad(const FrequencyGrid& grid, int pad_side) {
  if (pad_side == grid.side) return grid;
  if (pad_side < grid.side) throw ContractError("pad side must be >= grid side");
  if (pad_side % 2 != 0) throw ContractError("pad side must be even");
  FrequencyGrid out(pad_side, grid.mesh);
  const int offset = (pad_side - grid.side) / 2;
  out.data.block(offset, offset, grid.side, grid.side) = grid.data;
  return out;
}

FrequencyGrid project_support(const FrequencyGrid& grid, const SupportMask& mask) {
  FrequencyGrid out = grid;
  if (mask.kind == SupportMask::Kind::full) return out;
  const Eigen::MatrixXd realized = mask_realize(mask, grid);
  out.data = out.data.cwiseProduct(realized.cast<std::complex<double>>());
  return out;
}

}  // namespace vskf
