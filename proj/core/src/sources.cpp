#include "vskf/sources.hpp"

#include <cmath>
#include <map>
#include <numbers>
#include <random>
#include <utility>

namespace vskf {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

double ExpSource::decay() const { return 2.0 * std::numbers::ln2 / fwhm; }

double ExpSource::amplitude() const {
  const double b = decay();
  return flux * b * b / kTwoPi;
}

void SourceModel::validate() const {
  if (sources.empty()) throw ContractError("source model: no sources");
  for (const auto& s : sources) {
    if (!(s.fwhm > 0.0)) throw ContractError("source model: fwhm must be > 0");
    if (!(s.flux > 0.0)) throw ContractError("source model: flux must be > 0");
    if (!std::isfinite(s.position[0]) || !std::isfinite(s.position[1]))
      throw ContractError("source model: non-finite position");
  }
}

ImageGrid render_image(const SourceModel& model, const ImageGrid& geometry) {
  model.validate();
  ImageGrid out(geometry.side, geometry.pixel_size, geometry.center);
  for (const auto& s : model.sources) {
    const double a = s.amplitude();
    const double b = s.decay();
    for (int i = 0; i < out.side; ++i)
      for (int j = 0; j < out.side; ++j) {
        const auto x = out.coordinate(i, j);
        const double r = std::hypot(x[0] - s.position[0], x[1] - s.position[1]);
        out.data(i, j) += a * std::exp(-b * r);
      }
  }
  return out;
}

std::complex<double> exact_visibility(const SourceModel& model, const UVPoint& point) {
  model.validate();
  const double q2 = point.u * point.u + point.v * point.v;
  std::complex<double> value = 0.0;
  for (const auto& s : model.sources) {
    const double b = s.decay();
    const double denom = std::pow(b * b + kTwoPi * kTwoPi * q2, 1.5);
    const double modulus = s.amplitude() * kTwoPi * b / denom;
    const double phase = kTwoPi * (point.u * s.position[0] + point.v * s.position[1]);
    value += modulus * std::complex<double>(std::cos(phase), std::sin(phase));
  }
  return value;
}

VisibilitySet simulate_visibilities(const SourceModel& model,
                                    const std::vector<UVPoint>& pattern,
                                    double noise_sigma, std::uint64_t seed) {
  if (noise_sigma < 0.0) throw ContractError("noise sigma must be >= 0");
  VisibilitySet out;
  out.points = pattern;
  out.values.resize(pattern.size());

  // Value-keyed index so that -0.0 and +0.0 coincide and the origin self-pairs.
  std::map<std::pair<double, double>, std::size_t> index;
  for (std::size_t i = 0; i < pattern.size(); ++i)
    index.emplace(std::make_pair(pattern[i].u, pattern[i].v), i);

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<bool> done(pattern.size(), false);

  for (std::size_t i = 0; i < pattern.size(); ++i) {
    if (done[i]) continue;
    const std::complex<double> exact = exact_visibility(model, pattern[i]);
    auto mate = index.find(std::make_pair(-pattern[i].u, -pattern[i].v));
    const std::size_t j = mate == index.end() ? i : mate->second;
    if (j == i) {
      // Unpaired node, or the self-paired origin (forced real there).
      const bool self_paired = mate != index.end();
      const double re = exact.real() + noise_sigma * gauss(rng);
      const double im =
          self_paired ? 0.0 : exact.imag() + noise_sigma * gauss(rng);
      out.values[i] = {re, im};
      done[i] = true;
    } else {
      const double re = exact.real() + noise_sigma * gauss(rng);
      const double im = exact.imag() + noise_sigma * gauss(rng);
      out.values[i] = {re, im};
      out.values[j] = std::conj(out.values[i]);
      done[i] = done[j] = true;
    }
  }
  return out;
}

}  // namespace vskf
