#include <benchmark/benchmark.h>

#include <complex>
#include <vector>

#include "vskf/fft.hpp"
#include "vskf/inversion.hpp"
#include "vskf/kernels.hpp"
#include "vskf/sampling.hpp"
#include "vskf/scaling.hpp"
#include "vskf/sources.hpp"

using namespace vskf;

namespace {

const KernelModel kMatern{KernelFamily::matern_c0, 0.01};

VisibilitySet ring_data() {
  const SourceModel model{{ExpSource{{-15.0, -15.0}, 11.0, 4.88e3},
                           ExpSource{{15.0, 15.0}, 11.0, 4.88e3}}};
  return simulate_visibilities(model, stix_nodes(6), 0.0, 1);
}

void bm_kernel_matrix(benchmark::State& state) {
  const VisibilitySet data = ring_data();
  for (auto _ : state) benchmark::DoNotOptimize(kernel_matrix(kMatern, data.points));
}
BENCHMARK(bm_kernel_matrix);

void bm_fit(benchmark::State& state) {
  const VisibilitySet data = ring_data();
  for (auto _ : state) benchmark::DoNotOptimize(fit(kMatern, data));
}
BENCHMARK(bm_fit);

void bm_evaluate_grid(benchmark::State& state) {
  const VisibilitySet data = ring_data();
  const Interpolant interp = fit(kMatern, data);
  const auto targets = grid_coordinates(FrequencyGrid(64, 2e-3));
  for (auto _ : state) benchmark::DoNotOptimize(evaluate(interp, targets));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(targets.size()));
}
BENCHMARK(bm_evaluate_grid);

void bm_power_scan(benchmark::State& state) {
  const VisibilitySet data = ring_data();
  const auto targets = subsampled_disk_targets(FrequencyGrid(320, 5e-4), 0.07, 16);
  for (auto _ : state) {
    const PowerEvaluator evaluator(kMatern, data.points);
    double worst = 0.0;
    for (const UVPoint& t : targets) worst = std::max(worst, evaluator.at(t));
    benchmark::DoNotOptimize(worst);
  }
}
BENCHMARK(bm_power_scan);

void bm_back_project(benchmark::State& state) {
  const VisibilitySet data = ring_data();
  for (auto _ : state) benchmark::DoNotOptimize(back_project(data));
}
BENCHMARK(bm_back_project);

void bm_build_scaling(benchmark::State& state) {
  const VisibilitySet data = ring_data();
  const FrequencyGrid grid(64, 2e-3);
  for (auto _ : state) benchmark::DoNotOptimize(build_scaling(data, grid));
}
BENCHMARK(bm_build_scaling);

void bm_forward_transform(benchmark::State& state) {
  ImageGrid image(128, 1.0);
  image.data = Eigen::MatrixXd::Random(128, 128).cwiseAbs();
  for (auto _ : state) benchmark::DoNotOptimize(forward_transform(image));
}
BENCHMARK(bm_forward_transform);

void bm_landweber(benchmark::State& state) {
  Eigen::MatrixXcd raw = Eigen::MatrixXcd::Random(64, 64);
  const SupportMask band = SupportMask::block(64);
  const FrequencyGrid data =
      project_support(hermitian_symmetrize(FrequencyGrid(64, 5e-4, raw)), band);
  LandweberConfig cfg;
  cfg.support = band;
  cfg.max_iterations = static_cast<int>(state.range(0));
  cfg.rel_change_tol = 0.0;
  cfg.pad_side = 256;
  cfg.output_side = 64;
  const FrequencyGrid padded = zero_pad(data, 256);
  for (auto _ : state) benchmark::DoNotOptimize(landweber(padded, cfg));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(bm_landweber)->Arg(10);

}  // namespace

BENCHMARK_MAIN();
