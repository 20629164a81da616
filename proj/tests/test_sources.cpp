#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "vskf/sampling.hpp"
#include "vskf/sources.hpp"

using namespace vskf;

TEST_SUITE_BEGIN("sources");

TEST_CASE("exponential source profile constants") {
  const ExpSource s{{0.0, 0.0}, 11.0, 1e4};
  CHECK(s.decay() == doctest::Approx(2.0 * std::numbers::ln2 / 11.0).epsilon(1e-14));
  CHECK(s.amplitude() ==
        doctest::Approx(1e4 * s.decay() * s.decay() / (2.0 * std::numbers::pi))
            .epsilon(1e-14));
}

TEST_CASE("render_image hits the profile pointwise") {
  const ExpSource s{{3.0, -2.0}, 11.0, 1e4};
  const SourceModel model{{s}};
  // center chosen so one pixel lands exactly on the source position
  ImageGrid geom(64, 1.0, {3.0, -2.0});
  const ImageGrid img = render_image(model, geom);

  CHECK(img.data(32, 32) == doctest::Approx(s.amplitude()).epsilon(1e-12));
  // value at distance fwhm/2 is half the peak
  ImageGrid fine(64, 5.5, {3.0 + 5.5, -2.0});
  const ImageGrid img2 = render_image(model, fine);
  CHECK(img2.data(32, 32) == doctest::Approx(0.5 * s.amplitude()).epsilon(1e-12));

  CHECK((img.data.array() > 0.0).all());
}

TEST_CASE("render_image flux converges to the model flux") {
  const SourceModel model{{ExpSource{{0.0, 0.0}, 11.0, 1e4}}};
  const ImageGrid img = render_image(model, ImageGrid(256, 1.0));
  const double total = img.data.sum() * img.pixel_size * img.pixel_size;
  CHECK(total == doctest::Approx(1e4).epsilon(0.02));
}

TEST_CASE("exact_visibility closed form") {
  const SourceModel model{{ExpSource{{0.0, 0.0}, 11.0, 1e4}}};
  CHECK(exact_visibility(model, {0.0, 0.0}).real() == doctest::Approx(1e4).epsilon(1e-12));
  CHECK(exact_visibility(model, {0.0, 0.0}).imag() == doctest::Approx(0.0));

  // centered source: purely real spectrum
  for (const UVPoint u : {UVPoint{0.05, 0.0}, UVPoint{0.01, -0.03}, UVPoint{-0.2, 0.1}})
    CHECK(std::abs(exact_visibility(model, u).imag()) < 1e-12 * 1e4);

  // Hermitian symmetry for an asymmetric configuration (nonzero imag part)
  const SourceModel two{{ExpSource{{-15.0, -15.0}, 11.0, 4.88e3},
                         ExpSource{{10.0, 15.0}, 9.0, 5.2e3}}};
  for (const UVPoint u : {UVPoint{0.03, 0.01}, UVPoint{-0.07, 0.02}}) {
    const auto plus = exact_visibility(two, u);
    const auto minus = exact_visibility(two, {-u.u, -u.v});
    CHECK(std::abs(plus.imag()) > 0.0);
    CHECK(minus.real() == doctest::Approx(plus.real()).epsilon(1e-13));
    CHECK(minus.imag() == doctest::Approx(-plus.imag()).epsilon(1e-13));
  }
}

TEST_CASE("exact_visibility matches the 2-D quadrature oracle") {
  const SourceModel model{{ExpSource{{-15.0, -15.0}, 11.0, 4.88e3},
                           ExpSource{{15.0, 15.0}, 9.0, 5.0e3}}};
  for (const UVPoint u : {UVPoint{0.0, 0.0}, UVPoint{0.02, -0.05}, UVPoint{0.1, 0.07}}) {
    const auto fast = exact_visibility(model, u);
    const auto slow = oracle::quadrature_visibility(model, u);
    CHECK(std::abs(fast - slow) < 1e-6 * std::abs(slow));
  }
}

TEST_CASE("simulate_visibilities without noise reproduces the closed form") {
  const SourceModel model{{ExpSource{{5.0, 1.0}, 11.0, 1e4}}};
  const auto pattern = stix_nodes(6);
  const VisibilitySet set = simulate_visibilities(model, pattern, 0.0, 1);
  REQUIRE(set.size() == pattern.size());
  for (std::size_t i = 0; i < set.size(); ++i) {
    const auto exact = exact_visibility(model, set.points[i]);
    CHECK(set.values[i].real() == doctest::Approx(exact.real()).epsilon(1e-14));
    CHECK(set.values[i].imag() == doctest::Approx(exact.imag()).epsilon(1e-14));
  }
}

TEST_CASE("simulate_visibilities is deterministic and scrambles across seeds") {
  const SourceModel model{{ExpSource{{0.0, 0.0}, 11.0, 1e4}}};
  const auto pattern = stix_nodes(6);
  const VisibilitySet a = simulate_visibilities(model, pattern, 100.0, 7);
  const VisibilitySet b = simulate_visibilities(model, pattern, 100.0, 7);
  const VisibilitySet c = simulate_visibilities(model, pattern, 100.0, 8);
  bool ab_equal = true, ac_equal = true;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ab_equal = ab_equal && a.values[i] == b.values[i];
    ac_equal = ac_equal && a.values[i] == c.values[i];
  }
  CHECK(ab_equal);
  CHECK_FALSE(ac_equal);
}

TEST_CASE("noise keeps Hermitian pairing exactly") {
  const SourceModel model{{ExpSource{{-15.0, -15.0}, 11.0, 4.88e3},
                           ExpSource{{15.0, 15.0}, 11.0, 4.88e3}}};
  const auto pattern = stix_nodes(6);
  const VisibilitySet set = simulate_visibilities(model, pattern, 488.0, 3);
  for (std::size_t i = 0; i < set.size(); ++i) {
    // locate the exact negation partner
    for (std::size_t j = 0; j < set.size(); ++j) {
      if (set.points[j].u == -set.points[i].u && set.points[j].v == -set.points[i].v) {
        CHECK(set.values[j].real() == set.values[i].real());
        CHECK(set.values[j].imag() == -set.values[i].imag());
        break;
      }
    }
  }
}

TEST_CASE("self-paired origin node draws real noise only") {
  const SourceModel model{{ExpSource{{0.0, 0.0}, 11.0, 1e4}}};
  const std::vector<UVPoint> pattern{{0.0, 0.0}, {0.05, 0.0}, {-0.05, 0.0}};
  const VisibilitySet set = simulate_visibilities(model, pattern, 200.0, 5);
  CHECK(set.values[0].imag() == 0.0);
  CHECK(set.values[0].real() != doctest::Approx(1e4).epsilon(1e-12));
}

TEST_CASE("empirical noise level matches the requested sigma") {
  const SourceModel model{{ExpSource{{-15.0, -15.0}, 11.0, 4.88e3},
                           ExpSource{{15.0, 15.0}, 11.0, 4.88e3}}};
  const auto pattern = stix_nodes(6);
  const double sigma = 0.05 * std::abs(exact_visibility(model, {0.0, 0.0}));
  const std::size_t node = 17;
  const double exact_re = exact_visibility(model, pattern[node]).real();

  const int reps = 1000;
  double sum = 0.0, sum_sq = 0.0;
  for (int r = 0; r < reps; ++r) {
    const VisibilitySet set =
        simulate_visibilities(model, pattern, sigma, static_cast<std::uint64_t>(r + 1));
    const double d = set.values[node].real() - exact_re;
    sum += d;
    sum_sq += d * d;
  }
  const double mean = sum / reps;
  const double sd = std::sqrt(sum_sq / reps - mean * mean);
  CHECK(sd == doctest::Approx(sigma).epsilon(0.10));
}

TEST_CASE("model validation") {
  CHECK_THROWS_AS(SourceModel{}.validate(), ContractError);
  SourceModel bad{{ExpSource{{0.0, 0.0}, 0.0, 1.0}}};
  CHECK_THROWS_AS(bad.validate(), ContractError);
  SourceModel bad2{{ExpSource{{0.0, 0.0}, 11.0, -1.0}}};
  CHECK_THROWS_AS(bad2.validate(), ContractError);
  const SourceModel ok{{ExpSource{{0.0, 0.0}, 11.0, 1.0}}};
  CHECK_NOTHROW(ok.validate());
  CHECK_THROWS_AS(simulate_visibilities(ok, stix_nodes(6), -1.0, 1), ContractError);
}

TEST_SUITE_END();
