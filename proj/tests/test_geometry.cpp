#include <doctest.h>

#include "vskf/geometry.hpp"

using namespace vskf;

TEST_SUITE_BEGIN("geometry");

TEST_CASE("frequency grid centering convention") {
  FrequencyGrid g2(2, 0.5);
  CHECK(g2.coordinate(1, 1).u == doctest::Approx(0.0));
  CHECK(g2.coordinate(1, 1).v == doctest::Approx(0.0));

  FrequencyGrid g4(4, 0.5);
  CHECK(g4.coordinate(0, 0).u == doctest::Approx(-1.0));
  CHECK(g4.coordinate(0, 0).v == doctest::Approx(-1.0));

  ImageGrid img(128, 1.0);
  const auto c = img.coordinate(64, 64);
  CHECK(c[0] == doctest::Approx(0.0));
  CHECK(c[1] == doctest::Approx(0.0));
}

TEST_CASE("grid_coordinates is row-major and matches coordinate()") {
  FrequencyGrid g(4, 0.25);
  const auto coords = grid_coordinates(g);
  REQUIRE(coords.size() == 16);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      const UVPoint& p = coords[static_cast<std::size_t>(i) * 4 + j];
      CHECK(p.u == g.coordinate(i, j).u);
      CHECK(p.v == g.coordinate(i, j).v);
    }
}

TEST_CASE("coordinate symmetry under index negation") {
  FrequencyGrid g(8, 0.1);
  for (int i = 1; i < 8; ++i)
    for (int j = 1; j < 8; ++j) {
      const UVPoint p = g.coordinate(i, j);
      const UVPoint m = g.coordinate(8 - i, 8 - j);
      CHECK(p.u == doctest::Approx(-m.u));
      CHECK(p.v == doctest::Approx(-m.v));
    }
}

TEST_CASE("grid validation") {
  CHECK_THROWS_AS(FrequencyGrid(1, 0.5), ContractError);
  CHECK_THROWS_AS(FrequencyGrid(3, 0.5), ContractError);
  CHECK_THROWS_AS(FrequencyGrid(4, 0.0), ContractError);
  CHECK_THROWS_AS(ImageGrid(4, -1.0), ContractError);
  CHECK_THROWS_AS(ImageGrid(4, 1.0, {0.0, 0.0}, Eigen::MatrixXd::Zero(3, 4)),
                  ContractError);
}

TEST_CASE("visibility set validation") {
  VisibilitySet ok;
  ok.points = {{0.0, 0.0}, {0.1, 0.0}};
  ok.values = {{1.0, 0.0}, {0.5, 0.5}};
  CHECK_NOTHROW(ok.validate());

  VisibilitySet mismatch = ok;
  mismatch.values.pop_back();
  CHECK_THROWS_AS(mismatch.validate(), ContractError);

  VisibilitySet dup = ok;
  dup.points[1] = dup.points[0];
  CHECK_THROWS_AS(dup.validate(), ContractError);

  VisibilitySet nan = ok;
  nan.points[0].u = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(nan.validate(), ContractError);

  VisibilitySet empty;
  CHECK_THROWS_AS(empty.validate(), ContractError);
}

TEST_CASE("disk masks") {
  FrequencyGrid g2(2, 0.5);
  CHECK(mask_realize(SupportMask::disk(1.0), g2).sum() == doctest::Approx(4.0));

  FrequencyGrid g8(8, 0.1);
  const Eigen::MatrixXd tiny = mask_realize(SupportMask::disk(1e-4), g8);
  CHECK(tiny.sum() == doctest::Approx(1.0));
  CHECK(tiny(4, 4) == doctest::Approx(1.0));

  CHECK(mask_realize(SupportMask::full(), g8).sum() == doctest::Approx(64.0));

  // Monotonicity in the radius.
  const Eigen::MatrixXd small = mask_realize(SupportMask::disk(0.2), g8);
  const Eigen::MatrixXd large = mask_realize(SupportMask::disk(0.35), g8);
  CHECK(((large - small).array() >= 0.0).all());

  CHECK_THROWS_AS(SupportMask::disk(0.0), ContractError);
  CHECK_THROWS_AS(SupportMask::disk(-1.0), ContractError);
}

TEST_CASE("block masks keep the symmetric core and drop the unpaired edge") {
  FrequencyGrid g(8, 0.1);
  const Eigen::MatrixXd m = mask_realize(SupportMask::block(8), g);
  CHECK(m.sum() == doctest::Approx(49.0));  // (8-1)^2 core
  CHECK(m.row(0).sum() == 0.0);
  CHECK(m.col(0).sum() == 0.0);
  // Symmetric under the periodic index negation that pairs conjugate samples.
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j) CHECK(m(i, j) == m((8 - i) % 8, (8 - j) % 8));

  const Eigen::MatrixXd inner = mask_realize(SupportMask::block(4), g);
  CHECK(inner.sum() == doctest::Approx(9.0));
  CHECK(inner(4, 4) == 1.0);
  CHECK(inner(3, 3) == 1.0);
  CHECK(inner(5, 5) == 1.0);
  CHECK(inner(2, 4) == 0.0);

  CHECK_THROWS_AS(SupportMask::block(3), ContractError);
  CHECK_THROWS_AS(SupportMask::block(0), ContractError);
  CHECK_THROWS_AS(mask_realize(SupportMask::block(10), g), ContractError);
}

TEST_SUITE_END();
