#include <algorithm>
#include <random>

#include "doctest.h"
#include "jsmreg/evaluation.hpp"
#include "jsmreg/synth.hpp"

using namespace jsmreg;

TEST_CASE("landmark error examples") {
  const LandmarkSet same{{{10, 10}, {10, 10}}, {{20, 5}, {20, 5}}};
  const ErrorReport zero = landmark_error(same, zero_field(32, 32));
  CHECK(zero.mean == 0.0);
  CHECK(zero.sd == 0.0);

  const LandmarkSet off{{{10, 10}, {13, 14}}, {{2, 3}, {5, 7}}};
  const ErrorReport five = landmark_error(off, zero_field(32, 32));
  CHECK(five.mean == doctest::Approx(5.0));
  CHECK(five.sd == doctest::Approx(0.0));

  // The field carries the reference point onto the moving one.
  CHECK(landmark_error(off, DenseDeformationField(32, 32, Vec2{3, 4})).mean == doctest::Approx(0.0));
}

TEST_CASE("out of bounds landmarks name their index") {
  const LandmarkSet lm{{{1, 1}, {1, 1}}, {{4, 4}, {40, 4}}};
  try {
    landmark_error(lm, zero_field(32, 32));
    FAIL("expected InvalidInput");
  } catch (const InvalidInput& e) {
    CHECK(std::string(e.what()).find("landmark 1") != std::string::npos);
  }
}

TEST_CASE("summary statistics") {
  const ErrorReport r = summarize_errors({1.0, 3.0});
  CHECK(r.mean == 2.0);
  CHECK(r.sd == 1.0);
  CHECK(summarize_errors({}).mean == 0.0);
}

TEST_CASE("summary is permutation invariant") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 4.0);
  std::vector<double> e(500);
  for (double& v : e) v = u(rng);
  const ErrorReport a = summarize_errors(e);
  std::shuffle(e.begin(), e.end(), rng);
  const ErrorReport b = summarize_errors(e);
  CHECK(a.mean == doctest::Approx(b.mean).epsilon(1e-12));
  CHECK(a.sd == doctest::Approx(b.sd).epsilon(1e-12));
}

TEST_CASE("field error with and without a mask") {
  const DenseDeformationField truth(8, 8, Vec2{1, 0});
  DenseDeformationField est(8, 8, Vec2{1, 0});
  est(2, 3) = {4, 4};
  const ErrorReport all = field_error(est, truth);
  CHECK(all.errors.size() == 64);
  CHECK(all.mean == doctest::Approx(5.0 / 64));
  Grid<char> mask(8, 8, 0);
  mask(2, 3) = 1;
  const ErrorReport masked = field_error(est, truth, mask);
  CHECK(masked.errors.size() == 63);
  CHECK(masked.mean == 0.0);
  CHECK_THROWS_AS(field_error(est, zero_field(8, 7)), InvalidInput);
  CHECK_THROWS_AS(field_error(est, truth, Grid<char>(7, 8, 0)), InvalidInput);
}

TEST_CASE("landmark error agrees with field error at grid landmarks") {
  const auto fx = synth::bump_fixture(3, 96);
  const LandmarkSet lm = synth::grid_landmarks(fx.truth, 8, 8);
  REQUIRE(!lm.empty());
  DenseDeformationField est = fx.truth;
  for (Vec2& v : est.values()) v = v + Vec2{0.3, -0.4};
  const ErrorReport r = landmark_error(lm, est);
  CHECK(r.mean == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(field_error(est, fx.truth).mean == doctest::Approx(0.5).epsilon(1e-9));
}
