#include <cmath>
#include <random>

#include "doctest.h"
#include "jsmreg/kernel_regression.hpp"
#include "support.hpp"

using namespace jsmreg;

namespace {

SparseDisplacementField grid_samples(int w, int h, int step, std::uint64_t seed, bool random_conf) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-3.0, 3.0), c(0.2, 1.0);
  SparseDisplacementField f;
  for (int y = 2; y < h; y += step) {
    for (int x = 2; x < w; x += step) {
      f.samples.push_back({{double(x), double(y)}, {u(rng), u(rng)}, random_conf ? c(rng) : 1.0});
    }
  }
  return f;
}

Tensor2 rotate(const Tensor2& t, double th) {
  const double c = std::cos(th), s = std::sin(th);
  // R T Rᵀ
  const double a = c * c * t.xx - 2 * c * s * t.xy + s * s * t.yy;
  const double b = c * s * (t.xx - t.yy) + (c * c - s * s) * t.xy;
  const double d = s * s * t.xx + 2 * c * s * t.xy + c * c * t.yy;
  return {a, b, d};
}

}  // namespace

TEST_CASE("steering covariance shapes") {
  const SteeringKernel iso = steering_covariance(Tensor2{}, 3.0);
  CHECK(iso.covariance.xx == doctest::Approx(9.0));
  CHECK(iso.covariance.yy == doctest::Approx(9.0));
  CHECK(iso.covariance.xy == doctest::Approx(0.0));

  const SteeringKernel edge = steering_covariance(Tensor2{1, 0, 0}, 2.0);
  CHECK(edge.std_along == doctest::Approx(4.0));
  CHECK(edge.std_across == doctest::Approx(1.0));
  CHECK(edge.covariance.yy == doctest::Approx(16.0));  // long axis vertical
  CHECK(edge.covariance.xx == doctest::Approx(1.0));
  CHECK(edge.inverse.yy == doctest::Approx(1.0 / 16.0));
  CHECK(edge.std_along * edge.std_across == doctest::Approx(4.0));

  CHECK_THROWS_AS(steering_covariance(Tensor2{}, 0.5), InvalidInput);
}

TEST_CASE("steering covariance is rotation equivariant") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0), ang(0.0, 2 * M_PI);
  for (int i = 0; i < 100; ++i) {
    const double a = u(rng), b = u(rng), c = u(rng);
    const Tensor2 t{a * a + b * b, a * c, c * c + 0.1};
    const double th = ang(rng);
    const double sd = 1.0 + 4.0 * u(rng);
    const Tensor2 lhs = steering_covariance(rotate(t, th), sd).covariance;
    const Tensor2 rhs = rotate(steering_covariance(t, sd).covariance, th);
    CHECK(lhs.xx == doctest::Approx(rhs.xx).epsilon(1e-9));
    CHECK(lhs.xy == doctest::Approx(rhs.xy).scale(10).epsilon(1e-9));
    CHECK(lhs.yy == doctest::Approx(rhs.yy).epsilon(1e-9));
    const Tensor2 cov = steering_covariance(t, sd).covariance;
    const Eigen2 e = eigen_decompose(cov);
    CHECK(e.minor > 0.0);
    CHECK(e.major / e.minor <= 16.0 * (1 + 1e-9));  // std ratio <= 4
  }
}

TEST_CASE("constant samples are reproduced") {
  SparseDisplacementField f = grid_samples(40, 40, 5, 1, true);
  for (auto& s : f.samples) s.displacement = {1.25, -0.5};
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  ScalarMap js(40, 40), ks(40, 40);
  for (double& v : js.values()) v = 0.05 + u(rng);
  for (double& v : ks.values()) v = 1.0 + 10 * u(rng);
  const DenseDeformationField z = regress_dense(f, js, ks, StructureTensorField(40, 40));
  for (const Vec2& v : z.values()) {
    CHECK(v.x == doctest::Approx(1.25).epsilon(1e-9));
    CHECK(v.y == doctest::Approx(-0.5).epsilon(1e-9));
  }
}

TEST_CASE("isotropic regression matches the brute-force oracle") {
  const int n = 32;
  const SparseDisplacementField f = grid_samples(n, n, 4, 2, false);
  const ScalarMap js(n, n, 1.0), ks(n, n, 2.5);
  const DenseDeformationField z = regress_dense(f, js, ks, StructureTensorField(n, n));
  const std::vector<Tensor2> inv(n * n, Tensor2{1 / 6.25, 0, 1 / 6.25});
  const DenseDeformationField o = support::oracle_regression(f, js, inv, n, n);
  for (std::size_t i = 0; i < z.size(); ++i) {
    CHECK(std::abs(z.values()[i].x - o.values()[i].x) < 1e-9);
    CHECK(std::abs(z.values()[i].y - o.values()[i].y) < 1e-9);
  }
}

TEST_CASE("steered, JSM-weighted regression matches the oracle") {
  const int n = 64;
  const SparseDisplacementField f = grid_samples(n, n, 4, 7, true);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  ScalarMap js(n, n), ks(n, n);
  StructureTensorField lst(n, n);
  for (double& v : js.values()) v = 0.1 + 0.9 * u(rng);
  for (double& v : ks.values()) v = 2.0 + 3.0 * u(rng);
  for (Tensor2& t : lst.values()) {
    const double a = u(rng), b = u(rng) - 0.5, c = u(rng);
    t = {a * a + b * b, (a + c) * b, c * c + b * b};
  }
  std::vector<Tensor2> inv(n * n);
  for (int y = 0; y < n; ++y) {
    for (int x = 0; x < n; ++x) inv[y * n + x] = steering_covariance(lst(x, y), ks(x, y)).inverse;
  }
  RegressionStats stats;
  const DenseDeformationField z = regress_dense(f, js, ks, lst, &stats);
  REQUIRE(stats.pixels_widened == 0);
  const DenseDeformationField o = support::oracle_regression(f, js, inv, n, n);
  double worst = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) worst = std::max(worst, (z.values()[i] - o.values()[i]).norm());
  CHECK(worst < 1e-9);
}

TEST_CASE("zero-weight samples are ignored") {
  SparseDisplacementField f;
  f.samples.push_back({{10, 10}, {5, 0}, 1.0});
  f.samples.push_back({{12, 10}, {-5, 0}, 1.0});
  ScalarMap js(24, 24, 1.0);
  js(12, 10) = 0.0;
  const DenseDeformationField z = regress_dense(f, js, ScalarMap(24, 24, 2.0), StructureTensorField(24, 24));
  for (const Vec2 p : {Vec2{10, 10}, Vec2{12, 10}, Vec2{0, 23}}) {  // the last needs support doubling
    CHECK(z(int(p.x), int(p.y)).x == doctest::Approx(5.0).epsilon(1e-12));
    CHECK(z(int(p.x), int(p.y)).y == 0.0);
  }
}

TEST_CASE("far samples do not change the estimate") {
  const int n = 48;
  SparseDisplacementField f = grid_samples(24, 24, 4, 9, false);
  const ScalarMap js(n, n, 1.0), ks(n, n, 1.5);
  const DenseDeformationField a = regress_dense(f, js, ks, StructureTensorField(n, n));
  f.samples.push_back({{46, 46}, {9, 9}, 1.0});
  const DenseDeformationField b = regress_dense(f, js, ks, StructureTensorField(n, n));
  for (int y = 0; y < 20; ++y) {
    for (int x = 0; x < 20; ++x) CHECK(a(x, y) == b(x, y));
  }
}

TEST_CASE("raising a sample's JS moves the estimate toward it") {
  const int n = 24;
  const SparseDisplacementField f = grid_samples(n, n, 4, 13, false);
  ScalarMap js(n, n, 0.5);
  const ScalarMap ks(n, n, 3.0);
  const DenseDeformationField before = regress_dense(f, js, ks, StructureTensorField(n, n));
  const SparseSample& target = f.samples[7];
  js(static_cast<int>(target.position.x), static_cast<int>(target.position.y)) = 1.0;
  const DenseDeformationField after = regress_dense(f, js, ks, StructureTensorField(n, n));
  for (int y = 0; y < n; ++y) {
    for (int x = 0; x < n; ++x) {
      const double db = (before(x, y) - target.displacement).norm();
      const double da = (after(x, y) - target.displacement).norm();
      CHECK(da <= db + 1e-12);
    }
  }
}

TEST_CASE("regression input errors") {
  const ScalarMap js(8, 8, 1.0), ks(8, 8, 1.0);
  CHECK_THROWS_AS(regress_dense({}, js, ks, StructureTensorField(8, 8)), InvalidInput);
  SparseDisplacementField none;
  none.samples.push_back({{1, 1}, {1, 1}, 0.0});
  CHECK_THROWS_AS(regress_dense(none, js, ks, StructureTensorField(8, 8)), InvalidInput);
}

TEST_CASE("composition") {
  const DenseDeformationField t1(10, 10, Vec2{1.0, 2.0}), t2(10, 10, Vec2{-0.5, 0.25});
  const DenseDeformationField zero = zero_field(10, 10);
  CHECK(compose(t1, zero) == t1);
  CHECK(compose(zero, t1) == t1);
  const DenseDeformationField c = compose(t1, t2);
  for (const Vec2& v : c.values()) {
    CHECK(v.x == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(v.y == doctest::Approx(2.25).epsilon(1e-12));
  }
}

TEST_CASE("field upsampling") {
  CHECK(upsample_field(zero_field(5, 4), 10, 8) == zero_field(10, 8));
  const DenseDeformationField up = upsample_field(DenseDeformationField(32, 32, Vec2{1, 0}), 64, 64);
  for (const Vec2& v : up.values()) {
    CHECK(v.x == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(v.y == 0.0);
  }
  CHECK_THROWS_AS(upsample_field(zero_field(5, 5), 12, 10), InvalidInput);

  // Linear ramp in coarse pixel-center coordinates, sampled at fine centers.
  DenseDeformationField ramp(16, 16);
  for (int y = 0; y < 16; ++y) {
    for (int x = 0; x < 16; ++x) ramp(x, y) = {0.1 * x + 0.05 * y, -0.2 * y};
  }
  const DenseDeformationField f = upsample_field(ramp, 32, 32);
  for (int y = 1; y < 31; ++y) {
    for (int x = 1; x < 31; ++x) {
      const double cx = (x + 0.5) / 2 - 0.5, cy = (y + 0.5) / 2 - 0.5;
      CHECK(f(x, y).x == doctest::Approx(2 * (0.1 * cx + 0.05 * cy)).epsilon(1e-12));
      CHECK(f(x, y).y == doctest::Approx(2 * (-0.2 * cy)).epsilon(1e-12));
    }
  }
}

TEST_CASE("mean magnitude") {
  CHECK(mean_magnitude(DenseDeformationField(3, 3, Vec2{3, 4})) == 5.0);
  CHECK(mean_magnitude({}) == 0.0);
}
