#include <cmath>
#include <map>
#include <random>

#include "doctest.h"
#include "jsmreg/block_matching.hpp"
#include "jsmreg/registration.hpp"
#include "jsmreg/synth.hpp"
#include "support.hpp"

using namespace jsmreg;

namespace {

std::vector<double> block(const GrayImage& img, int cx, int cy, int half) {
  std::vector<double> v;
  for (int y = -half; y <= half; ++y) {
    for (int x = -half; x <= half; ++x) v.push_back(img(cx + x, cy + y));
  }
  return v;
}

double entropy_of_bins(const std::vector<double>& a, int bins) {
  std::map<int, int> h;
  for (double v : a) ++h[std::clamp(static_cast<int>(v * bins), 0, bins - 1)];
  double e = 0.0;
  for (auto [k, c] : h) {
    const double p = static_cast<double>(c) / a.size();
    e -= p * std::log(p);
  }
  return e;
}

}  // namespace

TEST_CASE("config validation") {
  BlockMatchConfig c;
  CHECK_NOTHROW(c.validate());
  c.block_size = 8;
  CHECK_THROWS_AS(c.validate(), InvalidInput);
  c.block_size = 3;
  CHECK_THROWS_AS(c.validate(), InvalidInput);
  c = {};
  c.bins = 4;
  CHECK_THROWS_AS(c.validate(), InvalidInput);
  c = {};
  c.search_radius = 0;
  CHECK_THROWS_AS(c.validate(), InvalidInput);
}

TEST_CASE("mutual information identities") {
  const GrayImage img = synth::textured_image(32, 32, 1);
  const auto a = block(img, 16, 16, 4);
  CHECK(local_mi(a, a, 32) == doctest::Approx(entropy_of_bins(a, 32)).epsilon(1e-12));
  CHECK(local_mi(a, a, 32) > 0.0);
  const std::vector<double> flat(a.size(), 0.4);
  CHECK(local_mi(flat, a, 32) == 0.0);
  CHECK(local_mi(a, flat, 32) == 0.0);
  CHECK_THROWS_AS(local_mi(a, std::vector<double>(3, 0.1), 32), InvalidInput);
}

TEST_CASE("finite-sample MI bias on independent noise") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double sum = 0.0, worst = 0.0;
  std::vector<double> a(64 * 64), b(64 * 64);
  for (int t = 0; t < 100; ++t) {
    for (double& v : a) v = u(rng);
    for (double& v : b) v = u(rng);
    const double mi = local_mi(a, b, 32);
    sum += mi;
    worst = std::max(worst, mi);
  }
  CHECK(sum / 100 < 0.15);
  CHECK(worst < 0.15);
}

TEST_CASE("identical images give zero displacement") {
  const GrayImage img = synth::textured_image(64, 64, 2);
  const SparseDisplacementField f = match_blocks(img, img, {});
  REQUIRE(!f.samples.empty());
  for (const auto& s : f.samples) CHECK(s.displacement == Vec2{});
}

TEST_CASE("translation is recovered and agrees with brute force") {
  const GrayImage ref = synth::textured_image(64, 64, 6);
  const GrayImage mov = synth::translate(ref, {3.0, -2.0});
  const BlockMatchConfig cfg;
  const SparseDisplacementField f = match_blocks(ref, mov, cfg);
  REQUIRE(f.confident_count() > 0);
  const int half = cfg.block_size / 2, r = cfg.search_radius;
  for (const auto& s : f.samples) {
    if (s.confidence > 0) CHECK(s.displacement == Vec2{3.0, -2.0});
    CHECK(s.position.x >= cfg.margin());
    CHECK(s.position.x < 64 - cfg.margin());
    const auto a = block(ref, static_cast<int>(s.position.x), static_cast<int>(s.position.y), half);
    double best = -1.0;
    Vec2 arg;
    for (int dy = -r; dy <= r; ++dy) {
      for (int dx = -r; dx <= r; ++dx) {
        const double mi = local_mi(
            a, block(mov, static_cast<int>(s.position.x) + dx, static_cast<int>(s.position.y) + dy, half), cfg.bins);
        if (mi > best + 1e-12) {
          best = mi;
          arg = {double(dx), double(dy)};
        }
      }
    }
    // Brute force scans raster order; compare the score, not the tie-break.
    CHECK(local_mi(a, block(mov, static_cast<int>(s.position.x + s.displacement.x),
                            static_cast<int>(s.position.y + s.displacement.y), half),
                   cfg.bins) == doctest::Approx(best).epsilon(1e-12));
  }
}

TEST_CASE("flat reference blocks are flagged") {
  ScalarMap m(64, 64, 0.5);
  const GrayImage tex = synth::textured_image(64, 64, 3);
  for (int y = 0; y < 64; ++y) {
    for (int x = 32; x < 64; ++x) m(x, y) = tex(x, y);
  }
  const GrayImage ref(m);
  const SparseDisplacementField f = match_blocks(ref, ref, {});
  int flat_checked = 0;
  for (const auto& s : f.samples) {
    if (s.position.x + 8 < 32) {
      CHECK(s.confidence == 0.0);
      ++flat_checked;
    }
  }
  CHECK(flat_checked > 0);
  CHECK(f.confident_count() > 0);
}

TEST_CASE("displacements stay in the search box and are deterministic") {
  const GrayImage a = support::random_image(64, 64, 1), b = support::random_image(64, 64, 2);
  BlockMatchConfig cfg;
  cfg.block_size = 9;
  cfg.search_radius = 3;
  const SparseDisplacementField f = match_blocks(a, b, cfg);
  for (const auto& s : f.samples) {
    CHECK(std::abs(s.displacement.x) <= 3);
    CHECK(std::abs(s.displacement.y) <= 3);
  }
  const SparseDisplacementField g = match_blocks(a, b, cfg);
  REQUIRE(f.samples.size() == g.samples.size());
  for (std::size_t i = 0; i < f.samples.size(); ++i) {
    CHECK(f.samples[i].displacement == g.samples[i].displacement);
    CHECK(f.samples[i].confidence == g.samples[i].confidence);
  }
}

TEST_CASE("residual shrinks after applying the recovered deformation") {
  const auto fx = synth::translation_fixture(4, 96, {2.5, -1.5});
  const SparseDisplacementField first = match_blocks(fx.ref, fx.mov, {});
  double m1 = 0.0;
  for (const auto& s : first.samples) m1 += s.displacement.norm() / first.samples.size();
  const GrayImage warped = warp(fx.mov, DenseDeformationField(96, 96, Vec2{2.0, -1.0}));
  const SparseDisplacementField second = match_blocks(fx.ref, warped, {});
  double m2 = 0.0;
  for (const auto& s : second.samples) m2 += s.displacement.norm() / second.samples.size();
  CHECK(m2 < m1);
}

TEST_CASE("image too small for one block") {
  const SparseDisplacementField f = match_blocks(GrayImage(20, 20, 0.5), GrayImage(20, 20, 0.5), {});
  CHECK(f.samples.empty());
  CHECK(f.warnings.size() == 1);
  CHECK_THROWS_AS(match_blocks(GrayImage(40, 40), GrayImage(40, 41), {}), InvalidInput);
}
