#include "jsmreg/synth.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace jsmreg::synth {

GrayImage textured_image(int width, int height, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  ScalarMap fine(width, height), coarse(width, height);
  for (double& v : fine.values()) v = uni(rng);
  for (double& v : coarse.values()) v = uni(rng);
  fine = gaussian_blur(fine, 1.5);
  coarse = gaussian_blur(coarse, 6.0);

  auto standardize = [](ScalarMap& m) {
    double mean = 0.0;
    for (double v : m.values()) mean += v;
    mean /= static_cast<double>(m.size());
    double var = 0.0;
    for (double v : m.values()) var += (v - mean) * (v - mean);
    const double sd = std::sqrt(var / static_cast<double>(m.size()));
    for (double& v : m.values()) v = (v - mean) / sd;
  };
  standardize(fine);
  standardize(coarse);
  ScalarMap out(width, height);
  double lo = 0.0, hi = 0.0;
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double v = fine.values()[i] + coarse.values()[i];
    out.values()[i] = v;
    lo = i == 0 ? v : std::min(lo, v);
    hi = i == 0 ? v : std::max(hi, v);
  }
  for (double& v : out.values()) v = 0.05 + 0.9 * (v - lo) / (hi - lo);
  return GrayImage::from_clamped(std::move(out));
}

GrayImage translate(const GrayImage& img, Vec2 t) {
  ScalarMap out(img.width(), img.height());
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) out(x, y) = img.sample(x - t.x, y - t.y);
  }
  return GrayImage::from_clamped(std::move(out));
}

Vec2 bump_displacement(const BumpSpec& spec, Vec2 x) {
  const Vec2 d = x - spec.center;
  const double g = std::exp(-(d.x * d.x + d.y * d.y) / (2.0 * spec.width * spec.width));
  const double n = spec.direction.norm();
  return (spec.peak * g / n) * spec.direction;
}

DenseDeformationField bump_field(int width, int height, const BumpSpec& spec) {
  DenseDeformationField f(width, height);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) f(x, y) = bump_displacement(spec, {double(x), double(y)});
  }
  return f;
}

Vec2 invert_bump(const BumpSpec& spec, Vec2 y) {
  Vec2 p = y;
  for (int i = 0; i < 100; ++i) {
    const Vec2 next = y - bump_displacement(spec, p);
    const bool converged = (next - p).norm() < 1e-13;
    p = next;
    if (converged) break;
  }
  return p;
}

GrayImage apply_bump(const GrayImage& ref, const BumpSpec& spec) {
  ScalarMap out(ref.width(), ref.height());
  for (int y = 0; y < ref.height(); ++y) {
    for (int x = 0; x < ref.width(); ++x) {
      const Vec2 src = invert_bump(spec, {double(x), double(y)});
      out(x, y) = ref.sample(src.x, src.y);
    }
  }
  return GrayImage::from_clamped(std::move(out));
}

GrayImage insert_blob(const GrayImage& img, const Blob& blob) {
  ScalarMap out = img.pixels();
  const Grid<char> m = disk_mask(img.width(), img.height(), blob.center, blob.radius);
  const GrayImage fill = blob.fill == BlobFill::texture ? textured_image(img.width(), img.height(), blob.texture_seed)
                                                        : GrayImage();
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      if (m(x, y)) out(x, y) = blob.fill == BlobFill::texture ? fill(x, y) : blob.value;
    }
  }
  return GrayImage::from_clamped(std::move(out));
}

Grid<char> disk_mask(int width, int height, Vec2 center, double radius) {
  Grid<char> m(width, height, 0);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      if ((Vec2{double(x), double(y)} - center).norm() < radius) m(x, y) = 1;
    }
  }
  return m;
}

LandmarkSet grid_landmarks(const DenseDeformationField& truth, int step, int margin) {
  LandmarkSet lms;
  for (int y = margin; y < truth.height() - margin; y += step) {
    for (int x = margin; x < truth.width() - margin; x += step) {
      const Vec2 r{double(x), double(y)};
      lms.push_back({r, r + truth(x, y)});
    }
  }
  return lms;
}

TranslationFixture translation_fixture(std::uint64_t seed, int size, Vec2 shift) {
  TranslationFixture f;
  f.ref = textured_image(size, size, seed);
  f.mov = translate(f.ref, shift);
  f.truth = DenseDeformationField(size, size, shift);
  return f;
}

BumpFixture bump_fixture(std::uint64_t seed, int size, bool with_blob, BlobFill fill) {
  BumpFixture f;
  f.ref = textured_image(size, size, seed);
  f.bump.center = {std::floor(size / 2.0), std::floor(size / 2.0)};
  f.mov = apply_bump(f.ref, f.bump);
  f.truth = bump_field(size, size, f.bump);
  if (with_blob) {
    f.has_blob = true;
    f.blob.center = f.bump.center + Vec2{24.0, -16.0};
    f.blob.fill = fill;
    f.blob.texture_seed = seed + 0x9e3779b97f4a7c15ULL;
    f.mov = insert_blob(f.mov, f.blob);
    f.blob_in_ref = invert_bump(f.bump, f.blob.center);
  }
  return f;
}

}  // namespace jsmreg::synth
